#include "npmle/certifier.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "npmle/errors.hpp"

namespace npmle {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;
constexpr double kPhiPrimeMax = 0.24197072451914337;  // e^{-1/2}/sqrt(2 pi)
constexpr double kNumMargin = 1e-10;
constexpr double kInf = std::numeric_limits<double>::infinity();

// sup of |phi'(u)| = |u| e^{-u^2/2}/sqrt(2 pi) over [lo, hi]; |phi'| is even
// and unimodal with peak at |u| = 1.
double phi_prime_sup(double lo, double hi) {
  double alo = std::min(std::abs(lo), std::abs(hi));
  double ahi = std::max(std::abs(lo), std::abs(hi));
  if (lo <= 0 && hi >= 0) alo = 0;
  auto val = [](double a) { return a * std::exp(-a * a / 2) / kSqrt2Pi; };
  if (alo <= 1.0 && ahi >= 1.0) return kPhiPrimeMax;
  return std::max(val(alo), val(ahi));
}

// Zero-sum orthonormal basis (k x (k-1)).
Eigen::MatrixXd zero_sum_basis(int k) {
  Eigen::MatrixXd raw(k, k - 1);
  raw.setZero();
  for (int c = 0; c < k - 1; ++c) {
    raw(c, c) = 1.0;
    raw(c + 1, c) = -1.0;
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(k, k - 1);
  return Q;
}

struct PSpaceBound {
  double u_cap;   // uniform cap on (P_hat - P_m)/P_m
  double u_hat;   // certified per-point |u_i| bound
  double rms2;    // certified (1/n) sum u_i^2 bound
  bool ok;        // u_hat < 1/2
};

// Likelihood-gap control of the optimizer's density vector: if
// ell(opt) - ell(m) >= 0 and int (D_m - 1) d(opt) <= gap, then with
// u_i = P_opt(x_i)/P_m(x_i) - 1 one has (1/n) sum u_i^2 <= 2(1+u_cap) gap.
PSpaceBound p_space_bound(const DEvaluator& D, double gap) {
  double den_min = *std::min_element(D.dens().begin(), D.dens().end());
  PSpaceBound b;
  b.u_cap = std::max(1.0 / den_min - 1.0, 0.0);
  b.rms2 = 2.0 * (1.0 + b.u_cap) * std::max(gap, 0.0);
  b.u_hat = std::sqrt(static_cast<double>(D.data().size()) * b.rms2);
  b.ok = b.u_hat < 0.5;
  return b;
}

// sqrt((1/n) sum 1/den_i^2)
double rms_inv_den(const DEvaluator& D) {
  double s = 0;
  for (double d : D.dens()) s += 1.0 / (d * d);
  return std::sqrt(s / static_cast<double>(D.dens().size()));
}

}  // namespace

double certify_global_max(const DiscreteMixture& m, const Dataset& X,
                          double slack) {
  double L = X.range_bound;
  double U = sup_d_over_interval(m, X, -L, L, slack);
  return std::max(0.0, U - 1.0);
}

double off_support_gap(const DiscreteMixture& m, const Dataset& X, double c1,
                       double slack) {
  if (!(c1 > 0))
    throw Error(ErrorCode::InvalidArgument, "off_support_gap: c1 > 0");
  double L = X.range_bound;
  DEvaluator D(m, X);
  double U = -kInf;

  // Left tail: sup over (-inf, e] is D(min(e, -L)) .. D(e); D increases up
  // to -L, so the tail beyond [-L,L] is dominated by its right endpoint.
  double el = m.min_location() - c1;
  if (el <= -L) {
    U = std::max(U, D.value(el) + 1e-14);
  } else {
    U = std::max(U, certified_sup(D, 0, -L, el, slack));
  }
  double er = m.max_location() + c1;
  if (er >= L) {
    U = std::max(U, D.value(er) + 1e-14);
  } else {
    U = std::max(U, certified_sup(D, 0, er, L, slack));
  }
  for (int j = 0; j + 1 < m.atom_count(); ++j) {
    double a = m.locations[j] + c1, b = m.locations[j + 1] - c1;
    if (a < b)
      U = std::max(U, certified_sup(D, 0, a, b, slack));
    else if (a == b)
      U = std::max(U, D.value(a) + 1e-14);
  }
  return 1.0 - U - kNumMargin;
}

double hessian_lambda(const DiscreteMixture& m, const Dataset& X) {
  int k = m.atom_count();
  if (k == 1) return kInf;
  int n = X.size();
  DEvaluator D(m, X);
  Eigen::MatrixXd R(n, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) {
      double u = X.points[i] - m.locations[j];
      R(i, j) = std::exp(-u * u / 2) / D.dens()[i];
    }
  Eigen::MatrixXd H = (R.transpose() * R) / n;  // = -hessian of ell in weights
  Eigen::MatrixXd Q = zero_sum_basis(k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q.transpose() * H * Q);
  double norm = H.norm();
  return es.eigenvalues().minCoeff() - 1e-10 * norm;
}

DiagnosticEstimates diagnostics(const DiscreteMixture& m, const Dataset& X) {
  DEvaluator D(m, X);
  DiagnosticEstimates d;
  d.A_hat = -kInf;
  for (double y : m.locations) d.A_hat = std::max(d.A_hat, D.derivative(y, 2));
  d.A_hat = -d.A_hat;
  double L = X.range_bound;
  double C3 = hermite_envelope(3) * std::exp(-0.5);
  d.a_hat = d.A_hat / (2 * C3 * L * L * std::exp(4 * L * L));
  // Practical radius for the gap estimate; a_hat itself is astronomically
  // small once e^{4L^2} enters, which would make the estimate vacuous.
  double rB = m.atom_count() >= 2 ? std::min(m.min_gap() / 3, 1.0) : 1.0;
  double worst = -kInf;
  int g = 2000;
  for (int i = 0; i <= g; ++i) {
    double z = -L + 2 * L * i / g;
    bool off = true;
    for (double y : m.locations)
      if (std::abs(z - y) < rB) off = false;
    if (off) worst = std::max(worst, D.value(z));
  }
  d.B_hat = worst == -kInf ? 0.0 : 1.0 - worst;
  return d;
}

Certificate certify_w1(const DiscreteMixture& m, const Dataset& X, double c1,
                       double slack) {
  const double L = X.range_bound;
  const int k = m.atom_count();
  const int n = X.size();
  if (m.min_location() < -L || m.max_location() > L)
    throw Error(ErrorCode::InvalidArgument,
                "certify_w1: supp(m) must lie in [-L, L]");

  Certificate cert;
  cert.candidate = m;
  auto& chain = cert.constant_chain;
  auto fail = [&](const std::string& cond) {
    cert.status = CertStatus::Inconclusive;
    cert.failed_condition = cond;
    return cert;
  };

  DEvaluator D(m, X);

  // Premise: the candidate is a fixed-support weight optimum.
  double kkt = 0;
  for (double y : m.locations) kkt = std::max(kkt, std::abs(D.value(y) - 1.0));
  chain["kkt_residual"] = kkt;
  double ident = std::abs(expected_d_identity(m, X) - 1.0);
  chain["identity_residual"] = ident;
  if (kkt > 1e-8) return fail("premise: candidate not a weight optimum (KKT residual > 1e-8)");
  if (ident > 1e-8) return fail("premise: sum p_j D(y_j) identity violated");

  // Condition 2: delta with max_R D <= 1 + delta.
  double delta = certify_global_max(m, X, slack);
  cert.delta = delta;
  double delta_eff = std::max(delta, 1e-14);
  chain["delta"] = delta;
  chain["delta_eff"] = delta_eff;

  // Schedule for c1 (cube-root in delta, from the exact-optimum analysis).
  DiagnosticEstimates diag = diagnostics(m, X);
  chain["A_hat"] = diag.A_hat;
  if (c1 <= 0) {
    double Ahat = std::max(diag.A_hat, 1e-8);
    c1 = std::cbrt(10 * L * delta_eff / Ahat);
    chain["c1_schedule"] = 1;  // cube-root
  } else {
    chain["c1_schedule"] = 0;  // caller override
  }
  c1 = std::min(c1, m.min_gap() / 3);
  c1 = std::min(c1, L / 2);
  cert.c1 = c1;
  chain["c1"] = c1;

  // Condition 1: off-support gap.
  double gap_slack = std::max(1e-13, std::min(slack, diag.A_hat * c1 * c1 / 20));
  double c2 = off_support_gap(m, X, c1, gap_slack);
  cert.c2 = c2;
  chain["c2"] = c2;
  if (c2 <= kNumMargin) return fail("condition 1: off-support gap c2 <= 0");

  cert.eta = c1 + L * delta / c2;
  chain["eta"] = cert.eta;

  // Transport plan projecting the optimizer onto supp(m): mass within
  // disp_near of an atom moves to it, the remaining q_far moves at most
  // r_far.  The classic plan uses the c1-neighborhoods with far mass
  // delta/(delta+c2).
  double r_far = std::max(m.min_location() + L, L - m.max_location());
  for (int j = 0; j + 1 < k; ++j)
    r_far = std::max(r_far, (m.locations[j + 1] - m.locations[j]) / 2);
  double disp_near = c1;
  double q_far = delta / (delta + c2);
  chain["r_far"] = r_far;

  // Certified control of the optimizer's density vector.
  PSpaceBound ps = p_space_bound(D, delta);
  chain["u_cap"] = ps.u_cap;
  chain["u_hat"] = ps.u_hat;
  if (!ps.ok) return fail("density-vector gap bound too weak (u_hat >= 1/2)");

  // Sharper plan when band concavity certifies.  With sup D''_m <= -A_band
  // on every [y_j - cu, y_j + cu] and an off-band gap g > corr0, every
  // optimizer atom is confined to a band (its D value is exactly 1 but
  // D_opt <= D_m + corr0 < 1 off the bands), and inside a band concavity
  // pins it within r_hat of the candidate atom.  Then the far mass is zero.
  {
    double corr0 = rms_inv_den(D) * std::sqrt(ps.rms2) / (1 - ps.u_hat);
    chain["transfer_corr0"] = corr0;
    for (double cu = 0.02; cu < std::min(m.min_gap() / 2.2, L); cu *= 1.7) {
      double a_band = kInf;
      for (double y : m.locations) {
        double lo = std::max(y - cu, -L), hi = std::min(y + cu, L);
        a_band = std::min(a_band, -certified_sup(D, 2, lo, hi, 1e-6));
      }
      if (!(a_band > kNumMargin)) continue;
      double g = off_support_gap(m, X, cu, 1e-9);
      if (!(g > corr0 + kNumMargin)) continue;
      double r_hat = std::sqrt(2 * (delta + corr0) / a_band) +
                     std::sqrt(2 * (delta + kkt) / a_band);
      if (r_hat > cu) continue;  // localization must land inside the band
      if (r_hat < disp_near) {
        disp_near = r_hat;
        q_far = 0;
        chain["band_radius"] = cu;
        chain["band_curvature"] = a_band;
        chain["band_gap"] = g;
        chain["band_r_hat"] = r_hat;
      }
    }
  }
  double w_star = (1 - q_far) * disp_near + q_far * r_far;
  chain["q_far_mass"] = q_far;
  chain["disp_near"] = disp_near;
  chain["w_star"] = w_star;

  // Condition 3: strong concavity over the weights.
  double lambda = hessian_lambda(m, X);
  cert.lambda = lambda;
  chain["lambda"] = std::isinf(lambda) ? -1 : lambda;
  if (k >= 2 && lambda <= 0) return fail("condition 3: weight Hessian not strictly concave");

  // Condition 4 bookkeeping: the paper-form branch test (recorded only; the
  // explicit chain below is the operative exclusion).
  double mass_window = m.mass_in(-10, 10);
  double branch_exp = mass_window >= 0.1 ? 5.1 : 14.0;
  chain["mass_window"] = mass_window;
  chain["branch_exponent"] = branch_exp;
  double branch_rhs = std::isinf(lambda)
                          ? kInf
                          : std::pow(lambda, 3) /
                                (std::pow(static_cast<double>(k), 3) *
                                 std::exp(branch_exp * L * L));
  chain["branch_ok"] = cert.eta <= branch_rhs ? 1.0 : 0.0;
  chain["lip_ell_global"] = std::exp(2 * L * L - 0.5);
  chain["ell3_global"] = 2 * std::exp(6 * L * L);

  double c_weight = 0;
  double span = m.span();
  if (k >= 2) {
    // Per-point shift of the density under the transport plan: near mass
    // moves <= disp_near, far mass moves <= r_far.
    double far_shift = q_far * std::min(kPhiPrimeMax * r_far, 1.0 / kSqrt2Pi);
    double G = 0, u_seg = 0, pstar_min = kInf, gram = 0;
    for (int i = 0; i < n; ++i) {
      double x = X.points[i];
      double cap = 0;
      for (double y : m.locations)
        cap = std::max(cap,
                       phi_prime_sup(x - y - disp_near, x - y + disp_near));
      double shift = disp_near * cap + far_shift;
      double P = D.dens()[i] / kSqrt2Pi;
      double pfloor = P * (1 - ps.u_hat) - shift;
      pstar_min = std::min(pstar_min, pfloor);
      if (pfloor <= 0) break;
      G += shift / pfloor;
      u_seg = std::max(u_seg, ps.u_hat + shift / P);
      double ti = shift / P + ps.u_hat;  // |sum_j v_j e_ij| / den_i
      gram += ti * ti;
    }
    chain["p_star_floor"] = pstar_min;
    if (pstar_min <= 0) return fail("projected-optimizer density floor nonpositive");
    G /= n;
    gram /= n;
    chain["g_likelihood_leg"] = G;
    double s_min = 1.0 / (2.0 * (1.0 + u_seg));
    chain["u_seg"] = u_seg;
    chain["s_min"] = s_min;

    // Route 1 (strong concavity of the likelihood segment):
    // s_min lambda c^2 / k <= G + c * kkt on the weights-l1 distance.
    double a = s_min * lambda / k;
    double c_seg = (kkt + std::sqrt(kkt * kkt + 4 * a * G)) / (2 * a);
    chain["c_weight_segment"] = c_seg;

    // Route 2 (Gram): the projected optimizer satisfies
    // |sum_j v_j e_ij| / den_i <= t_i pointwise, and
    // (1/n) sum (v . r_i)^2 = v' H0 v >= lambda ||v||_2^2 on zero-sum v, so
    // ||v||_1 <= sqrt(k / lambda * (1/n) sum t_i^2).
    double c_gram = std::sqrt(static_cast<double>(k) * gram / lambda);
    chain["c_weight_gram"] = c_gram;

    c_weight = std::min({c_seg, c_gram, 2.0});
  }
  chain["c_weight_l1"] = c_weight;
  chain["span"] = span;

  cert.w1_bound = w_star + (span / 2) * c_weight + kNumMargin;
  chain["w1_bound"] = *cert.w1_bound;
  cert.status = CertStatus::Proved;
  return cert;
}

bool certify_support_lower(const DiscreteMixture& m, double w1_bound) {
  SeparationStats s = separation_stats(m);
  return w1_bound <= s.delta / 3;
}

bool certify_support_upper(const DiscreteMixture& m, const Dataset& X,
                           double w1_bound, double c,
                           std::map<std::string, double>* chain) {
  if (!(c > 0) || !(w1_bound >= 0) || !std::isfinite(w1_bound))
    throw Error(ErrorCode::InvalidArgument,
                "certify_support_upper: need c > 0 and finite w1_bound >= 0");
  const double L = X.range_bound;
  const int k = m.atom_count();
  if (c >= m.min_gap() / 2) return false;  // bands must stay disjoint

  DEvaluator D(m, X);
  double delta = certify_global_max(m, X, 1e-13);
  PSpaceBound ps = p_space_bound(D, delta);
  if (!ps.ok) return false;
  double rinv2 = rms_inv_den(D);
  // |D^(j)_opt(z) - D^(j)_m(z)| <= corr_j uniformly in z (Cauchy-Schwarz
  // against the certified density-vector bound).
  double corr0 = rinv2 * std::sqrt(ps.rms2) / (1 - ps.u_hat);
  double corr2 = corr0;  // hermite_envelope(2) == hermite_envelope(0) == 1

  // (i) the optimizer's D'' is strictly negative on every c-band.
  double worst_d2 = -kInf;
  for (double y : m.locations) {
    double lo = std::max(y - c, -L), hi = std::min(y + c, L);
    worst_d2 = std::max(worst_d2, certified_sup(D, 2, lo, hi, 1e-9));
  }
  bool cond_i = worst_d2 + corr2 + kNumMargin < 0;

  // (ii) the optimizer's D stays below 1 outside the bands.
  double gap = off_support_gap(m, X, c, 1e-11);
  bool cond_ii = gap > corr0 + kNumMargin;

  if (chain) {
    (*chain)["su_c"] = c;
    (*chain)["su_corr0"] = corr0;
    (*chain)["su_corr2"] = corr2;
    (*chain)["su_band_d2_sup"] = worst_d2;
    (*chain)["su_offband_gap"] = gap;
    double e4 = std::exp(4 * L * L);
    (*chain)["su_C_ex_second"] =
        (corr2 + kNumMargin) / (L * L * e4 * (w1_bound + c * L));
    (*chain)["su_C_ex_zeroth"] =
        w1_bound > 0 ? (corr0 + kNumMargin) / (e4 * w1_bound) : 0.0;
    (*chain)["su_proved"] = cond_i && cond_ii ? 1.0 : 0.0;
    (*chain)["su_k"] = k;
  }
  return cond_i && cond_ii;
}

Certificate certify_static_support(const DiscreteMixture& m, const Dataset& X,
                                   const std::vector<double>& S, double tol) {
  Certificate cert;
  cert.candidate = m;
  auto& chain = cert.constant_chain;
  auto fail = [&](const std::string& cond) {
    cert.status = CertStatus::Inconclusive;
    cert.failed_condition = cond;
    return cert;
  };
  const int k = m.atom_count();
  const int n = X.size();

  for (double y : m.locations)
    if (std::find(S.begin(), S.end(), y) == S.end())
      throw Error(ErrorCode::SupportNotInS,
                  "certify_static_support: candidate atom not in S");

  DEvaluator D(m, X);
  double kkt = 0;
  for (double y : m.locations) kkt = std::max(kkt, std::abs(D.value(y) - 1.0));
  chain["kkt_residual"] = kkt;
  if (kkt > tol) return fail("premise: candidate not optimal on supp(m) within tol");

  // D over S \ supp(m): finite evaluations, no interval search needed.
  double off_max = -kInf;
  double r_S = 0;  // farthest transport distance from S to supp(m)
  for (double z : S) {
    if (std::find(m.locations.begin(), m.locations.end(), z) != m.locations.end())
      continue;
    off_max = std::max(off_max, D.value(z));
    double dist = kInf;
    for (double y : m.locations) dist = std::min(dist, std::abs(z - y));
    r_S = std::max(r_S, dist);
  }
  bool has_off = off_max > -kInf;
  double g_S = has_off ? 1.0 - off_max - kNumMargin : 1.0;
  cert.c2 = g_S;
  chain["off_support_gap_S"] = g_S;

  double delta_S = std::max(0.0, std::max(has_off ? off_max - 1 : 0.0, kkt)) + kNumMargin;
  cert.delta = delta_S;
  chain["delta_S"] = delta_S;

  double lambda = hessian_lambda(m, X);
  cert.lambda = lambda;
  chain["lambda"] = std::isinf(lambda) ? -1 : lambda;

  if (!has_off) {
    // S == supp(m): the static MLE lives on supp(m) by definition; only the
    // weight distance needs the strong-concavity step (no transport leg).
    cert.c1 = 0;
    cert.eta = 0;
    double v2 = 0;
    if (k >= 2) {
      if (lambda <= 0) return fail("condition 3: weight Hessian not strictly concave");
      PSpaceBound ps = p_space_bound(D, delta_S);
      chain["u_hat"] = ps.u_hat;
      if (!ps.ok) return fail("density-vector gap bound too weak (u_hat >= 1/2)");
      double s_min = 1.0 / (2.0 * (1.0 + ps.u_hat));
      v2 = std::sqrt(static_cast<double>(k)) * kkt / (s_min * lambda) + kNumMargin;
    }
    cert.parameter_distance_bound = v2;
    cert.w1_bound = (m.span() / 2) * std::sqrt(static_cast<double>(k)) * v2 + kNumMargin;
    cert.support_count_proved = k;
    cert.status = CertStatus::Proved;
    return cert;
  }

  if (g_S <= kNumMargin) return fail("off-support gap over S nonpositive");
  if (k >= 2 && lambda <= 0) return fail("condition 3: weight Hessian not strictly concave");

  double q = kkt / (kkt + g_S);
  double w_star = q * r_S;
  cert.c1 = 0;
  cert.eta = q;
  chain["q_far_mass"] = q;
  chain["r_S"] = r_S;
  chain["w_star"] = w_star;

  PSpaceBound ps = p_space_bound(D, delta_S);
  chain["u_hat"] = ps.u_hat;
  if (!ps.ok) return fail("density-vector gap bound too weak (u_hat >= 1/2)");

  // No optimizer mass off supp(m): any S-atom of the optimizer has
  // D_opt = 1 there, but D_opt <= D_m + corr0 <= 1 - g_S + corr0.
  double corr0 = rms_inv_den(D) * std::sqrt(ps.rms2) / (1 - ps.u_hat);
  chain["corr0"] = corr0;
  if (!(corr0 + kNumMargin < g_S))
    return fail("cannot exclude optimizer mass on S \\ supp(m)");

  // Weight distance on the shared support: strong concavity of the
  // likelihood segment, or the Gram route through the density-vector
  // control, whichever is sharper.
  double v2 = 0, c_weight = 0;
  if (k >= 2) {
    double far_shift = q * std::min(kPhiPrimeMax * r_S, 1.0 / kSqrt2Pi);
    double G = 0, u_seg = 0, pmin = kInf, gram = 0;
    for (int i = 0; i < n; ++i) {
      double P = D.dens()[i] / kSqrt2Pi;
      double pfloor = P * (1 - ps.u_hat) - far_shift;
      pmin = std::min(pmin, pfloor);
      if (pfloor <= 0) break;
      G += far_shift / pfloor;
      u_seg = std::max(u_seg, ps.u_hat + far_shift / P);
      double ti = far_shift / P + ps.u_hat;
      gram += ti * ti;
    }
    if (pmin <= 0) return fail("projected-optimizer density floor nonpositive");
    G /= n;
    gram /= n;
    double s_min = 1.0 / (2.0 * (1.0 + u_seg));
    chain["g_likelihood_leg"] = G;
    chain["s_min"] = s_min;
    double a = s_min * lambda;  // against ||v||_2^2 directly
    double kk = std::sqrt(static_cast<double>(k)) * kkt;
    double v2_seg = (kk + std::sqrt(kk * kk + 4 * a * G)) / (2 * a);
    double v2_gram = std::sqrt(gram / lambda);
    v2 = std::min(v2_seg, v2_gram) + kNumMargin;
    c_weight = std::sqrt(static_cast<double>(k)) * v2;
  }
  chain["v2"] = v2;

  // Support equality also needs every candidate atom to retain mass.
  double p_min = *std::min_element(m.weights.begin(), m.weights.end());
  if (k >= 2 && !(v2 + q < p_min))
    return fail("cannot exclude a vanishing candidate atom");

  cert.parameter_distance_bound = v2;
  cert.w1_bound = w_star + (m.span() / 2) * c_weight + kNumMargin;
  chain["w1_bound"] = *cert.w1_bound;
  cert.support_count_proved = k;
  cert.status = CertStatus::Proved;
  return cert;
}

}  // namespace npmle
