#include "npmle/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "npmle/errors.hpp"
#include "npmle/rng.hpp"

namespace npmle {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// Shrink iota until the dropped mass stays clearly below 1/2.
double safe_iota(const GridWeights& w, double iota) {
  for (int tries = 0; tries < 60; ++tries) {
    double dropped = 0;
    for (double wj : w.weights)
      if (wj <= iota) dropped += wj;
    if (dropped < 0.45) return iota;
    iota /= 2;
  }
  return 0;
}

// Scan radii for the support-size upper certificate.  Weak-curvature
// instances need small bands (the concave cap around an atom can be
// narrow), well-separated ones profit from wide bands, so the scan is
// geometric across the admissible range.
std::vector<double> upper_radii(const DiscreteMixture& m, double L) {
  std::vector<double> out;
  double cap = std::min(m.min_gap() / 2.2, L);
  for (double c = 0.02; c < cap; c *= 1.7) out.push_back(c);
  if (cap > 2e-4) out.push_back(cap * 0.95);
  return out;
}

}  // namespace

SolveReport solve_npmle(const Dataset& X, const SolveConfig& config) {
  const double L = X.range_bound;
  auto t0 = std::chrono::steady_clock::now();

  SolveReport report;
  report.range_warning =
      static_cast<double>(X.size()) < L * L * L * L;

  double eps = config.epsilon;
  for (int round = 0; round < config.max_refinements; ++round, eps *= config.epsilon_shrink) {
    RefinementRecord rec;
    rec.epsilon = eps;
    rec.gap = std::numeric_limits<double>::quiet_NaN();

    Grid grid;
    try {
      grid = build_grid(L, eps);
    } catch (const Error&) {
      rec.cert_status = "skipped: epsilon out of range";
      report.refinement_log.push_back(rec);
      continue;
    }
    double gap_target = config.gap_target > 0 ? config.gap_target : eps * eps;
    // Work cap: one solver round stays near a fixed flop budget even when
    // refinement pushes the grid fine.
    long iter_cap = std::min<long>(
        config.fw_iteration_cap,
        std::max<long>(500, 400'000'000 /
                                (static_cast<long>(grid.size()) * X.size())));
    GridWeights fw = frank_wolfe(X, grid, iter_cap, gap_target);
    double gap = fw.gap_history.back();
    rec.gap = gap;

    long t_run = static_cast<long>(fw.gap_history.size());
    double iota = config.mass_drop_iota > 0
                      ? config.mass_drop_iota
                      : std::exp(-L * L) *
                            std::pow(static_cast<double>(t_run), -0.25) *
                            std::sqrt(eps);
    GridWeights rounded = round_small_atoms(fw, safe_iota(fw, iota));
    DiscreteMixture cand = rounded.to_mixture();
    try {
      // Exact weight optimum on the unmerged grid support; diagnostics for
      // the merge radius are taken here, and the first round's value is the
      // reference point for the static-support comparison.  On very fine
      // grids the polish may stall on redundant near-duplicate atoms; the
      // raw rounded weights are good enough for merging then.
      cand = optimize_weights(cand.locations, X, 1e-12);
    } catch (const Error&) {
    }
    if (round == 0) report.grid_stage = cand;

    DiagnosticEstimates diag0 = diagnostics(cand, X);
    double merge_radius =
        std::max(3 * eps, 2 * std::sqrt(std::max(gap, 0.0) /
                                        std::max(diag0.A_hat, 1e-6)));
    merge_radius = std::min(merge_radius, 1.0);
    cand = merge_adjacent(cand, merge_radius);
    try {
      cand = optimize_weights(cand.locations, X, 1e-12);
    } catch (const Error&) {
      rec.cert_status = "inconclusive: weight polish failed";
      report.refinement_log.push_back(rec);
      continue;
    }

    // Location polish before certification: the certificate is a-posteriori,
    // so sharpening the candidate first only shrinks delta.
    NewtonTrace polish =
        newton_solve(cand, X, config.newton_tol, config.polish_steps);
    if (!polish.failed) cand = polish.final();
    if (cand.min_location() < -L || cand.max_location() > L) {
      rec.cert_status = "inconclusive: candidate left [-L, L]";
      report.refinement_log.push_back(rec);
      continue;
    }

    Certificate cert =
        certify_w1(cand, X, config.c1_override, config.cert_slack);
    report.diag = diagnostics(cand, X);

    if (cert.status != CertStatus::Proved) {
      rec.cert_status = "inconclusive: " + cert.failed_condition;
      report.refinement_log.push_back(rec);
      report.final = cand;
      report.certificate = cert;
      continue;
    }

    bool lower = certify_support_lower(cand, *cert.w1_bound);
    bool upper = false;
    for (double c : upper_radii(cand, L)) {
      if (certify_support_upper(cand, X, *cert.w1_bound, c,
                                &cert.constant_chain)) {
        upper = true;
        break;
      }
    }
    if (!lower || !upper) {
      std::ostringstream os;
      os << "inconclusive: support count (lower=" << (lower ? "yes" : "no")
         << ", upper=" << (upper ? "yes" : "no") << ")";
      rec.cert_status = os.str();
      report.refinement_log.push_back(rec);
      report.final = cand;
      report.certificate = cert;
      continue;
    }

    cert.support_count_proved = cand.atom_count();
    double delta_sep = separation_stats(cand).delta;
    cert.parameter_distance_bound =
        std::isinf(delta_sep) ? 0.0 : 12.0 * (*cert.w1_bound) / delta_sep;
    rec.cert_status = "proved";
    report.refinement_log.push_back(rec);
    report.solve_seconds = seconds_since(t0);

    // Certified: establish the quadratic-convergence start point, then run
    // Newton to the requested tolerance.
    auto t1 = std::chrono::steady_clock::now();
    DiscreteMixture ss_point = cand;
    ShubSmaleReport ss = shub_smale_check(ss_point, X);
    for (int extra = 0; extra < 8 && !ss.proved; ++extra) {
      NewtonTrace one = newton_solve(ss_point, X, 1e-300, 1);
      if (one.failed || one.iterates.size() < 2) break;
      ss_point = one.final();
      ss = shub_smale_check(ss_point, X);
    }
    report.shub_smale = ss;
    report.shub_smale_point = ss.proved ? ss_point : cand;
    report.newton_trace = newton_solve(report.shub_smale_point, X,
                                       config.newton_tol, 100);
    report.final = report.newton_trace.failed ? cand
                                              : report.newton_trace.final();
    report.certificate = cert;
    report.newton_seconds = seconds_since(t1);
    return report;
  }

  report.solve_seconds = seconds_since(t0);
  if (report.final.atom_count() == 0 && !report.refinement_log.empty()) {
    // Never even reached a candidate: keep a placeholder point mass at 0.
    report.final = make_mixture({1.0}, {0.0});
  }
  throw RefinementExhaustedError(
      "solve_npmle: no certificate after max_refinements rounds", report);
}

SolveReport solve_static(const Dataset& X, const std::vector<double>& S_in,
                         double tol) {
  if (S_in.empty())
    throw Error(ErrorCode::InvalidArgument, "solve_static: S must be non-empty");
  std::vector<double> S = S_in;
  std::sort(S.begin(), S.end());
  S.erase(std::unique(S.begin(), S.end()), S.end());
  double L = X.range_bound;
  bool intersects = false;
  for (double s : S)
    if (s >= -3 * L && s <= 3 * L) intersects = true;
  if (!intersects)
    throw Error(ErrorCode::InvalidArgument,
                "solve_static: S must intersect [-3L, 3L]");

  auto t0 = std::chrono::steady_clock::now();
  SolveReport report;
  report.range_warning = static_cast<double>(X.size()) < L * L * L * L;
  DiscreteMixture m = optimize_weights(S, X, std::min(tol, 1e-10));
  report.final = m;
  report.grid_stage = m;
  report.certificate = certify_static_support(m, X, S, tol);
  report.diag = diagnostics(m, X);
  RefinementRecord rec;
  rec.epsilon = 0;
  rec.gap = 0;
  rec.cert_status = report.certificate.status == CertStatus::Proved
                        ? "proved"
                        : "inconclusive: " + report.certificate.failed_condition;
  report.refinement_log.push_back(rec);
  report.solve_seconds = seconds_since(t0);
  return report;
}

Dataset sample_clustered(int k, int per_cluster, double spread,
                         std::uint64_t rng_seed) {
  if (k < 1 || per_cluster < 1 || !(spread > 0) || spread > 0.1)
    throw Error(ErrorCode::InvalidArgument,
                "sample_clustered: need k >= 1, per_cluster >= 1, 0 < spread <= 0.1");
  const double C = 3.0;
  double scale = C * std::sqrt(std::log(static_cast<double>(k) + 1));
  std::vector<double> centers(k);
  double mean = 0;
  for (int i = 0; i < k; ++i) {
    centers[i] = scale * (i + 1);
    mean += centers[i];
  }
  mean /= k;
  for (double& c : centers) c -= mean;

  SplitMix64 rng = SplitMix64::stream(rng_seed, "sample_clustered");
  std::vector<double> pts;
  pts.reserve(static_cast<std::size_t>(k) * per_cluster);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < per_cluster; ++j)
      pts.push_back(centers[i] + rng.uniform(-spread, spread));
  return make_dataset(std::move(pts));
}

namespace {

bool parse_bracket_pair(const std::string& s, const std::string& prefix,
                        double& a, double& b) {
  if (s.rfind(prefix + "[", 0) != 0 || s.back() != ']') return false;
  std::string body = s.substr(prefix.size() + 1, s.size() - prefix.size() - 2);
  std::replace(body.begin(), body.end(), ',', ' ');
  std::istringstream is(body);
  return static_cast<bool>(is >> a >> b) && a < b;
}

}  // namespace

Dataset sample_iid(const std::string& spec, int n, std::uint64_t rng_seed) {
  if (n < 1)
    throw Error(ErrorCode::InvalidArgument, "sample_iid: n >= 1");
  SplitMix64 rng = SplitMix64::stream(rng_seed, "sample_iid:" + spec);
  std::vector<double> pts;
  pts.reserve(n);
  double a, b;
  if (parse_bracket_pair(spec, "uniform", a, b)) {
    for (int i = 0; i < n; ++i) pts.push_back(rng.uniform(a, b));
  } else if (parse_bracket_pair(spec, "truncated-gaussian", a, b)) {
    for (int i = 0; i < n; ++i) {
      double v = rng.normal();
      while (v < a || v > b) v = rng.normal();
      pts.push_back(v);
    }
  } else if (spec.rfind("gaussian-mixture(", 0) == 0 && spec.back() == ')') {
    std::string body = spec.substr(17, spec.size() - 18);
    std::vector<double> ws, ms;
    std::istringstream is(body);
    std::string part;
    while (std::getline(is, part, ',')) {
      auto at = part.find('@');
      if (at == std::string::npos)
        throw Error(ErrorCode::UnknownDescriptor,
                    "sample_iid: component must be weight@mean");
      ws.push_back(std::stod(part.substr(0, at)));
      ms.push_back(std::stod(part.substr(at + 1)));
    }
    if (ws.empty())
      throw Error(ErrorCode::UnknownDescriptor, "sample_iid: empty mixture");
    double total = 0;
    for (double w : ws) total += w;
    for (int i = 0; i < n; ++i) {
      double u = rng.next_unit() * total, acc = 0;
      std::size_t comp = 0;
      for (std::size_t j = 0; j < ws.size(); ++j) {
        acc += ws[j];
        if (u <= acc) {
          comp = j;
          break;
        }
      }
      pts.push_back(ms[comp] + rng.normal());
    }
  } else {
    throw Error(ErrorCode::UnknownDescriptor,
                "sample_iid: unknown descriptor \"" + spec + "\"");
  }
  double amax = 0;
  for (double x : pts) amax = std::max(amax, std::abs(x));
  double L = std::max(1.0, std::ceil(amax));
  return make_dataset(std::move(pts), L);
}

HarnessSummary genericity_harness(int trials, const std::string& spec, int n,
                                  const SolveConfig& config) {
  if (trials < 1)
    throw Error(ErrorCode::InvalidArgument, "genericity_harness: trials >= 1");
  HarnessSummary sum;
  sum.all_certified = true;
  sum.all_diagnostics_positive = true;
  sum.C_report = 0;
  for (int t = 1; t <= trials; ++t) {
    Dataset X = sample_iid(spec, n, static_cast<std::uint64_t>(t));
    HarnessRow row;
    row.seed = static_cast<std::uint64_t>(t);
    row.n = n;
    row.L = X.range_bound;
    try {
      SolveReport rep = solve_npmle(X, config);
      row.certified = true;
      row.k = rep.final.atom_count();
      row.min_gap = rep.final.min_gap();
      row.A_hat = rep.diag.A_hat;
      row.B_hat = rep.diag.B_hat;
      row.w1_bound = rep.certificate.w1_bound.value_or(-1);
    } catch (const RefinementExhaustedError& e) {
      row.certified = false;
      row.k = e.last_report().final.atom_count();
      row.min_gap = 0;
      row.A_hat = e.last_report().diag.A_hat;
      row.B_hat = e.last_report().diag.B_hat;
      row.w1_bound = -1;
      sum.all_certified = false;
    }
    if (!(row.A_hat > 0) || !(row.B_hat > 0))
      sum.all_diagnostics_positive = false;
    sum.C_report = std::max(
        sum.C_report, static_cast<double>(row.k) / (row.L * row.L));
    sum.rows.push_back(row);
  }
  return sum;
}

}  // namespace npmle
