// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.  Each criterion pins its tolerance in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "npmle/certifier.hpp"
#include "npmle/em.hpp"
#include "npmle/io.hpp"
#include "npmle/newton.hpp"
#include "npmle/pipeline.hpp"
#include "npmle/rng.hpp"
#include "oracles.hpp"

using namespace npmle;

namespace {

int g_failures = 0;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

void report(int idx, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", idx,
              detail.c_str());
  if (!pass) ++g_failures;
}

Dataset fuzz_dataset(std::uint64_t seed, int n) {
  SplitMix64 rng = SplitMix64::stream(seed, "acceptance-fuzz");
  std::vector<double> xs;
  for (int i = 0; i < n; ++i) xs.push_back(rng.uniform(-2, 2));
  return make_dataset(std::move(xs), 2.0);
}

// Shared fixture solves, reused by criteria 3/4/7.
struct Fixture {
  std::string name;
  Dataset X;
  SolveReport report;
};

std::vector<Fixture> g_fixtures;

void criterion1_phase_transition() {
  Timer timer;
  bool pass = true;
  std::string detail;
  for (double a : {0.5, 0.8, 0.95}) {
    Dataset X = make_dataset({-a, a});
    try {
      SolveReport rep = solve_npmle(X);
      bool ok = rep.certificate.support_count_proved == 1 &&
                rep.final.atom_count() == 1;
      if (!ok) {
        pass = false;
        detail += " a=" + std::to_string(a) + " not certified k=1;";
      }
      g_fixtures.push_back({"two-point a=" + std::to_string(a), X, rep});
    } catch (const Error& e) {
      pass = false;
      detail += " a=" + std::to_string(a) + " threw (" + e.what() + ");";
    }
  }
  for (double a : {1.2, 1.5, 2.0}) {
    Dataset X = make_dataset({-a, a});
    try {
      SolveReport rep = solve_npmle(X);
      double ystar = oracle::symmetric_two_atom_location(a);
      bool ok = rep.certificate.support_count_proved == 2 &&
                rep.final.atom_count() == 2 &&
                std::abs(rep.final.locations[0] + ystar) <= 1e-8 &&
                std::abs(rep.final.locations[1] - ystar) <= 1e-8 &&
                std::abs(rep.final.weights[0] - 0.5) <= 1e-8 &&
                std::abs(rep.final.weights[1] - 0.5) <= 1e-8;
      if (!ok) {
        pass = false;
        detail += " a=" + std::to_string(a) + " failed k=2/location check;";
      }
      g_fixtures.push_back({"two-point a=" + std::to_string(a), X, rep});
    } catch (const Error& e) {
      pass = false;
      detail += " a=" + std::to_string(a) + " threw (" + e.what() + ");";
    }
  }
  double secs = timer.seconds();
  if (secs >= 30.0) {
    pass = false;
    detail += " runtime " + std::to_string(secs) + "s >= 30s;";
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "two-point phase transition (6 datasets, %.1fs)%s", secs,
                detail.c_str());
  report(1, pass, buf);
}

void criterion2_soundness_fuzz() {
  Timer timer;
  int proved = 0, violations = 0, exhausted = 0;
  SolveConfig cfg;
  for (int trial = 0; trial < 200; ++trial) {
    int n = 3 + trial % 10;
    Dataset X = fuzz_dataset(1000 + trial, n);
    SolveReport rep;
    try {
      rep = solve_npmle(X, cfg);
    } catch (const RefinementExhaustedError&) {
      ++exhausted;
      continue;
    }
    if (rep.certificate.status != CertStatus::Proved) continue;
    ++proved;
    double eps_cert = rep.refinement_log.back().epsilon;
    double eps_fine = std::max(eps_cert / 100, 2e-4);
    int oracle_k = 0;
    DiscreteMixture ref =
        oracle::reference_npmle(X, eps_fine, 4000, &oracle_k);
    const DiscreteMixture& cand = rep.certificate.candidate;
    if (w1_distance(ref, cand) > *rep.certificate.w1_bound) ++violations;
    if (rep.certificate.support_count_proved &&
        *rep.certificate.support_count_proved != oracle_k)
      ++violations;
  }
  double secs = timer.seconds();
  bool pass = violations == 0 && proved >= 100 && secs < 600.0;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "soundness fuzz: %d/200 proved, %d exhausted, %d violations "
                "(%.1fs)",
                proved, exhausted, violations, secs);
  report(2, pass, buf);
}

void criterion3_stationarity() {
  bool pass = true;
  std::string detail;
  for (const auto& f : g_fixtures) {
    if (f.report.certificate.status != CertStatus::Proved) continue;
    DEvaluator D(f.report.final, f.X);
    double worst0 = 0, worst1 = 0;
    for (double y : f.report.final.locations) {
      worst0 = std::max(worst0, std::abs(D.value(y) - 1.0));
      worst1 = std::max(worst1, std::abs(D.derivative(y, 1)));
    }
    double delta = certify_global_max(f.report.final, f.X, 1e-9);
    if (worst0 > 1e-8 || worst1 > 1e-8 || delta > 1e-8) {
      pass = false;
      detail += " " + f.name + ": (" + std::to_string(worst0) + "," +
                std::to_string(worst1) + "," + std::to_string(delta) + ");";
    }
  }
  report(3, pass,
         "stationarity after Newton: |D-1|, |D'|, delta all <= 1e-8 on " +
             std::to_string(g_fixtures.size()) + " fixtures" + detail);
}

void criterion4_shub_smale_rate() {
  bool pass = true;
  int checked = 0;
  std::string detail;
  for (const auto& f : g_fixtures) {
    if (!f.report.shub_smale.proved) continue;
    ++checked;
    NewtonTrace tr = newton_solve(f.report.shub_smale_point, f.X, 1e-15, 12);
    const auto& limit = tr.final();
    double d0 = param_distance(f.report.shub_smale_point, limit);
    if (d0 <= 1e-13) continue;  // started at the limit; envelope trivial
    for (int t = 1; t <= 4; ++t) {
      const DiscreteMixture& pit =
          t < static_cast<int>(tr.iterates.size()) ? tr.iterates[t] : limit;
      double dt = param_distance(pit, limit);
      double envelope = 1.05 * std::pow(2.0, 1.0 - std::pow(2.0, t)) * d0;
      if (dt > envelope) {
        pass = false;
        detail += " " + f.name + " t=" + std::to_string(t) + ";";
      }
    }
  }
  pass = pass && checked > 0;
  report(4, pass,
         "Shub-Smale 2^{1-2^t} envelope on " + std::to_string(checked) +
             " proved fixtures" + detail);
}

void criterion5_jacobian_hessian() {
  SplitMix64 rng = SplitMix64::stream(5, "acceptance-jacobian");
  bool pass = true;
  // gamma_jacobian vs central differences, 50 instances
  for (int trial = 0; trial < 50 && pass; ++trial) {
    int k = 1 + trial % 3;
    std::vector<double> w(k), y(k);
    double sum = 0;
    for (int j = 0; j < k; ++j) {
      w[j] = 0.2 + rng.next_unit();
      sum += w[j];
    }
    for (double& v : w) v /= sum;
    y[0] = rng.uniform(-1.5, -0.5);
    for (int j = 1; j < k; ++j) y[j] = y[j - 1] + rng.uniform(0.3, 1.2);
    DiscreteMixture m = make_mixture(w, y);
    int n = 2 + trial % 9;
    std::vector<double> xs;
    for (int i = 0; i < n; ++i) xs.push_back(rng.uniform(-2, 2));
    Dataset X = make_dataset(std::move(xs), 3.0);

    Eigen::MatrixXd J = gamma_jacobian(m, X);
    const double h = 1e-6;
    for (int c = 0; c < 2 * k && pass; ++c) {
      DiscreteMixture up = m, dn = m;
      if (c < k) {
        up.weights[c] += h;
        dn.weights[c] -= h;
      } else {
        up.locations[c - k] += h;
        dn.locations[c - k] -= h;
      }
      Eigen::VectorXd fd = (gamma(up, X) - gamma(dn, X)) / (2 * h);
      for (int r = 0; r < 2 * k; ++r)
        if (std::abs(J(r, c) - fd[r]) > 1e-6 * std::max(1.0, std::abs(J(r, c))))
          pass = false;
    }
  }
  // hessian_lambda vs directional second differences, 20 directions
  Dataset X = make_dataset({-1.9, -0.8, 0.1, 0.9, 1.7}, 2.0);
  DiscreteMixture m = optimize_weights({-1.8, -0.6, 0.4, 1.6}, X, 1e-12);
  DEvaluator D(m, X);
  int k = m.atom_count();
  const double h2 = 1e-4;
  double lam = hessian_lambda(m, X);
  for (int dir = 0; dir < 20 && pass; ++dir) {
    std::vector<double> v(k);
    double mean = 0;
    for (double& c : v) {
      c = rng.uniform(-1, 1);
      mean += c;
    }
    double nrm = 0;
    for (double& c : v) {
      c -= mean / k;
      nrm += c * c;
    }
    nrm = std::sqrt(nrm);
    for (double& c : v) c /= nrm;
    auto ll = [&](double t) {
      double s = 0;
      for (double x : X.points) {
        double den = 0;
        for (int j = 0; j < k; ++j)
          den += (m.weights[j] + t * v[j]) *
                 std::exp(-(x - m.locations[j]) * (x - m.locations[j]) / 2);
        s += std::log(den);
      }
      return s / X.size();
    };
    double fd = -(ll(h2) - 2 * ll(0) + ll(-h2)) / (h2 * h2);
    double an = 0;
    for (int i = 0; i < X.size(); ++i) {
      double r = 0;
      for (int j = 0; j < k; ++j) {
        double u = X.points[i] - m.locations[j];
        r += v[j] * std::exp(-u * u / 2) / D.dens()[i];
      }
      an += r * r;
    }
    an /= X.size();
    if (std::abs(an - fd) > 1e-5 * std::max(1.0, std::abs(an))) pass = false;
    if (lam > an + 1e-9) pass = false;  // lambda is the minimum of the form
  }
  report(5, pass, "analytic Jacobian and weight Hessian match finite differences");
}

void criterion6_fw_gap_decay() {
  Timer timer;
  bool pass = true;
  std::string detail;
  int degenerate = 0;
  for (int inst = 0; inst < 10; ++inst) {
    Dataset X = fuzz_dataset(600 + inst, 10);
    Grid g = build_grid(X.range_bound, 0.05);
    GridWeights w = frank_wolfe(X, g, 10000);
    std::vector<double> mins;
    double best = 1e300;
    for (double v : w.gap_history) {
      best = std::min(best, std::max(v, 1e-300));
      mins.push_back(best);
    }
    if (mins[10] <= 1e-12) {
      // already at the grid optimum: the G/(t+2) envelope holds with G ~ 0
      ++degenerate;
      continue;
    }
    // least-squares slope of log(min gap) vs log(t) over t in [10, 1e4]
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (std::size_t t = 10; t < mins.size(); ++t) {
      double lx = std::log(static_cast<double>(t)),
             ly = std::log(std::max(mins[t], 1e-16));
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++cnt;
    }
    double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    if (!(slope <= -0.9)) {
      pass = false;
      detail += " inst " + std::to_string(inst) + " slope " +
                std::to_string(slope) + ";";
    }
  }
  if (degenerate > 5) {
    pass = false;
    detail += " too many degenerate instances;";
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "Frank-Wolfe min-gap log-log slope <= -0.9 on 10 instances "
                "(%.1fs)%s",
                timer.seconds(), detail.c_str());
  report(6, pass, buf);
}

void criterion7_em_properties() {
  Timer timer;
  bool pass = true;
  std::string detail;

  // (a) likelihood ascent along EM traces from the fixtures
  for (const auto& f : g_fixtures) {
    auto m0 = f.report.final;
    for (auto& y : m0.locations) y += 0.02;  // nudge off the optimum
    try {
      EmTrace tr = em_solve(m0, f.X, 1e-11, 300);
      for (std::size_t i = 1; i < tr.log_likelihoods.size(); ++i)
        if (tr.log_likelihoods[i] < tr.log_likelihoods[i - 1] - 1e-12) {
          pass = false;
          detail += " monotonicity " + f.name + ";";
        }
    } catch (const Error&) {
      // collisions are legitimate EM failures, not monotonicity violations
    }
  }

  // (b) EM fixed point at Newton-certified solutions
  for (const auto& f : g_fixtures) {
    if (f.report.certificate.status != CertStatus::Proved) continue;
    DiscreteMixture next = em_step(f.report.final, f.X);
    if (param_distance(next, f.report.final) > 1e-9) {
      pass = false;
      detail += " fixed-point " + f.name + ";";
    }
  }

  // (c) spectral radius < 1 on >= 95% of 100 generic fixtures
  int contractive = 0, solved = 0;
  for (int t = 0; t < 100; ++t) {
    Dataset X = sample_iid("uniform[-1.5,1.5]", 25, 9000 + t);
    try {
      SolveReport rep = solve_npmle(X);
      ++solved;
      EmSpectrum s = em_jacobian_spectrum(rep.final, X);
      bool all_lt1 = s.stationary;
      for (double mod : s.moduli)
        if (!(mod < 1.0)) all_lt1 = false;
      if (all_lt1) ++contractive;
      else
        std::printf("    [criterion 7] non-contractive instance seed=%d\n",
                    9000 + t);
    } catch (const RefinementExhaustedError&) {
      std::printf("    [criterion 7] uncertified instance seed=%d\n", 9000 + t);
    }
  }
  if (contractive < 95) {
    pass = false;
    detail += " only " + std::to_string(contractive) + "/100 contractive;";
  }
  char buf[220];
  std::snprintf(buf, sizeof(buf),
                "EM ascent, fixed points, spectra (%d/100 contractive, %d "
                "solved, %.1fs)%s",
                contractive, solved, timer.seconds(), detail.c_str());
  report(7, pass, buf);
}

std::string g_crit8_line;
bool g_crit8_pass = false;

// Solves run early so criteria 3/4/7 see the clustered fixtures; the
// pass/fail line is printed in numeric position by criterion8_report().
void criterion8_clustered() {
  Timer timer;
  bool pass = true;
  std::string detail;
  for (int k : {2, 3, 4}) {
    Dataset X = sample_clustered(k, 100, 0.1, 77);
    // recover the construction's (recentred) cluster centers
    double scale = 3.0 * std::sqrt(std::log(k + 1.0));
    std::vector<double> centers(k);
    double mean = 0;
    for (int i = 0; i < k; ++i) {
      centers[i] = scale * (i + 1);
      mean += centers[i];
    }
    for (auto& c : centers) c -= mean / k;
    try {
      SolveReport rep = solve_npmle(X);
      bool ok = rep.certificate.support_count_proved == k &&
                rep.final.atom_count() == k;
      if (ok)
        for (int i = 0; i < k; ++i)
          if (std::abs(rep.final.locations[i] - centers[i]) > 0.2) ok = false;
      if (!ok) {
        pass = false;
        detail += " k=" + std::to_string(k) + " failed;";
      }
      g_fixtures.push_back({"clustered k=" + std::to_string(k), X, rep});
    } catch (const Error& e) {
      pass = false;
      detail += " k=" + std::to_string(k) + " threw (" + e.what() + ");";
    }
  }
  double secs = timer.seconds();
  if (secs >= 300) {
    pass = false;
    detail += " runtime >= 5min;";
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "clustered construction certifies k in {2,3,4} (%.1fs)%s", secs,
                detail.c_str());
  g_crit8_pass = pass;
  g_crit8_line = buf;
}

void criterion8_report() { report(8, g_crit8_pass, g_crit8_line); }

void criterion9_identity() {
  SplitMix64 rng = SplitMix64::stream(9, "acceptance-identity");
  bool pass = true;
  for (int trial = 0; trial < 1000; ++trial) {
    int k = 1 + trial % 6;
    std::vector<double> w(k), y;
    double sum = 0;
    for (int j = 0; j < k; ++j) {
      w[j] = 0.05 + rng.next_unit();
      sum += w[j];
    }
    for (double& v : w) v /= sum;
    while (static_cast<int>(y.size()) < k) {
      double cand = rng.uniform(-3, 3);
      bool ok = true;
      for (double v : y)
        if (std::abs(v - cand) < 1e-4) ok = false;
      if (ok) y.push_back(cand);
    }
    DiscreteMixture m = make_mixture(w, y);
    int n = 1 + trial % 25;
    std::vector<double> xs;
    for (int i = 0; i < n; ++i) xs.push_back(rng.uniform(-3, 3));
    Dataset X = make_dataset(std::move(xs), 3.0);
    if (std::abs(expected_d_identity(m, X) - 1.0) > 1e-12) pass = false;
  }
  report(9, pass, "sum_j p_j D(y_j) = 1 within 1e-12 on 1000 random pairs");
}

void criterion10_static_support() {
  bool pass = true;
  std::string detail;
  Dataset X = make_dataset({-0.8, 0.8});
  SolveReport st = solve_static(X, {-0.8, 0.0, 0.8});
  if (st.certificate.status != CertStatus::Proved ||
      st.final.atom_count() != 1 || st.final.locations[0] != 0.0) {
    pass = false;
    detail += " 3-point S failed;";
  }
  // closed-form cross check that D sits strictly below 1 at +-0.8
  if (!(oracle::two_point_d(0.8, 0.8) < 1.0)) {
    pass = false;
    detail += " closed form check;";
  }

  // fine S: static solve matches the pipeline's grid stage
  Grid fine = build_grid(1.0, 0.01);
  SolveReport st_fine = solve_static(X, fine.points);
  SolveConfig cfg;
  cfg.epsilon = 0.01;
  cfg.max_refinements = 1;
  DiscreteMixture grid_stage;
  try {
    grid_stage = solve_npmle(X, cfg).grid_stage;
  } catch (const RefinementExhaustedError& e) {
    grid_stage = e.last_report().grid_stage;
  }
  if (grid_stage.atom_count() == 0 ||
      w1_distance(st_fine.final, grid_stage) > 1e-6) {
    pass = false;
    detail += " fine-S mismatch;";
  }
  report(10, pass, "static support certification" + detail);
}

}  // namespace

int main() {
  criterion1_phase_transition();
  criterion8_clustered();  // solves early; the fixtures feed criteria 3/4/7
  criterion2_soundness_fuzz();
  criterion3_stationarity();
  criterion4_shub_smale_rate();
  criterion5_jacobian_hessian();
  criterion6_fw_gap_decay();
  criterion7_em_properties();
  criterion8_report();
  criterion9_identity();
  criterion10_static_support();
  if (g_failures > 0) {
    std::printf("%d criterion(s) FAILED\n", g_failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
