#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "npmle/certifier.hpp"
#include "npmle/em.hpp"
#include "npmle/errors.hpp"
#include "npmle/grid_solver.hpp"
#include "npmle/newton.hpp"

namespace npmle {

/// End-to-end solver configuration.  All defaults are deterministic; no
/// field depends on a clock or environment.
struct SolveConfig {
  double epsilon = 0.1;
  double epsilon_shrink = 0.5;
  int max_refinements = 12;
  double gap_target = 0;       // <= 0: use epsilon^2
  double newton_tol = 1e-11;
  double mass_drop_iota = 0;   // <= 0: e^{-L^2} t^{-1/4} eps^{1/2}
  double c1_override = 0;      // <= 0: certifier schedule
  long fw_iteration_cap = 20000;
  double cert_slack = 1e-13;
  int polish_steps = 25;       // pre-certification Newton polish cap
};

struct RefinementRecord {
  double epsilon;
  double gap;
  std::string cert_status;  // "proved", "inconclusive: <condition>", ...
};

/// Full record of one pipeline run.
struct SolveReport {
  DiscreteMixture final;
  Certificate certificate;
  ShubSmaleReport shub_smale;
  DiscreteMixture shub_smale_point;  // iterate at which the check proved
  NewtonTrace newton_trace;
  DiagnosticEstimates diag{0, 0, 0};
  std::vector<RefinementRecord> refinement_log;
  DiscreteMixture grid_stage;  // polished weights on the grid support
  bool range_warning = false;  // n < L^4 heuristic from the sample-size assumption
  double solve_seconds = 0;    // refinement loop (grid phase)
  double newton_seconds = 0;   // polish + certification follow-up
};

/// Grid solve -> round -> merge -> weight polish -> Newton polish ->
/// certify (W1 + both support counts); on Inconclusive the grid spacing is
/// halved and the loop repeats.  On success runs the Shub-Smale check and a
/// final Newton solve.  Throws RefinementExhausted (carrying the best
/// report via last_report()) if max_refinements runs never certify.
SolveReport solve_npmle(const Dataset& X, const SolveConfig& config = {});

/// Fixed-support variant: weight MLE on S plus the static certificate; no
/// Newton on locations.
SolveReport solve_static(const Dataset& X, const std::vector<double>& S,
                         double tol = 1e-12);

/// RefinementExhausted carries the best attempt.
class RefinementExhaustedError : public Error {
 public:
  RefinementExhaustedError(const std::string& what, SolveReport report)
      : Error(ErrorCode::RefinementExhausted, what), report_(std::move(report)) {}
  const SolveReport& last_report() const { return report_; }

 private:
  SolveReport report_;
};

/// k clusters centered at C*i*sqrt(log(k+1)) (C = 3, recentred to mean
/// zero), per_cluster uniform points within +-spread of each center.
Dataset sample_clustered(int k, int per_cluster, double spread,
                         std::uint64_t rng_seed);

/// Descriptors: "uniform[a,b]", "gaussian-mixture(w@m,w@m,...)",
/// "truncated-gaussian[a,b]".  Deterministic given seed; range_bound is
/// max|x_i| rounded up to an integer and floored at 1.
Dataset sample_iid(const std::string& spec, int n, std::uint64_t rng_seed);

struct HarnessRow {
  std::uint64_t seed;
  int n;
  double L;
  bool certified;
  int k;
  double min_gap;
  double A_hat;
  double B_hat;
  double w1_bound;
};

struct HarnessSummary {
  std::vector<HarnessRow> rows;
  bool all_certified;
  bool all_diagnostics_positive;  // A_hat > 0 and B_hat > 0 on every trial
  double C_report;                // max over trials of k / L^2
};

/// Monte-Carlo spot checks of the genericity and support-size claims.
HarnessSummary genericity_harness(int trials, const std::string& spec, int n,
                                  const SolveConfig& config = {});

}  // namespace npmle
