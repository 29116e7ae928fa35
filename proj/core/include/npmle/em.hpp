#pragma once

#include <optional>
#include <vector>

#include "npmle/kernel.hpp"
#include "npmle/mixture.hpp"

namespace npmle {

/// EM iteration record.  log_likelihoods[i] corresponds to iterates[i]; the
/// classical ascent property (non-decreasing up to 1e-12) is checked by the
/// test suite against these values.
struct EmTrace {
  std::vector<DiscreteMixture> iterates;
  std::vector<double> log_likelihoods;
  std::vector<double> param_errors;  // vs. reference, when supplied
  std::optional<double> rate_estimate;
};

/// Eigenvalue moduli of the finite-difference Jacobian of the EM map at m,
/// sorted descending.  Only meaningful at (near-)stationary points;
/// `stationary` records whether ||gamma||_inf <= 1e-8 held.
struct EmSpectrum {
  std::vector<double> moduli;
  bool stationary;
};

/// One EM step: p~_i = p_i D(y_i), y~_i = y_i + D'(y_i)/D(y_i), both update
/// formulas applied simultaneously from the old parameters.  Throws
/// AtomCollision if the new locations cross or coincide.
DiscreteMixture em_step(const DiscreteMixture& m, const Dataset& X);

/// Iterates em_step until the parameter-distance step size drops to tol or
/// max_iter is reached.  With a reference, rate_estimate is the median of
/// successive error ratios over the last 10 iterations.
EmTrace em_solve(const DiscreteMixture& m0, const Dataset& X, double tol,
                 int max_iter,
                 const std::optional<DiscreteMixture>& reference = std::nullopt);

EmSpectrum em_jacobian_spectrum(const DiscreteMixture& m, const Dataset& X);

}  // namespace npmle
