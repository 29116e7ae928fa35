#pragma once

#include <memory>
#include <vector>

#include "npmle/kernel.hpp"
#include "npmle/mixture.hpp"

namespace npmle {

/// A finite candidate-support set: {-L, L} subset points subset [-L, L],
/// |points| <= 3L/epsilon, covering radius <= epsilon.
struct Grid {
  std::vector<double> points;
  double epsilon;
  double range_bound;

  int size() const { return static_cast<int>(points.size()); }
};

/// Dense weight vector over a grid together with the per-iteration duality
/// gaps of the solver that produced it.
struct GridWeights {
  Grid grid;
  std::vector<double> weights;
  std::vector<double> gap_history;

  /// Nonzero-weight atoms as a mixture.
  DiscreteMixture to_mixture() const;
};

/// Uniform epsilon-spaced grid on [-L, L] including both endpoints, merged
/// with extra_points and deduplicated.
Grid build_grid(double L, double epsilon, const std::vector<double>& extra_points = {});

/// Frank-Wolfe conditional gradient on the grid: pi^(t+1) =
/// (t pi^(t) + 2 delta_{y_t})/(t+2) with y_t the grid argmax of D (ties break
/// toward the smaller location).  Starts from the grid point nearest 0.
/// Runs `iterations` steps, or stops early once the duality gap drops to
/// gap_target (gap_target <= 0 disables early stopping).
GridWeights frank_wolfe(const Dataset& X, const Grid& grid, long iterations,
                        double gap_target = 0.0);

/// g(pi) = max_{y in grid} (D_pi(y) - 1); certified upper bound on the
/// log-likelihood suboptimality over the grid.
double duality_gap(const GridWeights& w, const Dataset& X);

/// Zeroes weights <= iota and renormalizes.  Fails (TooMuchMassDropped) if
/// the dropped mass reaches 1/2.
GridWeights round_small_atoms(const GridWeights& w, double iota);

/// Exact fixed-support MLE: maximizes the log-likelihood over the weight
/// simplex on `support` by an active-set damped Newton method until
/// max_j D(y_j) <= 1 + tol over all of `support` and D(y_j) >= 1 - tol on
/// every retained atom.  Zero-weight atoms are dropped from the output.
DiscreteMixture optimize_weights(const std::vector<double>& support,
                                 const Dataset& X, double tol);

}  // namespace npmle
