#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "npmle/kernel.hpp"
#include "npmle/mixture.hpp"

namespace npmle {

/// Kantorovich quantities proving quadratic Newton convergence from a given
/// iterate.  proved implies h < 1 and that the r-ball stays inside the
/// mixture parameter space (all weights positive, locations ordered); the
/// implementation additionally requires h <= 1/4 so that the doubly
/// exponential error envelope 2^{1-2^t} is guaranteed, not just convergence.
struct ShubSmaleReport {
  double alpha = 0;  // ||J^{-1} gamma||, the Newton step norm
  double beta = 0;   // bound on ||J^{-1}|| over the r-ball
  double lipC = 0;   // Lipschitz constant of the Jacobian on the ball
  double h = 0;      // alpha * beta * lipC
  double r = 0;      // alpha / (1 - h)
  bool proved = false;
};

/// Newton iteration record.  Failure (leaving the parameter space or a
/// singular Jacobian encountered mid-run) is recorded, not thrown.
struct NewtonTrace {
  std::vector<DiscreteMixture> iterates;  // includes the start point
  std::vector<double> residual_norms;     // ||gamma||_inf per iterate
  bool failed = false;
  std::string failure_reason;

  const DiscreteMixture& final() const { return iterates.back(); }
};

/// gamma(m) = (D(y_1)-1, ..., D(y_k)-1, D'(y_1), ..., D'(y_k)).
Eigen::VectorXd gamma(const DiscreteMixture& m, const Dataset& X);

/// Analytic Jacobian of gamma in the relaxed 2k-dimensional parametrization
/// (p_1..p_k, y_1..y_k); the weight-sum constraint is not eliminated, as
/// solutions of gamma = 0 satisfy it automatically.
Eigen::MatrixXd gamma_jacobian(const DiscreteMixture& m, const Dataset& X);

/// Newton-Raphson on gamma.  Stops when ||gamma||_inf <= tol or after
/// max_iter steps; declares failure if an iterate acquires a non-positive
/// weight or out-of-order locations.  Throws SingularJacobian only if the
/// very first Jacobian is numerically singular.
NewtonTrace newton_solve(const DiscreteMixture& m0, const Dataset& X,
                         double tol, int max_iter);

/// Kantorovich-style check at m.  beta is obtained from the smallest
/// singular value of the Jacobian at m, lowered by lipC * r to cover the
/// whole ball (solved self-consistently); lipC comes from the explicit
/// He_j-envelope chain with a density floor over the ball.
ShubSmaleReport shub_smale_check(const DiscreteMixture& m, const Dataset& X);

}  // namespace npmle
