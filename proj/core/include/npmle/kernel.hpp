#pragma once

#include <vector>

#include "npmle/mixture.hpp"

namespace npmle {

/// The observed sample, sorted ascending, together with a range bound
/// L >= max|x_i|.  L is clamped to at least 1.
struct Dataset {
  std::vector<double> points;
  double range_bound;

  int size() const { return static_cast<int>(points.size()); }
};

/// Build a dataset; if range_bound <= 0 it defaults to max(1, max|x_i|).
Dataset make_dataset(std::vector<double> points, double range_bound = 0.0);

/// Uniform bounds on |D^(j)| and on the W1-Lipschitz modulus of
/// pi -> D^(j)_pi, valid for any mixture supported in [-L,L] and any data in
/// [-L,L]^n.  sup_bound = M_j e^{2L^2} with M_j = sup_t |H_j(t) e^{-t^2/2}|;
/// lipschitz_in_w1 = M_j e^{4L^2 - 1/2}.  Values overflow to +inf for
/// L >~ 13; the solver itself only uses data-adaptive bounds.
struct DerivativeBounds {
  int order;
  double sup_bound;
  double lipschitz_in_w1;
};

/// sup_t |H_j(t) e^{-t^2/2}| for 0 <= j <= 4 (1, e^{-1/2}, 1, ~1.38013, 3).
double hermite_envelope(int j);

/// Mixture density P_m(x) = sum_j p_j exp(-(x-y_j)^2/2)/sqrt(2 pi).
double mixture_density(const DiscreteMixture& m, double x);

/// (1/n) sum_i log P_m(x_i).
double log_likelihood(const DiscreteMixture& m, const Dataset& X);

/// H_j(t) = e^{t^2/2} (d/dt)^j e^{-t^2/2} via the recurrence
/// H_{j+1} = -t H_j - j H_{j-1}; H_0 = 1, H_1 = -t.  0 <= j <= 8.
double hermite(int j, double t);

/// Cached evaluator for D_{m,X} and its derivatives: den_i = P_m(x_i)
/// sqrt(2 pi) is computed once (compensated summation), after which every
/// evaluation costs O(n).  All certifier and solver inner loops go through
/// this type.
class DEvaluator {
 public:
  DEvaluator(const DiscreteMixture& m, const Dataset& X);

  /// j-th derivative of D at y (j = 0 is D itself).  Supports j <= 4.
  double derivative(double y, int j) const;
  double value(double y) const { return derivative(y, 0); }

  /// (1/n) sum_i 1/den_i:  |D^(j)(z)| <= hermite_envelope(j) * mean_inv_den()
  /// for every z, which is the data-adaptive replacement for the e^{2L^2}
  /// bound.
  double mean_inv_den() const { return mean_inv_den_; }
  /// Data-adaptive uniform bound on |D^(j)|.
  double derivative_sup(int j) const;

  const std::vector<double>& dens() const { return den_; }
  const DiscreteMixture& mixture() const { return m_; }
  const Dataset& data() const { return X_; }

 private:
  DiscreteMixture m_;
  Dataset X_;
  std::vector<double> den_;  // sum_j p_j e^{-(x_i-y_j)^2/2}
  double mean_inv_den_;
};

/// j-th derivative of D_{m,X} at y, 0 <= j <= 3.
double d_derivative(const DiscreteMixture& m, const Dataset& X, double y,
                    int j);

/// sum_j p_j D_m(y_j); equals 1 up to rounding for every valid input.
double expected_d_identity(const DiscreteMixture& m, const Dataset& X);

/// Uniform bounds for order j over [-L,L]-supported mixtures (see
/// DerivativeBounds).  0 <= j <= 3, L >= 1.
DerivativeBounds derivative_bound(int j, double L);

/// Certified upper bound for sup over [lo,hi] of the j-th derivative of D:
/// returns U with sup <= U <= sup + slack.  Branch-and-bound with the
/// first-order Lipschitz envelope B_{j+1} w/2 and the curvature envelope
/// B_{j+2} w^2/8 per cell, both from derivative_sup().  [lo,hi] must lie in
/// [-L,L]; deterministic.
double certified_sup(const DEvaluator& D, int j, double lo, double hi,
                     double slack);

/// Certified upper bound U for sup over [lo,hi] of D itself with
/// sup <= U <= sup + slack.  Parts of [lo,hi] outside [-L,L] are handled by
/// the monotonicity of D on the tails.
double sup_d_over_interval(const DiscreteMixture& m, const Dataset& X,
                           double lo, double hi, double slack);

}  // namespace npmle
