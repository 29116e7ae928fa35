#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "npmle/kernel.hpp"
#include "npmle/mixture.hpp"

namespace npmle {

enum class CertStatus { Proved, Inconclusive };

/// Machine-checkable record of the verified inequalities behind a W1 bound
/// to the true NPMLE and (optionally) an exact support count.  Every number
/// that enters a proved inequality is stored in constant_chain so the
/// certificate can be replayed by an auditor.  All inequalities carry a
/// fixed 1e-10-scale numerical margin in place of rigorous rounding-error
/// accounting.
struct Certificate {
  DiscreteMixture candidate;
  CertStatus status = CertStatus::Inconclusive;
  std::string failed_condition;  // empty when Proved

  double delta = 0;   // certified sup_R D - 1
  double c1 = 0;      // neighborhood radius of condition 1
  double c2 = 0;      // certified off-support gap at distance c1
  double lambda = 0;  // strong-concavity of the weight Hessian (+inf if k=1)
  double eta = 0;     // c1 + L*delta/c2

  std::optional<double> w1_bound;
  std::optional<int> support_count_proved;
  std::optional<double> parameter_distance_bound;

  std::map<std::string, double> constant_chain;
};

/// Runtime estimates of the paper-level landscape constants.  These are
/// evaluated at the candidate (the true optimizer is unknown), so they are
/// diagnostics for schedule selection only and never enter a proved
/// inequality.
struct DiagnosticEstimates {
  double A_hat;  // -max_j D''(y_j) at the candidate atoms
  double B_hat;  // off-support gap estimate at a practical radius
  double a_hat;  // A_hat / (2 C3 L^2 e^{4L^2}) with the explicit C3
};

/// Certified delta >= 0 with max over all of R of D_m <= 1 + delta.
/// The interval sup runs over [-L, L]; the tails are dominated by the
/// endpoint values since D is monotone there.
double certify_global_max(const DiscreteMixture& m, const Dataset& X,
                          double slack);

/// Largest proved c2 with D_m(y) <= 1 - c2 whenever d(y, supp(m)) >= c1.
/// May be <= 0, in which case W1 certification is not possible at this c1.
double off_support_gap(const DiscreteMixture& m, const Dataset& X, double c1,
                       double slack);

/// Smallest eigenvalue of -grad^2 ell restricted to the zero-sum weight
/// subspace on supp(m), minus a 1e-10 * ||H|| numerical margin.  +inf for
/// k = 1 (the condition is vacuous there).
double hessian_lambda(const DiscreteMixture& m, const Dataset& X);

DiagnosticEstimates diagnostics(const DiscreteMixture& m, const Dataset& X);

/// A-posteriori W1 certificate.  Requires the candidate to be a
/// fixed-support weight optimum within ~1e-8.  c1 <= 0 selects the
/// cube-root schedule (10 L delta / A_hat)^{1/3}.  Returns Proved with a
/// w1_bound, or Inconclusive with the failing condition named; never throws
/// on certification failure.
Certificate certify_w1(const DiscreteMixture& m, const Dataset& X,
                       double c1 = 0.0, double slack = 1e-13);

/// True iff w1_bound <= Delta(m)/3, which proves |supp(pi_hat)| >= k.
/// Always true for k = 1.
bool certify_support_lower(const DiscreteMixture& m, double w1_bound);

/// True proves |supp(pi_hat)| <= k.  Verifies that D''_{pi_hat} < 0 on the
/// c-neighborhood of every atom (at most one optimizer each) and that
/// D_{pi_hat} < 1 outside those neighborhoods; both are transferred from
/// the candidate through the certified likelihood-gap bound on the density
/// vector, which is sharper than the W1-Lipschitz transfer and makes the
/// check effectively independent of w1_bound (the premise that w1_bound
/// comes from a Proved certificate still stands; the equivalent displayed
/// constants are recorded).  Chain constants are appended to *chain when
/// given.
bool certify_support_upper(const DiscreteMixture& m, const Dataset& X,
                           double w1_bound, double c,
                           std::map<std::string, double>* chain = nullptr);

/// Static-support analogue: proves supp(pi_hat_S) = supp(m) together with
/// W1 and parameter-distance bounds, for the likelihood maximizer
/// constrained to the finite set S.
Certificate certify_static_support(const DiscreteMixture& m, const Dataset& X,
                                   const std::vector<double>& S, double tol);

}  // namespace npmle
