#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "npmle/certifier.hpp"
#include "npmle/errors.hpp"
#include "npmle/newton.hpp"

namespace npmle::oracle {

double w1_coupling(const DiscreteMixture& a, const DiscreteMixture& b) {
  std::vector<double> wa = a.weights, wb = b.weights;
  std::size_t i = 0, j = 0;
  double cost = 0;
  while (i < wa.size() && j < wb.size()) {
    double moved = std::min(wa[i], wb[j]);
    cost += moved * std::abs(a.locations[i] - b.locations[j]);
    wa[i] -= moved;
    wb[j] -= moved;
    if (wa[i] <= 0) ++i;
    if (j < wb.size() && wb[j] <= 0) ++j;
  }
  return cost;
}

double two_point_d(double a, double y) {
  return std::exp(-y * y / 2) * std::cosh(a * y);
}

double symmetric_two_atom_location(double a, double tol) {
  // With pi = (delta_{-t} + delta_t)/2 and X = {-a, a}:
  //   den(x)  = (e^{-(x-t)^2/2} + e^{-(x+t)^2/2}) / 2
  //   D'(t)   = ((a-t) e^{-(a-t)^2/2} + (-a-t) e^{-(a+t)^2/2}) / (2 den(a))
  // using the +-a symmetry.  The root in (0, a) is the stationary location.
  auto dprime_sign = [&](double t) {
    double num = (a - t) * std::exp(-(a - t) * (a - t) / 2) -
                 (a + t) * std::exp(-(a + t) * (a + t) / 2);
    return num;
  };
  double lo = 1e-12, hi = a;
  if (!(dprime_sign(lo) > 0) || !(dprime_sign(hi) < 0))
    throw std::runtime_error("symmetric_two_atom_location: no sign change (a <= 1?)");
  while (hi - lo > tol) {
    double mid = (lo + hi) / 2;
    (dprime_sign(mid) > 0 ? lo : hi) = mid;
  }
  return (lo + hi) / 2;
}

DiscreteMixture reference_npmle(const Dataset& X, double eps_fine,
                                long fw_iters, int* merged_support_count) {
  Grid grid = build_grid(X.range_bound, eps_fine);
  GridWeights fw = frank_wolfe(X, grid, fw_iters, eps_fine * eps_fine / 4);
  double iota = 1e-4;
  double dropped = 1;
  while (iota > 1e-12) {
    dropped = 0;
    for (double w : fw.weights)
      if (w <= iota) dropped += w;
    if (dropped < 0.4) break;
    iota /= 4;
  }
  GridWeights rounded = round_small_atoms(fw, iota);
  DiscreteMixture cand = rounded.to_mixture();
  DiagnosticEstimates diag = diagnostics(cand, X);
  double gap = fw.gap_history.back();
  double radius = std::max(3 * eps_fine,
                           5 * std::sqrt(std::max(gap, 0.0) /
                                         std::max(diag.A_hat, 1e-6)));
  DiscreteMixture merged = merge_adjacent(cand, std::min(radius, 1.0));
  DiscreteMixture polished = optimize_weights(merged.locations, X, 1e-11);
  if (merged_support_count) *merged_support_count = polished.atom_count();
  // Location polish so the reference sits at the stationary point instead
  // of the eps_fine grid; without it the grid quantization (~eps_fine/2)
  // would drown the certificates' bounds.
  try {
    NewtonTrace tr = newton_solve(polished, X, 1e-12, 60);
    if (!tr.failed) return tr.final();
  } catch (const Error&) {
  }
  return polished;
}

}  // namespace npmle::oracle
