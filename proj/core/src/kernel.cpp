#include "npmle/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <tuple>

#include "npmle/errors.hpp"

namespace npmle {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310002;

// He_j(t): probabilists' Hermite polynomial, He_j = (-1)^j H_j, so that
// (d/dy)^j e^{-(x-y)^2/2} = He_j(x-y) e^{-(x-y)^2/2}.
double he(int j, double t) {
  double a = 1.0, b = t;  // He_0, He_1
  if (j == 0) return a;
  if (j == 1) return b;
  for (int s = 2; s <= j; ++s) {
    double c = t * b - (s - 1) * a;
    a = b;
    b = c;
  }
  return b;
}

}  // namespace

double hermite_envelope(int j) {
  switch (j) {
    case 0: return 1.0;
    case 1: return std::exp(-0.5);
    case 2: return 1.0;
    case 3: {
      // max of |(3t - t^3) e^{-t^2/2}| at t^2 = 3 - sqrt(6).
      double t2 = 3.0 - std::sqrt(6.0);
      return std::sqrt(t2) * std::sqrt(6.0) * std::exp(-t2 / 2.0);
    }
    case 4: return 3.0;  // |He_4(0)| = 3 dominates the other critical points
    default:
      throw Error(ErrorCode::OrderTooLarge, "hermite_envelope: j <= 4");
  }
}

Dataset make_dataset(std::vector<double> points, double range_bound) {
  if (points.empty())
    throw Error(ErrorCode::InvalidArgument, "make_dataset: need n >= 1");
  std::sort(points.begin(), points.end());
  double amax = std::max(std::abs(points.front()), std::abs(points.back()));
  double L = range_bound > 0 ? range_bound : amax;
  L = std::max(L, 1.0);
  if (L < amax)
    throw Error(ErrorCode::InvalidArgument,
                "make_dataset: range_bound < max|x_i|");
  return Dataset{std::move(points), L};
}

double mixture_density(const DiscreteMixture& m, double x) {
  // Kahan summation over atoms.
  double s = 0, comp = 0;
  for (int j = 0; j < m.atom_count(); ++j) {
    double u = x - m.locations[j];
    double term = m.weights[j] * std::exp(-u * u / 2);
    double y = term - comp;
    double t = s + y;
    comp = (t - s) - y;
    s = t;
  }
  return s / kSqrt2Pi;
}

double log_likelihood(const DiscreteMixture& m, const Dataset& X) {
  double s = 0;
  for (double x : X.points) s += std::log(mixture_density(m, x));
  return s / X.size();
}

double hermite(int j, double t) {
  if (j < 0 || j > 8)
    throw Error(ErrorCode::OrderTooLarge, "hermite: 0 <= j <= 8");
  // H_j = (-1)^j He_j
  double v = he(j, t);
  return (j % 2 == 0) ? v : -v;
}

DEvaluator::DEvaluator(const DiscreteMixture& m, const Dataset& X)
    : m_(m), X_(X) {
  den_.resize(X.points.size());
  double inv_sum = 0;
  for (std::size_t i = 0; i < X.points.size(); ++i) {
    den_[i] = mixture_density(m, X.points[i]) * kSqrt2Pi;
    inv_sum += 1.0 / den_[i];
  }
  mean_inv_den_ = inv_sum / static_cast<double>(X.points.size());
}

double DEvaluator::derivative(double y, int j) const {
  if (j < 0 || j > 4)
    throw Error(ErrorCode::OrderTooLarge, "DEvaluator: 0 <= j <= 4");
  double s = 0, comp = 0;
  for (std::size_t i = 0; i < X_.points.size(); ++i) {
    double u = X_.points[i] - y;
    double term = he(j, u) * std::exp(-u * u / 2) / den_[i];
    double yk = term - comp;
    double t = s + yk;
    comp = (t - s) - yk;
    s = t;
  }
  return s / static_cast<double>(X_.points.size());
}

double DEvaluator::derivative_sup(int j) const {
  return hermite_envelope(j) * mean_inv_den_;
}

double d_derivative(const DiscreteMixture& m, const Dataset& X, double y,
                    int j) {
  if (j < 0 || j > 3)
    throw Error(ErrorCode::OrderTooLarge, "d_derivative: 0 <= j <= 3");
  return DEvaluator(m, X).derivative(y, j);
}

double expected_d_identity(const DiscreteMixture& m, const Dataset& X) {
  DEvaluator D(m, X);
  double s = 0, comp = 0;
  for (int j = 0; j < m.atom_count(); ++j) {
    double term = m.weights[j] * D.value(m.locations[j]);
    double y = term - comp;
    double t = s + y;
    comp = (t - s) - y;
    s = t;
  }
  return s;
}

DerivativeBounds derivative_bound(int j, double L) {
  if (j < 0 || j > 3)
    throw Error(ErrorCode::OrderTooLarge, "derivative_bound: 0 <= j <= 3");
  if (L < 1)
    throw Error(ErrorCode::InvalidArgument, "derivative_bound: L >= 1");
  double Mj = hermite_envelope(j);
  DerivativeBounds b;
  b.order = j;
  b.sup_bound = Mj * std::exp(2 * L * L);
  b.lipschitz_in_w1 = Mj * std::exp(4 * L * L - 0.5);
  return b;
}

double certified_sup(const DEvaluator& D, int j, double lo, double hi,
                     double slack) {
  if (!(lo < hi))
    throw Error(ErrorCode::InvalidInterval, "certified_sup: need lo < hi");
  if (!(slack > 0))
    throw Error(ErrorCode::InvalidArgument, "certified_sup: slack must be > 0");
  const double B1 = D.derivative_sup(j + 1);
  const double B2 = D.derivative_sup(j + 2);
  // Per-evaluation rounding allowance; the certifier's 1e-10 margin dominates.
  const double eval_margin = 1e-14 * (1.0 + D.derivative_sup(j));

  struct Cell {
    double ub, a, b, fa, fb;
    bool operator<(const Cell& o) const {
      return ub != o.ub ? ub < o.ub : a > o.a;
    }
  };
  auto cell_ub = [&](double a, double b, double fa, double fb) {
    double w = b - a;
    double env = std::min(B1 * w / 2, B2 * w * w / 8);
    return std::max(fa, fb) + env + eval_margin;
  };

  std::priority_queue<Cell> heap;
  double fa = D.derivative(lo, j), fb = D.derivative(hi, j);
  double lb = std::max(fa, fb);
  heap.push({cell_ub(lo, hi, fa, fb), lo, hi, fa, fb});

  const long max_evals = 40'000'000;
  long evals = 2;
  while (true) {
    Cell top = heap.top();
    if (top.ub <= lb + slack) return top.ub;
    heap.pop();
    double m = (top.a + top.b) / 2;
    double fm = D.derivative(m, j);
    ++evals;
    lb = std::max(lb, fm);
    heap.push({cell_ub(top.a, m, top.fa, fm), top.a, m, top.fa, fm});
    heap.push({cell_ub(m, top.b, fm, top.fb), m, top.b, fm, top.fb});
    if (evals > max_evals)
      throw Error(ErrorCode::NoConvergence,
                  "certified_sup: requested slack not reached");
  }
}

double sup_d_over_interval(const DiscreteMixture& m, const Dataset& X,
                           double lo, double hi, double slack) {
  if (!(lo < hi))
    throw Error(ErrorCode::InvalidInterval, "sup_d_over_interval: lo < hi");
  if (!(slack > 0))
    throw Error(ErrorCode::InvalidArgument,
                "sup_d_over_interval: slack must be > 0");
  double L = X.range_bound;
  if (m.min_location() < -L || m.max_location() > L)
    throw Error(ErrorCode::InvalidArgument,
                "sup_d_over_interval: supp(m) must lie in [-L,L]");
  DEvaluator D(m, X);
  // D is increasing left of -L and decreasing right of L, so any part of
  // [lo, hi] in the tails is dominated by the value at its inner end.
  if (hi <= -L) return D.value(hi) + 1e-14;
  if (lo >= L) return D.value(lo) + 1e-14;
  double a = std::max(lo, -L), b = std::min(hi, L);
  double best = std::max(D.value(a), D.value(b)) + 1e-14;
  if (a < b) best = std::max(best, certified_sup(D, 0, a, b, slack));
  return best;
}

}  // namespace npmle
