#include "npmle/grid_solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "npmle/errors.hpp"

namespace npmle {

namespace {
constexpr double kSqrt2Pi = 2.5066282746310002;
}

DiscreteMixture GridWeights::to_mixture() const {
  std::vector<double> w, y;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (weights[j] > 0) {
      w.push_back(weights[j]);
      y.push_back(grid.points[j]);
    }
  }
  return make_mixture(std::move(w), std::move(y));
}

Grid build_grid(double L, double epsilon, const std::vector<double>& extra_points) {
  if (!(epsilon > 0) || !(epsilon < L))
    throw Error(ErrorCode::EpsilonOutOfRange,
                "build_grid: need 0 < epsilon < L");
  for (double p : extra_points)
    if (p < -L || p > L)
      throw Error(ErrorCode::ExtraPointOutOfRange,
                  "build_grid: extra point outside [-L, L]");

  std::vector<double> pts;
  long steps = static_cast<long>(std::floor(2 * L / epsilon));
  for (long j = 0; j <= steps; ++j) pts.push_back(-L + j * epsilon);
  if (pts.back() < L) pts.push_back(L);
  pts.insert(pts.end(), extra_points.begin(), extra_points.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (static_cast<double>(pts.size()) > 3 * L / epsilon)
    throw Error(ErrorCode::ExtraPointOutOfRange,
                "build_grid: extra points overflow the 3L/epsilon size cap");
  return Grid{std::move(pts), epsilon, L};
}

GridWeights frank_wolfe(const Dataset& X, const Grid& grid, long iterations,
                        double gap_target) {
  if (iterations < 1)
    throw Error(ErrorCode::InvalidArgument, "frank_wolfe: iterations >= 1");
  const int n = X.size();
  const int g = grid.size();

  // e[j*n + i] = exp(-(x_i - z_j)^2 / 2), column-major in grid points.
  std::vector<double> e(static_cast<std::size_t>(n) * g);
  for (int j = 0; j < g; ++j)
    for (int i = 0; i < n; ++i) {
      double u = X.points[i] - grid.points[j];
      e[static_cast<std::size_t>(j) * n + i] = std::exp(-u * u / 2);
    }

  // Start at the grid point nearest 0 (ties toward the smaller location).
  int start = 0;
  for (int j = 1; j < g; ++j)
    if (std::abs(grid.points[j]) < std::abs(grid.points[start])) start = j;

  GridWeights out;
  out.grid = grid;
  out.weights.assign(g, 0.0);
  out.weights[start] = 1.0;

  std::vector<double> den(n);
  for (int i = 0; i < n; ++i) den[i] = e[static_cast<std::size_t>(start) * n + i];

  std::vector<double> Dval(g);
  for (long t = 0; t < iterations; ++t) {
    int best = 0;
    double bestD = -std::numeric_limits<double>::infinity();
    double gap = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < g; ++j) {
      const double* ej = &e[static_cast<std::size_t>(j) * n];
      double s = 0;
      for (int i = 0; i < n; ++i) s += ej[i] / den[i];
      double Dj = s / n;
      Dval[j] = Dj;
      if (Dj > bestD) {  // strict: ties keep the smaller location
        bestD = Dj;
        best = j;
      }
      gap = std::max(gap, Dj - 1.0);
    }
    out.gap_history.push_back(gap);
    if (gap_target > 0 && gap <= gap_target) break;

    double td = static_cast<double>(t);
    double keep = td / (td + 2.0), add = 2.0 / (td + 2.0);
    for (int j = 0; j < g; ++j) out.weights[j] *= keep;
    out.weights[best] += add;
    const double* eb = &e[static_cast<std::size_t>(best) * n];
    for (int i = 0; i < n; ++i) den[i] = keep * den[i] + add * eb[i];
  }
  return out;
}

double duality_gap(const GridWeights& w, const Dataset& X) {
  // Standard conditional-gradient gap max_y (D(y) - 1) over the grid; by
  // concavity it upper-bounds the log-likelihood shortfall to the grid MLE.
  DEvaluator D(w.to_mixture(), X);
  double gap = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < w.grid.size(); ++j)
    gap = std::max(gap, D.value(w.grid.points[j]) - 1.0);
  return gap;
}

GridWeights round_small_atoms(const GridWeights& w, double iota) {
  double dropped = 0;
  GridWeights out = w;
  for (double& wj : out.weights)
    if (wj <= iota) {
      dropped += wj;
      wj = 0;
    }
  if (dropped >= 0.5)
    throw Error(ErrorCode::TooMuchMassDropped,
                "round_small_atoms: dropped mass >= 1/2");
  double keep = 1.0 - dropped;
  for (double& wj : out.weights) wj /= keep;
  return out;
}

DiscreteMixture optimize_weights(const std::vector<double>& support,
                                 const Dataset& X, double tol) {
  if (!(tol > 0))
    throw Error(ErrorCode::InvalidArgument, "optimize_weights: tol > 0");
  const int m = static_cast<int>(support.size());
  const int n = X.size();
  for (int j = 1; j < m; ++j)
    if (!(support[j] > support[j - 1]))
      throw Error(ErrorCode::InvalidArgument,
                  "optimize_weights: support must be sorted and distinct");
  if (m == 1) return make_mixture({1.0}, {support[0]});

  Eigen::MatrixXd E(n, m);  // exp(-(x_i - s_j)^2/2)
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      double u = X.points[i] - support[j];
      E(i, j) = std::exp(-u * u / 2);
    }

  Eigen::VectorXd p = Eigen::VectorXd::Constant(m, 1.0 / m);
  auto loglik = [&](const Eigen::VectorXd& q) {
    Eigen::VectorXd den = E * q;
    return den.array().log().sum() / n;
  };

  // Multiplicative warm start for supports much larger than the sample: the
  // optimum retains at most n atoms, so most weights decay geometrically and
  // can be retired cheaply before any Newton factorization.
  const int newton_width = std::max(n + 8, 48);
  if (m > newton_width) {
    for (int it = 0; it < 400; ++it) {
      Eigen::VectorXd den = E * p;
      Eigen::VectorXd D = (E.transpose() * den.cwiseInverse()) / n;
      int active = 0;
      for (int j = 0; j < m; ++j) {
        p[j] *= D[j];
        if (p[j] > 0 && p[j] < 1e-12 && D[j] < 1.0 - tol) p[j] = 0;
        if (p[j] > 0) ++active;
      }
      p /= p.sum();
      if (active <= newton_width / 2) break;
    }
  }

  const int max_outer = 5000;
  for (int outer = 0; outer < max_outer; ++outer) {
    Eigen::VectorXd den = E * p;
    Eigen::VectorXd D = (E.transpose() * den.cwiseInverse()) / n;

    // Starved atoms whose gradient sits below the KKT target cannot satisfy
    // the retained-atom condition; zero them (they re-enter via the D > 1
    // rule if that was premature).
    bool dropped = false;
    for (int j = 0; j < m; ++j)
      if (p[j] > 0 && p[j] < 1e-10 && D[j] < 1.0 - tol) {
        p[j] = 0;
        dropped = true;
      }
    if (dropped) {
      p /= p.sum();
      den = E * p;
      D = (E.transpose() * den.cwiseInverse()) / n;
    }

    // KKT: D <= 1 + tol everywhere and D >= 1 - tol on the retained support.
    double worst_hi = (D.array() - 1.0).maxCoeff();
    double worst_lo = 0;
    for (int j = 0; j < m; ++j)
      if (p[j] > 0) worst_lo = std::max(worst_lo, 1.0 - D[j]);
    if (worst_hi <= tol && worst_lo <= tol) break;
    if (outer == max_outer - 1)
      throw Error(ErrorCode::NoConvergence,
                  "optimize_weights: iteration cap reached");

    // Free set: positive atoms plus any zero atom with D > 1 (must re-enter).
    // Atoms at the boundary whose Newton direction points outward are moved
    // back to the active set and the system is re-solved.
    std::vector<int> free;
    for (int j = 0; j < m; ++j)
      if (p[j] > 0 || D[j] > 1.0) free.push_back(j);

    if (static_cast<int>(free.size()) > newton_width) {
      // Too wide for factorizations; multiplicative step until it thins out.
      for (int j = 0; j < m; ++j)
        if (p[j] == 0 && D[j] > 1.0 + tol / 2) p[j] = 1e-10;
      Eigen::VectorXd den2 = E * p;
      Eigen::VectorXd D2 = (E.transpose() * den2.cwiseInverse()) / n;
      for (int j = 0; j < m; ++j) p[j] *= D2[j];
      p /= p.sum();
      continue;
    }

    Eigen::VectorXd d = Eigen::VectorXd::Zero(m);
    while (!free.empty()) {
      const int f = static_cast<int>(free.size());
      Eigen::MatrixXd R(n, f);
      for (int c = 0; c < f; ++c) R.col(c) = E.col(free[c]).cwiseQuotient(den);
      Eigen::MatrixXd H = (R.transpose() * R) / n;  // = -Hessian of loglik
      double reg = 1e-12 * (1.0 + H.trace());
      Eigen::MatrixXd K = Eigen::MatrixXd::Zero(f + 1, f + 1);
      K.topLeftCorner(f, f) = H + reg * Eigen::MatrixXd::Identity(f, f);
      K.topRightCorner(f, 1).setOnes();
      K.bottomLeftCorner(1, f).setOnes();
      Eigen::VectorXd rhs(f + 1);
      for (int c = 0; c < f; ++c) rhs[c] = D[free[c]] - 1.0;
      rhs[f] = 0.0;
      Eigen::VectorXd sol = K.fullPivLu().solve(rhs);
      d.setZero();
      for (int c = 0; c < f; ++c) d[free[c]] = sol[c];
      std::vector<int> kept;
      for (int j : free)
        if (!(p[j] == 0 && d[j] < 0)) kept.push_back(j);
      if (kept.size() == free.size()) break;
      free = kept;
    }

    // Newton with Armijo backtracking; slope = d'Hd >= 0 by construction.
    double slope = 0;
    for (int j = 0; j < m; ++j) slope += (D[j] - 1.0) * d[j];
    bool moved = false;
    if (slope > 0) {
      double alpha_max = 1.0;
      for (int j = 0; j < m; ++j)
        if (d[j] < 0 && p[j] > 0)
          alpha_max = std::min(alpha_max, p[j] / (-d[j]));
      double ll0 = loglik(p);
      double resolution = 1e-15 * std::max(1.0, std::abs(ll0));
      if (1e-4 * alpha_max * slope <= resolution && worst_hi < 1e-6 &&
          worst_lo < 1e-6) {
        // Quadratic basin where the Armijo improvement falls below float
        // resolution: take the full feasible step.
        Eigen::VectorXd q = p + std::min(1.0, alpha_max) * d;
        for (int j = 0; j < m; ++j)
          if (q[j] < 0) q[j] = 0;
        p = q / q.sum();
        moved = true;
      } else {
        double alpha = alpha_max;
        for (int bt = 0; bt < 40 && alpha > 0; ++bt) {
          Eigen::VectorXd q = p + alpha * d;
          for (int j = 0; j < m; ++j)
            if (q[j] < 0) q[j] = 0;  // clip rounding dust at the boundary
          q /= q.sum();
          if (loglik(q) >= ll0 + 1e-4 * alpha * slope) {
            p = q;
            moved = true;
            break;
          }
          alpha /= 2;
        }
      }
    }
    if (!moved) {
      // Fixed-support EM step: p_j <- p_j D_j is an ascent step and handles
      // the rank-deficient cases (|support| > n) where the Newton direction
      // degenerates.  Zero atoms with D > 1 are re-seeded first.
      for (int j = 0; j < m; ++j)
        if (p[j] == 0 && D[j] > 1.0 + tol / 2) p[j] = 1e-10;
      den = E * p;
      D = (E.transpose() * den.cwiseInverse()) / n;
      for (int j = 0; j < m; ++j) p[j] *= D[j];
      p /= p.sum();
    }
  }

  std::vector<double> w, y;
  for (int j = 0; j < m; ++j)
    if (p[j] > 0) {
      w.push_back(p[j]);
      y.push_back(support[j]);
    }
  return make_mixture(std::move(w), std::move(y));
}

}  // namespace npmle
