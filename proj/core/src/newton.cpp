#include "npmle/newton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "npmle/errors.hpp"

namespace npmle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Distance (2-norm lower bound) from the parameter point to the boundary of
// the ordered positive-weight region: the nearest faces are {p_j = 0} and
// {y_j = y_{j+1}}.
double boundary_distance(const DiscreteMixture& m) {
  double d = kInf;
  for (double w : m.weights) d = std::min(d, w);
  for (int j = 0; j + 1 < m.atom_count(); ++j)
    d = std::min(d, (m.locations[j + 1] - m.locations[j]) / std::sqrt(2.0));
  return d;
}

}  // namespace

Eigen::VectorXd gamma(const DiscreteMixture& m, const Dataset& X) {
  const int k = m.atom_count();
  DEvaluator D(m, X);
  Eigen::VectorXd g(2 * k);
  for (int j = 0; j < k; ++j) {
    g[j] = D.value(m.locations[j]) - 1.0;
    g[k + j] = D.derivative(m.locations[j], 1);
  }
  return g;
}

Eigen::MatrixXd gamma_jacobian(const DiscreteMixture& m, const Dataset& X) {
  const int k = m.atom_count();
  const int n = X.size();
  DEvaluator D(m, X);
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * k, 2 * k);
  // e(i,j) = exp(-(x_i-y_j)^2/2), t(i,j) = x_i - y_j, den_i = sum_l p_l e(i,l)
  Eigen::MatrixXd E(n, k), T(n, k);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) {
      double u = X.points[i] - m.locations[j];
      T(i, j) = u;
      E(i, j) = std::exp(-u * u / 2);
    }
  const auto& den = D.dens();
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < n; ++i) {
      double d = den[i], d2 = d * d;
      double ej = E(i, j), tj = T(i, j);
      for (int c = 0; c < k; ++c) {
        double ec = E(i, c), tc = T(i, c), pc = m.weights[c];
        // d D(y_j)/d p_c and d D'(y_j)/d p_c
        J(j, c) += -ej * ec / d2;
        J(k + j, c) += -tj * ej * ec / d2;
        // d D(y_j)/d y_c and d D'(y_j)/d y_c (off-diagonal parts)
        J(j, k + c) += -ej * pc * tc * ec / d2;
        J(k + j, k + c) += -tj * ej * pc * tc * ec / d2;
      }
      // diagonal corrections from differentiating the evaluation point
      J(j, k + j) += tj * ej / d;                    // D'(y_j) contribution
      J(k + j, k + j) += (tj * tj - 1.0) * ej / d;   // D''(y_j) contribution
    }
  }
  J /= static_cast<double>(n);
  return J;
}

NewtonTrace newton_solve(const DiscreteMixture& m0, const Dataset& X,
                         double tol, int max_iter) {
  if (!(tol > 0))
    throw Error(ErrorCode::InvalidArgument, "newton_solve: tol > 0");
  NewtonTrace trace;
  DiscreteMixture cur = m0;
  const int k = m0.atom_count();
  for (int it = 0; it <= max_iter; ++it) {
    Eigen::VectorXd g = gamma(cur, X);
    double res = g.lpNorm<Eigen::Infinity>();
    trace.iterates.push_back(cur);
    trace.residual_norms.push_back(res);
    if (res <= tol) return trace;
    if (it == max_iter) break;

    Eigen::MatrixXd J = gamma_jacobian(cur, X);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
    double smax = svd.singularValues()(0);
    double smin = svd.singularValues()(svd.singularValues().size() - 1);
    if (!(smin > 0) || smax / smin > 1e14) {
      if (it == 0)
        throw Error(ErrorCode::SingularJacobian,
                    "newton_solve: Jacobian numerically singular at start");
      trace.failed = true;
      trace.failure_reason = "singular Jacobian";
      return trace;
    }
    Eigen::VectorXd step = lu.solve(g);
    DiscreteMixture next = cur;
    bool bad = false;
    for (int j = 0; j < k; ++j) {
      next.weights[j] -= step[j];
      next.locations[j] -= step[k + j];
      if (!(next.weights[j] > 0)) bad = true;
    }
    for (int j = 0; j + 1 < k && !bad; ++j)
      if (!(next.locations[j] < next.locations[j + 1])) bad = true;
    if (bad) {
      trace.failed = true;
      trace.failure_reason = "iterate left the parameter space";
      return trace;
    }
    cur = next;
  }
  trace.failed = true;
  trace.failure_reason = "iteration cap reached";
  return trace;
}

ShubSmaleReport shub_smale_check(const DiscreteMixture& m, const Dataset& X) {
  ShubSmaleReport rep;
  const int k = m.atom_count();
  const int n = X.size();
  const int dim = 2 * k;

  Eigen::VectorXd g = gamma(m, X);
  Eigen::MatrixXd J = gamma_jacobian(m, X);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
  double smin = svd.singularValues()(svd.singularValues().size() - 1);
  if (!(smin > 0)) {
    rep.r = kInf;
    return rep;
  }
  Eigen::VectorXd step = svd.solve(g);
  rep.alpha = step.norm();

  double bdist = boundary_distance(m);
  // Ball radius over which the Jacobian bounds are derived; the implied
  // Newton radius r = alpha/(1-h) must come back smaller.
  double r_use = std::min(0.9 * bdist, std::max(4 * rep.alpha, 1e-12));

  // Density floor over the ball: weights may drop by r_use, each location
  // may move by r_use.
  double den_lo = kInf;
  for (int i = 0; i < n; ++i) {
    double s = 0;
    for (int j = 0; j < k; ++j) {
      double u = std::abs(X.points[i] - m.locations[j]) + r_use;
      s += std::max(m.weights[j] - r_use, 0.0) * std::exp(-u * u / 2);
    }
    den_lo = std::min(den_lo, s);
  }
  if (!(den_lo > 0)) {
    rep.r = kInf;
    return rep;
  }

  // Entrywise Lipschitz bound for J over the ball.  Every second partial of
  // a gamma component is (1/n) sum_i of at most four monomials in
  // He_a(u) e^{-u^2/2} factors (a <= 3), weight factors <= 1 + r, and powers
  // of 1/den_i; bounding each factor by its envelope gives a uniform
  // per-entry constant S2.
  double rho = 1.0 / den_lo;
  double pmax = 1.0 + r_use;
  double M0 = hermite_envelope(0), M1 = hermite_envelope(1),
         M2 = hermite_envelope(2), M3 = hermite_envelope(3);
  double gmax = std::max(pmax * M1, M0);           // |d den / d theta| <= gmax
  double hmax = std::max({pmax * M2, M1, M0});      // |d^2 den| <= hmax
  double Mtop = M3;                                 // He order <= 3 appears
  double S2 = Mtop * rho + 2 * std::max(M2, M1) * gmax * rho * rho +
              std::max(M1, M0) * hmax * rho * rho +
              2 * std::max(M1, M0) * gmax * gmax * rho * rho * rho;
  rep.lipC = std::pow(static_cast<double>(dim), 1.5) * S2;

  double sigma_ball = smin - rep.lipC * r_use;
  if (!(sigma_ball > 0)) {
    rep.r = kInf;
    return rep;
  }
  rep.beta = 1.0 / sigma_ball;
  rep.h = rep.alpha * rep.beta * rep.lipC;
  if (rep.h >= 1) {
    rep.r = kInf;
    return rep;
  }
  rep.r = rep.alpha / (1 - rep.h);
  rep.proved = rep.h <= 0.25 && rep.r <= r_use && r_use < bdist;
  return rep;
}

}  // namespace npmle
