#include "npmle/em.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "npmle/errors.hpp"
#include "npmle/newton.hpp"

namespace npmle {

namespace {

// Relaxed-parametrization EM map (weights need not sum to 1); used both by
// em_step and by the finite-difference Jacobian.
void em_map(const std::vector<double>& p, const std::vector<double>& y,
            const Dataset& X, std::vector<double>& p_out,
            std::vector<double>& y_out) {
  const int k = static_cast<int>(p.size());
  const int n = X.size();
  p_out.assign(k, 0.0);
  y_out.assign(k, 0.0);
  std::vector<double> D(k, 0.0), D1(k, 0.0);
  for (int i = 0; i < n; ++i) {
    double den = 0;
    for (int j = 0; j < k; ++j) {
      double u = X.points[i] - y[j];
      den += p[j] * std::exp(-u * u / 2);
    }
    for (int j = 0; j < k; ++j) {
      double u = X.points[i] - y[j];
      double e = std::exp(-u * u / 2) / den;
      D[j] += e;
      D1[j] += u * e;
    }
  }
  for (int j = 0; j < k; ++j) {
    D[j] /= n;
    D1[j] /= n;
    p_out[j] = p[j] * D[j];
    y_out[j] = y[j] + D1[j] / D[j];
  }
}

}  // namespace

DiscreteMixture em_step(const DiscreteMixture& m, const Dataset& X) {
  std::vector<double> p, y;
  em_map(m.weights, m.locations, X, p, y);
  for (std::size_t j = 1; j < y.size(); ++j)
    if (!(y[j] > y[j - 1]))
      throw Error(ErrorCode::AtomCollision,
                  "em_step: updated locations crossed or coincided");
  DiscreteMixture out;
  out.weights = std::move(p);
  out.locations = std::move(y);
  return out;
}

EmTrace em_solve(const DiscreteMixture& m0, const Dataset& X, double tol,
                 int max_iter,
                 const std::optional<DiscreteMixture>& reference) {
  if (!(tol > 0))
    throw Error(ErrorCode::InvalidArgument, "em_solve: tol > 0");
  EmTrace trace;
  DiscreteMixture cur = m0;
  trace.iterates.push_back(cur);
  trace.log_likelihoods.push_back(log_likelihood(cur, X));
  if (reference) trace.param_errors.push_back(param_distance(cur, *reference));
  for (int it = 0; it < max_iter; ++it) {
    DiscreteMixture next = em_step(cur, X);
    double step = param_distance(cur, next);
    trace.iterates.push_back(next);
    trace.log_likelihoods.push_back(log_likelihood(next, X));
    if (reference)
      trace.param_errors.push_back(param_distance(next, *reference));
    cur = next;
    if (step <= tol) break;
  }
  if (reference && trace.param_errors.size() >= 3) {
    std::vector<double> ratios;
    std::size_t last = trace.param_errors.size();
    std::size_t first = last > 11 ? last - 11 : 1;
    for (std::size_t i = first; i < last; ++i) {
      double prev = trace.param_errors[i - 1];
      if (prev > 0) ratios.push_back(trace.param_errors[i] / prev);
    }
    if (!ratios.empty()) {
      std::sort(ratios.begin(), ratios.end());
      trace.rate_estimate = ratios[ratios.size() / 2];
    }
  }
  return trace;
}

EmSpectrum em_jacobian_spectrum(const DiscreteMixture& m, const Dataset& X) {
  const int k = m.atom_count();
  const int dim = 2 * k;
  EmSpectrum out;
  out.stationary = gamma(m, X).lpNorm<Eigen::Infinity>() <= 1e-8;

  Eigen::MatrixXd J(dim, dim);
  std::vector<double> pp, yp, pm, ym;
  const double h = 1e-6;
  for (int c = 0; c < dim; ++c) {
    std::vector<double> p = m.weights, y = m.locations;
    if (c < k) p[c] += h; else y[c - k] += h;
    em_map(p, y, X, pp, yp);
    p = m.weights; y = m.locations;
    if (c < k) p[c] -= h; else y[c - k] -= h;
    em_map(p, y, X, pm, ym);
    for (int rw = 0; rw < k; ++rw) {
      J(rw, c) = (pp[rw] - pm[rw]) / (2 * h);
      J(k + rw, c) = (yp[rw] - ym[rw]) / (2 * h);
    }
  }
  Eigen::EigenSolver<Eigen::MatrixXd> es(J);
  out.moduli.resize(dim);
  for (int i = 0; i < dim; ++i) out.moduli[i] = std::abs(es.eigenvalues()[i]);
  std::sort(out.moduli.rbegin(), out.moduli.rend());
  return out;
}

}  // namespace npmle
