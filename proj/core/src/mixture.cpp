#include "npmle/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "npmle/errors.hpp"

namespace npmle {

namespace {
constexpr double kWeightSumTol = 1e-9;
}

double DiscreteMixture::min_gap() const {
  if (weights.size() < 2) return std::numeric_limits<double>::infinity();
  double g = std::numeric_limits<double>::infinity();
  for (std::size_t j = 1; j < locations.size(); ++j)
    g = std::min(g, locations[j] - locations[j - 1]);
  return g;
}

double DiscreteMixture::mass_in(double lo, double hi) const {
  double m = 0;
  for (std::size_t j = 0; j < weights.size(); ++j)
    if (locations[j] >= lo && locations[j] <= hi) m += weights[j];
  return m;
}

DiscreteMixture make_mixture(std::vector<double> weights,
                             std::vector<double> locations) {
  if (weights.size() != locations.size() || weights.empty())
    throw Error(ErrorCode::InvalidArgument,
                "make_mixture: weights and locations must be non-empty and of "
                "equal length");
  for (double w : weights)
    if (!(w > 0.0))
      throw Error(ErrorCode::NonPositiveWeight,
                  "make_mixture: every weight must be > 0");

  double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(sum - 1.0) >= kWeightSumTol) {
    std::ostringstream os;
    os << "make_mixture: weights sum to " << sum << ", off by >= 1e-9";
    throw Error(ErrorCode::WeightSumMismatch, os.str());
  }
  for (double& w : weights) w /= sum;

  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return locations[a] < locations[b];
  });

  DiscreteMixture m;
  m.weights.reserve(weights.size());
  m.locations.reserve(weights.size());
  for (std::size_t idx : order) {
    m.weights.push_back(weights[idx]);
    m.locations.push_back(locations[idx]);
  }
  for (std::size_t j = 1; j < m.locations.size(); ++j)
    if (!(m.locations[j] > m.locations[j - 1]))
      throw Error(ErrorCode::DuplicateLocation,
                  "make_mixture: coincident atom locations");
  return m;
}

double w1_distance(const DiscreteMixture& a, const DiscreteMixture& b) {
  // Walk the merged breakpoints; between consecutive breakpoints both CDFs
  // are constant, so the W1 integral is a finite sum.
  std::size_t ia = 0, ib = 0;
  double cdfa = 0, cdfb = 0, prev = 0, total = 0;
  bool first = true;
  while (ia < a.locations.size() || ib < b.locations.size()) {
    double xa = ia < a.locations.size() ? a.locations[ia]
                                        : std::numeric_limits<double>::infinity();
    double xb = ib < b.locations.size() ? b.locations[ib]
                                        : std::numeric_limits<double>::infinity();
    double x = std::min(xa, xb);
    if (!first) total += std::abs(cdfa - cdfb) * (x - prev);
    first = false;
    while (ia < a.locations.size() && a.locations[ia] == x) cdfa += a.weights[ia++];
    while (ib < b.locations.size() && b.locations[ib] == x) cdfb += b.weights[ib++];
    prev = x;
  }
  return total;
}

double param_distance(const DiscreteMixture& a, const DiscreteMixture& b) {
  if (a.atom_count() != b.atom_count())
    throw Error(ErrorCode::AtomCountMismatch,
                "param_distance: mixtures must have the same atom count");
  double s = 0;
  for (int j = 0; j < a.atom_count(); ++j) {
    double dw = a.weights[j] - b.weights[j];
    double dy = a.locations[j] - b.locations[j];
    s += dw * dw + dy * dy;
  }
  return std::sqrt(s);
}

double hausdorff_support_distance(const DiscreteMixture& a,
                                  const DiscreteMixture& b) {
  auto one_sided = [](const std::vector<double>& from,
                      const std::vector<double>& to) {
    double worst = 0;
    for (double x : from) {
      double best = std::numeric_limits<double>::infinity();
      for (double y : to) best = std::min(best, std::abs(x - y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(one_sided(a.locations, b.locations),
                  one_sided(b.locations, a.locations));
}

DiscreteMixture merge_adjacent(const DiscreteMixture& m, double max_gap) {
  if (!(max_gap > 0))
    throw Error(ErrorCode::InvalidArgument, "merge_adjacent: max_gap must be > 0");
  DiscreteMixture out;
  std::size_t j = 0;
  while (j < m.locations.size()) {
    std::size_t end = j + 1;
    while (end < m.locations.size() &&
           m.locations[end] - m.locations[end - 1] <= max_gap)
      ++end;
    double w = 0, wy = 0;
    for (std::size_t i = j; i < end; ++i) {
      w += m.weights[i];
      wy += m.weights[i] * m.locations[i];
    }
    out.weights.push_back(w);
    out.locations.push_back(wy / w);
    j = end;
  }
  return out;
}

SeparationStats separation_stats(const DiscreteMixture& m) {
  SeparationStats s;
  s.min_weight = *std::min_element(m.weights.begin(), m.weights.end());
  s.min_gap = m.min_gap();
  if (m.atom_count() == 1) {
    s.delta = std::numeric_limits<double>::infinity();
    return s;
  }
  s.delta = std::numeric_limits<double>::infinity();
  for (int j = 0; j < m.atom_count(); ++j) {
    double d = std::numeric_limits<double>::infinity();
    if (j > 0) d = std::min(d, m.locations[j] - m.locations[j - 1]);
    if (j + 1 < m.atom_count())
      d = std::min(d, m.locations[j + 1] - m.locations[j]);
    s.delta = std::min(s.delta, m.weights[j] * d);
  }
  return s;
}

}  // namespace npmle
