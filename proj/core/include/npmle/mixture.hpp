#pragma once

#include <vector>

namespace npmle {

/// A finite atomic probability measure on the line: sum_j weights[j] *
/// delta(locations[j]).  Locations are strictly increasing, weights are
/// strictly positive and sum to 1 (within 1e-12).  Instances are immutable
/// after construction; build them with make_mixture().
struct DiscreteMixture {
  std::vector<double> weights;
  std::vector<double> locations;

  int atom_count() const { return static_cast<int>(weights.size()); }
  double min_location() const { return locations.front(); }
  double max_location() const { return locations.back(); }
  /// locations[k-1] - locations[0]; zero for a point mass.
  double span() const { return locations.back() - locations.front(); }
  /// Smallest distance between consecutive atoms; +inf for k = 1.
  double min_gap() const;
  /// Total mass within [lo, hi].
  double mass_in(double lo, double hi) const;
};

/// Separation statistics of a mixture.  delta is min_j (p_j * d_j) where d_j
/// is the distance from atom j to its nearest neighbor; by convention
/// delta = +inf when k = 1 (there is no second atom, so any measure with
/// fewer atoms does not exist and separation-based certificates hold
/// vacuously).
struct SeparationStats {
  double delta;
  double min_gap;
  double min_weight;
};

/// Validating constructor.  Atoms are sorted by location.  Weight sums that
/// deviate from 1 by less than 1e-9 are renormalized; larger deviations are
/// rejected (WeightSumMismatch).  Coincident locations and non-positive
/// weights are rejected.
DiscreteMixture make_mixture(std::vector<double> weights,
                             std::vector<double> locations);

/// Exact Wasserstein-1 distance between two discrete measures on the line,
/// computed as the integral of |CDF_a - CDF_b| over the merged breakpoints.
double w1_distance(const DiscreteMixture& a, const DiscreteMixture& b);

/// Euclidean distance on the concatenated (weights, locations) vectors.
/// Both mixtures must have the same atom count.
double param_distance(const DiscreteMixture& a, const DiscreteMixture& b);

/// Hausdorff distance between the two supports.
double hausdorff_support_distance(const DiscreteMixture& a,
                                  const DiscreteMixture& b);

/// Partitions the atoms into maximal runs whose consecutive gaps are
/// <= max_gap and replaces each run by a single atom at the weight-averaged
/// location.  Total mass and mean are preserved exactly; output atoms are
/// separated by more than max_gap.
DiscreteMixture merge_adjacent(const DiscreteMixture& m, double max_gap);

SeparationStats separation_stats(const DiscreteMixture& m);

}  // namespace npmle
