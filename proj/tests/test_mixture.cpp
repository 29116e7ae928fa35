#include <doctest.h>

#include <cmath>
#include <limits>

#include "npmle/errors.hpp"
#include "npmle/mixture.hpp"
#include "npmle/rng.hpp"
#include "oracles.hpp"

using namespace npmle;

namespace {

DiscreteMixture random_mixture(SplitMix64& rng, int max_k, double L) {
  int k = 1 + static_cast<int>(rng.next_unit() * max_k);
  std::vector<double> w(k), y(k);
  double sum = 0;
  for (int j = 0; j < k; ++j) {
    w[j] = 0.05 + rng.next_unit();
    sum += w[j];
  }
  for (double& x : w) x /= sum;
  while (true) {
    for (int j = 0; j < k; ++j) y[j] = rng.uniform(-L, L);
    std::sort(y.begin(), y.end());
    bool ok = true;
    for (int j = 1; j < k; ++j)
      if (y[j] - y[j - 1] < 1e-6) ok = false;
    if (ok) break;
  }
  return make_mixture(w, y);
}

}  // namespace

TEST_CASE("make_mixture basics") {
  auto m = make_mixture({1.0}, {0.0});
  CHECK(m.atom_count() == 1);

  auto sorted = make_mixture({0.5, 0.5}, {1.0, -1.0});
  CHECK(sorted.locations[0] == -1.0);
  CHECK(sorted.locations[1] == 1.0);

  CHECK_THROWS_AS(make_mixture({0.5, 0.5}, {0.0, 0.0}), Error);
  CHECK_THROWS_AS(make_mixture({-0.1, 1.1}, {0.0, 1.0}), Error);
  CHECK_THROWS_AS(make_mixture({0.6, 0.6}, {0.0, 1.0}), Error);

  // benign float noise is renormalized
  auto renorm = make_mixture({0.5 + 1e-12, 0.5}, {0.0, 1.0});
  CHECK(std::abs(renorm.weights[0] + renorm.weights[1] - 1.0) < 1e-15);
}

TEST_CASE("w1_distance point examples") {
  auto d0 = make_mixture({1.0}, {0.0});
  auto d1 = make_mixture({1.0}, {1.0});
  CHECK(w1_distance(d0, d1) == doctest::Approx(1.0).epsilon(1e-14));

  auto two = make_mixture({0.5, 0.5}, {0.0, 2.0});
  CHECK(w1_distance(two, d1) == doctest::Approx(1.0).epsilon(1e-14));

  auto a = make_mixture({0.3, 0.7}, {0.0, 1.0});
  auto b = make_mixture({0.5, 0.5}, {0.0, 1.0});
  CHECK(w1_distance(a, b) == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("w1 symmetry, triangle inequality, coupling oracle") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    auto a = random_mixture(rng, 5, 2.0);
    auto b = random_mixture(rng, 5, 2.0);
    auto c = random_mixture(rng, 5, 2.0);
    double ab = w1_distance(a, b), ba = w1_distance(b, a);
    CHECK(std::abs(ab - ba) < 1e-12);
    CHECK(ab + w1_distance(b, c) + 1e-12 >= w1_distance(a, c));
    CHECK(std::abs(ab - oracle::w1_coupling(a, b)) < 1e-10);
    CHECK(w1_distance(a, a) == 0.0);
  }
}

TEST_CASE("param_distance") {
  auto a = make_mixture({0.3, 0.7}, {0.0, 1.0});
  auto b = make_mixture({0.5, 0.5}, {0.0, 1.0});
  CHECK(param_distance(a, a) == 0.0);
  CHECK(param_distance(a, b) ==
        doctest::Approx(std::sqrt(0.08)).epsilon(1e-12));
  auto d0 = make_mixture({1.0}, {0.0});
  auto d1 = make_mixture({1.0}, {1.0});
  CHECK(param_distance(d0, d1) == doctest::Approx(1.0));
  CHECK_THROWS_AS(param_distance(d0, a), Error);
}

TEST_CASE("W1 <= (L^{3/2}+1) d_Pik for same-k pairs in [-L,L]") {
  SplitMix64 rng(7);
  for (double L : {1.0, 2.0, 4.0}) {
    double factor = std::pow(L, 1.5) + 1;
    for (int trial = 0; trial < 200; ++trial) {
      auto a = random_mixture(rng, 4, L);
      DiscreteMixture b;
      while (true) {
        b = random_mixture(rng, 4, L);
        if (b.atom_count() == a.atom_count()) break;
      }
      CHECK(w1_distance(a, b) <= factor * param_distance(a, b) + 1e-12);
    }
  }
}

TEST_CASE("hausdorff_support_distance") {
  auto a = make_mixture({0.3, 0.7}, {0.0, 1.0});
  auto b = make_mixture({0.6, 0.4}, {0.0, 1.0});
  CHECK(hausdorff_support_distance(a, b) == 0.0);
  auto c = make_mixture({1.0}, {0.0});
  auto d = make_mixture({0.5, 0.5}, {0.0, 5.0});
  CHECK(hausdorff_support_distance(c, d) == doctest::Approx(5.0));
  auto e = make_mixture({0.5, 0.5}, {0.0, 1.0});
  auto f = make_mixture({0.5, 0.5}, {0.1, 1.2});
  CHECK(hausdorff_support_distance(e, f) == doctest::Approx(0.2));
}

TEST_CASE("merge_adjacent") {
  auto m = make_mixture({0.2, 0.3, 0.5}, {0.0, 0.01, 2.0});
  auto merged = merge_adjacent(m, 0.02);
  REQUIRE(merged.atom_count() == 2);
  CHECK(merged.weights[0] == doctest::Approx(0.5));
  CHECK(merged.locations[0] == doctest::Approx(0.006));
  CHECK(merged.locations[1] == doctest::Approx(2.0));

  auto untouched = merge_adjacent(m, 0.005);
  CHECK(untouched.atom_count() == 3);

  auto clique =
      make_mixture({1.0 / 3, 1.0 / 3, 1.0 / 3}, {0.0, 0.01, 0.02});
  auto one = merge_adjacent(clique, 0.01);
  REQUIRE(one.atom_count() == 1);
  CHECK(one.weights[0] == doctest::Approx(1.0));
  CHECK(one.locations[0] == doctest::Approx(0.01));
}

TEST_CASE("merge_adjacent preserves mass and mean exactly") {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    auto m = random_mixture(rng, 6, 2.0);
    double gap = rng.uniform(1e-3, 1.0);
    auto merged = merge_adjacent(m, gap);
    double mass = 0, mean = 0, mass0 = 0, mean0 = 0;
    for (int j = 0; j < merged.atom_count(); ++j) {
      mass += merged.weights[j];
      mean += merged.weights[j] * merged.locations[j];
    }
    for (int j = 0; j < m.atom_count(); ++j) {
      mass0 += m.weights[j];
      mean0 += m.weights[j] * m.locations[j];
    }
    CHECK(std::abs(mass - mass0) < 1e-14);
    CHECK(std::abs(mean - mean0) < 1e-12);
    CHECK(merged.min_gap() > gap);
  }
}

TEST_CASE("separation_stats") {
  auto m = make_mixture({0.3, 0.7}, {0.0, 2.0});
  auto s = separation_stats(m);
  CHECK(s.delta == doctest::Approx(0.6));
  CHECK(s.min_gap == doctest::Approx(2.0));

  auto point = make_mixture({1.0}, {0.0});
  CHECK(std::isinf(separation_stats(point).delta));

  auto three = make_mixture({0.1, 0.8, 0.1}, {0.0, 1.0, 1.5});
  CHECK(separation_stats(three).delta == doctest::Approx(0.05));
}

TEST_CASE("cert_lb direction: fewer atoms cost at least delta/3") {
  SplitMix64 rng(31337);
  for (int trial = 0; trial < 300; ++trial) {
    auto nu = random_mixture(rng, 5, 2.0);
    if (nu.atom_count() < 2) continue;
    double delta = separation_stats(nu).delta;
    // candidate mu with fewer atoms: merge the two closest, or drop one and
    // renormalize, or an arbitrary random measure with k-1 atoms
    auto merged = merge_adjacent(nu, nu.min_gap() * 1.0000001);
    if (merged.atom_count() < nu.atom_count())
      CHECK(w1_distance(nu, merged) >= delta / 3 - 1e-12);
    auto fewer = random_mixture(rng, nu.atom_count() - 1, 2.0);
    if (fewer.atom_count() < nu.atom_count())
      CHECK(w1_distance(nu, fewer) >= delta / 3 - 1e-12);
  }
}
