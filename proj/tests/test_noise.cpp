#include <cmath>
#include <random>
#include <set>
#include <tuple>

#include "doctest.h"
#include "support.hpp"
#include "turnpike/noise.hpp"
#include "turnpike/partitions.hpp"

using namespace turnpike;
using testing_support::exact_delta;
using testing_support::exact_multiset;

namespace {

using Triple = std::tuple<std::size_t, std::size_t, std::size_t>;

std::set<Triple> exact_triples(const DistanceMultiset& y) {
  std::set<Triple> out;
  const auto v = y.ticks();
  for (std::size_t r = 0; r < v.size(); ++r) {
    for (std::size_t s = 0; s < v.size(); ++s) {
      for (std::size_t t = 0; t < v.size(); ++t) {
        if (v[r] + v[s] == v[t] && (r != s || y.multiplicity(r) >= 2)) out.insert({r, s, t});
      }
    }
  }
  return out;
}

std::set<Triple> as_set(const TwoPartitionSet& p) {
  std::set<Triple> out;
  for (const auto& q : p) out.insert({q.r, q.s, q.t});
  return out;
}

// Smallest |y_r + y_s - y_t| over index triples that are not exact sums, by brute force.
double brute_gap(const DistanceMultiset& y) {
  double best = kInfiniteGap;
  const auto v = y.values();
  for (std::size_t r = 0; r < v.size(); ++r) {
    for (std::size_t s = 0; s < v.size(); ++s) {
      for (std::size_t t = 0; t < v.size(); ++t) {
        const double d = std::abs(v[r] + v[s] - v[t]);
        if (d > 0) best = std::min(best, d);
      }
    }
  }
  return best;
}

DistanceMultiset random_instance(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<std::int64_t> coord(1, 120);
  std::set<std::int64_t> pts{0};
  while (pts.size() < n) pts.insert(coord(rng));
  return exact_delta(std::vector<std::int64_t>(pts.begin(), pts.end()));
}

}  // namespace

TEST_CASE("noise-free observation is the expanded multiset") {
  const auto y = exact_multiset({6, 4, 2}, {1, 2, 3});
  for (const auto mode : {NoiseMode::per_value, NoiseMode::per_element}) {
    const auto out = perturb(y, {0.0, 0.0, 9, mode});
    CHECK(out == std::vector<double>{6, 4, 4, 2, 2, 2});
  }
}

TEST_CASE("adversarial noise lands on an endpoint") {
  const auto y = exact_multiset({100}, {1});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto out = perturb(y, {5.0, 0.0, seed, NoiseMode::per_element, NoiseDistribution::adversarial_pm_r});
    CHECK((out[0] == 95.0 || out[0] == 105.0));
  }
}

TEST_CASE("per_value noise is shared by every copy, per_element is not") {
  const auto y = exact_multiset({9, 5}, {3, 3});
  const auto shared = perturb(y, {1.0, 0.0, 4, NoiseMode::per_value});
  CHECK(shared[0] == shared[1]);
  CHECK(shared[1] == shared[2]);
  CHECK(shared[3] == shared[5]);
  const auto independent = perturb(y, {1.0, 0.0, 4, NoiseMode::per_element});
  CHECK(std::set<double>(independent.begin(), independent.end()).size() == 6);
}

TEST_CASE("observations stay within r, stay positive, and repeat under a seed") {
  const auto y = exact_multiset({50, 3, 1}, {1, 1, 1});
  for (const auto dist : {NoiseDistribution::uniform_pm_r, NoiseDistribution::adversarial_pm_r}) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const NoiseSpec spec{2.0, 0.0, seed, NoiseMode::per_element, dist};
      const auto obs = observe(y, spec);
      const auto expanded = y.expand();
      for (std::size_t k = 0; k < expanded.size(); ++k) {
        CHECK(std::abs(obs.values[k] - expanded[k]) <= 2.0);
        CHECK(obs.values[k] > 0);
      }
      CHECK(perturb(y, spec) == obs.values);
    }
  }
}

TEST_CASE("invalid noise parameters are rejected") {
  const auto y = exact_multiset({2}, {1});
  CHECK_THROWS_AS(perturb(y, {-1.0, 0.0, 0}), InvalidInput);
  CHECK_THROWS_AS(perturb(y, {0.0, std::nan(""), 0}), InvalidInput);
  CHECK(parse_noise_mode("per_element") == NoiseMode::per_element);
  CHECK(parse_noise_distribution("adversarial") == NoiseDistribution::adversarial_pm_r);
  CHECK_THROWS_AS(parse_noise_mode("both"), InvalidInput);
}

TEST_CASE("rounding to the grid") {
  CHECK(round_to_grid(7.3, 0.5) == 7.5);
  CHECK(round_to_grid(7.25, 0.5) == 7.5);
  CHECK(round_to_grid(-7.25, 0.5) == -7.5);
  CHECK(round_to_grid(7.3, 0.0) == 7.3);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  for (int k = 0; k < 1000; ++k) {
    const double v = u(rng);
    const double R = u(rng) / 10.0 + 0.01;
    const double q = round_to_grid(v, R);
    CHECK(std::abs(q - v) <= R / 2 + 1e-12);
    CHECK(std::abs(q / R - std::round(q / R)) < 1e-9);
  }
}

TEST_CASE("aggregation") {
  const std::vector<double> raw{2, 2, 2, 4, 4, 6};
  const auto y = aggregate(raw);
  CHECK(y.values().size() == 3);
  CHECK(y.value(0) == 6);
  CHECK(y.multiplicity(2) == 3);
  CHECK(y.total() == 6);

  const std::vector<double> single{5};
  CHECK(aggregate(single).multiplicity(0) == 1);

  const std::vector<double> near{1.0, 1.0 + 1e-18};
  CHECK(aggregate(near).distinct() == 1);

  const std::vector<double> gridded{1.5, 0.5, 1.5, 3.0};
  const auto g = aggregate(gridded, 0.5);
  CHECK(g.exact());
  CHECK(g.ticks()[0] == 6);
  CHECK(g.multiplicity(1) == 2);

  const std::vector<double> bad{3.0, 0.0};
  CHECK_THROWS_AS(aggregate(bad, 0.5), DegenerateInstance);
}

TEST_CASE("distortion counts splits and merges") {
  const std::vector<std::size_t> source{0, 0, 1};
  const std::vector<double> merged{4, 4, 4};
  CHECK(distortion(merged, source).merges == 1);
  CHECK(distortion(merged, source).splits == 0);
  const std::vector<double> split{4, 5, 2};
  CHECK(distortion(split, source).splits == 1);
  CHECK(distortion(split, source).merges == 0);
}

TEST_CASE("recovery condition") {
  const auto y = exact_multiset({6, 4, 2}, {1, 2, 3});
  const auto c = check_recovery(y, 0, 0);
  CHECK(c.gap_star == 2.0);
  CHECK(c.threshold == 0.0);
  CHECK(c.tau == 1.0);
  CHECK(c.satisfied);
  const auto tight = check_recovery(y, 0.2, 0.2);
  CHECK(tight.threshold == doctest::Approx(2.4));
  CHECK_FALSE(tight.satisfied);
  // A lone value still has the invalid triple 5 + 5 vs 5.
  const auto single = check_recovery(exact_multiset({5}, {1}), 0.8, 0.0);
  CHECK(single.gap_star == 5.0);
  CHECK(single.satisfied);
}

TEST_CASE("representatives recover the exact triples inside the recovery region") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto y = random_instance(rng, 4 + trial % 4);
    const double gap = brute_gap(y);
    REQUIRE(check_recovery(y, 0, 0).gap_star == gap);
    if (std::isinf(gap)) continue;
    const auto truth = exact_triples(y);
    // 6(r + R) strictly below the gap.
    const double budget = 0.99 * frac(rng) * gap / 6.0;
    const double split = frac(rng);
    const double r = budget * split;
    const double R = budget - r;
    for (const auto dist : {NoiseDistribution::uniform_pm_r, NoiseDistribution::adversarial_pm_r}) {
      const NoiseSpec spec{r, R, rng(), NoiseMode::per_value, dist};
      REQUIRE(check_recovery(y, r, R).satisfied);
      const auto reps = representatives(y, spec);
      for (std::size_t k = 0; k < reps.size(); ++k) CHECK(std::abs(reps[k] - y.value(k)) <= r + R + 1e-9);
      const auto est = as_set(approximate_two_partitions(reps, y.multiplicities(), gap / 2));
      CHECK(est == truth);
      for (std::size_t a = 0; a < reps.size(); ++a) {
        for (std::size_t b = 0; b < reps.size(); ++b) {
          for (std::size_t t = 0; t < reps.size(); ++t) {
            const double resid = std::abs(reps[a] + reps[b] - reps[t]);
            if (y.ticks()[a] + y.ticks()[b] == y.ticks()[t]) {
              CHECK(resid <= 3 * (r + R) + 1e-9);
            } else {
              CHECK(resid >= gap - 3 * (r + R) - 1e-9);
            }
          }
        }
      }
      ++checked;
    }
  }
  CHECK(checked > 400);
}
