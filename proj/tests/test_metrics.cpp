#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "doctest.h"
#include "support.hpp"
#include "turnpike/metrics.hpp"

using namespace turnpike;

namespace {

PointSet integer_points(std::vector<std::int64_t> x) { return PointSet(std::move(x), Rational(1)); }

// O(m^2) count of pairs ordered differently by the two rankings.
double kendall_pairs(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  const std::size_t m = a.size();
  std::vector<std::size_t> pos_a(m), pos_b(m);
  for (std::size_t k = 0; k < m; ++k) {
    pos_a[a[k]] = k;
    pos_b[b[k]] = k;
  }
  std::size_t discordant = 0;
  for (std::size_t u = 0; u < m; ++u) {
    for (std::size_t v = u + 1; v < m; ++v) {
      discordant += (pos_a[u] < pos_a[v]) != (pos_b[u] < pos_b[v]);
    }
  }
  return m < 2 ? 0.0 : static_cast<double>(discordant) / (static_cast<double>(m * (m - 1)) / 2.0);
}

std::vector<std::size_t> random_permutation(std::mt19937_64& rng, std::size_t m) {
  std::vector<std::size_t> p(m);
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

}  // namespace

TEST_CASE("ground truth labels") {
  const auto gt = ground_truth(integer_points({0, 2, 5, 9}));
  // 1-based labels of (1,2),(1,3),(1,4),(2,3),(2,4),(3,4).
  const std::vector<std::size_t> expected{6, 3, 1, 5, 2, 4};
  const auto labels = gt.assignment.hard_labels();
  for (std::size_t iv = 0; iv < 6; ++iv) CHECK(labels[iv] + 1 == expected[iv]);
  // Sorted distances 9,7,5,4,3,2 sit on intervals (1,4),(2,4),(1,3),(3,4),(2,3),(1,2).
  CHECK(gt.perm == std::vector<std::size_t>{2, 4, 1, 5, 3, 0});

  const auto even = ground_truth(integer_points({0, 2, 4, 6}));
  for (const auto& [i, j] : std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 2}, {2, 3}}) {
    CHECK(even.assignment.at(i, j, 2) == 1.0);
  }
  // Equal values take positions in lexicographic interval order.
  CHECK(even.perm == std::vector<std::size_t>{2, 1, 4, 0, 3, 5});

  const auto two = ground_truth(integer_points({0, 7}));
  CHECK(two.assignment.hard_labels() == std::vector<std::size_t>{0});
}

TEST_CASE("ground truth is a multi-matching") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    std::set<std::int64_t> pts{0};
    while (pts.size() < 6) pts.insert(static_cast<std::int64_t>(rng() % 30) + 1);
    const auto gt = ground_truth(integer_points({pts.begin(), pts.end()}));
    for (std::size_t iv = 0; iv < gt.assignment.intervals(); ++iv) CHECK(gt.assignment.row_sum(iv) == 1.0);
    for (std::size_t r = 0; r < gt.y.distinct(); ++r) {
      CHECK(gt.assignment.column_sum(r) == gt.y.multiplicity(r));
    }
  }
}

TEST_CASE("labeling error") {
  const auto gt = ground_truth(integer_points({0, 2, 5, 9}));
  CHECK(labeling_error(gt.assignment, gt.assignment) == 0.0);
  CHECK(labeling_error(reflect_assignment(gt.assignment), gt.assignment) == 0.0);

  auto labels = gt.assignment.hard_labels();
  std::swap(labels[0], labels[1]);
  const auto swapped = AssignmentMatrix::from_labels(4, 6, labels);
  CHECK(labeling_error(swapped, gt.assignment) == doctest::Approx(2.0 / 6.0));

  AssignmentMatrix fractional(4, 6);
  for (std::size_t iv = 0; iv < 6; ++iv) {
    for (std::size_t r = 0; r < 6; ++r) fractional(iv, r) = 1.0 / 6.0;
  }
  CHECK_THROWS_AS(labeling_error(fractional, gt.assignment), InvalidInput);
}

TEST_CASE("kendall tau examples") {
  const std::vector<std::size_t> id{0, 1, 2, 3, 4};
  const std::vector<std::size_t> rev{4, 3, 2, 1, 0};
  CHECK(kendall_tau(id, id) == 0.0);
  CHECK(kendall_tau(rev, id) == 1.0);
  CHECK(kendall_tau(std::vector<std::size_t>{1, 0, 2}, std::vector<std::size_t>{0, 1, 2}) ==
        doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(kendall_tau(std::vector<std::size_t>{0, 0}, std::vector<std::size_t>{0, 1}), InvalidInput);
  CHECK_THROWS_AS(kendall_tau(std::vector<std::size_t>{0, 1}, std::vector<std::size_t>{0, 1, 2}), InvalidInput);
}

TEST_CASE("kendall tau matches pair counting and is a metric") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 1 + rng() % 40;
    const auto a = random_permutation(rng, m);
    const auto b = random_permutation(rng, m);
    const auto c = random_permutation(rng, m);
    const double ab = kendall_tau(a, b);
    CHECK(ab == doctest::Approx(kendall_pairs(a, b)).epsilon(1e-12));
    CHECK(ab == doctest::Approx(kendall_tau(b, a)).epsilon(1e-12));
    CHECK(kendall_tau(a, c) <= ab + kendall_tau(b, c) + 1e-12);
  }
}

TEST_CASE("coordinate mae") {
  const std::vector<double> x{0, 2, 5, 9};
  CHECK(coordinate_mae(x, x) == 0.0);
  const std::vector<double> mirror{0, 4, 7, 9};
  CHECK(coordinate_mae(mirror, x) == 0.0);
  const std::vector<double> shifted{10, 12, 15, 19};
  CHECK(coordinate_mae(shifted, x) == 0.0);
  CHECK(coordinate_mae(std::vector<double>{0, 2, 5, 10}, x) == doctest::Approx(0.25));
  CHECK_THROWS_AS(coordinate_mae(std::vector<double>{0, 1}, x), InvalidInput);
}

TEST_CASE("integrality score") {
  const auto gt = ground_truth(integer_points({0, 2, 5, 9}));
  CHECK(integrality_score(gt.assignment) == 1.0);

  AssignmentMatrix uniform(4, 6);
  for (std::size_t iv = 0; iv < 6; ++iv) {
    for (std::size_t r = 0; r < 6; ++r) uniform(iv, r) = 1.0 / 6.0;
  }
  CHECK(integrality_score(uniform) == doctest::Approx(1.0 / 6.0));
  CHECK_FALSE(uniform.integral());

  AssignmentMatrix one_split = gt.assignment;
  one_split(0, 5) = 0.5;
  one_split(0, 0) = 0.5;
  CHECK(integrality_score(one_split) == doctest::Approx(5.5 / 6.0));
  CHECK_FALSE(one_split.integral());

  AssignmentMatrix broken = gt.assignment;
  broken(0, 0) = 0.5;
  CHECK_THROWS_AS(integrality_score(broken), InvalidInput);
}

TEST_CASE("score hardens fractional estimates and flags multiplicity breaks") {
  const auto gt = ground_truth(integer_points({0, 2, 5, 9}));
  const std::vector<double> coords{0, 4, 7, 9};
  const auto perfect = score(reflect_assignment(gt.assignment), gt, std::span<const double>(coords));
  CHECK(perfect.labeling_error == 0.0);
  CHECK(perfect.kendall_tau == 0.0);
  CHECK(perfect.mae == 0.0);
  CHECK(perfect.integrality == 1.0);
  CHECK_FALSE(perfect.multiplicity_violation);

  AssignmentMatrix soft = gt.assignment;
  // Interval 0 leans toward label 0, which interval (1,4) already holds.
  soft(0, 5) = 0.4;
  soft(0, 0) = 0.6;
  const auto m = score(soft, gt);
  CHECK(m.multiplicity_violation);
  CHECK(m.labeling_error == doctest::Approx(1.0 / 6.0));
  CHECK(m.integrality == doctest::Approx(5.6 / 6.0));
  CHECK_FALSE(m.mae.has_value());
}
