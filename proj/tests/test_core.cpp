#include <random>

#include "doctest.h"
#include "support.hpp"
#include "turnpike/core.hpp"

using namespace turnpike;
using testing_support::exact_delta;

namespace {

std::vector<double> as_vector(std::span<const double> s) { return {s.begin(), s.end()}; }
std::vector<int> as_vector(std::span<const int> s) { return {s.begin(), s.end()}; }

}  // namespace

TEST_CASE("rational arithmetic and decimal forms") {
  CHECK(Rational(6, 4) == Rational(3, 2));
  CHECK(Rational(1, -2) == Rational(-1, 2));
  CHECK(Rational::parse("0.25") == Rational(1, 4));
  CHECK(Rational::parse("-1.5e2") == Rational(-150));
  CHECK(Rational::parse("7/3") == Rational(7, 3));
  CHECK(Rational(1, 8).to_string() == "0.125");
  CHECK(Rational(1, 3).to_string() == "1/3");
  CHECK(*Rational::from_double(0.1) == Rational(1, 10));
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK(Rational(2, 3) < Rational(3, 4));
  CHECK_THROWS_AS(Rational::parse("abc"), std::invalid_argument);
  CHECK_THROWS_AS(Rational(1, 0), std::invalid_argument);
  CHECK_THROWS_AS(Rational(std::int64_t{1} << 62) * Rational(8), OverflowError);
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(3.0) == "3");
}

TEST_CASE("interval numbering is a bijection") {
  for (std::size_t n = 2; n <= 9; ++n) {
    std::size_t expected = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        CHECK(interval_id(n, i, j) == expected);
        CHECK(interval_at(n, expected) == Interval{i, j});
        ++expected;
      }
    }
    CHECK(expected == interval_count(n));
    CHECK(points_for_total(expected) == n);
  }
  CHECK_FALSE(points_for_total(4).has_value());
}

TEST_CASE("point set invariants") {
  CHECK_THROWS_AS(PointSet({0.0}), InvalidInput);
  CHECK_THROWS_AS(PointSet({0.0, 1.0, 1.0}), InvalidInput);
  CHECK_THROWS_AS(PointSet({0.0, 2.0, 1.0}), InvalidInput);
  const PointSet x({3.0, 5.0, 8.0, 12.0});
  CHECK(x.anchored() == PointSet({0.0, 2.0, 5.0, 9.0}));
  CHECK(PointSet({0.0, 2.0, 5.0, 9.0}).reflected() == PointSet({0.0, 4.0, 7.0, 9.0}));
}

TEST_CASE("distance multiset invariants") {
  CHECK_THROWS_AS(DistanceMultiset({2.0, 4.0}, {1, 1}), InvalidInput);
  CHECK_THROWS_AS(DistanceMultiset({4.0, 4.0}, {1, 1}), InvalidInput);
  CHECK_THROWS_AS(DistanceMultiset({4.0, 0.0}, {1, 1}), InvalidInput);
  CHECK_THROWS_AS(DistanceMultiset({4.0, 2.0}, {1, 0}), InvalidInput);
  CHECK_THROWS_AS(DistanceMultiset({4.0}, {1, 1}), InvalidInput);
  CHECK_THROWS_AS(DistanceMultiset(std::vector<double>{}, {}), InvalidInput);
  const DistanceMultiset y({6.0, 4.0, 2.0}, {1, 2, 3});
  CHECK(y.total() == 6);
  CHECK(y.point_count() == 4);
  CHECK(y.expand() == std::vector<double>{6, 4, 4, 2, 2, 2});
  CHECK(y.cumulative() == std::vector<std::size_t>{1, 3, 6});
  CHECK(y.find(4.0) == 1);
  CHECK_FALSE(y.find(5.0).has_value());
}

TEST_CASE("delta of the worked examples") {
  const auto y = delta(PointSet({0.0, 2.0, 5.0, 9.0}));
  CHECK(as_vector(y.values()) == std::vector<double>{9, 7, 5, 4, 3, 2});
  CHECK(as_vector(y.multiplicities()) == std::vector<int>(6, 1));
  const auto z = delta(PointSet({0.0, 2.0, 4.0, 6.0}));
  CHECK(as_vector(z.values()) == std::vector<double>{6, 4, 2});
  CHECK(as_vector(z.multiplicities()) == std::vector<int>{1, 2, 3});
  const auto one = delta(PointSet({0.0, 1.0}));
  CHECK(as_vector(one.values()) == std::vector<double>{1});
  CHECK(one.total() == 1);
}

TEST_CASE("delta exact mode agrees with a hand grouping") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> size(2, 9);
    std::uniform_int_distribution<std::int64_t> step(1, 6);
    std::vector<std::int64_t> x{0};
    const int n = size(rng);
    while (static_cast<int>(x.size()) < n) x.push_back(x.back() + step(rng));
    const auto y = delta(PointSet(x, Rational(1)));
    CHECK(y == exact_delta(x));
    CHECK(y.total() == interval_count(x.size()));
    // Translation and reflection invariance.
    std::vector<std::int64_t> shifted(x);
    for (auto& v : shifted) v += 11;
    CHECK(delta(PointSet(shifted, Rational(1))) == y);
    std::vector<std::int64_t> mirrored;
    for (auto it = x.rbegin(); it != x.rend(); ++it) mirrored.push_back(x.back() - *it);
    CHECK(delta(PointSet(mirrored, Rational(1))) == y);
  }
}

TEST_CASE("grouping merges only equal values") {
  const std::vector<double> raw{2.0, 3.0, 2.0, 1.0};
  const auto y = DistanceMultiset::group(raw);
  CHECK(as_vector(y.values()) == std::vector<double>{3, 2, 1});
  CHECK(as_vector(y.multiplicities()) == std::vector<int>{1, 2, 1});
  const std::vector<double> close{1.0, 1.0 + 1e-15, 1.5};
  CHECK(DistanceMultiset::group(close).distinct() == 2);
  const std::vector<std::int64_t> ticks{5, 3, 5, 5};
  const auto g = DistanceMultiset::group_ticks(ticks, Rational(1, 10));
  CHECK(g.distinct() == 2);
  CHECK(g.multiplicity(0) == 3);
  CHECK(g.value(0) == doctest::Approx(0.5));
}

TEST_CASE("beltway distances") {
  const auto y = beltway_delta(PointSet({0.0, 1.0, 2.0}), 4.0);
  CHECK(as_vector(y.values()) == std::vector<double>{2, 1});
  CHECK(as_vector(y.multiplicities()) == std::vector<int>{1, 2});
  const auto antipodal = beltway_delta(PointSet({0.0, 3.5}), 7.0);
  CHECK(as_vector(antipodal.values()) == std::vector<double>{3.5});
  const PointSet x({0.0, 2.0, 5.0, 9.0});
  CHECK(beltway_delta(x, 100.0) == delta(x));
  CHECK_THROWS_AS(beltway_delta(PointSet({0.0, 5.0}), 4.0), InvalidInput);
  const auto exact = beltway_delta_ticks(PointSet({0, 1, 2}, Rational(1)), 4);
  CHECK(exact == testing_support::exact_multiset({2, 1}, {1, 2}));
}

TEST_CASE("ruler from assignment") {
  const auto y = delta(PointSet({0.0, 2.0, 5.0, 9.0}));
  // Labels of intervals (12,13,14,23,24,34) into y = (9,7,5,4,3,2).
  const std::vector<std::size_t> labels{5, 2, 0, 4, 1, 3};
  const auto p = AssignmentMatrix::from_labels(4, 6, labels);
  const auto rho = ruler_from_assignment(p, y);
  CHECK(rho(0, 3) == 9.0);
  CHECK(rho(1, 2) == 3.0);
  CHECK(rho(2, 2) == 0.0);
  CHECK(rho(3, 0) == -9.0);
  CHECK(is_ruler(rho, 0.0));

  const DistanceMultiset z({6.0, 4.0, 2.0}, {1, 2, 3});
  AssignmentMatrix uniform(4, 3);
  for (std::size_t e = 0; e < 6; ++e) {
    uniform(e, 0) = 1.0 / 6;
    uniform(e, 1) = 2.0 / 6;
    uniform(e, 2) = 3.0 / 6;
  }
  const auto flat = ruler_from_assignment(uniform, z);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(flat(i, i) == 0.0);
    for (std::size_t j = i + 1; j < 4; ++j) CHECK(flat(i, j) == doctest::Approx(10.0 / 3));
  }
  CHECK_THROWS_AS(ruler_from_assignment(AssignmentMatrix(4, 2), z), InvalidInput);
}

TEST_CASE("ruler checks and realization") {
  const PointSet x({0.0, 2.0, 5.0, 9.0});
  auto rho = ruler_of(x);
  CHECK(is_ruler(rho, 0.0));
  CHECK(realize(rho) == x);
  CHECK(realize(ruler_of(PointSet({3.0, 5.0, 8.0, 12.0}))) == x);
  rho(0, 2) += 1.0;
  rho(2, 0) -= 1.0;
  CHECK_FALSE(is_ruler(rho, 0.0));
  CHECK(max_triangle_violation(rho) == doctest::Approx(1.0));
  CHECK_THROWS_AS(realize(rho), InvalidInput);
  CHECK(is_ruler(Ruler(1), 0.0));
  Ruler two(2);
  two(0, 1) = 7.0;
  two(1, 0) = -7.0;
  CHECK(realize(two) == PointSet({0.0, 7.0}));
  Ruler backwards(2);
  backwards(0, 1) = -1.0;
  backwards(1, 0) = 1.0;
  CHECK_THROWS_AS(realize(backwards), InvalidInput);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> step(0.1, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> c{step(rng)};
    for (int k = 0; k < 7; ++k) c.push_back(c.back() + step(rng));
    const PointSet ps(c);
    const auto back = realize(ruler_of(ps), 1e-9);
    for (std::size_t k = 0; k < c.size(); ++k) CHECK(back[k] == doctest::Approx(c[k] - c[0]));
  }
}

TEST_CASE("tick ruler of the ground truth is the coordinate difference matrix") {
  const std::vector<std::int64_t> x{0, 1, 4, 10, 12, 17};
  const auto y = exact_delta(x);
  std::vector<std::size_t> labels;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) labels.push_back(*y.find_ticks(x[j] - x[i]));
  }
  const auto p = AssignmentMatrix::from_labels(x.size(), y.distinct(), labels);
  CHECK(p.integral());
  const auto rho = tick_ruler_from_assignment(p, y);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) CHECK(rho(i, j) == x[j] - x[i]);
  }
  CHECK(realize(rho, Rational(1)) == PointSet(x, Rational(1)));
}
