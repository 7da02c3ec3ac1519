#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "turnpike/rational.hpp"

namespace turnpike {

/// Raised when an input violates a documented invariant.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Intervals (i, j), i < j, are numbered 0 .. C(n,2)-1 in lexicographic order.
// All indices below are 0-based; external formats add 1.

constexpr std::size_t interval_count(std::size_t n) { return n * (n - 1) / 2; }

constexpr std::size_t interval_id(std::size_t n, std::size_t i, std::size_t j) {
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

struct Interval {
  std::size_t i = 0;
  std::size_t j = 0;
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Inverse of interval_id.
Interval interval_at(std::size_t n, std::size_t id);

/// n with n(n-1)/2 == m, if any.
std::optional<std::size_t> points_for_total(std::size_t m);

/// Strictly increasing coordinates, n >= 2. Optionally carries an exact integer
/// representation coords[k] == ticks[k] * unit.
class PointSet {
 public:
  explicit PointSet(std::vector<double> coords);
  PointSet(std::vector<std::int64_t> ticks, Rational unit);

  std::size_t size() const { return coords_.size(); }
  std::span<const double> coords() const { return coords_; }
  double operator[](std::size_t k) const { return coords_[k]; }

  bool exact() const { return unit_.has_value(); }
  std::span<const std::int64_t> ticks() const { return ticks_; }
  const Rational& unit() const;

  /// Translated so the first coordinate is zero.
  PointSet anchored() const;
  /// x_i -> x_n - x_{n+1-i}; anchored at zero and increasing.
  PointSet reflected() const;

  friend bool operator==(const PointSet& a, const PointSet& b);

 private:
  void validate() const;

  std::vector<double> coords_;
  std::vector<std::int64_t> ticks_;
  std::optional<Rational> unit_;
};

/// The pair (y, mu): distinct positive values, strictly decreasing, with positive
/// multiplicities. In exact mode value k equals ticks[k] * unit.
class DistanceMultiset {
 public:
  /// Double mode. Values must already be distinct and strictly decreasing.
  DistanceMultiset(std::vector<double> values, std::vector<int> multiplicities);
  /// Exact mode.
  DistanceMultiset(std::vector<std::int64_t> ticks, std::vector<int> multiplicities,
                   Rational unit);

  /// Groups a raw list in double mode: sorts descending and merges values within
  /// 1e-12 relative of each other (merges are logged).
  static DistanceMultiset group(std::span<const double> raw);
  /// Groups a raw list of grid ticks exactly.
  static DistanceMultiset group_ticks(std::span<const std::int64_t> raw, Rational unit);

  std::size_t distinct() const { return values_.size(); }
  std::size_t total() const { return total_; }
  /// n such that total == C(n,2); nullopt when total is not triangular.
  std::optional<std::size_t> point_count() const { return points_for_total(total_); }

  std::span<const double> values() const { return values_; }
  std::span<const int> multiplicities() const { return multiplicities_; }
  double value(std::size_t r) const { return values_[r]; }
  int multiplicity(std::size_t r) const { return multiplicities_[r]; }
  double max_value() const { return values_.front(); }

  bool exact() const { return unit_.has_value(); }
  std::span<const std::int64_t> ticks() const { return ticks_; }
  const Rational& unit() const;

  /// Exact value of entry r as a rational (exact mode only).
  Rational exact_value(std::size_t r) const;

  /// The m-element list in nonincreasing order.
  std::vector<double> expand() const;
  std::vector<std::int64_t> expand_ticks() const;

  /// Index of the distinct value equal to v (exact tick match in exact mode,
  /// 1e-12 relative match otherwise).
  std::optional<std::size_t> find(double v) const;
  std::optional<std::size_t> find_ticks(std::int64_t t) const;

  /// Cumulative multiplicities M_r = mu_1 + ... + mu_r (0-based: prefix[r] = M_{r+1}).
  std::vector<std::size_t> cumulative() const;

  /// Same multiset with every value multiplied by c > 0 (double mode).
  DistanceMultiset scaled(double c) const;

  friend bool operator==(const DistanceMultiset& a, const DistanceMultiset& b);

 private:
  void validate();

  std::vector<double> values_;
  std::vector<int> multiplicities_;
  std::vector<std::int64_t> ticks_;
  std::optional<Rational> unit_;
  std::size_t total_ = 0;
};

/// Dense n x n matrix with the ruler invariants checked by is_ruler, not on construction.
template <typename T>
class BasicRuler {
 public:
  BasicRuler() = default;
  explicit BasicRuler(std::size_t n) : n_(n), data_(n * n, T{}) {}

  std::size_t size() const { return n_; }
  T& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

 private:
  std::size_t n_ = 0;
  std::vector<T> data_;
};

using Ruler = BasicRuler<double>;
using TickRuler = BasicRuler<std::int64_t>;

/// Multi-matching weights P(i,j,r) stored densely per interval.
class AssignmentMatrix {
 public:
  AssignmentMatrix() = default;
  AssignmentMatrix(std::size_t n, std::size_t m_prime);

  /// Integral assignment from one label per interval.
  static AssignmentMatrix from_labels(std::size_t n, std::size_t m_prime,
                                      std::span<const std::size_t> labels);

  std::size_t points() const { return n_; }
  std::size_t labels() const { return m_prime_; }
  std::size_t intervals() const { return interval_count(n_); }

  double operator()(std::size_t interval, std::size_t r) const {
    return weights_[interval * m_prime_ + r];
  }
  double& operator()(std::size_t interval, std::size_t r) {
    return weights_[interval * m_prime_ + r];
  }
  double at(std::size_t i, std::size_t j, std::size_t r) const {
    return (*this)(interval_id(n_, i, j), r);
  }

  bool integral(double tol = 1e-6) const;
  double row_sum(std::size_t interval) const;
  double column_sum(std::size_t r) const;
  /// Per-interval argmax label, ties to the smallest r.
  std::vector<std::size_t> hard_labels() const;
  /// Same matrix with every entry snapped to 0 or 1 (integral matrices only).
  AssignmentMatrix rounded() const;

 private:
  std::size_t n_ = 0;
  std::size_t m_prime_ = 0;
  std::vector<double> weights_;
};

/// The multiset {x_j - x_i : i < j}; exact when ps is exact.
DistanceMultiset delta(const PointSet& ps);

/// Shortest-arc distances min(|b-a|, L-|b-a|) on a circle of circumference L.
DistanceMultiset beltway_delta(const PointSet& ps, double circumference);
/// Exact variant with the circumference in grid ticks of ps.
DistanceMultiset beltway_delta_ticks(const PointSet& ps, std::int64_t circumference_ticks);

/// rho[i][j] = sum_r y_r P(i,j,r) for i<j, zero diagonal, skew-symmetric.
Ruler ruler_from_assignment(const AssignmentMatrix& p, const DistanceMultiset& y);
/// Exact tick ruler from an integral assignment on an exact multiset.
TickRuler tick_ruler_from_assignment(const AssignmentMatrix& p, const DistanceMultiset& y);

/// rho[i][j] = x_j - x_i.
Ruler ruler_of(const PointSet& ps);

bool is_ruler(const Ruler& rho, double tol);
bool is_ruler(const TickRuler& rho);

/// max |rho_ik - rho_ij - rho_jk| over i<j<k.
double max_triangle_violation(const Ruler& rho);

/// x_1 = 0, x_i = rho[1][i]. Throws InvalidInput on non-ruler or non-monotone input.
PointSet realize(const Ruler& rho, double tol = 1e-9);
PointSet realize(const TickRuler& rho, const Rational& unit);

}  // namespace turnpike
