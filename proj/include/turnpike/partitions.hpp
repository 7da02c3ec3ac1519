#pragma once

#include <compare>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "turnpike/core.hpp"

namespace turnpike {

/// Ordered triple (r, s, t) with y_r + y_s = y_t (0-based indices).
struct TwoPartition {
  std::size_t r = 0;
  std::size_t s = 0;
  std::size_t t = 0;
  friend auto operator<=>(const TwoPartition&, const TwoPartition&) = default;
};

/// Sorted by (t, r, s); no duplicates.
using TwoPartitionSet = std::vector<TwoPartition>;

inline constexpr double kInfiniteGap = std::numeric_limits<double>::infinity();

struct GapProfile {
  std::vector<double> per_target;  // +inf when every pair sums to y_t
  double gap_star = kInfiniteGap;
};

/// Two-pointer scan per target t. Requires an exact-mode multiset.
TwoPartitionSet enumerate_two_partitions(const DistanceMultiset& y);

/// Direct scan over all m'^3 triples; the oracle for enumerate_two_partitions.
TwoPartitionSet enumerate_two_partitions_bruteforce(const DistanceMultiset& y);

/// gap_t = min |y_r + y_s - y_t| over all (r, s) with y_r + y_s != y_t, without any
/// multiplicity restriction. Exact residuals in exact mode.
GapProfile gaps(const DistanceMultiset& y);

/// Every (r, s, t) with r, s > t and |y_r + y_s - y_t| <= tau (absolute), with the
/// r = s multiplicity rule. In exact mode residuals are formed on ticks.
TwoPartitionSet approximate_two_partitions(const DistanceMultiset& y_hat, double tau);

/// Tolerance test on per-index representatives that need not be sorted or
/// distinct (representative k stands for true value k with multiplicity mu[k]).
/// Uses the same r, s > t convention, with order taken from the true indices.
TwoPartitionSet approximate_two_partitions(std::span<const double> representatives,
                                           std::span<const int> multiplicities, double tau);

}  // namespace turnpike
