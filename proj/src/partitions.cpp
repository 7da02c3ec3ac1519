#include "turnpike/partitions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace turnpike {
namespace {

void add_pair(TwoPartitionSet& out, std::size_t r, std::size_t s, std::size_t t) {
  out.push_back({r, s, t});
  if (r != s) out.push_back({s, r, t});
}

void normalize(TwoPartitionSet& set) {
  std::sort(set.begin(), set.end(), [](const TwoPartition& a, const TwoPartition& b) {
    return std::tie(a.t, a.r, a.s) < std::tie(b.t, b.r, b.s);
  });
  set.erase(std::unique(set.begin(), set.end()), set.end());
}

template <typename V>
GapProfile gaps_over(std::span<const V> v, double (*to_real)(V, const DistanceMultiset&),
                     const DistanceMultiset& y) {
  const std::size_t m = v.size();
  GapProfile profile;
  profile.per_target.assign(m, kInfiniteGap);
  for (std::size_t t = 0; t < m; ++t) {
    bool found = false;
    V best{};
    for (std::size_t r = 0; r < m; ++r) {
      const V want = v[t] - v[r];
      // First s with v[s] <= want; v is strictly decreasing.
      const auto p = static_cast<std::size_t>(
          std::lower_bound(v.begin(), v.end(), want, std::greater<>()) - v.begin());
      const std::size_t lo = p >= 2 ? p - 2 : 0;
      const std::size_t hi = std::min(m, p + 2);
      for (std::size_t s = lo; s < hi; ++s) {
        V res = v[r] + v[s] - v[t];
        if (res < V{}) res = -res;
        if (res == V{}) continue;
        if (!found || res < best) {
          best = res;
          found = true;
        }
      }
    }
    if (found) profile.per_target[t] = to_real(best, y);
  }
  profile.gap_star = *std::min_element(profile.per_target.begin(), profile.per_target.end());
  return profile;
}

double tick_to_real(std::int64_t t, const DistanceMultiset& y) {
  return scaled_value(t, y.unit());
}

double identity_real(double v, const DistanceMultiset&) { return v; }

}  // namespace

TwoPartitionSet enumerate_two_partitions(const DistanceMultiset& y) {
  if (!y.exact()) {
    throw InvalidInput("exact two-partition enumeration needs an exact-mode multiset");
  }
  const auto v = y.ticks();
  const std::size_t m = v.size();
  TwoPartitionSet out;
  for (std::size_t t = 0; t < m; ++t) {
    if (t + 1 >= m) break;
    std::size_t r = t + 1;
    std::size_t s = m - 1;
    while (r < s) {
      const std::int64_t sigma = v[r] + v[s];
      if (sigma == v[t]) {
        add_pair(out, r, s, t);
        ++r;
        --s;
      } else if (sigma > v[t]) {
        ++r;
      } else {
        --s;
      }
    }
    if (r == s && y.multiplicity(r) >= 2 && 2 * v[r] == v[t]) out.push_back({r, r, t});
  }
  normalize(out);
  return out;
}

TwoPartitionSet enumerate_two_partitions_bruteforce(const DistanceMultiset& y) {
  const std::size_t m = y.distinct();
  TwoPartitionSet out;
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t s = 0; s < m; ++s) {
      if (r == s && y.multiplicity(r) < 2) continue;
      for (std::size_t t = 0; t < m; ++t) {
        const bool equal = y.exact() ? y.ticks()[r] + y.ticks()[s] == y.ticks()[t]
                                     : y.value(r) + y.value(s) == y.value(t);
        if (equal) out.push_back({r, s, t});
      }
    }
  }
  normalize(out);
  return out;
}

GapProfile gaps(const DistanceMultiset& y) {
  if (y.exact()) return gaps_over<std::int64_t>(y.ticks(), &tick_to_real, y);
  return gaps_over<double>(y.values(), &identity_real, y);
}

TwoPartitionSet approximate_two_partitions(const DistanceMultiset& y_hat, double tau) {
  if (tau < 0.0) throw InvalidInput("tolerance must be nonnegative");
  const auto v = y_hat.values();
  const std::size_t m = v.size();
  // Band edges are located in doubles and widened slightly; membership is then
  // decided on exact tick residuals when available.
  const double slack = 1e-9 * (tau + y_hat.max_value());
  auto passes = [&](std::size_t r, std::size_t s, std::size_t t) {
    if (y_hat.exact()) {
      std::int64_t res = y_hat.ticks()[r] + y_hat.ticks()[s] - y_hat.ticks()[t];
      if (res < 0) res = -res;
      return scaled_value(res, y_hat.unit()) <= tau;
    }
    return std::abs(v[r] + v[s] - v[t]) <= tau;
  };
  TwoPartitionSet out;
  for (std::size_t t = 0; t < m; ++t) {
    for (std::size_t r = t + 1; r < m; ++r) {
      const double hi = v[t] - v[r] + tau + slack;
      const double lo = v[t] - v[r] - tau - slack;
      // s ranges over indices >= r whose value lies in [lo, hi].
      auto first = std::lower_bound(v.begin() + static_cast<std::ptrdiff_t>(r), v.end(), hi,
                                    std::greater<>());
      for (auto it = first; it != v.end() && *it >= lo; ++it) {
        const auto s = static_cast<std::size_t>(it - v.begin());
        if (s == r && y_hat.multiplicity(r) < 2) continue;
        if (passes(r, s, t)) add_pair(out, r, s, t);
      }
    }
  }
  normalize(out);
  return out;
}

TwoPartitionSet approximate_two_partitions(std::span<const double> representatives,
                                           std::span<const int> multiplicities, double tau) {
  if (representatives.size() != multiplicities.size()) {
    throw InvalidInput("representatives and multiplicities differ in length");
  }
  if (tau < 0.0) throw InvalidInput("tolerance must be nonnegative");
  const std::size_t m = representatives.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return representatives[a] < representatives[b] ||
           (representatives[a] == representatives[b] && a < b);
  });
  std::vector<double> sorted(m);
  for (std::size_t k = 0; k < m; ++k) sorted[k] = representatives[order[k]];

  TwoPartitionSet out;
  for (std::size_t t = 0; t < m; ++t) {
    for (std::size_t r = t + 1; r < m; ++r) {
      const double want = representatives[t] - representatives[r];
      const auto lo = std::lower_bound(sorted.begin(), sorted.end(), want - tau - 1e-12 * (1 + tau));
      for (auto it = lo; it != sorted.end() && *it <= want + tau + 1e-12 * (1 + tau); ++it) {
        const std::size_t s = order[static_cast<std::size_t>(it - sorted.begin())];
        if (s <= t || s < r) continue;
        if (s == r && multiplicities[r] < 2) continue;
        if (std::abs(representatives[r] + representatives[s] - representatives[t]) <= tau) {
          add_pair(out, r, s, t);
        }
      }
    }
  }
  normalize(out);
  return out;
}

}  // namespace turnpike
