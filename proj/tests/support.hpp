#pragma once

// Independent helpers shared by the test suites. Nothing here calls into the code
// under test beyond the data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "turnpike/core.hpp"
#include "turnpike/model.hpp"

namespace testing_support {

using turnpike::DistanceMultiset;

inline DistanceMultiset exact_multiset(std::vector<std::int64_t> ticks, std::vector<int> mu) {
  return DistanceMultiset(std::move(ticks), std::move(mu), turnpike::Rational(1));
}

/// Multiset of pairwise differences of integer points, grouped by hand.
inline DistanceMultiset exact_delta(const std::vector<std::int64_t>& x) {
  std::map<std::int64_t, int, std::greater<>> counts;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) ++counts[x[j] - x[i]];
  }
  std::vector<std::int64_t> v;
  std::vector<int> mu;
  for (const auto& [d, c] : counts) {
    v.push_back(d);
    mu.push_back(c);
  }
  return exact_multiset(v, mu);
}

/// Realizability by trying every choice of interior points among the distinct
/// values. Exponential; only for tiny instances.
inline bool realizable_by_enumeration(const DistanceMultiset& y) {
  const auto n = y.point_count();
  if (!n) return false;
  const auto ticks = y.ticks();
  const std::int64_t span = ticks.front();
  std::vector<std::int64_t> cand(ticks.begin() + 1, ticks.end());
  std::sort(cand.begin(), cand.end());
  const std::size_t interior = *n - 2;
  if (interior > cand.size()) return false;
  std::vector<char> pick(cand.size(), 0);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(interior), 1);
  std::sort(pick.begin(), pick.end(), std::greater<>());
  do {
    std::vector<std::int64_t> x{0};
    for (std::size_t k = 0; k < cand.size(); ++k) {
      if (pick[k]) x.push_back(cand[k]);
    }
    x.push_back(span);
    if (exact_delta(x) == y) return true;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return false;
}

/// Largest row or bound violation of `values` against the model, re-evaluated from
/// scratch.
inline double max_violation(const turnpike::ModelMatrix& model, const std::vector<double>& values) {
  double worst = 0.0;
  for (const auto& c : model.constraints) {
    double lhs = 0.0;
    for (const auto& t : c.terms) lhs += t.coef * values[t.var];
    const double d = lhs - c.rhs;
    switch (c.relation) {
      case turnpike::Relation::equal:
        worst = std::max(worst, std::abs(d));
        break;
      case turnpike::Relation::less_equal:
        worst = std::max(worst, d);
        break;
      case turnpike::Relation::greater_equal:
        worst = std::max(worst, -d);
        break;
    }
  }
  for (std::size_t v = 0; v < model.vars.size(); ++v) {
    worst = std::max(worst, model.vars[v].lower - values[v]);
    worst = std::max(worst, values[v] - model.vars[v].upper);
  }
  return worst;
}

}  // namespace testing_support
