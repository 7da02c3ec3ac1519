#include <algorithm>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "turnpike/model.hpp"
#include "turnpike/partitions.hpp"

using namespace turnpike;
using testing_support::exact_delta;
using testing_support::exact_multiset;

namespace {

std::size_t choose(std::size_t n, std::size_t k) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < k; ++i) out = out * (n - i) / (i + 1);
  return out;
}

// Brute-force rank interval of interval (i, j), 1-based: the number of intervals that
// must be at least as long (those containing it) and at most as long (those inside it).
bool admissible_by_containment(std::size_t n, std::size_t i, std::size_t j, std::size_t r,
                               const std::vector<int>& mu) {
  std::size_t containing = 0;
  std::size_t contained = 0;
  for (std::size_t a = 1; a <= n; ++a) {
    for (std::size_t b = a + 1; b <= n; ++b) {
      if (a <= i && b >= j) ++containing;
      if (a >= i && b <= j) ++contained;
    }
  }
  const std::size_t m = interval_count(n);
  const std::size_t lowest = containing;       // rank >= number of containing intervals
  const std::size_t highest = m - contained + 1;
  std::size_t before = 0;
  for (std::size_t k = 0; k < r; ++k) before += static_cast<std::size_t>(mu[k]);
  const std::size_t first = before + 1;
  const std::size_t last = before + static_cast<std::size_t>(mu[r]);
  return last >= lowest && first <= highest;
}

}  // namespace

TEST_CASE("milp shape on the worked example") {
  const auto y = exact_delta({0, 2, 5, 9});
  const auto model = build_milp(y);
  const auto st = model_stats(model);
  CHECK(st.n_coordinate_vars == 4);
  CHECK(st.n_assignment_vars == 36);
  CHECK(st.n_constraints == 19);
  CHECK(st.n_integral == 36);
  for (const auto& v : model.vars) {
    if (v.kind == VarKind::coordinate) {
      CHECK(v.lower == -kInf);
      CHECK(v.upper == kInf);
    }
  }
  const auto small = build_milp(exact_multiset({7}, {1}));
  CHECK(model_stats(small).n_coordinate_vars == 2);
  CHECK(model_stats(small).n_assignment_vars == 1);
  CHECK(small.constraints.size() == 4);
  CHECK_THROWS_AS(build_milp(exact_multiset({3, 1}, {1, 1})), InvalidInput);
}

TEST_CASE("triangle ilp shape on the worked example") {
  const auto y = exact_delta({0, 2, 5, 9});
  const auto pset = enumerate_two_partitions(y);
  const auto full = build_triangle_ilp(y, pset);
  const auto st = model_stats(full);
  CHECK(st.n_refinements == 4);
  CHECK(st.partition_count == 10);
  CHECK(st.n_triangle_vars == 40);
  CHECK(st.n_assignment_vars == 36);
  const auto basis = build_triangle_ilp(y, pset, {.basis = true});
  CHECK(model_stats(basis).n_refinements == 3);
  CHECK(model_stats(basis).n_triangle_vars == 30);

  for (const auto& c : full.constraints) {
    for (const auto& t : c.terms) CHECK((t.coef == 1.0 || t.coef == -1.0));
  }
  // Variable order: P lexicographic, then T lexicographic.
  std::vector<std::array<std::size_t, 6>> p_order, t_order;
  for (const auto& v : full.vars) (v.kind == VarKind::assignment ? p_order : t_order).push_back(v.index);
  CHECK(std::is_sorted(p_order.begin(), p_order.end()));
  CHECK(std::is_sorted(t_order.begin(), t_order.end()));
  CHECK(full.vars.front().kind == VarKind::assignment);
  CHECK(full.vars.back().kind == VarKind::triangle);

  const auto pair = build_triangle_ilp(exact_multiset({7}, {1}), {});
  CHECK(model_stats(pair).n_refinements == 0);
  CHECK(pair.constraints.size() == 2);
  CHECK_FALSE(pair.trivially_infeasible);

  const auto empty = build_triangle_ilp(exact_multiset({10, 7, 1}, {1, 1, 1}), {});
  CHECK(empty.trivially_infeasible);
  const auto selection_rows = std::count_if(empty.constraints.begin(), empty.constraints.end(),
                                            [](const Constraint& c) { return c.terms.empty(); });
  CHECK(selection_rows == 1);
}

TEST_CASE("refinement lists") {
  using R = std::vector<std::array<std::size_t, 3>>;
  CHECK(basis_refinements(4) == R{{0, 1, 2}, {0, 1, 3}, {0, 2, 3}});
  CHECK(basis_refinements(3) == R{{0, 1, 2}});
  CHECK(basis_refinements(2).empty());
  for (std::size_t n = 2; n <= 9; ++n) {
    CHECK(basis_refinements(n).size() == choose(n - 1, 2));
    CHECK(all_refinements(n).size() == choose(n, 3));
  }
}

TEST_CASE("containment pruning") {
  const std::vector<int> ones(6, 1);
  const auto f = containment_forbidden(4, ones);
  auto allowed = [&](std::size_t i, std::size_t j) {
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < 6; ++r) {
      if (!std::binary_search(f.begin(), f.end(), LabelRef{i, j, r})) out.push_back(r + 1);
    }
    return out;
  };
  CHECK(allowed(0, 3) == std::vector<std::size_t>{1});
  CHECK(allowed(1, 2) == std::vector<std::size_t>{4, 5, 6});
  CHECK(containment_forbidden(2, std::vector<int>{1}).empty());
  CHECK_THROWS_AS(containment_forbidden(4, std::vector<int>{1, 1}), InvalidInput);

  // Closed form against counting containing and contained intervals directly.
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<std::size_t> size(2, 9);
    const std::size_t n = size(rng);
    std::size_t left = interval_count(n);
    std::vector<int> mu;
    while (left > 0) {
      std::uniform_int_distribution<std::size_t> take(1, std::min<std::size_t>(left, 3));
      const auto k = take(rng);
      mu.push_back(static_cast<int>(k));
      left -= k;
    }
    const auto forb = containment_forbidden(n, mu);
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t j = i + 1; j <= n; ++j) {
        for (std::size_t r = 0; r < mu.size(); ++r) {
          const bool banned = std::binary_search(forb.begin(), forb.end(), LabelRef{i - 1, j - 1, r});
          CHECK(banned == !admissible_by_containment(n, i, j, r, mu));
        }
      }
    }
  }
}

TEST_CASE("pruning never removes a ground-truth label") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> size(2, 9);
    std::uniform_int_distribution<std::int64_t> step(1, 5);
    std::vector<std::int64_t> x{0};
    const int n = size(rng);
    while (static_cast<int>(x.size()) < n) x.push_back(x.back() + step(rng));
    const auto y = exact_delta(x);
    const auto model = build_triangle_ilp(y, enumerate_two_partitions(y), {.prune = true});
    for (std::size_t i = 0; i < x.size(); ++i) {
      for (std::size_t j = i + 1; j < x.size(); ++j) {
        CHECK(model.assignment_var(i, j, *y.find_ticks(x[j] - x[i])).has_value());
      }
    }
    const auto st = model_stats(model);
    CHECK(st.n_assignment_vars + st.n_pruned_assignment_vars == interval_count(x.size()) * y.distinct());
  }
}

TEST_CASE("pruned models drop dependent triangle variables") {
  const auto y = exact_delta({0, 1, 3, 7, 12});
  const auto pset = enumerate_two_partitions(y);
  const auto pruned = build_triangle_ilp(y, pset, {.prune = true});
  const auto st = model_stats(pruned);
  CHECK(st.n_pruned_assignment_vars >= 1);
  CHECK(st.n_triangle_vars <= st.n_refinements * pset.size());
  for (const auto& v : pruned.vars) {
    if (v.kind != VarKind::triangle) continue;
    const auto& x = v.index;
    CHECK(pruned.assignment_var(x[0], x[1], x[3]).has_value());
    CHECK(pruned.assignment_var(x[1], x[2], x[4]).has_value());
    CHECK(pruned.assignment_var(x[0], x[2], x[5]).has_value());
  }
}

TEST_CASE("relax") {
  const auto y = exact_delta({0, 2, 5, 9});
  const auto ilp = build_triangle_ilp(y, enumerate_two_partitions(y));
  const auto lp = relax(ilp);
  CHECK(lp.form == Formulation::triangle_lp);
  CHECK(lp.constraints == ilp.constraints);
  CHECK(lp.vars.size() == ilp.vars.size());
  CHECK(model_stats(lp).n_integral == 0);
  CHECK(relax(lp) == lp);
  const auto milp = relax(build_milp(y));
  for (const auto& v : milp.vars) {
    if (v.kind == VarKind::coordinate) CHECK(v.lower == -kInf);
  }
}

TEST_CASE("variable names") {
  Variable t{VarKind::triangle, {0, 1, 2, 3, 4, 5}, 0, 1, true};
  CHECK(variable_name(t) == "T_1_2_3_4_5_6");
  CHECK(parse_variable_name("T_1_2_3_4_5_6") == t);
  CHECK(variable_name(Variable{VarKind::coordinate, {2}, -kInf, kInf, false}) == "x_3");
  CHECK(parse_variable_name("P_1_2_11")->index[2] == 10);
  CHECK_FALSE(parse_variable_name("P_1_2").has_value());
  CHECK_FALSE(parse_variable_name("P_0_2_1").has_value());
  CHECK_FALSE(parse_variable_name("Q_1_2_1").has_value());
  CHECK_FALSE(parse_variable_name("P_1_2_x").has_value());
}

TEST_CASE("lp text export is deterministic and round-trips") {
  const auto y = exact_delta({0, 2, 5, 9});
  const auto pset = enumerate_two_partitions(y);
  for (const auto& model : {build_triangle_ilp(y, pset), build_triangle_ilp(y, pset, {true, true}),
                            relax(build_triangle_ilp(y, pset)), build_milp(y)}) {
    const auto text = to_lp_format(model);
    CHECK(text == to_lp_format(model));
    const auto back = parse_lp_format(text);
    CHECK(back == model);
    CHECK(to_lp_format(back) == text);
  }
  const DistanceMultiset dec({4.05, 2.5, 1.55}, {1, 1, 1});
  const auto milp = build_milp(dec);
  const auto text = to_lp_format(milp);
  CHECK(text.find("4.05") != std::string::npos);
  CHECK(parse_lp_format(text) == milp);
  CHECK_THROWS_WITH_AS(parse_lp_format("Minimize\n obj:\nSubject To\n c1: Z_1 = 1\nEnd\n"),
                       doctest::Contains("Z_1"), InvalidInput);
}
