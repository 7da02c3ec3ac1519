#include <random>

#include "doctest.h"
#include "support.hpp"
#include "turnpike/partitions.hpp"
#include "turnpike/solver.hpp"

using namespace turnpike;
using testing_support::exact_delta;
using testing_support::exact_multiset;
using testing_support::max_violation;

namespace {

ModelMatrix tiny_model(std::vector<Constraint> rows, std::size_t vars) {
  ModelMatrix m;
  m.form = Formulation::triangle_lp;
  for (std::size_t v = 0; v < vars; ++v) m.vars.push_back({VarKind::assignment, {0, 1, v}, 0, 1, false});
  m.constraints = std::move(rows);
  return m;
}

std::vector<std::int64_t> random_points(std::mt19937_64& rng, int n, std::int64_t step_max) {
  std::uniform_int_distribution<std::int64_t> step(1, step_max);
  std::vector<std::int64_t> x{0};
  while (static_cast<int>(x.size()) < n) x.push_back(x.back() + step(rng));
  return x;
}

// Perturbs one distance of a realizable instance; keeps only non-realizable results.
std::optional<DistanceMultiset> perturbed(std::mt19937_64& rng, const std::vector<std::int64_t>& x) {
  auto flat = exact_delta(x).expand_ticks();
  std::uniform_int_distribution<std::size_t> pick(0, flat.size() - 1);
  std::uniform_int_distribution<int> shift(-2, 2);
  const std::size_t k = pick(rng);
  const int d = shift(rng);
  if (d == 0 || flat[k] + d <= 0) return std::nullopt;
  flat[k] += d;
  const auto y = DistanceMultiset::group_ticks(flat, Rational(1));
  if (testing_support::realizable_by_enumeration(y)) return std::nullopt;
  return y;
}

}  // namespace

TEST_CASE("trivial lp cases") {
  const auto empty = solve_lp(ModelMatrix{});
  CHECK(empty.status == SolveStatus::feasible);
  CHECK(empty.values.empty());

  const auto contradictory = tiny_model(
      {{{{0, 1.0}, {1, 1.0}}, Relation::equal, 1.0}, {{{0, 1.0}, {1, 1.0}}, Relation::equal, 0.0}}, 2);
  CHECK(solve_lp(contradictory).status == SolveStatus::infeasible);
  SolverConfig exact;
  exact.exact = true;
  const auto certified = solve_lp(contradictory, exact);
  CHECK(certified.status == SolveStatus::infeasible);
  CHECK(certified.certified);

  const auto inequalities = tiny_model({{{{0, 1.0}, {1, 1.0}}, Relation::less_equal, 0.5},
                                        {{{0, 1.0}}, Relation::greater_equal, 0.25}},
                                       2);
  const auto sol = solve_lp(inequalities);
  REQUIRE(sol.status == SolveStatus::feasible);
  CHECK(max_violation(inequalities, sol.values) <= 1e-9);
}

TEST_CASE("worked example solves") {
  const auto y = exact_delta({0, 2, 5, 9});
  const auto pset = enumerate_two_partitions(y);
  const auto ilp = build_triangle_ilp(y, pset);

  const auto lp = solve_lp(relax(ilp));
  REQUIRE(lp.status == SolveStatus::feasible);
  CHECK(max_violation(ilp, lp.values) <= 1e-9);

  for (const bool exact : {false, true}) {
    SolverConfig cfg;
    cfg.exact = exact;
    const auto sol = solve_ilp(ilp, cfg);
    REQUIRE(sol.status == SolveStatus::feasible);
    CHECK(sol.certified == exact);
    CHECK(max_violation(ilp, sol.values) <= 1e-9);
    const auto p = extract_assignment(sol, ilp);
    CHECK(p.integral());
    for (std::size_t e = 0; e < 6; ++e) CHECK(p.row_sum(e) == 1.0);
    const auto x = realize(ruler_from_assignment(p, y));
    const bool forward = x == PointSet({0.0, 2.0, 5.0, 9.0});
    const bool mirrored = x == PointSet({0.0, 4.0, 7.0, 9.0});
    CHECK((forward || mirrored));
  }

  const auto milp = build_milp(y);
  const auto ms = solve_ilp(milp);
  REQUIRE(ms.status == SolveStatus::feasible);
  CHECK(max_violation(milp, ms.values) <= 1e-9);
  std::vector<double> coords(ms.values.end() - 4, ms.values.end());
  auto near = [&](std::vector<double> want) {
    for (std::size_t k = 0; k < 4; ++k) {
      if (std::abs(coords[k] - want[k]) > 1e-9) return false;
    }
    return true;
  };
  CHECK((near({0, 2, 5, 9}) || near({0, 4, 7, 9})));
}

TEST_CASE("non-realizable example is infeasible") {
  const auto y = exact_multiset({9, 7, 5, 4, 3, 1}, {1, 1, 1, 1, 1, 1});
  CHECK_FALSE(testing_support::realizable_by_enumeration(y));
  const auto ilp = build_triangle_ilp(y, enumerate_two_partitions(y));
  CHECK(solve_ilp(ilp).status == SolveStatus::infeasible);
  SolverConfig cfg;
  cfg.exact = true;
  const auto sol = solve_ilp(ilp, cfg);
  CHECK(sol.status == SolveStatus::infeasible);
  CHECK(sol.certified);
  CHECK(solve_ilp(build_milp(y), cfg).status == SolveStatus::infeasible);
}

TEST_CASE("ilp agrees with enumeration on small random instances") {
  std::mt19937_64 rng(31);
  int realizable = 0, unrealizable = 0;
  for (int trial = 0; trial < 60; ++trial) {
    std::uniform_int_distribution<int> size(3, 6);
    const auto x = random_points(rng, size(rng), 6);
    std::optional<DistanceMultiset> y = exact_delta(x);
    if (trial % 2 == 1) {
      y = perturbed(rng, x);
      if (!y || !y->point_count()) continue;
    }
    const bool truth = testing_support::realizable_by_enumeration(*y);
    (truth ? realizable : unrealizable) += 1;
    const auto pset = enumerate_two_partitions(*y);
    SolverConfig cfg;
    cfg.exact = true;
    for (const bool basis : {false, true}) {
      for (const bool prune : {false, true}) {
        const auto model = build_triangle_ilp(*y, pset, {basis, prune});
        const auto sol = solve_ilp(model, cfg);
        CHECK((sol.status == SolveStatus::feasible) == truth);
        CHECK(sol.certified);
        if (sol.status == SolveStatus::feasible) {
          CHECK(max_violation(model, sol.values) <= 1e-9);
          const auto rho = ruler_from_assignment(extract_assignment(sol, model), *y);
          CHECK(max_triangle_violation(rho) <= 1e-9);
          const auto lp = solve_lp(relax(model));
          CHECK(lp.status == SolveStatus::feasible);
        }
      }
    }
    const auto milp = solve_ilp(build_milp(*y), cfg);
    CHECK((milp.status == SolveStatus::feasible) == truth);
    CHECK(milp.certified);
  }
  CHECK(realizable > 10);
  CHECK(unrealizable > 5);
}

TEST_CASE("bland rule and determinism") {
  const auto y = exact_delta({0, 1, 3, 7, 12});
  const auto model = relax(build_triangle_ilp(y, enumerate_two_partitions(y)));
  SolverConfig cfg;
  cfg.pivot_rule = PivotRule::bland;
  const auto a = solve_lp(model, cfg);
  const auto b = solve_lp(model, cfg);
  REQUIRE(a.status == SolveStatus::feasible);
  CHECK(a.values == b.values);
  CHECK(a.pivot_rule == PivotRule::bland);
  CHECK(max_violation(model, a.values) <= 1e-9);
  const auto c = solve_lp(model);
  CHECK(c.values == solve_lp(model).values);
}

TEST_CASE("near-integral points are re-checked with the binaries pinned") {
  // b = 0.3333331 / (1/3) = 0.9999993 is within the integrality tolerance of 1, but
  // b = 1 puts x at 1/3, off the second row.
  ModelMatrix m;
  m.form = Formulation::milp;
  m.vars.push_back({VarKind::assignment, {0, 1, 0}, 0, 1, true});
  m.vars.push_back({VarKind::coordinate, {0}, -kInf, kInf, false});
  m.constraints = {{{{1, 1.0}, {0, -1.0 / 3.0}}, Relation::equal, 0.0},
                   {{{1, 1.0}}, Relation::equal, 0.3333331}};
  const auto sol = solve_ilp(m);
  CHECK(sol.status == SolveStatus::infeasible);
  CHECK_FALSE(sol.certified);
}

TEST_CASE("limits report undecided statuses") {
  // Needs branching: propagation alone settles smaller instances at the root.
  const auto ilp = build_milp(exact_delta({0, 1, 4, 10, 12, 17}));
  SolverConfig cfg;
  cfg.node_limit = 1;
  const auto sol = solve_ilp(ilp, cfg);
  CHECK(sol.status == SolveStatus::node_limit);
  cfg.node_limit = 100000;
  cfg.iteration_limit = 1;
  CHECK(solve_ilp(ilp, cfg).status == SolveStatus::iteration_limit);
}

TEST_CASE("fractional lp vertices extract as non-integral") {
  // Two intervals sharing two labels of multiplicity one each: every split is feasible.
  ModelMatrix m = tiny_model({{{{0, 1.0}, {1, 1.0}}, Relation::equal, 1.0},
                              {{{0, 1.0}}, Relation::equal, 0.5}},
                             2);
  m.n = 2;
  m.m_prime = 2;
  m.assignment_index = {0, 1};
  m.vars[0].index = {0, 1, 0};
  m.vars[1].index = {0, 1, 1};
  const auto sol = solve_lp(m);
  REQUIRE(sol.status == SolveStatus::feasible);
  const auto p = extract_assignment(sol, m);
  CHECK_FALSE(p.integral());
  CHECK(p(0, 0) == doctest::Approx(0.5));
  CHECK_THROWS(extract_assignment(Solution{}, m));
}

TEST_CASE("solution text round trip") {
  const auto y = exact_delta({0, 2, 5, 9});
  const auto model = build_triangle_ilp(y, enumerate_two_partitions(y), {.prune = true});
  const auto sol = solve_ilp(model);
  const auto text = to_solution_text(sol, model);
  const auto back = parse_solution_text(text, model);
  CHECK(back.status == SolveStatus::feasible);
  CHECK(back.values == sol.values);
  const auto p = extract_assignment(back, model);
  CHECK(p.integral());
  CHECK(parse_solution_text("# status infeasible\n", model).status == SolveStatus::infeasible);
  CHECK_THROWS_WITH_AS(parse_solution_text("P_9_9_9 1\n", model), doctest::Contains("P_9_9_9"),
                       InvalidInput);
}

TEST_CASE("fractional data goes through the simplex and its certificate") {
  // x0 = 1.25 is forced, outside [0, 1]; thirds have no short decimal form, so
  // propagation leaves the rows to the simplex.
  const double third = 1.0 / 3.0;
  const auto bad = tiny_model({{{{0, third}, {1, third}}, Relation::equal, 0.5},
                               {{{0, third}, {1, -third}}, Relation::equal, third}},
                              2);
  SolverConfig exact;
  exact.exact = true;
  const auto sol = solve_lp(bad, exact);
  CHECK(sol.status == SolveStatus::infeasible);
  CHECK(sol.certified);
  CHECK(sol.stats.simplex_iterations > 0);

  const auto good = tiny_model({{{{0, 0.5}, {1, 0.5}}, Relation::equal, 0.5},
                                {{{0, 0.5}, {1, -0.5}}, Relation::equal, 0.25}},
                               2);
  const auto ok = solve_lp(good);
  REQUIRE(ok.status == SolveStatus::feasible);
  CHECK(ok.values[0] == doctest::Approx(0.75));
  CHECK(ok.values[1] == doctest::Approx(0.25));
}

TEST_CASE("odd cycle is lp-feasible but integer-infeasible") {
  auto m = tiny_model({{{{0, 1.0}, {1, 1.0}}, Relation::equal, 1.0},
                       {{{1, 1.0}, {2, 1.0}}, Relation::equal, 1.0},
                       {{{0, 1.0}, {2, 1.0}}, Relation::equal, 1.0}},
                      3);
  const auto lp = solve_lp(m);
  REQUIRE(lp.status == SolveStatus::feasible);
  for (const double v : lp.values) CHECK(v == doctest::Approx(0.5));
  for (auto& v : m.vars) v.integral = true;
  SolverConfig exact;
  exact.exact = true;
  const auto ilp = solve_ilp(m, exact);
  CHECK(ilp.status == SolveStatus::infeasible);
  CHECK(ilp.certified);
  CHECK(ilp.stats.bb_nodes == 3);
}
