#include <random>

#include "doctest.h"
#include "propagate.hpp"

using namespace turnpike;
using detail::Propagator;

namespace {

ModelMatrix binaries(std::vector<Constraint> rows, std::size_t vars, bool integral = true) {
  ModelMatrix m;
  for (std::size_t v = 0; v < vars; ++v) m.vars.push_back({VarKind::assignment, {0, 1, v}, 0, 1, integral});
  m.constraints = std::move(rows);
  return m;
}

bool satisfies(const Constraint& c, const std::vector<int>& x) {
  double lhs = 0;
  for (const auto& t : c.terms) lhs += t.coef * x[t.var];
  if (c.relation == Relation::equal) return lhs == c.rhs;
  if (c.relation == Relation::less_equal) return lhs <= c.rhs;
  return lhs >= c.rhs;
}

}  // namespace

TEST_CASE("propagation fixes and drops rows") {
  const auto m = binaries({{{{0, 1.0}, {1, 1.0}}, Relation::equal, 1.0},
                           {{{0, 1.0}, {1, 1.0}}, Relation::less_equal, 5.0}},
                          2);
  const Propagator prop(m);
  const auto r = prop.run({1, 0}, {1, 1}, false);
  REQUIRE_FALSE(r.infeasible);
  CHECK(r.upper[1] == 0.0);
  CHECK(r.active == std::vector<char>{0, 0});

  CHECK(prop.run({0, 0}, {0, 0}, false).infeasible);
}

TEST_CASE("rounding applies only to integral variables") {
  const auto m = binaries({{{{0, 2.0}}, Relation::less_equal, 1.0}}, 1);
  CHECK(Propagator(m).run({0}, {1}, true).upper[0] == 0.0);
  CHECK(Propagator(m).run({0}, {1}, false).upper[0] == 1.0);
  // A continuous variable gets the exact bound 1/2, not a rounded one.
  const auto cont = binaries({{{{0, 2.0}}, Relation::less_equal, 1.0}}, 1, false);
  CHECK(Propagator(cont).run({0}, {1}, true).upper[0] == 0.5);
}

TEST_CASE("decimal rows are scaled to integers") {
  // 0.5 x = 2 forces x = 4, outside [0, 1].
  const auto m = binaries({{{{0, 0.5}}, Relation::equal, 2.0}}, 1);
  CHECK(Propagator(m).run({0}, {1}, true).infeasible);
}

TEST_CASE("rows without a short decimal form are left alone") {
  const auto m = binaries({{{{0, 1.0 / 3.0}}, Relation::equal, 2.0}}, 1);
  const auto r = Propagator(m).run({0}, {1}, true);
  CHECK_FALSE(r.infeasible);
  CHECK(r.active[0] == 1);
  CHECK(r.upper[0] == 1.0);
}

TEST_CASE("continuous variables are bounded in their own unit") {
  // x0 - x1 - 0.25 b = 0, x1 = 0, b binary fixed to 1: x0 = 0.25 exactly.
  ModelMatrix m;
  m.vars.push_back({VarKind::coordinate, {0}, -kInf, kInf, false});
  m.vars.push_back({VarKind::coordinate, {1}, -kInf, kInf, false});
  m.vars.push_back({VarKind::assignment, {0, 1, 0}, 0, 1, true});
  m.constraints = {{{{0, 1.0}, {1, -1.0}, {2, -0.25}}, Relation::equal, 0.0},
                   {{{1, 1.0}}, Relation::equal, 0.0}};
  const auto r = Propagator(m).run({-kInf, -kInf, 1}, {kInf, kInf, 1}, true);
  REQUIRE_FALSE(r.infeasible);
  CHECK(r.lower[0] == 0.25);
  CHECK(r.upper[0] == 0.25);
  CHECK(r.active[0] == 1);
}

TEST_CASE("clique members outside the remaining room are fixed to zero") {
  // Exactly one of b0..b2 with weights 3, 5, 7 must match x = 5.
  ModelMatrix m;
  for (std::size_t v = 0; v < 3; ++v) m.vars.push_back({VarKind::assignment, {0, 1, v}, 0, 1, true});
  m.vars.push_back({VarKind::coordinate, {0}, -kInf, kInf, false});
  m.constraints = {{{{0, 1.0}, {1, 1.0}, {2, 1.0}}, Relation::equal, 1.0},
                   {{{3, 1.0}, {0, -3.0}, {1, -5.0}, {2, -7.0}}, Relation::equal, 0.0},
                   {{{3, 1.0}}, Relation::equal, 5.0}};
  const auto r = Propagator(m).run({0, 0, 0, -kInf}, {1, 1, 1, kInf}, true);
  REQUIRE_FALSE(r.infeasible);
  CHECK(r.upper[0] == 0.0);
  CHECK(r.lower[1] == 1.0);
  CHECK(r.upper[2] == 0.0);
  // Without integrality the weights may mix, so nothing is fixed.
  const auto lp = Propagator(m).run({0, 0, 0, -kInf}, {1, 1, 1, kInf}, false);
  CHECK(lp.upper[0] == 1.0);
  CHECK(lp.upper[2] == 1.0);
}

TEST_CASE("propagation never cuts off an integer point") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> coef(-2, 2), rhs(-2, 3), rel(0, 2), vars(2, 6), rows(1, 4);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t nv = static_cast<std::size_t>(vars(rng));
    std::vector<Constraint> cons(static_cast<std::size_t>(rows(rng)));
    for (auto& c : cons) {
      for (std::size_t v = 0; v < nv; ++v) {
        const int a = coef(rng);
        if (a != 0) c.terms.push_back({v, static_cast<double>(a)});
      }
      c.relation = static_cast<Relation>(rel(rng));
      c.rhs = rhs(rng);
    }
    const auto m = binaries(cons, nv);
    const auto r = Propagator(m).run(std::vector<double>(nv, 0.0), std::vector<double>(nv, 1.0), true);
    bool any = false;
    for (std::size_t mask = 0; mask < (std::size_t{1} << nv); ++mask) {
      std::vector<int> x(nv);
      for (std::size_t v = 0; v < nv; ++v) x[v] = static_cast<int>((mask >> v) & 1);
      bool ok = true;
      for (const auto& c : cons) ok = ok && satisfies(c, x);
      if (!ok) continue;
      any = true;
      REQUIRE_FALSE(r.infeasible);
      for (std::size_t v = 0; v < nv; ++v) {
        CHECK(r.lower[v] <= x[v]);
        CHECK(x[v] <= r.upper[v]);
      }
      // Dropped rows hold on the whole box, so in particular here.
    }
    if (!any) continue;
    for (std::size_t i = 0; i < cons.size(); ++i) {
      if (r.active[i]) continue;
      std::vector<int> corner(nv);
      for (std::size_t v = 0; v < nv; ++v) corner[v] = static_cast<int>(r.lower[v]);
      CHECK(satisfies(cons[i], corner));
    }
  }
}
