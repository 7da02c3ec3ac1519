#include "turnpike/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "turnpike/partitions.hpp"

namespace turnpike {
namespace {

bool close_multisets(const DistanceMultiset& a, const DistanceMultiset& b) {
  if (a.exact() && b.exact()) return a == b;
  if (a.distinct() != b.distinct()) return false;
  const double tol = 1e-9 * (1.0 + std::max(a.max_value(), b.max_value()));
  for (std::size_t k = 0; k < a.distinct(); ++k) {
    if (a.multiplicity(k) != b.multiplicity(k)) return false;
    if (std::abs(a.value(k) - b.value(k)) > tol) return false;
  }
  return true;
}

Verification fail(std::string reason) { return {false, std::move(reason)}; }

}  // namespace

std::string_view certificate_name(Certificate c) {
  switch (c) {
    case Certificate::realizable:
      return "realizable";
    case Certificate::not_realizable:
      return "not_realizable";
    case Certificate::undecided:
      return "undecided";
    case Certificate::diagnostic_only:
      return "diagnostic_only";
  }
  return "";
}

Certificate parse_certificate(std::string_view name) {
  for (const auto c : {Certificate::realizable, Certificate::not_realizable, Certificate::undecided,
                       Certificate::diagnostic_only}) {
    if (certificate_name(c) == name) return c;
  }
  throw InvalidInput("unknown certificate '" + std::string(name) + "'");
}

std::vector<double> coords_least_squares(const Ruler& rho) {
  const std::size_t n = rho.size();
  std::vector<double> x(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += rho(i, k);
    x[k] = s / static_cast<double>(n);
  }
  const double shift = n > 0 ? x[0] : 0.0;
  for (double& v : x) v -= shift;
  return x;
}

PipelineResult run_pipeline(const DistanceMultiset& y, const PipelineOptions& opts) {
  const auto n = y.point_count();
  if (!n) throw InvalidInput("distance count " + std::to_string(y.total()) + " is not C(n,2)");

  PipelineResult res;
  res.options = opts;
  res.approximate_partitions = opts.tau.has_value();
  if (res.approximate_partitions && !(*opts.tau >= 0)) throw InvalidInput("tau must be >= 0");
  if (!res.approximate_partitions && !y.exact()) {
    throw InvalidInput("the exact two-partition set needs an exact multiset; pass tau");
  }

  ModelMatrix model;
  if (opts.form == Formulation::milp) {
    model = build_milp(y, opts.model);
  } else {
    const auto pset = res.approximate_partitions ? approximate_two_partitions(y, *opts.tau)
                                                 : enumerate_two_partitions(y);
    res.partition_count = pset.size();
    model = build_triangle_ilp(y, pset, opts.model, res.approximate_partitions);
    if (opts.form == Formulation::triangle_lp) model = relax(std::move(model));
  }

  const bool relaxed = opts.form == Formulation::triangle_lp;
  const auto sol = relaxed ? solve_lp(model, opts.solver) : solve_ilp(model, opts.solver);
  res.status = sol.status;
  res.stats = sol.stats;

  switch (sol.status) {
    case SolveStatus::iteration_limit:
    case SolveStatus::node_limit:
    case SolveStatus::time_limit:
      res.certificate = Certificate::undecided;
      return res;
    case SolveStatus::infeasible:
      if (res.approximate_partitions) {
        res.certificate = Certificate::diagnostic_only;
      } else {
        res.certificate = opts.solver.exact && sol.certified ? Certificate::not_realizable
                                                             : Certificate::undecided;
      }
      return res;
    case SolveStatus::feasible:
      break;
  }

  res.assignment = extract_assignment(sol, model);
  res.integral = res.assignment.integral(opts.solver.integrality_tol);
  if (res.integral) res.assignment = res.assignment.rounded();
  const Ruler rho = ruler_from_assignment(res.assignment, y);
  res.induced_ruler_residual = max_triangle_violation(rho);
  res.certificate = res.integral && !res.approximate_partitions ? Certificate::realizable
                                                                : Certificate::diagnostic_only;

  if (opts.coords) {
    std::optional<std::vector<double>> exact_coords;
    if (res.integral) {
      try {
        const PointSet ps = y.exact() ? realize(tick_ruler_from_assignment(res.assignment, y), y.unit())
                                      : realize(rho, 1e-9 * (1.0 + y.max_value()));
        exact_coords = std::vector<double>(ps.coords().begin(), ps.coords().end());
      } catch (const InvalidInput&) {
        // Not a ruler (approximate partitions): fall back to the regression.
      }
    }
    res.coords = exact_coords ? *exact_coords : coords_least_squares(rho);
  }
  return res;
}

Verification verify_certificate(const PipelineResult& result, const DistanceMultiset& y) {
  if (result.certificate != Certificate::realizable) return fail("not_claimed");
  const auto n = y.point_count();
  const auto& p = result.assignment;
  if (!n || p.points() != *n || p.labels() != y.distinct()) return fail("shape_mismatch");
  if (!p.integral()) return fail("not_integral");

  const AssignmentMatrix hard = p.rounded();
  for (std::size_t iv = 0; iv < hard.intervals(); ++iv) {
    if (hard.row_sum(iv) != 1.0) return fail("multiplicity_or_triangle");
  }
  for (std::size_t r = 0; r < y.distinct(); ++r) {
    if (hard.column_sum(r) != y.multiplicity(r)) return fail("multiplicity_or_triangle");
  }

  PointSet ps({0.0, 1.0});
  if (y.exact()) {
    const TickRuler rho = tick_ruler_from_assignment(hard, y);
    if (!is_ruler(rho)) return fail("multiplicity_or_triangle");
    try {
      ps = realize(rho, y.unit());
    } catch (const InvalidInput&) {
      return fail("not_monotone");
    }
  } else {
    const Ruler rho = ruler_from_assignment(hard, y);
    const double tol = 1e-9 * (1.0 + y.max_value());
    if (!is_ruler(rho, tol)) return fail("multiplicity_or_triangle");
    try {
      ps = realize(rho, tol);
    } catch (const InvalidInput&) {
      return fail("not_monotone");
    }
  }
  if (!close_multisets(delta(ps), y)) return fail("delta_mismatch");
  return {true, "ok"};
}

}  // namespace turnpike
