#include "turnpike/solver.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <type_traits>
#include <unordered_map>

#include "propagate.hpp"
#include "revised_simplex.hpp"
#include "simplex.hpp"
#include "turnpike/log.hpp"
#include "turnpike/rational.hpp"

namespace turnpike {

using detail::ExactScalar;
using detail::LpOutcome;
using detail::StandardLp;

namespace {

using Clock = std::chrono::steady_clock;

// Model data as written: decimal coefficients are taken at their decimal value.
ExactScalar exact_of(double v) {
  if (const auto r = Rational::from_double(v)) return ExactScalar(r->num()) / r->den();
  return ExactScalar(v);
}

struct Bounds {
  std::vector<double> lower;
  std::vector<double> upper;
};

Bounds root_bounds(const ModelMatrix& model) {
  Bounds b;
  for (const auto& v : model.vars) {
    b.lower.push_back(v.lower);
    b.upper.push_back(v.upper);
  }
  return b;
}

// Equality form with one slack column per inequality row, appended after the
// model variables.
template <typename S, typename Convert>
StandardLp<S> standard_form(const ModelMatrix& model, const Bounds& bounds, Convert conv) {
  StandardLp<S> lp;
  lp.rows = model.constraints.size();
  const std::size_t nv = model.vars.size();
  lp.columns.resize(nv);
  for (std::size_t i = 0; i < lp.rows; ++i) {
    const auto& row = model.constraints[i];
    for (const auto& t : row.terms) {
      if (t.coef != 0.0) lp.columns[t.var].push_back({i, conv(t.coef)});
    }
    lp.rhs.push_back(conv(row.rhs));
  }
  for (std::size_t j = 0; j < nv; ++j) {
    const double lo = bounds.lower[j];
    const double hi = bounds.upper[j];
    lp.has_lower.push_back(std::isfinite(lo));
    lp.has_upper.push_back(std::isfinite(hi));
    lp.lower.push_back(std::isfinite(lo) ? conv(lo) : S(0));
    lp.upper.push_back(std::isfinite(hi) ? conv(hi) : S(0));
  }
  for (std::size_t i = 0; i < lp.rows; ++i) {
    const auto rel = model.constraints[i].relation;
    if (rel == Relation::equal) continue;
    lp.columns.push_back({{i, S(rel == Relation::less_equal ? 1 : -1)}});
    lp.has_lower.push_back(1);
    lp.has_upper.push_back(0);
    lp.lower.push_back(S(0));
    lp.upper.push_back(S(0));
  }
  return lp;
}

// The LP that is actually solved: rows still active after propagation, columns only
// for variables that are not fixed (fixed ones move to the right-hand side).
template <typename S>
struct Reduced {
  StandardLp<S> lp;
  std::vector<std::size_t> column;  // per model variable, npos when fixed
};

template <typename S, typename Convert>
Reduced<S> reduced_form(const ModelMatrix& model, const Bounds& bounds,
                        const std::vector<char>& active, Convert conv) {
  constexpr std::size_t npos = ModelMatrix::npos;
  Reduced<S> red;
  StandardLp<S>& lp = red.lp;
  const std::size_t nv = model.vars.size();
  red.column.assign(nv, npos);
  for (std::size_t j = 0; j < nv; ++j) {
    const double lo = bounds.lower[j];
    const double hi = bounds.upper[j];
    if (lo == hi) continue;
    red.column[j] = lp.columns.size();
    lp.columns.emplace_back();
    lp.has_lower.push_back(std::isfinite(lo));
    lp.has_upper.push_back(std::isfinite(hi));
    lp.lower.push_back(std::isfinite(lo) ? conv(lo) : S(0));
    lp.upper.push_back(std::isfinite(hi) ? conv(hi) : S(0));
  }
  std::vector<std::size_t> inequality_rows;
  for (std::size_t i = 0; i < model.constraints.size(); ++i) {
    if (!active[i]) continue;
    const auto& row = model.constraints[i];
    const std::size_t r = lp.rows++;
    S rhs = conv(row.rhs);
    for (const auto& t : row.terms) {
      if (t.coef == 0.0) continue;
      if (red.column[t.var] == npos) {
        rhs -= conv(t.coef) * conv(bounds.lower[t.var]);
      } else {
        lp.columns[red.column[t.var]].push_back({r, conv(t.coef)});
      }
    }
    lp.rhs.push_back(rhs);
    if (row.relation != Relation::equal) {
      lp.columns.push_back({{r, S(row.relation == Relation::less_equal ? 1 : -1)}});
      lp.has_lower.push_back(1);
      lp.has_upper.push_back(0);
      lp.lower.push_back(S(0));
      lp.upper.push_back(S(0));
    }
  }
  return red;
}

// Checks y^T b outside the range of y^T A x over the bound box, exactly.
bool farkas_holds(const StandardLp<ExactScalar>& lp, const std::vector<ExactScalar>& y) {
  ExactScalar yb(0);
  for (std::size_t i = 0; i < lp.rows; ++i) yb += y[i] * lp.rhs[i];
  ExactScalar lo(0), hi(0);
  bool lo_finite = true, hi_finite = true;
  for (std::size_t j = 0; j < lp.cols(); ++j) {
    ExactScalar c(0);
    for (const auto& [i, a] : lp.columns[j]) c += y[i] * a;
    if (c == 0) continue;
    const bool has_lo = lp.has_lower[j], has_hi = lp.has_upper[j];
    if (c > 0) {
      if (has_hi) hi += c * lp.upper[j]; else hi_finite = false;
      if (has_lo) lo += c * lp.lower[j]; else lo_finite = false;
    } else {
      if (has_lo) hi += c * lp.lower[j]; else hi_finite = false;
      if (has_hi) lo += c * lp.upper[j]; else lo_finite = false;
    }
    if (!lo_finite && !hi_finite) return false;
  }
  return (hi_finite && yb > hi) || (lo_finite && yb < lo);
}

std::vector<ExactScalar> snapped(const std::vector<double>& y, double den) {
  std::vector<ExactScalar> out;
  out.reserve(y.size());
  for (const double v : y) out.push_back(ExactScalar(static_cast<long long>(std::llround(v * den))) / static_cast<long long>(den));
  return out;
}

bool certify_infeasible(const StandardLp<ExactScalar>& lp, const std::vector<double>& y) {
  if (y.size() != lp.rows) return false;
  std::vector<ExactScalar> raw;
  raw.reserve(y.size());
  for (const double v : y) raw.push_back(ExactScalar(v));
  if (farkas_holds(lp, raw)) return true;
  // Duals of 0/1 systems are usually small fractions blurred by rounding.
  for (const double den : {1.0, 2.0, 6.0, 720720.0}) {
    if (farkas_holds(lp, snapped(y, den))) return true;
  }
  return false;
}

bool rows_hold_exactly(const StandardLp<ExactScalar>& lp, const std::vector<ExactScalar>& x) {
  std::vector<ExactScalar> lhs(lp.rows, ExactScalar(0));
  for (std::size_t j = 0; j < lp.cols(); ++j) {
    if (lp.has_lower[j] && x[j] < lp.lower[j]) return false;
    if (lp.has_upper[j] && x[j] > lp.upper[j]) return false;
    for (const auto& [i, a] : lp.columns[j]) lhs[i] += a * x[j];
  }
  for (std::size_t i = 0; i < lp.rows; ++i) {
    if (lhs[i] != lp.rhs[i]) return false;
  }
  return true;
}

struct NodeResult {
  LpOutcome outcome = LpOutcome::infeasible;
  std::vector<double> x;  // model variables only
  bool certified = false;
};

class Engine {
 public:
  Engine(const ModelMatrix& model, const SolverConfig& cfg)
      : model_(model), cfg_(cfg), propagator_(model) {
    if (cfg.feasibility_tol < 0 || cfg.integrality_tol < 0) {
      throw InvalidInput("solver tolerances must be nonnegative");
    }
    start_ = Clock::now();
  }

  Solution lp() {
    Solution sol = base();
    Bounds root = root_bounds(model_);
    const auto r = solve_node(root, false);
    sol.status = status_of(r.outcome);
    if (r.outcome == LpOutcome::feasible) sol.values = r.x;
    sol.certified = r.certified;
    return finish(std::move(sol));
  }

  Solution ilp() {
    Solution sol = base();
    std::vector<Bounds> stack{root_bounds(model_)};
    bool all_certified = true;
    while (!stack.empty()) {
      if (stats_.bb_nodes >= cfg_.node_limit) {
        sol.status = SolveStatus::node_limit;
        return finish(std::move(sol));
      }
      if (out_of_time()) {
        sol.status = SolveStatus::time_limit;
        return finish(std::move(sol));
      }
      Bounds node = std::move(stack.back());
      stack.pop_back();
      ++stats_.bb_nodes;
      auto r = solve_node(node, true);
      if (r.outcome == LpOutcome::iteration_limit) {
        sol.status = SolveStatus::iteration_limit;
        return finish(std::move(sol));
      }
      if (r.outcome == LpOutcome::infeasible) {
        all_certified = all_certified && r.certified;
        continue;
      }
      const auto branch = choose_branch(r.x);
      if (!branch) {
        auto leaf = integral_leaf(node, r.x);
        if (!leaf) {
          all_certified = false;
          continue;
        }
        if (leaf->outcome == LpOutcome::infeasible) {
          all_certified = all_certified && leaf->certified;
          continue;
        }
        sol.status = SolveStatus::feasible;
        sol.values = std::move(leaf->x);
        sol.certified = leaf->certified;
        return finish(std::move(sol));
      }
      // Up branch is popped first.
      Bounds down = node;
      down.lower[*branch] = down.upper[*branch] = 0.0;
      node.lower[*branch] = node.upper[*branch] = 1.0;
      stack.push_back(std::move(down));
      stack.push_back(std::move(node));
    }
    sol.status = SolveStatus::infeasible;
    sol.certified = cfg_.exact && all_certified;
    return finish(std::move(sol));
  }

 private:
  Solution base() const {
    Solution sol;
    sol.pivot_rule = cfg_.pivot_rule;
    return sol;
  }

  Solution finish(Solution sol) {
    stats_.wall_time_ms =
        std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
    sol.stats = stats_;
    return sol;
  }

  static SolveStatus status_of(LpOutcome o) {
    switch (o) {
      case LpOutcome::feasible:
        return SolveStatus::feasible;
      case LpOutcome::infeasible:
        return SolveStatus::infeasible;
      case LpOutcome::iteration_limit:
      case LpOutcome::numerical:
        return SolveStatus::iteration_limit;
    }
    return SolveStatus::infeasible;
  }

  bool out_of_time() const {
    if (cfg_.time_limit <= 0) return false;
    return std::chrono::duration<double>(Clock::now() - start_).count() > cfg_.time_limit;
  }

  NodeResult solve_node(Bounds& bounds, bool integer) {
    NodeResult r;
    auto prop = propagator_.run(bounds.lower, bounds.upper, integer);
    if (prop.infeasible) {
      r.certified = true;  // integer bound reasoning is exact
      return r;
    }
    bounds.lower = std::move(prop.lower);
    bounds.upper = std::move(prop.upper);
    const auto red = reduced_form<double>(model_, bounds, prop.active, [](double v) { return v; });
    const double scale = std::max(1.0, max_abs_rhs());
    const detail::Tolerances<double> tol{1e-9, 1e-9, cfg_.feasibility_tol * scale, 1e-12};
    auto run = detail::revised_phase_one(red.lp, tol, cfg_.pivot_rule, cfg_.iteration_limit);
    stats_.simplex_iterations += run.iterations;
    if (run.outcome == LpOutcome::numerical) {
      log(LogLevel::debug, "basis factorization failed, retrying on the dense tableau");
      detail::PhaseOneSimplex<double> dense(red.lp, tol, cfg_.pivot_rule, cfg_.exact,
                                            cfg_.iteration_limit);
      run = dense.run();
      stats_.simplex_iterations += run.iterations;
    }
    r.outcome = run.outcome;
    if (run.outcome == LpOutcome::feasible) {
      r.x = model_values(red.column, bounds, run.x);
      return r;
    }
    if (run.outcome == LpOutcome::infeasible && cfg_.exact) {
      const auto exact = reduced_form<ExactScalar>(model_, bounds, prop.active, exact_of);
      if (certify_infeasible(exact.lp, run.farkas)) {
        r.certified = true;
        return r;
      }
      return solve_node_exact(exact, bounds);
    }
    return r;
  }

  template <typename S>
  std::vector<double> model_values(const std::vector<std::size_t>& column, const Bounds& bounds,
                                   const std::vector<S>& x) const {
    std::vector<double> out(model_.vars.size());
    for (std::size_t j = 0; j < out.size(); ++j) {
      if (column[j] == ModelMatrix::npos) {
        out[j] = bounds.lower[j];
      } else if constexpr (std::is_same_v<S, double>) {
        out[j] = x[column[j]];
      } else {
        out[j] = x[column[j]].template convert_to<double>();
      }
    }
    return out;
  }

  NodeResult solve_node_exact(const Reduced<ExactScalar>& red, const Bounds& bounds) {
    ++stats_.rational_fallbacks;
    log(LogLevel::debug, "certificate failed, re-solving node in rational arithmetic");
    detail::Tolerances<ExactScalar> tol{};
    detail::PhaseOneSimplex<ExactScalar> simplex(red.lp, tol, PivotRule::dantzig_with_bland_fallback,
                                                 false, cfg_.iteration_limit);
    const auto run = simplex.run();
    stats_.simplex_iterations += run.iterations;
    NodeResult r;
    r.outcome = run.outcome;
    r.certified = run.outcome != LpOutcome::iteration_limit;
    if (run.outcome == LpOutcome::feasible) r.x = model_values(red.column, bounds, run.x);
    return r;
  }

  double max_abs_rhs() const {
    double m = 0.0;
    for (const auto& c : model_.constraints) m = std::max(m, std::abs(c.rhs));
    return m;
  }

  std::optional<std::size_t> choose_branch(const std::vector<double>& x) const {
    std::optional<std::size_t> best;
    double best_score = -1.0;
    bool best_is_p = false;
    for (std::size_t j = 0; j < model_.vars.size(); ++j) {
      const auto& v = model_.vars[j];
      if (!v.integral) continue;
      const double frac = std::abs(x[j] - std::round(x[j]));
      if (frac <= cfg_.integrality_tol) continue;
      const bool is_p = v.kind == VarKind::assignment;
      if (best && best_is_p && !is_p) continue;
      if (cfg_.branch_rule == BranchRule::first_fractional) {
        if (!best || (is_p && !best_is_p)) {
          best = j;
          best_is_p = is_p;
        }
        continue;
      }
      if (!best || (is_p && !best_is_p) || frac > best_score) {
        best = j;
        best_score = frac;
        best_is_p = is_p;
      }
    }
    return best;
  }

  // Integral LP point: snap the binaries; in exact mode verify every row in rationals,
  // re-solving for the continuous variables when there are any.
  std::optional<NodeResult> integral_leaf(const Bounds& bounds, const std::vector<double>& x) {
    NodeResult r;
    r.outcome = LpOutcome::feasible;
    r.x = x;
    bool continuous = false;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (model_.vars[j].integral) {
        r.x[j] = std::round(x[j]);
      } else {
        continuous = true;
      }
    }
    Bounds fixed = bounds;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (model_.vars[j].integral) fixed.lower[j] = fixed.upper[j] = r.x[j];
    }
    if (!cfg_.exact) {
      // The LP point may lean on the integrality tolerance; re-solve with the
      // binaries pinned so the rows hold at the feasibility tolerance.
      auto pinned = solve_node(fixed, true);
      if (pinned.outcome == LpOutcome::iteration_limit || pinned.outcome == LpOutcome::numerical) {
        return std::nullopt;
      }
      if (pinned.outcome == LpOutcome::feasible) {
        for (std::size_t j = 0; j < x.size(); ++j) {
          if (model_.vars[j].integral) pinned.x[j] = r.x[j];
        }
      }
      return pinned;
    }
    const auto exact_lp = standard_form<ExactScalar>(model_, fixed, exact_of);
    if (!continuous) {
      std::vector<ExactScalar> xs;
      for (const double v : r.x) xs.push_back(ExactScalar(static_cast<long long>(v)));
      // Slack values follow from the rows.
      bool ok = true;
      for (std::size_t j = x.size(); j < exact_lp.cols(); ++j) {
        const std::size_t row = exact_lp.columns[j].front().first;
        ExactScalar lhs(0);
        for (const auto& t : model_.constraints[row].terms) lhs += exact_of(t.coef) * xs[t.var];
        const ExactScalar slack = (exact_lp.rhs[row] - lhs) / exact_lp.columns[j].front().second;
        if (slack < 0) ok = false;
        xs.push_back(slack);
      }
      if (ok && rows_hold_exactly(exact_lp, xs)) {
        r.certified = true;
        return r;
      }
    }
    const std::vector<char> all_rows(model_.constraints.size(), 1);
    auto exact = solve_node_exact(reduced_form<ExactScalar>(model_, fixed, all_rows, exact_of), fixed);
    if (exact.outcome == LpOutcome::iteration_limit) return std::nullopt;
    return exact;
  }

  const ModelMatrix& model_;
  const SolverConfig& cfg_;
  detail::Propagator propagator_;
  SolveStats stats_;
  Clock::time_point start_;
};

}  // namespace

std::string_view status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::feasible:
      return "feasible";
    case SolveStatus::infeasible:
      return "infeasible";
    case SolveStatus::iteration_limit:
      return "iteration_limit";
    case SolveStatus::node_limit:
      return "node_limit";
    case SolveStatus::time_limit:
      return "time_limit";
  }
  return "";
}

SolveStatus parse_status(std::string_view name) {
  for (const auto s : {SolveStatus::feasible, SolveStatus::infeasible, SolveStatus::iteration_limit,
                       SolveStatus::node_limit, SolveStatus::time_limit}) {
    if (status_name(s) == name) return s;
  }
  throw InvalidInput("unknown solve status '" + std::string(name) + "'");
}

std::string_view pivot_rule_name(PivotRule r) {
  return r == PivotRule::bland ? "bland" : "dantzig_with_bland_fallback";
}

Solution solve_lp(const ModelMatrix& model, const SolverConfig& cfg) {
  return Engine(model, cfg).lp();
}

Solution solve_ilp(const ModelMatrix& model, const SolverConfig& cfg) {
  return Engine(model, cfg).ilp();
}

AssignmentMatrix extract_assignment(const Solution& sol, const ModelMatrix& model) {
  if (sol.status != SolveStatus::feasible) {
    throw std::runtime_error("cannot extract an assignment from a " +
                             std::string(status_name(sol.status)) + " solution");
  }
  if (sol.values.size() != model.vars.size()) {
    throw InvalidInput("solution has " + std::to_string(sol.values.size()) +
                       " values for a model with " + std::to_string(model.vars.size()) +
                       " variables");
  }
  AssignmentMatrix p(model.n, model.m_prime);
  for (std::size_t v = 0; v < model.vars.size(); ++v) {
    const auto& var = model.vars[v];
    if (var.kind != VarKind::assignment) continue;
    p(interval_id(model.n, var.index[0], var.index[1]), var.index[2]) = sol.values[v];
  }
  return p;
}

std::string to_solution_text(const Solution& sol, const ModelMatrix& model) {
  std::string out = "# status " + std::string(status_name(sol.status)) + "\n";
  if (sol.status != SolveStatus::feasible) return out;
  for (std::size_t v = 0; v < model.vars.size(); ++v) {
    out += variable_name(model.vars[v]) + " " + format_double(sol.values[v]) + "\n";
  }
  return out;
}

Solution parse_solution_text(std::string_view text, const ModelMatrix& model) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t v = 0; v < model.vars.size(); ++v) index[variable_name(model.vars[v])] = v;

  Solution sol;
  sol.status = SolveStatus::feasible;
  sol.values.assign(model.vars.size(), 0.0);
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first[0] == '#') {
      std::string key, value;
      if (first == "#" ? (ls >> key >> value) && key == "status"
                       : first == "#status" && (ls >> value)) {
        sol.status = parse_status(value);
      }
      continue;
    }
    const auto it = index.find(first);
    if (it == index.end()) throw InvalidInput("unknown variable name '" + first + "'");
    std::string value;
    if (!(ls >> value)) throw InvalidInput("missing value for variable '" + first + "'");
    try {
      std::size_t used = 0;
      sol.values[it->second] = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw InvalidInput("bad value '" + value + "' for variable '" + first + "'");
    }
  }
  if (sol.status != SolveStatus::feasible) sol.values.clear();
  return sol;
}

void export_solution(const Solution& sol, const ModelMatrix& model,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_solution_text(sol, model);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Solution import_solution(const std::filesystem::path& path, const ModelMatrix& model) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_solution_text(buf.str(), model);
}

}  // namespace turnpike
