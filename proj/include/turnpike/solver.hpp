#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "turnpike/core.hpp"
#include "turnpike/model.hpp"

namespace turnpike {

enum class SolveStatus { feasible, infeasible, iteration_limit, node_limit, time_limit };

std::string_view status_name(SolveStatus s);
SolveStatus parse_status(std::string_view name);

enum class PivotRule { bland, dantzig_with_bland_fallback };
enum class BranchRule { most_fractional, first_fractional };

std::string_view pivot_rule_name(PivotRule r);

struct SolverConfig {
  double feasibility_tol = 1e-9;
  double integrality_tol = 1e-6;
  PivotRule pivot_rule = PivotRule::dantzig_with_bland_fallback;
  BranchRule branch_rule = BranchRule::most_fractional;
  std::int64_t node_limit = 200000;
  std::int64_t iteration_limit = 5000000;
  /// Wall-clock budget in seconds; 0 disables it.
  double time_limit = 0.0;
  /// Certify every infeasible node and every integral solution in exact rational
  /// arithmetic (falling back to a rational simplex when a certificate fails).
  bool exact = false;
};

struct SolveStats {
  std::int64_t simplex_iterations = 0;
  std::int64_t bb_nodes = 0;
  double wall_time_ms = 0.0;
  /// Nodes whose double-precision verdict could not be certified and were re-solved
  /// with the rational simplex.
  std::int64_t rational_fallbacks = 0;
};

struct Solution {
  SolveStatus status = SolveStatus::infeasible;
  /// One value per model variable (empty unless feasible).
  std::vector<double> values;
  SolveStats stats;
  PivotRule pivot_rule = PivotRule::dantzig_with_bland_fallback;
  /// The verdict was certified in exact arithmetic.
  bool certified = false;
};

/// Phase-one simplex on the model with integrality ignored. Returns a basic
/// feasible solution or infeasible.
Solution solve_lp(const ModelMatrix& model, const SolverConfig& cfg = {});

/// Depth-first branch and bound over the binary variables, solve_lp at every node.
Solution solve_ilp(const ModelMatrix& model, const SolverConfig& cfg = {});

/// P values of a feasible solution; pruned variables read as 0.
AssignmentMatrix extract_assignment(const Solution& sol, const ModelMatrix& model);

/// Solution text: "# status <name>" then one "name value" line per variable.
std::string to_solution_text(const Solution& sol, const ModelMatrix& model);
/// Reads "name value" lines (lines starting with '#' are comments, an optional
/// "# status <name>" line sets the status; otherwise a file with values is feasible).
Solution parse_solution_text(std::string_view text, const ModelMatrix& model);

void export_solution(const Solution& sol, const ModelMatrix& model,
                     const std::filesystem::path& path);
Solution import_solution(const std::filesystem::path& path, const ModelMatrix& model);

}  // namespace turnpike
