#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "turnpike/core.hpp"
#include "turnpike/model.hpp"
#include "turnpike/solver.hpp"

namespace turnpike {

enum class Certificate { realizable, not_realizable, undecided, diagnostic_only };

std::string_view certificate_name(Certificate c);
Certificate parse_certificate(std::string_view name);

struct PipelineOptions {
  Formulation form = Formulation::triangle_ilp;
  ModelOptions model;
  /// Use the tolerance test with this tau instead of the exact two-partition set.
  std::optional<double> tau;
  bool coords = false;
  SolverConfig solver = exact_solver();

  static SolverConfig exact_solver() {
    SolverConfig c;
    c.exact = true;
    return c;
  }
};

struct PipelineResult {
  AssignmentMatrix assignment;
  bool integral = false;
  Certificate certificate = Certificate::undecided;
  /// Realized coordinates for integral assignments, least-squares fit otherwise.
  std::optional<std::vector<double>> coords;
  /// Max triangle violation of the ruler induced by the assignment.
  double induced_ruler_residual = 0.0;
  SolveStatus status = SolveStatus::infeasible;
  SolveStats stats;
  bool approximate_partitions = false;
  std::size_t partition_count = 0;
  PipelineOptions options;
};

/// Enumerate partitions, build and solve the model, extract the assignment and
/// classify the outcome.
PipelineResult run_pipeline(const DistanceMultiset& y, const PipelineOptions& opts = {});

/// Minimizer of sum_{i<j} (x_j - x_i - rho_ij)^2 with x_1 = 0.
std::vector<double> coords_least_squares(const Ruler& rho);

struct Verification {
  bool ok = false;
  /// "ok", "not_claimed", "shape_mismatch", "not_integral", "multiplicity_or_triangle",
  /// "not_monotone" or "delta_mismatch".
  std::string reason;
};

/// Independent re-check of a realizable claim against y.
Verification verify_certificate(const PipelineResult& result, const DistanceMultiset& y);

}  // namespace turnpike
