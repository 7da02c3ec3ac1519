#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "turnpike/core.hpp"
#include "turnpike/partitions.hpp"

namespace turnpike {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { assignment, triangle, coordinate };

/// A model variable. Index layout by kind (0-based):
///   assignment P(i,j,r): {i, j, r}
///   triangle   T(i,j,k,r,s,t): {i, j, k, r, s, t}
///   coordinate x(i): {i}
struct Variable {
  VarKind kind = VarKind::assignment;
  std::array<std::size_t, 6> index{};
  double lower = 0.0;
  double upper = 1.0;
  bool integral = true;

  friend bool operator==(const Variable&, const Variable&) = default;
};

/// `P_i_j_r`, `T_i_j_k_r_s_t` or `x_i`, 1-based.
std::string variable_name(const Variable& v);
/// Inverse of variable_name; nullopt for names outside that scheme.
std::optional<Variable> parse_variable_name(std::string_view name);

enum class Relation { equal, less_equal, greater_equal };

struct Term {
  std::size_t var = 0;
  double coef = 0.0;
  friend bool operator==(const Term&, const Term&) = default;
};

struct Constraint {
  std::vector<Term> terms;
  Relation relation = Relation::equal;
  double rhs = 0.0;
  friend bool operator==(const Constraint&, const Constraint&) = default;
};

enum class Formulation { milp, triangle_ilp, triangle_lp };

std::string_view formulation_name(Formulation f);  // "milp", "tri-ilp", "tri-lp"
Formulation parse_formulation(std::string_view name);

struct ModelOptions {
  bool basis = false;
  bool prune = false;
  friend bool operator==(const ModelOptions&, const ModelOptions&) = default;
};

/// Solver-agnostic sparse linear system with bounds and integrality flags.
/// The objective is identically zero (feasibility problems).
struct ModelMatrix {
  Formulation form = Formulation::triangle_ilp;
  bool relaxed = false;
  std::size_t n = 0;
  std::size_t m_prime = 0;
  ModelOptions options;
  std::size_t partition_count = 0;
  std::size_t refinements = 0;
  std::size_t pruned_assignment_vars = 0;
  /// The two-partition set came from a tolerance test, so feasibility certifies nothing.
  bool approximate_partitions = false;
  /// n >= 3 with an empty two-partition set: the selection rows cannot be satisfied.
  bool trivially_infeasible = false;

  std::vector<Variable> vars;
  std::vector<Constraint> constraints;

  /// Dense lookup (interval_id * m_prime + r) -> variable index, or npos when pruned.
  std::vector<std::size_t> assignment_index;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::optional<std::size_t> assignment_var(std::size_t i, std::size_t j, std::size_t r) const;

  friend bool operator==(const ModelMatrix&, const ModelMatrix&) = default;
};

struct ModelStats {
  std::size_t n_vars = 0;
  std::size_t n_constraints = 0;
  std::size_t n_assignment_vars = 0;
  std::size_t n_triangle_vars = 0;
  std::size_t n_coordinate_vars = 0;
  std::size_t n_pruned_assignment_vars = 0;
  std::size_t n_refinements = 0;
  std::size_t partition_count = 0;
  std::size_t n_integral = 0;
};

/// A forbidden label (i, j, r), 0-based.
struct LabelRef {
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t r = 0;
  friend auto operator<=>(const LabelRef&, const LabelRef&) = default;
};

/// Refinements (1, j, k), 1 < j < k <= n, as 0-based {0, j, k} in lexicographic order.
std::vector<std::array<std::size_t, 3>> basis_refinements(std::size_t n);
/// All refinements i < j < k in lexicographic order.
std::vector<std::array<std::size_t, 3>> all_refinements(std::size_t n);

/// Labels excluded by the containment rank bounds, sorted. Requires sum(mu) = C(n,2).
std::vector<LabelRef> containment_forbidden(std::size_t n, std::span<const int> mu);

/// Coordinate-coupled MILP with normalization x_1 = 0.
ModelMatrix build_milp(const DistanceMultiset& y, ModelOptions opts = {});

/// Triangle ILP over the supplied two-partition set.
ModelMatrix build_triangle_ilp(const DistanceMultiset& y, const TwoPartitionSet& pset,
                               ModelOptions opts = {}, bool approximate_partitions = false);

/// Clears every integrality flag; rows and bounds unchanged. Idempotent.
ModelMatrix relax(ModelMatrix model);

ModelStats model_stats(const ModelMatrix& model);

/// Human-readable LP text: objective, constraints, bounds, binaries. Deterministic.
std::string to_lp_format(const ModelMatrix& model);
/// Parses text produced by to_lp_format (or a compatible subset of the format).
ModelMatrix parse_lp_format(std::string_view text);

void export_model(const ModelMatrix& model, const std::filesystem::path& path);
ModelMatrix import_model(const std::filesystem::path& path);

}  // namespace turnpike
