#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "turnpike/core.hpp"
#include "turnpike/metrics.hpp"
#include "turnpike/model.hpp"
#include "turnpike/pipeline.hpp"

namespace turnpike {

/// An instance file: the multiset, optional ground-truth coordinates and an optional
/// provenance object carried through unchanged.
struct Instance {
  DistanceMultiset y;
  std::optional<PointSet> ground_truth;
  /// JSON object text, or empty.
  std::string provenance;
};

/// 1 / lcm of the denominators of the values' shortest decimal spellings, when every
/// value lands within the exact tick range on that grid.
std::optional<Rational> detect_grid(std::span<const double> values);

/// Parses and validates instance JSON. Without "scale" the grid is detected from the
/// values; instances without a common grid load in double mode.
Instance parse_instance(std::string_view text);
std::string instance_to_json(const Instance& inst);

Instance read_instance(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

/// {"n", "m_prime", "integral", "entries": [[i, j, r, weight], ...]}, 1-based, nonzero
/// weights only.
std::string assignment_to_json(const AssignmentMatrix& p, double integrality_tol = 1e-6);
AssignmentMatrix parse_assignment(std::string_view text);

std::string pipeline_result_to_json(const PipelineResult& result,
                                    const std::optional<Verification>& verification = std::nullopt);
std::string metrics_to_json(const Metrics& m);
std::string model_stats_to_json(const ModelStats& s);

}  // namespace turnpike
