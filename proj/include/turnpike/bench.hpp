#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "turnpike/core.hpp"
#include "turnpike/model.hpp"
#include "turnpike/noise.hpp"

namespace turnpike {

enum class Generator { uniform01, normal, cauchy, digest_linear, digest_circular, beltway };

std::string_view generator_name(Generator g);
Generator parse_generator(std::string_view name);

struct GeneratedInstance {
  PointSet x;
  DistanceMultiset y;
  /// Set for circular instances (in coordinate units).
  std::optional<double> circumference;
};

/// n i.i.d. coordinates from the distribution, quantized to multiples of `quantum`;
/// samples with coincident points (or ticks beyond the exact range) are redrawn.
GeneratedInstance gen_synthetic(Generator dist, std::size_t n, std::uint64_t seed,
                                double quantum = 1e-6);

/// Integer restriction sites on a genome of the given length. Linear instances add
/// both ends as points; circular ones use shortest-arc distances.
GeneratedInstance gen_partial_digest(std::size_t sites, std::int64_t genome_length, bool circular,
                                     std::uint64_t seed);

/// Points on a circle of circumference 1 (quantized), shortest-arc distances.
GeneratedInstance gen_beltway(std::size_t n, std::uint64_t seed, double quantum = 1e-6);

/// Any generator by name; n counts points (linear digests place n - 2 interior sites).
GeneratedInstance generate(Generator g, std::size_t n, std::uint64_t seed, double quantum = 1e-6,
                           std::int64_t genome_length = 1000);

enum class OracleVerdict { realizable, not_realizable, undecided };

struct OracleResult {
  OracleVerdict verdict = OracleVerdict::undecided;
  std::optional<PointSet> witness;
  std::size_t nodes = 0;
};

/// Backtracking search placing the largest remaining distance at either end.
/// Exact multisets only. Gives up (undecided) after node_budget placements.
OracleResult oracle_realizable(const DistanceMultiset& y, std::size_t node_budget = 20'000'000);

/// Per-trial seed derived from the experiment seed and the trial coordinates.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                         std::uint64_t c = 0);

enum class TauRule { half_gap_star, fixed };

std::string_view tau_rule_name(TauRule t);
TauRule parse_tau_rule(std::string_view name);

struct ExperimentSpec {
  Generator generator = Generator::uniform01;
  std::vector<std::size_t> n_values{6};
  std::size_t trials = 10;
  std::uint64_t seed = 1;
  double quantum = 1e-6;
  std::int64_t genome_length = 1000;
  // Solver options for the model-based experiments.
  ModelOptions model;
  std::int64_t node_limit = 200000;
  double time_limit = 0.0;
  // Phase runs.
  std::vector<double> r_grid{0.0};
  std::vector<double> R_grid{0.0};
  TauRule tau_rule = TauRule::half_gap_star;
  double tau = 0.0;
  NoiseMode mode = NoiseMode::per_value;
  NoiseDistribution distribution = NoiseDistribution::uniform_pm_r;
  // Digest runs.
  double digest_r = 5.0;
  /// Emit measured wall times; off writes 0 so CSVs are byte-reproducible.
  bool timing = true;
  /// Worker threads; 0 reads TURNPIKE_WORKERS (default 1).
  std::size_t workers = 0;

  /// Throws InvalidInput on empty grids, zero trials and similar.
  void validate() const;
};

struct PhaseCell {
  std::size_t n = 0;
  double r = 0.0;
  double R = 0.0;
  std::size_t trials = 0;
  double recovery_rate = 0.0;
  double false_positive_rate = 0.0;
  double false_negative_rate = 0.0;
  double threshold = 0.0;  // 6(r + R)
  double min_gap_star = 0.0;
  double max_gap_star = 0.0;
  /// threshold < gap_star for every trial instance.
  bool inside_theorem = false;
  std::size_t redrawn = 0;
  /// Trials with nothing to compare: per_element values that could not be matched to
  /// true indices, or noise that rounded a distance to zero on every redraw.
  std::size_t unidentified = 0;
};

std::vector<PhaseCell> phase_experiment(const ExperimentSpec& spec);
std::string phase_csv(const std::vector<PhaseCell>& cells, const ExperimentSpec& spec);

struct IntegralityRow {
  std::string generator;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string status;  // feasible, infeasible or undecided
  std::optional<double> int_score;
  double time_ms = 0.0;
};

std::vector<IntegralityRow> integrality_experiment(const ExperimentSpec& spec);
std::string integrality_csv(const std::vector<IntegralityRow>& rows);

struct DigestRow {
  std::string generator;  // digest_linear or digest_circular
  std::size_t n = 0;
  std::size_t sites = 0;
  std::uint64_t seed = 0;
  double r = 0.0;
  double R = 0.0;
  std::string certificate;
  std::optional<double> labeling_error;
  std::optional<double> fragment_recovery;
  double time_ms = 0.0;
};

/// Runs both linear and circular digests for every n in the spec.
std::vector<DigestRow> digest_experiment(const ExperimentSpec& spec);
std::string digest_csv(const std::vector<DigestRow>& rows);

}  // namespace turnpike
