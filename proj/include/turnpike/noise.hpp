#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "turnpike/core.hpp"

namespace turnpike {

/// Raised when rounding produced a nonpositive distance.
class DegenerateInstance : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

enum class NoiseMode { per_element, per_value };
enum class NoiseDistribution { uniform_pm_r, adversarial_pm_r };

std::string_view noise_mode_name(NoiseMode m);
NoiseMode parse_noise_mode(std::string_view name);
std::string_view noise_distribution_name(NoiseDistribution d);
NoiseDistribution parse_noise_distribution(std::string_view name);

struct NoiseSpec {
  double r = 0.0;
  double R = 0.0;
  std::uint64_t seed = 0;
  NoiseMode mode = NoiseMode::per_value;
  NoiseDistribution distribution = NoiseDistribution::uniform_pm_r;

  /// Throws InvalidInput unless r and R are finite and nonnegative.
  void validate() const;
};

/// Noisy observations aligned with y.expand(): element k came from distinct value
/// source[k].
struct Observation {
  std::vector<double> values;
  std::vector<std::size_t> source;
  /// Draws that would have crossed zero and were redrawn or clamped.
  std::size_t repairs = 0;
};

Observation observe(const DistanceMultiset& y, const NoiseSpec& spec);

/// observe(y, spec).values.
std::vector<double> perturb(const DistanceMultiset& y, const NoiseSpec& spec);

/// Nearest multiple of R, ties away from zero; R = 0 is the identity.
double round_to_grid(double value, double R);
std::vector<double> round_to_grid(std::span<const double> values, double R);

/// Groups rounded observations. With R > 0 the values are multiples of R and are
/// grouped exactly on that grid; with R = 0 the double-mode grouping rule applies.
/// Throws DegenerateInstance on a nonpositive value.
DistanceMultiset aggregate(std::span<const double> rounded, double R = 0.0);

/// How rounding changed the multiplicity structure.
struct Distortion {
  /// Extra rounded values produced by true values whose copies disagree.
  std::size_t splits = 0;
  /// Extra true values absorbed by rounded values shared between them.
  std::size_t merges = 0;
};

Distortion distortion(std::span<const double> rounded, std::span<const std::size_t> source);

/// One rounded representative per distinct true value (per_value mode only).
std::vector<double> representatives(const DistanceMultiset& y, const NoiseSpec& spec);

struct RecoveryCheck {
  double gap_star = 0.0;
  double threshold = 0.0;  // 6(r + R)
  double tau = 0.0;        // gap_star / 2
  bool satisfied = false;  // threshold < gap_star
};

RecoveryCheck check_recovery(const DistanceMultiset& y, double r, double R);

}  // namespace turnpike
