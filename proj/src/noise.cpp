#include "turnpike/noise.hpp"

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>

#include "turnpike/log.hpp"
#include "turnpike/partitions.hpp"

namespace turnpike {
namespace {

constexpr int kRedraws = 1000;

// Uniform in [0, 1) from the top 53 bits; independent of the standard library's
// distribution implementations so streams match across platforms.
double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

class NoiseSource {
 public:
  explicit NoiseSource(const NoiseSpec& spec) : spec_(spec), rng_(spec.seed) {}

  double perturbed(double v) {
    if (spec_.r == 0.0) return v;
    if (spec_.distribution == NoiseDistribution::adversarial_pm_r) {
      const double sign = (rng_() & 1) ? 1.0 : -1.0;
      if (v + sign * spec_.r > 0) return v + sign * spec_.r;
      ++repairs_;
      return v + spec_.r;
    }
    for (int k = 0; k < kRedraws; ++k) {
      const double out = v + spec_.r * (2.0 * unit_draw(rng_) - 1.0);
      if (out > 0) {
        return out;
      }
      ++repairs_;
    }
    return v + spec_.r;
  }

  std::size_t repairs() const { return repairs_; }

 private:
  const NoiseSpec& spec_;
  std::mt19937_64 rng_;
  std::size_t repairs_ = 0;
};

}  // namespace

std::string_view noise_mode_name(NoiseMode m) {
  return m == NoiseMode::per_value ? "per_value" : "per_element";
}

NoiseMode parse_noise_mode(std::string_view name) {
  if (name == "per_value") return NoiseMode::per_value;
  if (name == "per_element") return NoiseMode::per_element;
  throw InvalidInput("unknown noise mode '" + std::string(name) + "'");
}

std::string_view noise_distribution_name(NoiseDistribution d) {
  return d == NoiseDistribution::uniform_pm_r ? "uniform_pm_r" : "adversarial_pm_r";
}

NoiseDistribution parse_noise_distribution(std::string_view name) {
  if (name == "uniform_pm_r" || name == "uniform") return NoiseDistribution::uniform_pm_r;
  if (name == "adversarial_pm_r" || name == "adversarial") return NoiseDistribution::adversarial_pm_r;
  throw InvalidInput("unknown noise distribution '" + std::string(name) + "'");
}

void NoiseSpec::validate() const {
  if (!std::isfinite(r) || r < 0) throw InvalidInput("noise radius r must be finite and >= 0");
  if (!std::isfinite(R) || R < 0) throw InvalidInput("rounding grid R must be finite and >= 0");
}

Observation observe(const DistanceMultiset& y, const NoiseSpec& spec) {
  spec.validate();
  NoiseSource noise(spec);
  Observation out;
  for (std::size_t k = 0; k < y.distinct(); ++k) {
    const double v = y.value(k);
    const double shared = spec.mode == NoiseMode::per_value ? noise.perturbed(v) : 0.0;
    for (int c = 0; c < y.multiplicity(k); ++c) {
      out.values.push_back(spec.mode == NoiseMode::per_value ? shared : noise.perturbed(v));
      out.source.push_back(k);
    }
  }
  out.repairs = noise.repairs();
  if (out.repairs > 0) {
    log(LogLevel::info, "noise: " + std::to_string(out.repairs) +
                            " draws crossed zero and were repaired");
  }
  return out;
}

std::vector<double> perturb(const DistanceMultiset& y, const NoiseSpec& spec) {
  return observe(y, spec).values;
}

double round_to_grid(double value, double R) {
  if (R == 0.0) return value;
  return std::round(value / R) * R;
}

std::vector<double> round_to_grid(std::span<const double> values, double R) {
  std::vector<double> out;
  out.reserve(values.size());
  for (const double v : values) out.push_back(round_to_grid(v, R));
  return out;
}

DistanceMultiset aggregate(std::span<const double> rounded, double R) {
  if (rounded.empty()) throw InvalidInput("cannot aggregate an empty list");
  for (const double v : rounded) {
    if (!(v > 0)) {
      throw DegenerateInstance("rounded distance " + format_double(v) + " is not positive");
    }
  }
  if (R > 0) {
    if (const auto unit = Rational::from_double(R)) {
      std::vector<std::int64_t> ticks;
      bool fits = true;
      for (const double v : rounded) {
        const double q = std::round(v / R);
        if (q >= static_cast<double>(kMaxExactTicks)) fits = false;
        ticks.push_back(static_cast<std::int64_t>(q));
      }
      if (fits) return DistanceMultiset::group_ticks(ticks, *unit);
    }
  }
  return DistanceMultiset::group(rounded);
}

Distortion distortion(std::span<const double> rounded, std::span<const std::size_t> source) {
  if (rounded.size() != source.size()) throw InvalidInput("rounded values and sources differ in length");
  std::map<std::size_t, std::set<double>> images;
  std::map<double, std::set<std::size_t>> preimages;
  for (std::size_t k = 0; k < rounded.size(); ++k) {
    images[source[k]].insert(rounded[k]);
    preimages[rounded[k]].insert(source[k]);
  }
  Distortion d;
  for (const auto& [src, vals] : images) d.splits += vals.size() - 1;
  for (const auto& [val, srcs] : preimages) d.merges += srcs.size() - 1;
  return d;
}

std::vector<double> representatives(const DistanceMultiset& y, const NoiseSpec& spec) {
  if (spec.mode != NoiseMode::per_value) {
    throw InvalidInput("representatives are defined in per_value mode only");
  }
  const auto obs = observe(y, spec);
  std::vector<double> reps(y.distinct());
  for (std::size_t k = 0; k < obs.values.size(); ++k) {
    reps[obs.source[k]] = round_to_grid(obs.values[k], spec.R);
  }
  return reps;
}

RecoveryCheck check_recovery(const DistanceMultiset& y, double r, double R) {
  if (!(r >= 0) || !(R >= 0)) throw InvalidInput("r and R must be nonnegative");
  RecoveryCheck c;
  c.gap_star = gaps(y).gap_star;
  c.threshold = 6.0 * (r + R);
  c.tau = c.gap_star / 2.0;
  c.satisfied = c.threshold < c.gap_star;
  return c;
}

}  // namespace turnpike
