#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace turnpike {

/// Thrown when an int64 rational operation would overflow.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// A normalized fraction of two int64 values (den > 0, gcd(num, den) = 1).
///
/// Used for grid units and for exact decimal rendering. Intermediate products are
/// computed in 128 bits and any result that does not fit in int64 throws OverflowError.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  double to_double() const;
  bool is_integer() const { return den_ == 1; }

  /// Exact decimal text if den has only the prime factors 2 and 5, else "num/den".
  std::string to_string() const;

  /// Parses "12", "-0.25", "1e-6", "3.5E+2" or "7/3" exactly.
  static Rational parse(std::string_view text);

  /// The rational spelled by the shortest decimal that round-trips to `value`.
  /// Returns nullopt when that decimal does not fit the int64 representation.
  static std::optional<Rational> from_double(double value);

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const;

  friend bool operator==(const Rational& a, const Rational& b) = default;
  friend bool operator<(const Rational& a, const Rational& b);
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

 private:
  static Rational from_wide(__int128 num, __int128 den);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// Shortest round-trip decimal rendering of a double ("3", "0.1", "1e-06" style
/// normalized to plain notation where it is short).
std::string format_double(double value);

/// `ticks * unit` as the nearest double. Exact when |ticks * num| < 2^53.
double scaled_value(std::int64_t ticks, const Rational& unit);

/// Largest tick magnitude kept in exact mode; above it values fall back to doubles.
inline constexpr std::int64_t kMaxExactTicks = std::int64_t{1} << 53;

}  // namespace turnpike
