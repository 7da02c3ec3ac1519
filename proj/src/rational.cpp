#include "turnpike/rational.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

namespace turnpike {
namespace {

__int128 wide_gcd(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    const __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

bool fits_int64(__int128 v) {
  return v >= std::numeric_limits<std::int64_t>::min() &&
         v <= std::numeric_limits<std::int64_t>::max();
}

// Parses an unsigned decimal mantissa with optional fraction and exponent into
// digits * 10^exp10. Returns false on malformed text.
bool parse_decimal(std::string_view text, __int128& digits, int& exp10) {
  digits = 0;
  exp10 = 0;
  std::size_t pos = 0;
  bool any = false;
  bool in_fraction = false;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (c == '.') {
      if (in_fraction) return false;
      in_fraction = true;
      continue;
    }
    if (c < '0' || c > '9') break;
    any = true;
    if (digits > (std::numeric_limits<__int128>::max() / 100)) return false;
    digits = digits * 10 + (c - '0');
    if (in_fraction) --exp10;
  }
  if (!any) return false;
  if (pos < text.size()) {
    if (text[pos] != 'e' && text[pos] != 'E') return false;
    ++pos;
    int e = 0;
    if (pos < text.size() && text[pos] == '+') ++pos;
    const auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), e);
    if (ec != std::errc{} || ptr != text.data() + text.size()) return false;
    exp10 += e;
  }
  return true;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  *this = from_wide(num, den);
}

Rational Rational::from_wide(__int128 num, __int128 den) {
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const __int128 g = wide_gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (!fits_int64(num) || !fits_int64(den)) throw OverflowError("rational overflow");
  Rational r;
  r.num_ = static_cast<std::int64_t>(num);
  r.den_ = static_cast<std::int64_t>(den);
  return r;
}

double Rational::to_double() const {
  return static_cast<double>(num_) / static_cast<double>(den_);
}

std::string Rational::to_string() const {
  std::int64_t d = den_;
  int twos = 0;
  int fives = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++twos;
  }
  while (d % 5 == 0) {
    d /= 5;
    ++fives;
  }
  if (d != 1) return std::to_string(num_) + "/" + std::to_string(den_);
  // num/den = num * 2^(k - twos) * 5^(k - fives) / 10^k
  const int k = std::max(twos, fives);
  __int128 scaled = num_;
  for (int i = twos; i < k; ++i) scaled *= 2;
  for (int i = fives; i < k; ++i) scaled *= 5;
  const bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string digits;
  if (scaled == 0) digits = "0";
  while (scaled > 0) {
    digits.insert(digits.begin(), static_cast<char>('0' + static_cast<int>(scaled % 10)));
    scaled /= 10;
  }
  if (k > 0) {
    if (static_cast<int>(digits.size()) <= k) {
      digits.insert(0, static_cast<std::size_t>(k) - digits.size() + 1, '0');
    }
    digits.insert(digits.size() - static_cast<std::size_t>(k), ".");
  }
  return negative ? "-" + digits : digits;
}

Rational Rational::parse(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const Rational a = parse(text.substr(0, slash));
    const Rational b = parse(text.substr(slash + 1));
    return a / b;
  }
  bool negative = false;
  if (text.front() == '-' || text.front() == '+') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  __int128 digits = 0;
  int exp10 = 0;
  if (!parse_decimal(text, digits, exp10)) {
    throw std::invalid_argument("malformed rational literal '" + std::string(text) + "'");
  }
  // Strip trailing zeros from the mantissa before applying the exponent.
  while (digits != 0 && digits % 10 == 0 && exp10 < 0) {
    digits /= 10;
    ++exp10;
  }
  __int128 num = negative ? -digits : digits;
  __int128 den = 1;
  for (; exp10 > 0; --exp10) {
    num *= 10;
    if (!fits_int64(num)) throw OverflowError("rational literal too large");
  }
  for (; exp10 < 0; ++exp10) {
    den *= 10;
    if (!fits_int64(den)) throw OverflowError("rational literal too fine");
  }
  return from_wide(num, den);
}

std::optional<Rational> Rational::from_double(double value) {
  if (!std::isfinite(value)) return std::nullopt;
  try {
    return parse(format_double(value));
  } catch (const OverflowError&) {
    return std::nullopt;
  }
}

Rational operator+(const Rational& a, const Rational& b) {
  return Rational::from_wide(static_cast<__int128>(a.num_) * b.den_ +
                                 static_cast<__int128>(b.num_) * a.den_,
                             static_cast<__int128>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  return Rational::from_wide(static_cast<__int128>(a.num_) * b.num_,
                             static_cast<__int128>(a.den_) * b.den_);
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw std::invalid_argument("rational division by zero");
  return Rational::from_wide(static_cast<__int128>(a.num_) * b.den_,
                             static_cast<__int128>(a.den_) * b.num_);
}

Rational Rational::operator-() const {
  Rational r;
  r.num_ = -num_;
  r.den_ = den_;
  return r;
}

bool operator<(const Rational& a, const Rational& b) {
  return static_cast<__int128>(a.num_) * b.den_ < static_cast<__int128>(b.num_) * a.den_;
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw std::runtime_error("double formatting failed");
  return std::string(buf.data(), ptr);
}

double scaled_value(std::int64_t ticks, const Rational& unit) {
  const __int128 num = static_cast<__int128>(ticks) * unit.num();
  return static_cast<double>(num) / static_cast<double>(unit.den());
}

}  // namespace turnpike
