#include "turnpike/core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "turnpike/log.hpp"

namespace turnpike {
namespace {

constexpr double kMergeRelTol = 1e-12;

bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= kMergeRelTol * std::max(std::abs(a), std::abs(b));
}

}  // namespace

Interval interval_at(std::size_t n, std::size_t id) {
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::size_t row = n - i - 1;
    if (id < row) return {i, i + 1 + id};
    id -= row;
  }
  throw std::out_of_range("interval id out of range");
}

std::optional<std::size_t> points_for_total(std::size_t m) {
  const auto n = static_cast<std::size_t>(std::llround((1.0 + std::sqrt(1.0 + 8.0 * m)) / 2.0));
  for (std::size_t c = n > 2 ? n - 1 : 2; c <= n + 1; ++c) {
    if (interval_count(c) == m) return c;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// PointSet

PointSet::PointSet(std::vector<double> coords) : coords_(std::move(coords)) { validate(); }

PointSet::PointSet(std::vector<std::int64_t> ticks, Rational unit)
    : ticks_(std::move(ticks)), unit_(unit) {
  if (unit <= Rational(0)) throw InvalidInput("grid unit must be positive");
  coords_.reserve(ticks_.size());
  for (const auto t : ticks_) coords_.push_back(scaled_value(t, unit));
  validate();
}

void PointSet::validate() const {
  if (coords_.size() < 2) throw InvalidInput("a point set needs at least two points");
  for (std::size_t k = 0; k + 1 < coords_.size(); ++k) {
    const bool increasing =
        exact() ? ticks_[k] < ticks_[k + 1] : coords_[k] < coords_[k + 1];
    if (!increasing) throw InvalidInput("coordinates must be strictly increasing");
  }
}

const Rational& PointSet::unit() const {
  if (!unit_) throw std::logic_error("point set is not in exact mode");
  return *unit_;
}

PointSet PointSet::anchored() const {
  if (exact()) {
    std::vector<std::int64_t> t(ticks_);
    const auto base = t.front();
    for (auto& v : t) v -= base;
    return PointSet(std::move(t), *unit_);
  }
  std::vector<double> c(coords_);
  const double base = c.front();
  for (auto& v : c) v -= base;
  return PointSet(std::move(c));
}

PointSet PointSet::reflected() const {
  const std::size_t n = size();
  if (exact()) {
    std::vector<std::int64_t> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = ticks_.back() - ticks_[n - 1 - i];
    return PointSet(std::move(t), *unit_);
  }
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = coords_.back() - coords_[n - 1 - i];
  return PointSet(std::move(c));
}

bool operator==(const PointSet& a, const PointSet& b) {
  if (a.exact() && b.exact() && a.unit() == b.unit()) return a.ticks_ == b.ticks_;
  return a.coords_ == b.coords_;
}

// ---------------------------------------------------------------------------
// DistanceMultiset

DistanceMultiset::DistanceMultiset(std::vector<double> values, std::vector<int> multiplicities)
    : values_(std::move(values)), multiplicities_(std::move(multiplicities)) {
  validate();
}

DistanceMultiset::DistanceMultiset(std::vector<std::int64_t> ticks,
                                   std::vector<int> multiplicities, Rational unit)
    : multiplicities_(std::move(multiplicities)), ticks_(std::move(ticks)), unit_(unit) {
  if (unit <= Rational(0)) throw InvalidInput("grid unit must be positive");
  values_.reserve(ticks_.size());
  for (const auto t : ticks_) {
    if (t > kMaxExactTicks || t < -kMaxExactTicks) {
      throw InvalidInput("value exceeds the exact grid range");
    }
    values_.push_back(scaled_value(t, unit));
  }
  validate();
}

void DistanceMultiset::validate() {
  if (values_.empty()) throw InvalidInput("distance multiset is empty");
  if (values_.size() != multiplicities_.size()) {
    throw InvalidInput("values and multiplicities differ in length");
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    const bool positive = exact() ? ticks_[k] > 0 : values_[k] > 0.0;
    if (!positive || !std::isfinite(values_[k])) {
      throw InvalidInput("distance values must be positive and finite");
    }
    if (multiplicities_[k] < 1) throw InvalidInput("multiplicities must be at least 1");
    if (k > 0) {
      const bool decreasing = exact() ? ticks_[k - 1] > ticks_[k] : values_[k - 1] > values_[k];
      if (!decreasing) throw InvalidInput("distance values must be strictly decreasing");
    }
  }
  total_ = 0;
  for (const int mu : multiplicities_) total_ += static_cast<std::size_t>(mu);
}

DistanceMultiset DistanceMultiset::group(std::span<const double> raw) {
  std::vector<double> sorted(raw.begin(), raw.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  std::vector<double> values;
  std::vector<int> mult;
  std::size_t merges = 0;
  for (const double v : sorted) {
    if (!values.empty() && nearly_equal(values.back(), v)) {
      merges += values.back() != v;
      ++mult.back();
    } else {
      values.push_back(v);
      mult.push_back(1);
    }
  }
  if (merges > 0) {
    log(LogLevel::warning,
        "merged " + std::to_string(merges) + " near-equal distances within 1e-12 relative");
  }
  return DistanceMultiset(std::move(values), std::move(mult));
}

DistanceMultiset DistanceMultiset::group_ticks(std::span<const std::int64_t> raw,
                                               Rational unit) {
  std::vector<std::int64_t> sorted(raw.begin(), raw.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  std::vector<std::int64_t> ticks;
  std::vector<int> mult;
  for (const auto t : sorted) {
    if (!ticks.empty() && ticks.back() == t) {
      ++mult.back();
    } else {
      ticks.push_back(t);
      mult.push_back(1);
    }
  }
  return DistanceMultiset(std::move(ticks), std::move(mult), unit);
}

const Rational& DistanceMultiset::unit() const {
  if (!unit_) throw std::logic_error("distance multiset is not in exact mode");
  return *unit_;
}

Rational DistanceMultiset::exact_value(std::size_t r) const {
  return Rational(ticks_[r]) * unit();
}

std::vector<double> DistanceMultiset::expand() const {
  std::vector<double> out;
  out.reserve(total_);
  for (std::size_t k = 0; k < values_.size(); ++k) {
    out.insert(out.end(), static_cast<std::size_t>(multiplicities_[k]), values_[k]);
  }
  return out;
}

std::vector<std::int64_t> DistanceMultiset::expand_ticks() const {
  std::vector<std::int64_t> out;
  out.reserve(total_);
  for (std::size_t k = 0; k < ticks_.size(); ++k) {
    out.insert(out.end(), static_cast<std::size_t>(multiplicities_[k]), ticks_[k]);
  }
  return out;
}

std::optional<std::size_t> DistanceMultiset::find(double v) const {
  auto it = std::lower_bound(values_.begin(), values_.end(), v, std::greater<>());
  for (auto c : {it, it == values_.begin() ? it : it - 1}) {
    if (c != values_.end() && nearly_equal(*c, v)) {
      return static_cast<std::size_t>(c - values_.begin());
    }
  }
  return std::nullopt;
}

std::optional<std::size_t> DistanceMultiset::find_ticks(std::int64_t t) const {
  auto it = std::lower_bound(ticks_.begin(), ticks_.end(), t, std::greater<>());
  if (it != ticks_.end() && *it == t) return static_cast<std::size_t>(it - ticks_.begin());
  return std::nullopt;
}

std::vector<std::size_t> DistanceMultiset::cumulative() const {
  std::vector<std::size_t> out(multiplicities_.size());
  std::size_t acc = 0;
  for (std::size_t k = 0; k < out.size(); ++k) {
    acc += static_cast<std::size_t>(multiplicities_[k]);
    out[k] = acc;
  }
  return out;
}

DistanceMultiset DistanceMultiset::scaled(double c) const {
  std::vector<double> v(values_);
  for (auto& x : v) x *= c;
  return DistanceMultiset(std::move(v), multiplicities_);
}

bool operator==(const DistanceMultiset& a, const DistanceMultiset& b) {
  if (a.multiplicities_ != b.multiplicities_) return false;
  if (a.exact() && b.exact()) {
    if (a.unit() == b.unit()) return a.ticks_ == b.ticks_;
    for (std::size_t k = 0; k < a.distinct(); ++k) {
      if (!(a.exact_value(k) == b.exact_value(k))) return false;
    }
    return true;
  }
  return a.values_ == b.values_;
}

// ---------------------------------------------------------------------------
// AssignmentMatrix

AssignmentMatrix::AssignmentMatrix(std::size_t n, std::size_t m_prime)
    : n_(n), m_prime_(m_prime), weights_(interval_count(n) * m_prime, 0.0) {}

AssignmentMatrix AssignmentMatrix::from_labels(std::size_t n, std::size_t m_prime,
                                               std::span<const std::size_t> labels) {
  if (labels.size() != interval_count(n)) throw InvalidInput("one label per interval required");
  AssignmentMatrix p(n, m_prime);
  for (std::size_t e = 0; e < labels.size(); ++e) {
    if (labels[e] >= m_prime) throw InvalidInput("label out of range");
    p(e, labels[e]) = 1.0;
  }
  return p;
}

bool AssignmentMatrix::integral(double tol) const {
  return std::all_of(weights_.begin(), weights_.end(),
                     [tol](double w) { return w <= tol || w >= 1.0 - tol; });
}

double AssignmentMatrix::row_sum(std::size_t interval) const {
  double s = 0.0;
  for (std::size_t r = 0; r < m_prime_; ++r) s += (*this)(interval, r);
  return s;
}

double AssignmentMatrix::column_sum(std::size_t r) const {
  double s = 0.0;
  for (std::size_t e = 0; e < intervals(); ++e) s += (*this)(e, r);
  return s;
}

std::vector<std::size_t> AssignmentMatrix::hard_labels() const {
  std::vector<std::size_t> labels(intervals(), 0);
  for (std::size_t e = 0; e < intervals(); ++e) {
    double best = -1.0;
    for (std::size_t r = 0; r < m_prime_; ++r) {
      if ((*this)(e, r) > best) {
        best = (*this)(e, r);
        labels[e] = r;
      }
    }
  }
  return labels;
}

AssignmentMatrix AssignmentMatrix::rounded() const {
  AssignmentMatrix out(*this);
  for (auto& w : out.weights_) w = w >= 0.5 ? 1.0 : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Distances and rulers

DistanceMultiset delta(const PointSet& ps) {
  const std::size_t n = ps.size();
  if (ps.exact()) {
    std::vector<std::int64_t> raw;
    raw.reserve(interval_count(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) raw.push_back(ps.ticks()[j] - ps.ticks()[i]);
    }
    return DistanceMultiset::group_ticks(raw, ps.unit());
  }
  std::vector<double> raw;
  raw.reserve(interval_count(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) raw.push_back(ps[j] - ps[i]);
  }
  return DistanceMultiset::group(raw);
}

DistanceMultiset beltway_delta(const PointSet& ps, double circumference) {
  if (!(circumference > 0.0)) throw InvalidInput("circumference must be positive");
  if (ps.exact()) {
    const auto ticks = Rational::from_double(circumference);
    if (ticks) {
      const Rational c = *ticks / ps.unit();
      if (c.is_integer()) return beltway_delta_ticks(ps, c.num());
    }
  }
  const std::size_t n = ps.size();
  std::vector<double> raw;
  raw.reserve(interval_count(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (ps[i] < 0.0 || ps[i] >= circumference) {
      throw InvalidInput("coordinate outside [0, circumference)");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = ps[j] - ps[i];
      const double arc = std::min(d, circumference - d);
      if (!(arc > 0.0)) throw InvalidInput("coincident points on the circle");
      raw.push_back(arc);
    }
  }
  return DistanceMultiset::group(raw);
}

DistanceMultiset beltway_delta_ticks(const PointSet& ps, std::int64_t circumference_ticks) {
  if (!ps.exact()) throw InvalidInput("exact beltway distances need an exact point set");
  if (circumference_ticks <= 0) throw InvalidInput("circumference must be positive");
  const auto t = ps.ticks();
  for (const auto v : t) {
    if (v < 0 || v >= circumference_ticks) {
      throw InvalidInput("coordinate outside [0, circumference)");
    }
  }
  std::vector<std::int64_t> raw;
  raw.reserve(interval_count(t.size()));
  for (std::size_t i = 0; i < t.size(); ++i) {
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      const auto d = t[j] - t[i];
      raw.push_back(std::min(d, circumference_ticks - d));
    }
  }
  return DistanceMultiset::group_ticks(raw, ps.unit());
}

Ruler ruler_from_assignment(const AssignmentMatrix& p, const DistanceMultiset& y) {
  if (p.labels() != y.distinct()) {
    throw InvalidInput("assignment label count does not match the multiset");
  }
  const std::size_t n = p.points();
  Ruler rho(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t e = interval_id(n, i, j);
      double s = 0.0;
      for (std::size_t r = 0; r < y.distinct(); ++r) s += y.value(r) * p(e, r);
      rho(i, j) = s;
      rho(j, i) = -s;
    }
  }
  return rho;
}

TickRuler tick_ruler_from_assignment(const AssignmentMatrix& p, const DistanceMultiset& y) {
  if (p.labels() != y.distinct()) {
    throw InvalidInput("assignment label count does not match the multiset");
  }
  if (!y.exact()) throw InvalidInput("tick ruler needs an exact multiset");
  if (!p.integral()) throw InvalidInput("tick ruler needs an integral assignment");
  const std::size_t n = p.points();
  const auto labels = p.hard_labels();
  TickRuler rho(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto t = y.ticks()[labels[interval_id(n, i, j)]];
      rho(i, j) = t;
      rho(j, i) = -t;
    }
  }
  return rho;
}

Ruler ruler_of(const PointSet& ps) {
  const std::size_t n = ps.size();
  Ruler rho(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) rho(i, j) = ps[j] - ps[i];
  }
  return rho;
}

namespace {

template <typename T, typename Close>
bool ruler_check(const BasicRuler<T>& rho, Close close) {
  const std::size_t n = rho.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!close(rho(i, i), T{})) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!close(rho(j, i), -rho(i, j))) return false;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        if (!close(rho(i, k), rho(i, j) + rho(j, k))) return false;
      }
    }
  }
  return true;
}

}  // namespace

bool is_ruler(const Ruler& rho, double tol) {
  return ruler_check(rho, [tol](double a, double b) { return std::abs(a - b) <= tol; });
}

bool is_ruler(const TickRuler& rho) {
  return ruler_check(rho, [](std::int64_t a, std::int64_t b) { return a == b; });
}

double max_triangle_violation(const Ruler& rho) {
  const std::size_t n = rho.size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        worst = std::max(worst, std::abs(rho(i, k) - rho(i, j) - rho(j, k)));
      }
    }
  }
  return worst;
}

PointSet realize(const Ruler& rho, double tol) {
  if (!is_ruler(rho, tol)) throw InvalidInput("matrix is not a ruler");
  const std::size_t n = rho.size();
  std::vector<double> x(n, 0.0);
  for (std::size_t k = 1; k < n; ++k) {
    x[k] = rho(0, k);
    if (!(rho(k - 1, k) > 0.0)) throw InvalidInput("ruler is not monotone");
  }
  return PointSet(std::move(x));
}

PointSet realize(const TickRuler& rho, const Rational& unit) {
  if (!is_ruler(rho)) throw InvalidInput("matrix is not a ruler");
  const std::size_t n = rho.size();
  std::vector<std::int64_t> x(n, 0);
  for (std::size_t k = 1; k < n; ++k) {
    x[k] = rho(0, k);
    if (rho(k - 1, k) <= 0) throw InvalidInput("ruler is not monotone");
  }
  return PointSet(std::move(x), unit);
}

}  // namespace turnpike
