#pragma once

// Bounded-variable phase-one primal simplex on a dense tableau, templated on the
// scalar so the same code runs in double and in exact rational arithmetic.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "turnpike/solver.hpp"

namespace turnpike::detail {

using ExactScalar = boost::multiprecision::cpp_rational;

template <typename S>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static double abs(double v) { return std::abs(v); }
  static double to_double(double v) { return v; }
};

template <>
struct ScalarTraits<ExactScalar> {
  static constexpr bool exact = true;
  static ExactScalar abs(const ExactScalar& v) { return v < 0 ? ExactScalar(-v) : v; }
  static double to_double(const ExactScalar& v) { return v.template convert_to<double>(); }
};

/// Equality-form problem A x = b with optional bounds per column.
template <typename S>
struct StandardLp {
  std::size_t rows = 0;
  /// Sparse columns: (row, coefficient).
  std::vector<std::vector<std::pair<std::size_t, S>>> columns;
  std::vector<S> rhs;
  std::vector<S> lower;
  std::vector<S> upper;
  std::vector<char> has_lower;
  std::vector<char> has_upper;

  std::size_t cols() const { return columns.size(); }
};

template <typename S>
struct Tolerances {
  S pivot{};       // smallest usable |alpha|
  S reduced{};     // pricing threshold on reduced costs
  S feasibility{}; // phase-one objective accepted as zero
  S tie{};         // ratio-test ties and zero-length steps
};

// `numerical` means the factorization broke down; the caller retries another way.
enum class LpOutcome { feasible, infeasible, iteration_limit, numerical };

template <typename S>
struct LpRun {
  LpOutcome outcome = LpOutcome::infeasible;
  std::vector<S> x;       // per column, when feasible
  std::vector<S> farkas;  // per row, when infeasible and duals were tracked
  std::int64_t iterations = 0;
};

template <typename S>
class PhaseOneSimplex {
  using Tr = ScalarTraits<S>;

 public:
  PhaseOneSimplex(const StandardLp<S>& lp, Tolerances<S> tol, PivotRule rule, bool track_duals,
                  std::int64_t iteration_limit)
      : lp_(lp),
        tol_(tol),
        rule_(rule),
        track_(track_duals),
        limit_(iteration_limit),
        m_(lp.rows),
        n_(lp.cols()),
        width_(n_ + (track_duals ? m_ : 0)) {}

  LpRun<S> run() {
    setup();
    LpRun<S> out;
    bool bland = rule_ == PivotRule::bland;
    int degenerate_streak = 0;
    while (true) {
      if (phase_one_value() <= tol_.feasibility) {
        out.outcome = LpOutcome::feasible;
        out.x = primal();
        break;
      }
      if (out.iterations >= limit_) {
        out.outcome = LpOutcome::iteration_limit;
        break;
      }
      const auto entering = price(bland);
      if (!entering) {
        out.outcome = LpOutcome::infeasible;
        if (track_) out.farkas = farkas();
        break;
      }
      const bool degenerate = step(*entering, bland);
      ++out.iterations;
      if (rule_ == PivotRule::dantzig_with_bland_fallback) {
        degenerate_streak = degenerate ? degenerate_streak + 1 : 0;
        bland = degenerate_streak > kBlandAfter;
      }
    }
    return out;
  }

 private:
  static constexpr int kBlandAfter = 60;
  enum class At : char { lower, upper, zero, basic };

  S& tab(std::size_t i, std::size_t j) { return tableau_[i * width_ + j]; }

  bool artificial(std::size_t col) const { return col >= n_; }

  void setup() {
    tableau_.assign(m_ * width_, S(0));
    value_.assign(n_, S(0));
    at_.assign(n_, At::zero);
    for (std::size_t j = 0; j < n_; ++j) {
      if (lp_.has_lower[j]) {
        value_[j] = lp_.lower[j];
        at_[j] = At::lower;
      } else if (lp_.has_upper[j]) {
        value_[j] = lp_.upper[j];
        at_[j] = At::upper;
      }
    }
    std::vector<S> residual(lp_.rhs);
    for (std::size_t j = 0; j < n_; ++j) {
      if (value_[j] == 0) continue;
      for (const auto& [i, a] : lp_.columns[j]) residual[i] -= a * value_[j];
    }
    sign_.assign(m_, 1);
    beta_.assign(m_, S(0));
    basis_.assign(m_, 0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (residual[i] < 0) sign_[i] = -1;
      beta_[i] = sign_[i] < 0 ? S(-residual[i]) : residual[i];
      basis_[i] = n_ + i;
      if (track_) tab(i, n_ + i) = 1;
    }
    for (std::size_t j = 0; j < n_; ++j) {
      for (const auto& [i, a] : lp_.columns[j]) tab(i, j) = sign_[i] < 0 ? S(-a) : a;
    }
    // Reduced costs of the phase-one objective (sum of artificials).
    reduced_.assign(width_, S(0));
    for (std::size_t j = 0; j < n_; ++j) {
      S d(0);
      for (const auto& [i, a] : lp_.columns[j]) d -= sign_[i] < 0 ? S(-a) : a;
      reduced_[j] = d;
    }
    artificial_basic_ = m_;
  }

  S phase_one_value() const {
    S w(0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (artificial(basis_[i])) w += beta_[i];
    }
    return w;
  }

  bool fixed(std::size_t j) const {
    return lp_.has_lower[j] && lp_.has_upper[j] && lp_.lower[j] == lp_.upper[j];
  }

  // Direction +1 (increase) or -1 (decrease) if column j improves the objective.
  int improving(std::size_t j) const {
    if (at_[j] == At::basic || fixed(j)) return 0;
    const S& d = reduced_[j];
    switch (at_[j]) {
      case At::lower:
        return d < -tol_.reduced ? 1 : 0;
      case At::upper:
        return d > tol_.reduced ? -1 : 0;
      case At::zero:
        if (d < -tol_.reduced) return 1;
        if (d > tol_.reduced) return -1;
        return 0;
      case At::basic:
        break;
    }
    return 0;
  }

  struct Entering {
    std::size_t col;
    int dir;
  };

  std::optional<Entering> price(bool bland) const {
    std::optional<Entering> best;
    S best_score(0);
    for (std::size_t j = 0; j < n_; ++j) {
      const int dir = improving(j);
      if (dir == 0) continue;
      if (bland) return Entering{j, dir};
      const S score = Tr::abs(reduced_[j]);
      if (!best || score > best_score) {
        best = Entering{j, dir};
        best_score = score;
      }
    }
    return best;
  }

  // One iteration: a bound flip or a pivot. Returns true when the step length was zero.
  bool step(Entering e, bool bland) {
    const std::size_t q = e.col;
    const S dir(e.dir);

    // Ratio test. A basic variable moves at rate -dir * alpha_i per unit step.
    std::optional<std::size_t> leave;
    S theta(0);
    bool have_theta = false;
    S best_alpha(0);
    for (std::size_t i = 0; i < m_; ++i) {
      const S& alpha = tableau_[i * width_ + q];
      if (Tr::abs(alpha) <= tol_.pivot) continue;
      const S rate = -dir * alpha;
      const std::size_t b = basis_[i];
      S limit;
      if (rate < 0) {
        const bool bounded = artificial(b) || lp_.has_lower[b];
        if (!bounded) continue;
        const S lo = artificial(b) ? S(0) : lp_.lower[b];
        limit = (beta_[i] - lo) / (-rate);
      } else {
        if (artificial(b) || !lp_.has_upper[b]) continue;
        limit = (lp_.upper[b] - beta_[i]) / rate;
      }
      if (limit < 0) limit = 0;
      bool take = !have_theta || limit < theta - tol_.tie;
      if (have_theta && !take && limit <= theta + tol_.tie) {
        take = bland ? basis_[i] < basis_[*leave] : Tr::abs(alpha) > best_alpha;
      }
      if (take) {
        leave = i;
        theta = limit;
        best_alpha = Tr::abs(alpha);
        have_theta = true;
      }
    }

    const bool can_flip = lp_.has_lower[q] && lp_.has_upper[q];
    if (can_flip) {
      const S span = lp_.upper[q] - lp_.lower[q];
      if (!have_theta || span <= theta) {
        move_basics(q, dir, span);
        value_[q] = e.dir > 0 ? lp_.upper[q] : lp_.lower[q];
        at_[q] = e.dir > 0 ? At::upper : At::lower;
        return span <= tol_.tie;
      }
    }
    if (!have_theta) {
      // Cannot happen for a phase-one objective bounded below; treat the column as
      // numerically unusable.
      reduced_[q] = S(0);
      return true;
    }

    const std::size_t p = *leave;
    const std::size_t out_col = basis_[p];
    const S alpha_p = tableau_[p * width_ + q];
    const S rate_p = -dir * alpha_p;
    move_basics(q, dir, theta);
    const S entering_value = value_[q] + dir * theta;

    if (artificial(out_col)) {
      --artificial_basic_;
    } else {
      at_[out_col] = rate_p < 0 ? At::lower : At::upper;
      value_[out_col] = rate_p < 0 ? lp_.lower[out_col] : lp_.upper[out_col];
    }
    basis_[p] = q;
    at_[q] = At::basic;
    beta_[p] = entering_value;
    pivot(p, q);
    return theta <= tol_.tie;
  }

  void move_basics(std::size_t q, const S& dir, const S& theta) {
    if (theta == 0) return;
    for (std::size_t i = 0; i < m_; ++i) {
      const S& alpha = tableau_[i * width_ + q];
      if (alpha == 0) continue;
      beta_[i] -= dir * theta * alpha;
    }
  }

  void pivot(std::size_t p, std::size_t q) {
    S* row_p = &tableau_[p * width_];
    const S inv = S(1) / row_p[q];
    nonzero_.clear();
    for (std::size_t j = 0; j < width_; ++j) {
      if (row_p[j] == 0) continue;
      row_p[j] *= inv;
      nonzero_.push_back(j);
    }
    row_p[q] = 1;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == p) continue;
      S* row_i = &tableau_[i * width_];
      const S factor = row_i[q];
      if (factor == 0) continue;
      for (const std::size_t j : nonzero_) {
        row_i[j] -= factor * row_p[j];
        if constexpr (!Tr::exact) {
          if (std::abs(row_i[j]) < 1e-15) row_i[j] = 0;
        }
      }
      row_i[q] = 0;
    }
    const S factor = reduced_[q];
    if (factor != 0) {
      for (const std::size_t j : nonzero_) reduced_[j] -= factor * row_p[j];
      reduced_[q] = 0;
    }
    // Artificial columns are never re-entered, so their reduced costs only feed
    // the Farkas multipliers.
  }

  std::vector<S> primal() const {
    std::vector<S> x(value_);
    for (std::size_t i = 0; i < m_; ++i) {
      if (!artificial(basis_[i])) x[basis_[i]] = beta_[i];
    }
    return x;
  }

  // Phase-one duals mapped back to the unflipped rows: y_i = sign_i * (1 - d_art_i).
  std::vector<S> farkas() const {
    std::vector<S> y(m_);
    for (std::size_t i = 0; i < m_; ++i) {
      const S flipped = S(1) - reduced_[n_ + i];
      y[i] = sign_[i] < 0 ? S(-flipped) : flipped;
    }
    return y;
  }

  const StandardLp<S>& lp_;
  Tolerances<S> tol_;
  PivotRule rule_;
  bool track_;
  std::int64_t limit_;
  std::size_t m_;
  std::size_t n_;
  std::size_t width_;

  std::vector<S> tableau_;
  std::vector<S> beta_;
  std::vector<S> reduced_;
  std::vector<S> value_;
  std::vector<At> at_;
  std::vector<int> sign_;
  std::vector<std::size_t> basis_;
  std::vector<std::size_t> nonzero_;
  std::size_t artificial_basic_ = 0;
};

}  // namespace turnpike::detail
