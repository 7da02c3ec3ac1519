#include "revised_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace turnpike::detail {
namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();
constexpr int kRefactorEvery = 100;
constexpr int kBlandAfter = 50;
// Phase-one decrease below which a step counts as degenerate.
constexpr double kProgress = 1e-11;
// Relative size of the bound perturbation used against stalling.
constexpr double kPerturbation = 1e-6;
constexpr std::size_t npos = static_cast<std::size_t>(-1);

// Deterministic per-column jitter in [0, 1).
double jitter(std::uint64_t j) {
  std::uint64_t z = j + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

struct Eta {
  std::size_t pos;
  double pivot;
  std::vector<std::pair<std::size_t, double>> entries;  // off-pivot alpha
};

// Minimizes the sum of bound violations of the basic variables. Artificial columns
// carry the row residuals and have bounds [0, 0], so the start basis is the
// artificial one and feasibility means every artificial has been driven to zero.
class Revised {
 public:
  Revised(const StandardLp<double>& lp, const Tolerances<double>& tol, PivotRule rule,
          std::int64_t limit)
      : lp_(lp), tol_(tol), rule_(rule), limit_(limit), m_(lp.rows), n_(lp.cols()) {}

  LpRun<double> run() {
    LpRun<double> out;
    setup();
    if (!refactor()) return numerical(out);
    bool bland = rule_ == PivotRule::bland;
    int streak = 0;
    bool tried_perturb = false;
    int since_refactor = 0;
    bool fresh = true;  // factorization and basic values were just recomputed
    while (true) {
      if (!fresh && (since_refactor >= kRefactorEvery || infeasibility() == 0.0)) {
        if (!refactor()) return numerical(out);
        since_refactor = 0;
        fresh = true;
      }
      const double w = infeasibility();
      if (w == 0.0 && perturbed_) {
          unperturb();
        if (!refactor()) return numerical(out);
        continue;
      }
      if (w == 0.0) {
        out.outcome = LpOutcome::feasible;
        out.x.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
        return out;
      }
      if (out.iterations >= limit_) {
        out.outcome = LpOutcome::iteration_limit;
        return out;
      }
      duals();
      const auto entering = price(bland);
      if (!entering) {
        if (!fresh) {
          if (!refactor()) return numerical(out);
          since_refactor = 0;
          fresh = true;
          continue;
        }
        if (perturbed_) {
          unperturb();
          if (!refactor()) return numerical(out);
          continue;
        }
        out.outcome = LpOutcome::infeasible;
        out.farkas = pi_;
        return out;
      }
      const auto step = iterate(*entering, bland);
      if (!step) return numerical(out);
      ++out.iterations;
      ++since_refactor;
      fresh = false;
      if (rule_ == PivotRule::dantzig_with_bland_fallback) {
        streak = *step ? 0 : streak + 1;
        if (streak > kBlandAfter && !tried_perturb) {
          perturb();
          tried_perturb = true;
          streak = 0;
        }
        bland = streak > kBlandAfter;
      }
    }
  }

 private:
  enum class At : char { lower, upper, zero, basic };

  LpRun<double> numerical(LpRun<double>& out) {
    out.outcome = LpOutcome::numerical;
    return out;
  }

  bool is_artificial(std::size_t j) const { return j >= n_; }

  template <typename F>
  void for_column(std::size_t j, F f) const {
    if (is_artificial(j)) {
      f(j - n_, static_cast<double>(sign_[j - n_]));
      return;
    }
    for (const auto& [i, a] : lp_.columns[j]) f(i, a);
  }

  void setup() {
    const std::size_t total = n_ + m_;
    x_.assign(total, 0.0);
    at_.assign(total, At::zero);
    true_lower_.assign(total, 0.0);
    true_upper_.assign(total, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      true_lower_[j] = lp_.has_lower[j] ? lp_.lower[j] : -kInfinity;
      true_upper_[j] = lp_.has_upper[j] ? lp_.upper[j] : kInfinity;
    }
    lower_ = true_lower_;
    upper_ = true_upper_;
    perturbed_ = false;
    for (std::size_t j = 0; j < n_; ++j) {
      if (std::isfinite(lower_[j])) {
        x_[j] = lower_[j];
        at_[j] = At::lower;
      } else if (std::isfinite(upper_[j])) {
        x_[j] = upper_[j];
        at_[j] = At::upper;
      }
    }
    std::vector<double> residual(lp_.rhs);
    for (std::size_t j = 0; j < n_; ++j) {
      if (x_[j] == 0.0) continue;
      for (const auto& [i, a] : lp_.columns[j]) residual[i] -= a * x_[j];
    }
    sign_.assign(m_, 1);
    basis_.assign(m_, 0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (residual[i] < 0) sign_[i] = -1;
      basis_[i] = n_ + i;
      at_[n_ + i] = At::basic;
    }
  }

  // Widens the bounds of the basic columns by small distinct amounts so that a
  // degenerate vertex splits into nearby nondegenerate ones.
  void perturb() {
    for (const std::size_t b : basis_) {
      const double e = kPerturbation * (1.0 + jitter(b));
      if (std::isfinite(lower_[b])) lower_[b] -= e * (1.0 + std::abs(lower_[b]));
      if (std::isfinite(upper_[b])) upper_[b] += e * (1.0 + std::abs(upper_[b]));
    }
    perturbed_ = true;
  }

  // Moves nonbasic columns from the perturbed bounds to the true ones.
  void unperturb() {
    lower_ = true_lower_;
    upper_ = true_upper_;
    for (std::size_t j = 0; j < n_ + m_; ++j) {
      if (at_[j] == At::lower) x_[j] = lower_[j];
      if (at_[j] == At::upper) x_[j] = upper_[j];
    }
    perturbed_ = false;
  }

  // Refactorizes the basis and recomputes the basic values from the nonbasic ones.
  bool refactor() {
    etas_.clear();
    if (m_ == 0) return true;
    std::vector<Eigen::Triplet<double>> trips;
    for (std::size_t k = 0; k < m_; ++k) {
      for_column(basis_[k], [&](std::size_t i, double a) {
        trips.emplace_back(static_cast<int>(i), static_cast<int>(k), a);
      });
    }
    const auto dim = static_cast<Eigen::Index>(m_);
    Eigen::SparseMatrix<double> b(dim, dim);
    b.setFromTriplets(trips.begin(), trips.end());
    b.makeCompressed();
    lu_.analyzePattern(b);
    lu_.factorize(b);
    if (lu_.info() != Eigen::Success) return false;
    Eigen::VectorXd rhs(dim);
    for (std::size_t i = 0; i < m_; ++i) rhs[static_cast<Eigen::Index>(i)] = lp_.rhs[i];
    for (std::size_t j = 0; j < n_ + m_; ++j) {
      if (at_[j] == At::basic || x_[j] == 0.0) continue;
      for_column(j, [&](std::size_t i, double a) { rhs[static_cast<Eigen::Index>(i)] -= a * x_[j]; });
    }
    const Eigen::VectorXd xb = lu_.solve(rhs);
    for (std::size_t k = 0; k < m_; ++k) {
      const double v = xb[static_cast<Eigen::Index>(k)];
      if (!std::isfinite(v)) return false;
      x_[basis_[k]] = v;
    }
    return true;
  }

  // B^-1 a_j.
  std::vector<double> ftran(std::size_t j) const {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
    for_column(j, [&](std::size_t i, double a) { rhs[static_cast<Eigen::Index>(i)] = a; });
    const Eigen::VectorXd z = lu_.solve(rhs);
    std::vector<double> v(z.data(), z.data() + m_);
    for (const auto& e : etas_) {
      const double xp = v[e.pos] / e.pivot;
      if (xp != 0.0) {
        for (const auto& [i, a] : e.entries) v[i] -= a * xp;
      }
      v[e.pos] = xp;
    }
    return v;
  }

  // +1 above the upper bound, -1 below the lower bound, 0 inside.
  int violation_sign(std::size_t j) const {
    if (x_[j] > upper_[j] + tol_.feasibility) return 1;
    if (x_[j] < lower_[j] - tol_.feasibility) return -1;
    return 0;
  }

  double infeasibility() const {
    double w = 0.0;
    for (const std::size_t b : basis_) {
      const int s = violation_sign(b);
      if (s > 0) w += x_[b] - upper_[b];
      if (s < 0) w += lower_[b] - x_[b];
    }
    return w;
  }

  // Duals of the sum-of-violations objective: pi^T B = c_B^T.
  void duals() {
    std::vector<double> c(m_, 0.0);
    for (std::size_t k = 0; k < m_; ++k) c[k] = violation_sign(basis_[k]);
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = c[it->pos];
      for (const auto& [i, a] : it->entries) s -= c[i] * a;
      c[it->pos] = s / it->pivot;
    }
    pi_.assign(m_, 0.0);
    if (m_ == 0) return;
    const Eigen::VectorXd rhs =
        Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(m_));
    const Eigen::VectorXd y = lu_.transpose().solve(rhs);
    for (std::size_t i = 0; i < m_; ++i) pi_[i] = y[static_cast<Eigen::Index>(i)];
  }

  double reduced_cost(std::size_t j) const {
    double d = 0.0;
    for (const auto& [i, a] : lp_.columns[j]) d -= pi_[i] * a;
    return d;
  }

  struct Entering {
    std::size_t col;
    int dir;
    double d;
  };

  std::optional<Entering> price(bool bland) const {
    std::optional<Entering> best;
    double best_score = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      if (at_[j] == At::basic || lower_[j] == upper_[j]) continue;
      const double d = reduced_cost(j);
      int dir = 0;
      if (d < -tol_.reduced && at_[j] != At::upper) dir = 1;
      if (d > tol_.reduced && at_[j] != At::lower) dir = -1;
      if (dir == 0) continue;
      if (bland) return Entering{j, dir, d};
      if (std::abs(d) > best_score) {
        best = Entering{j, dir, d};
        best_score = std::abs(d);
      }
    }
    return best;
  }

  struct Block {
    double limit = kInfinity;
    bool to_upper = false;
  };

  // Step length at which basic column b (moving at `rate` per unit) reaches a bound.
  // Violated bounds block when they are reached from outside.
  Block block(std::size_t b, double rate, double slack) const {
    Block out;
    const double x = x_[b];
    const int s = violation_sign(b);
    if (s < 0) {
      if (rate > 0) out = {(lower_[b] - x + slack) / rate, false};
    } else if (s > 0) {
      if (rate < 0) out = {(x - upper_[b] + slack) / -rate, true};
    } else if (rate < 0) {
      if (std::isfinite(lower_[b])) out = {(x - lower_[b] + slack) / -rate, false};
    } else if (std::isfinite(upper_[b])) {
      out = {(upper_[b] - x + slack) / rate, true};
    }
    out.limit = std::max(out.limit, 0.0);
    return out;
  }

  // One iteration; nullopt on breakdown, otherwise whether the objective moved.
  std::optional<bool> iterate(Entering e, bool bland) {
    const std::size_t q = e.col;
    const double dir = e.dir;
    const auto alpha = ftran(q);

    // Harris two-pass ratio test; textbook with smallest-index ties under Bland.
    const double slack = bland ? 0.0 : tol_.feasibility;
    double bound = kInfinity;
    for (std::size_t k = 0; k < m_; ++k) {
      if (std::abs(alpha[k]) <= tol_.pivot) continue;
      bound = std::min(bound, block(basis_[k], -dir * alpha[k], slack).limit);
    }
    std::size_t leave = npos;
    Block chosen;
    double best_alpha = 0.0;
    for (std::size_t k = 0; k < m_; ++k) {
      const double a = alpha[k];
      if (std::abs(a) <= tol_.pivot) continue;
      const Block blk = block(basis_[k], -dir * a, 0.0);
      if (!std::isfinite(blk.limit) || blk.limit > bound + tol_.tie) continue;
      bool take = leave == npos;
      if (!take && bland) {
        take = blk.limit < chosen.limit - tol_.tie ||
               (blk.limit <= chosen.limit + tol_.tie && basis_[k] < basis_[leave]);
      } else if (!take) {
        take = std::abs(a) > best_alpha;
      }
      if (take) {
        leave = k;
        chosen = blk;
        best_alpha = std::abs(a);
      }
    }

    const double span = upper_[q] - lower_[q];
    if (std::isfinite(span) && (leave == npos || span <= chosen.limit)) {
      for (std::size_t k = 0; k < m_; ++k) {
        if (alpha[k] != 0.0) x_[basis_[k]] -= dir * span * alpha[k];
      }
      x_[q] = e.dir > 0 ? upper_[q] : lower_[q];
      at_[q] = e.dir > 0 ? At::upper : At::lower;
      return span * std::abs(e.d) > kProgress;
    }
    if (leave == npos) return std::nullopt;  // the phase-one objective is bounded below

    const double theta = chosen.limit;
    const std::size_t out = basis_[leave];
    for (std::size_t k = 0; k < m_; ++k) {
      if (alpha[k] != 0.0) x_[basis_[k]] -= dir * theta * alpha[k];
    }
    x_[q] += dir * theta;
    x_[out] = chosen.to_upper ? upper_[out] : lower_[out];
    at_[out] = chosen.to_upper ? At::upper : At::lower;
    basis_[leave] = q;
    at_[q] = At::basic;

    Eta eta;
    eta.pos = leave;
    eta.pivot = alpha[leave];
    for (std::size_t k = 0; k < m_; ++k) {
      if (k != leave && alpha[k] != 0.0) eta.entries.push_back({k, alpha[k]});
    }
    etas_.push_back(std::move(eta));
    return theta * std::abs(e.d) > kProgress;
  }

  const StandardLp<double>& lp_;
  Tolerances<double> tol_;
  PivotRule rule_;
  std::int64_t limit_;
  std::size_t m_;
  std::size_t n_;

  std::vector<double> x_;
  std::vector<At> at_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> true_lower_;
  std::vector<double> true_upper_;
  bool perturbed_ = false;
  std::vector<int> sign_;
  std::vector<std::size_t> basis_;
  std::vector<double> pi_;
  std::vector<Eta> etas_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
};

}  // namespace

LpRun<double> revised_phase_one(const StandardLp<double>& lp, const Tolerances<double>& tol,
                                PivotRule rule, std::int64_t iteration_limit) {
  return Revised(lp, tol, rule, iteration_limit).run();
}

}  // namespace turnpike::detail
