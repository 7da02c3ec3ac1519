#include "turnpike/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace turnpike {
namespace {

// Inversions of v by merge sort.
std::size_t inversions(std::vector<std::size_t>& v, std::vector<std::size_t>& scratch,
                       std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::size_t count = inversions(v, scratch, lo, mid) + inversions(v, scratch, mid, hi);
  std::size_t a = lo, b = mid, k = lo;
  while (a < mid && b < hi) {
    if (v[b] < v[a]) {
      count += mid - a;
      scratch[k++] = v[b++];
    } else {
      scratch[k++] = v[a++];
    }
  }
  while (a < mid) scratch[k++] = v[a++];
  while (b < hi) scratch[k++] = v[b++];
  std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
            scratch.begin() + static_cast<std::ptrdiff_t>(hi), v.begin() + static_cast<std::ptrdiff_t>(lo));
  return count;
}

std::vector<double> anchored(std::span<const double> x) {
  std::vector<double> out(x.begin(), x.end());
  const double base = out.empty() ? 0.0 : out.front();
  for (double& v : out) v -= base;
  return out;
}

std::vector<double> reflected(std::span<const double> x) {
  std::vector<double> out;
  out.reserve(x.size());
  const double last = x.empty() ? 0.0 : x.back();
  for (auto it = x.rbegin(); it != x.rend(); ++it) out.push_back(last - *it);
  std::sort(out.begin(), out.end());
  return anchored(out);
}

double mismatch(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::size_t diff = 0;
  for (std::size_t k = 0; k < a.size(); ++k) diff += a[k] != b[k];
  return a.empty() ? 0.0 : static_cast<double>(diff) / static_cast<double>(a.size());
}

void check_permutation(std::span<const std::size_t> p, std::string_view what) {
  std::vector<char> seen(p.size(), 0);
  for (const std::size_t v : p) {
    if (v >= p.size() || seen[v]) throw InvalidInput(std::string(what) + " is not a permutation");
    seen[v] = 1;
  }
}

}  // namespace

GroundTruth ground_truth(const PointSet& ps) {
  const std::size_t n = ps.size();
  DistanceMultiset y = delta(ps);
  std::vector<std::size_t> labels(interval_count(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto r = ps.exact() ? y.find_ticks(ps.ticks()[j] - ps.ticks()[i]) : y.find(ps[j] - ps[i]);
      if (!r) throw InvalidInput("distance missing from its own multiset");
      labels[interval_id(n, i, j)] = *r;
    }
  }
  auto assignment = AssignmentMatrix::from_labels(n, y.distinct(), labels);
  auto perm = assignment_permutation(assignment);
  return {ps, std::move(y), std::move(assignment), std::move(perm)};
}

std::vector<std::size_t> assignment_permutation(const AssignmentMatrix& p) {
  const auto labels = p.hard_labels();
  std::vector<std::size_t> perm(labels.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });
  return perm;
}

AssignmentMatrix reflect_assignment(const AssignmentMatrix& p) {
  const std::size_t n = p.points();
  AssignmentMatrix out(n, p.labels());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t from = interval_id(n, i, j);
      const std::size_t to = interval_id(n, n - 1 - j, n - 1 - i);
      for (std::size_t r = 0; r < p.labels(); ++r) out(to, r) = p(from, r);
    }
  }
  return out;
}

AssignmentMatrix hard_assignment(const AssignmentMatrix& p) {
  return AssignmentMatrix::from_labels(p.points(), p.labels(), p.hard_labels());
}

double labeling_error(const AssignmentMatrix& p_hat, const AssignmentMatrix& p_star) {
  if (p_hat.points() != p_star.points() || p_hat.labels() != p_star.labels()) {
    throw InvalidInput("assignments differ in shape");
  }
  if (!p_hat.integral() || !p_star.integral()) {
    throw InvalidInput("labeling error needs integral assignments");
  }
  const auto est = p_hat.hard_labels();
  return std::min(mismatch(est, p_star.hard_labels()),
                  mismatch(est, reflect_assignment(p_star).hard_labels()));
}

double kendall_tau(std::span<const std::size_t> pi_hat, std::span<const std::size_t> pi_star) {
  if (pi_hat.size() != pi_star.size()) throw InvalidInput("permutations differ in length");
  check_permutation(pi_hat, "pi_hat");
  check_permutation(pi_star, "pi_star");
  const std::size_t m = pi_hat.size();
  if (m < 2) return 0.0;
  std::vector<std::size_t> inverse(m);
  for (std::size_t k = 0; k < m; ++k) inverse[pi_star[k]] = k;
  std::vector<std::size_t> sigma(m), scratch(m);
  // Walk the estimated order and record each interval's true position; discordant
  // interval pairs are exactly the inversions of that sequence.
  for (std::size_t k = 0; k < m; ++k) sigma[k] = inverse[pi_hat[k]];
  const double pairs = static_cast<double>(m) * static_cast<double>(m - 1) / 2.0;
  return static_cast<double>(inversions(sigma, scratch, 0, m)) / pairs;
}

double coordinate_mae(std::span<const double> x_hat, std::span<const double> x_star) {
  if (x_hat.size() != x_star.size()) throw InvalidInput("coordinate vectors differ in length");
  if (x_hat.empty()) return 0.0;
  const auto truth = anchored(x_star);
  auto mae = [&](const std::vector<double>& x) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += std::abs(x[k] - truth[k]);
    return s / static_cast<double>(x.size());
  };
  return std::min(mae(anchored(x_hat)), mae(reflected(x_hat)));
}

double integrality_score(const AssignmentMatrix& p, double tol) {
  if (p.intervals() == 0) throw InvalidInput("empty assignment");
  double total = 0.0;
  for (std::size_t iv = 0; iv < p.intervals(); ++iv) {
    if (std::abs(p.row_sum(iv) - 1.0) > tol) {
      throw InvalidInput("interval " + std::to_string(iv + 1) + " weights do not sum to 1");
    }
    double best = 0.0;
    for (std::size_t r = 0; r < p.labels(); ++r) best = std::max(best, p(iv, r));
    total += best;
  }
  return total / static_cast<double>(p.intervals());
}

Metrics score(const AssignmentMatrix& p_hat, const GroundTruth& truth,
              std::optional<std::span<const double>> x_hat) {
  Metrics m;
  m.integrality = integrality_score(p_hat);
  const AssignmentMatrix hard = hard_assignment(p_hat);
  for (std::size_t r = 0; r < hard.labels(); ++r) {
    if (hard.column_sum(r) != truth.y.multiplicity(r)) m.multiplicity_violation = true;
  }
  m.labeling_error = labeling_error(hard, truth.assignment);
  const auto pi_hat = assignment_permutation(hard);
  m.kendall_tau = std::min(kendall_tau(pi_hat, truth.perm),
                           kendall_tau(pi_hat, assignment_permutation(reflect_assignment(truth.assignment))));
  if (x_hat) m.mae = coordinate_mae(*x_hat, truth.coords.coords());
  return m;
}

}  // namespace turnpike
