#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "turnpike/core.hpp"

namespace turnpike {

struct GroundTruth {
  PointSet coords;
  DistanceMultiset y;
  AssignmentMatrix assignment;
  /// perm[p] = interval at position p of the sorted (nonincreasing) distance list.
  std::vector<std::size_t> perm;
};

/// Labels every interval by its distance; equal distances take positions in
/// lexicographic interval order.
GroundTruth ground_truth(const PointSet& ps);

/// The same positional rule applied to an integral assignment: intervals sorted by
/// (label, interval id). Always a permutation, even when the column sums are off.
std::vector<std::size_t> assignment_permutation(const AssignmentMatrix& p);

/// Interval (i, j) relabeled as (n-1-j, n-1-i).
AssignmentMatrix reflect_assignment(const AssignmentMatrix& p);

/// Per-row argmax (ties to the smallest label) as a 0/1 matrix.
AssignmentMatrix hard_assignment(const AssignmentMatrix& p);

/// Fraction of intervals whose labels differ, minimized over the two orientations
/// of the ground truth. Both inputs must be integral.
double labeling_error(const AssignmentMatrix& p_hat, const AssignmentMatrix& p_star);

/// Interval pairs ranked in opposite order by the two permutations, over C(m, 2).
double kendall_tau(std::span<const std::size_t> pi_hat, std::span<const std::size_t> pi_star);

/// Mean absolute coordinate error after anchoring both at zero, minimized over x_hat
/// and its reflection.
double coordinate_mae(std::span<const double> x_hat, std::span<const double> x_star);

/// Mean over intervals of the largest weight; requires unit row sums.
double integrality_score(const AssignmentMatrix& p, double tol = 1e-6);

struct Metrics {
  double labeling_error = 0.0;
  double kendall_tau = 0.0;
  std::optional<double> mae;
  double integrality = 0.0;
  /// The argmax assignment breaks a multiplicity.
  bool multiplicity_violation = false;
};

/// All metrics of an estimate against a ground truth. Fractional estimates are
/// hardened by argmax first; Kendall-tau is minimized over both orientations.
Metrics score(const AssignmentMatrix& p_hat, const GroundTruth& truth,
              std::optional<std::span<const double>> x_hat = std::nullopt);

}  // namespace turnpike
