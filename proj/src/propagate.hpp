#pragma once

// Bound propagation over rows whose data are exact decimals. Each row is scaled to
// integers and continuous variables are measured in a per-variable unit, so every
// deduction is exact and an infeasibility found here is a proof.

#include <cstddef>
#include <vector>

#include "turnpike/model.hpp"

namespace turnpike::detail {

struct Propagation {
  bool infeasible = false;
  std::vector<double> lower;
  std::vector<double> upper;
  /// Rows still needed by the LP; the others hold for every point in the new box.
  std::vector<char> active;
};

class Propagator {
 public:
  explicit Propagator(const ModelMatrix& model);

  /// Tightens the box [lower, upper]. With round_integral, bounds of integral
  /// variables are rounded inward (valid for the integer program only).
  Propagation run(std::vector<double> lower, std::vector<double> upper,
                  bool round_integral) const;

 private:
  struct Entry {
    std::size_t var;
    long long coef;
  };
  // Binary terms of one row that share an "at most one" row (a clique): at most one
  // of them is 1, and exactly one when `exact` and every clique member is present.
  struct Group {
    std::vector<std::size_t> terms;  // indices into Row::terms
    std::size_t clique = 0;
  };
  struct Row {
    std::vector<Entry> terms;
    long long rhs = 0;
    Relation relation = Relation::equal;
    bool usable = false;
    bool continuous = false;
    std::vector<Group> groups;
    std::vector<int> group_of;  // per term, -1 when ungrouped
  };
  struct Clique {
    std::vector<std::size_t> vars;
    bool exact = false;  // sum equals 1 rather than at most 1
  };

  const ModelMatrix& model_;
  std::vector<Row> rows_;
  std::vector<std::vector<std::size_t>> rows_of_var_;
  /// Continuous variables are propagated as scale * x; integral ones have scale 1.
  std::vector<long long> scale_;
  std::vector<Clique> cliques_;
};

}  // namespace turnpike::detail
