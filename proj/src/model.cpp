#include "turnpike/model.hpp"

#include <algorithm>
#include <charconv>
#include <string>

namespace turnpike {
namespace {

std::size_t choose2(std::size_t k) { return k * (k - 1) / 2; }

std::size_t require_points(const DistanceMultiset& y) {
  const auto n = y.point_count();
  if (!n || *n < 2) {
    throw InvalidInput("total multiplicity " + std::to_string(y.total()) +
                       " is not C(n,2) for any n >= 2");
  }
  return *n;
}

// Declares the P variables of a model, skipping pruned labels.
void declare_assignment_vars(ModelMatrix& model, const DistanceMultiset& y) {
  const std::size_t n = model.n;
  const std::size_t m = model.m_prime;
  model.assignment_index.assign(interval_count(n) * m, ModelMatrix::npos);
  std::vector<char> forbidden(interval_count(n) * m, 0);
  if (model.options.prune) {
    for (const auto& f : containment_forbidden(n, y.multiplicities())) {
      forbidden[interval_id(n, f.i, f.j) * m + f.r] = 1;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::size_t e = interval_id(n, i, j);
      for (std::size_t r = 0; r < m; ++r) {
        if (forbidden[e * m + r]) {
          ++model.pruned_assignment_vars;
          continue;
        }
        model.assignment_index[e * m + r] = model.vars.size();
        model.vars.push_back({VarKind::assignment, {i, j, r}, 0.0, 1.0, true});
      }
    }
  }
}

// Rows shared by both formulations: one label per interval, mu_r intervals per label.
void add_matching_rows(ModelMatrix& model, const DistanceMultiset& y) {
  const std::size_t n = model.n;
  const std::size_t m = model.m_prime;
  for (std::size_t e = 0; e < interval_count(n); ++e) {
    Constraint row;
    row.rhs = 1.0;
    for (std::size_t r = 0; r < m; ++r) {
      if (const auto v = model.assignment_index[e * m + r]; v != ModelMatrix::npos) {
        row.terms.push_back({v, 1.0});
      }
    }
    model.constraints.push_back(std::move(row));
  }
  for (std::size_t r = 0; r < m; ++r) {
    Constraint row;
    row.rhs = y.multiplicity(r);
    for (std::size_t e = 0; e < interval_count(n); ++e) {
      if (const auto v = model.assignment_index[e * m + r]; v != ModelMatrix::npos) {
        row.terms.push_back({v, 1.0});
      }
    }
    model.constraints.push_back(std::move(row));
  }
}

}  // namespace

std::string variable_name(const Variable& v) {
  const auto& x = v.index;
  switch (v.kind) {
    case VarKind::assignment:
      return "P_" + std::to_string(x[0] + 1) + "_" + std::to_string(x[1] + 1) + "_" +
             std::to_string(x[2] + 1);
    case VarKind::triangle: {
      std::string s = "T";
      for (std::size_t k = 0; k < 6; ++k) s += "_" + std::to_string(x[k] + 1);
      return s;
    }
    case VarKind::coordinate:
      return "x_" + std::to_string(x[0] + 1);
  }
  return {};
}

std::optional<Variable> parse_variable_name(std::string_view name) {
  if (name.size() < 3 || name[1] != '_') return std::nullopt;
  Variable v;
  std::size_t expected = 0;
  switch (name[0]) {
    case 'P':
      v.kind = VarKind::assignment;
      expected = 3;
      break;
    case 'T':
      v.kind = VarKind::triangle;
      expected = 6;
      break;
    case 'x':
      v.kind = VarKind::coordinate;
      expected = 1;
      v.lower = -kInf;
      v.upper = kInf;
      v.integral = false;
      break;
    default:
      return std::nullopt;
  }
  std::size_t count = 0;
  std::size_t pos = 2;
  while (pos <= name.size()) {
    const std::size_t end = std::min(name.find('_', pos), name.size());
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(name.data() + pos, name.data() + end, value);
    if (ec != std::errc{} || ptr != name.data() + end || value == 0 || count >= expected) {
      return std::nullopt;
    }
    v.index[count++] = value - 1;
    pos = end + 1;
  }
  if (count != expected) return std::nullopt;
  return v;
}

std::string_view formulation_name(Formulation f) {
  switch (f) {
    case Formulation::milp:
      return "milp";
    case Formulation::triangle_ilp:
      return "tri-ilp";
    case Formulation::triangle_lp:
      return "tri-lp";
  }
  return "";
}

Formulation parse_formulation(std::string_view name) {
  if (name == "milp") return Formulation::milp;
  if (name == "tri-ilp") return Formulation::triangle_ilp;
  if (name == "tri-lp") return Formulation::triangle_lp;
  throw InvalidInput("unknown formulation '" + std::string(name) + "'");
}

std::optional<std::size_t> ModelMatrix::assignment_var(std::size_t i, std::size_t j,
                                                       std::size_t r) const {
  const std::size_t v = assignment_index[interval_id(n, i, j) * m_prime + r];
  if (v == npos) return std::nullopt;
  return v;
}

std::vector<std::array<std::size_t, 3>> basis_refinements(std::size_t n) {
  std::vector<std::array<std::size_t, 3>> out;
  for (std::size_t j = 1; j < n; ++j) {
    for (std::size_t k = j + 1; k < n; ++k) out.push_back({0, j, k});
  }
  return out;
}

std::vector<std::array<std::size_t, 3>> all_refinements(std::size_t n) {
  std::vector<std::array<std::size_t, 3>> out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) out.push_back({i, j, k});
    }
  }
  return out;
}

std::vector<LabelRef> containment_forbidden(std::size_t n, std::span<const int> mu) {
  const std::size_t m = interval_count(n);
  std::size_t total = 0;
  for (const int v : mu) total += static_cast<std::size_t>(v);
  if (total != m) throw InvalidInput("multiplicities do not sum to C(n,2)");
  std::vector<LabelRef> out;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = i + 1; j <= n; ++j) {
      // Admissible rank range of interval ij (1-based ranks in the nonincreasing list).
      const std::size_t lowest = i * (n - j + 1);
      const std::size_t highest = m - choose2(j - i + 1) + 1;
      std::size_t before = 0;  // M_{r-1}
      for (std::size_t r = 0; r < mu.size(); ++r) {
        const std::size_t through = before + static_cast<std::size_t>(mu[r]);  // M_r
        if (through < lowest || before + 1 > highest) out.push_back({i - 1, j - 1, r});
        before = through;
      }
    }
  }
  return out;
}

ModelMatrix build_milp(const DistanceMultiset& y, ModelOptions opts) {
  ModelMatrix model;
  model.form = Formulation::milp;
  model.n = require_points(y);
  model.m_prime = y.distinct();
  model.options = opts;
  model.options.basis = false;
  declare_assignment_vars(model, y);
  const std::size_t first_coord = model.vars.size();
  for (std::size_t i = 0; i < model.n; ++i) {
    model.vars.push_back({VarKind::coordinate, {i}, -kInf, kInf, false});
  }
  add_matching_rows(model, y);
  for (std::size_t i = 0; i < model.n; ++i) {
    for (std::size_t j = i + 1; j < model.n; ++j) {
      // x_j - x_i - sum_r y_r P^r_ij = 0
      Constraint row;
      row.terms.push_back({first_coord + j, 1.0});
      row.terms.push_back({first_coord + i, -1.0});
      for (std::size_t r = 0; r < model.m_prime; ++r) {
        if (const auto v = model.assignment_var(i, j, r)) row.terms.push_back({*v, -y.value(r)});
      }
      model.constraints.push_back(std::move(row));
    }
  }
  model.constraints.push_back({{{first_coord, 1.0}}, Relation::equal, 0.0});
  return model;
}

ModelMatrix build_triangle_ilp(const DistanceMultiset& y, const TwoPartitionSet& pset,
                               ModelOptions opts, bool approximate_partitions) {
  ModelMatrix model;
  model.form = Formulation::triangle_ilp;
  model.n = require_points(y);
  model.m_prime = y.distinct();
  model.options = opts;
  model.partition_count = pset.size();
  model.approximate_partitions = approximate_partitions;
  for (const auto& p : pset) {
    if (p.r >= model.m_prime || p.s >= model.m_prime || p.t >= model.m_prime) {
      throw InvalidInput("two-partition index out of range");
    }
  }
  declare_assignment_vars(model, y);

  const auto refinements = opts.basis ? basis_refinements(model.n) : all_refinements(model.n);
  model.refinements = refinements.size();
  model.trivially_infeasible = model.n >= 3 && pset.empty();

  TwoPartitionSet by_rst(pset);
  std::sort(by_rst.begin(), by_rst.end());

  // T variables, refinement-major, then (r, s, t); drop those touching a pruned P.
  std::vector<std::vector<std::pair<std::size_t, TwoPartition>>> t_vars(refinements.size());
  for (std::size_t q = 0; q < refinements.size(); ++q) {
    const auto [i, j, k] = refinements[q];
    for (const auto& p : by_rst) {
      if (!model.assignment_var(i, j, p.r) || !model.assignment_var(j, k, p.s) ||
          !model.assignment_var(i, k, p.t)) {
        continue;
      }
      t_vars[q].push_back({model.vars.size(), p});
      model.vars.push_back({VarKind::triangle, {i, j, k, p.r, p.s, p.t}, 0.0, 1.0, true});
    }
  }

  add_matching_rows(model, y);

  const std::size_t m = model.m_prime;
  for (std::size_t q = 0; q < refinements.size(); ++q) {
    const auto [i, j, k] = refinements[q];
    Constraint select;
    select.rhs = 1.0;
    for (const auto& [v, p] : t_vars[q]) select.terms.push_back({v, 1.0});
    model.constraints.push_back(std::move(select));

    // P^label_{a,b} = sum of T whose triple carries `label` in the given role.
    const std::array<std::pair<std::size_t, std::size_t>, 3> edges{{{i, j}, {j, k}, {i, k}}};
    for (std::size_t role = 0; role < 3; ++role) {
      const auto [a, b] = edges[role];
      for (std::size_t label = 0; label < m; ++label) {
        Constraint row;
        if (const auto v = model.assignment_var(a, b, label)) row.terms.push_back({*v, 1.0});
        for (const auto& [tv, p] : t_vars[q]) {
          const std::size_t carried = role == 0 ? p.r : role == 1 ? p.s : p.t;
          if (carried == label) row.terms.push_back({tv, -1.0});
        }
        if (row.terms.empty()) continue;
        model.constraints.push_back(std::move(row));
      }
    }
  }
  return model;
}

ModelMatrix relax(ModelMatrix model) {
  for (auto& v : model.vars) v.integral = false;
  model.relaxed = true;
  if (model.form == Formulation::triangle_ilp) model.form = Formulation::triangle_lp;
  return model;
}

ModelStats model_stats(const ModelMatrix& model) {
  ModelStats s;
  s.n_vars = model.vars.size();
  s.n_constraints = model.constraints.size();
  for (const auto& v : model.vars) {
    s.n_assignment_vars += v.kind == VarKind::assignment;
    s.n_triangle_vars += v.kind == VarKind::triangle;
    s.n_coordinate_vars += v.kind == VarKind::coordinate;
    s.n_integral += v.integral;
  }
  s.n_pruned_assignment_vars = model.pruned_assignment_vars;
  s.n_refinements = model.refinements;
  s.partition_count = model.partition_count;
  return s;
}

}  // namespace turnpike
