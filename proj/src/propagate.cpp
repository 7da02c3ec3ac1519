#include "propagate.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <optional>

#include "turnpike/rational.hpp"

namespace turnpike::detail {
namespace {

using Wide = __int128;

// Magnitudes that keep every activity sum far from 128-bit overflow.
constexpr Wide kMaxCoef = Wide{1} << 50;
constexpr Wide kMaxScale = Wide{1} << 40;
constexpr Wide kMaxValue = Wide{1} << 60;

Wide wide_abs(Wide v) { return v < 0 ? -v : v; }

Wide wide_gcd(Wide a, Wide b) {
  a = wide_abs(a);
  b = wide_abs(b);
  while (b != 0) {
    const Wide t = a % b;
    a = b;
    b = t;
  }
  return a;
}

Wide floor_div(Wide a, Wide b) {
  Wide q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

Wide ceil_div(Wide a, Wide b) { return -floor_div(-a, b); }

// scale * v rounded down (or up), when v is a finite decimal in range.
std::optional<Wide> scaled_bound(double v, long long scale, bool round_up) {
  if (!std::isfinite(v)) return std::nullopt;
  const auto r = Rational::from_double(v);
  if (!r) return std::nullopt;
  const Wide num = static_cast<Wide>(r->num()) * scale;
  const Wide q = round_up ? ceil_div(num, r->den()) : floor_div(num, r->den());
  if (wide_abs(q) > kMaxValue) return std::nullopt;
  return q;
}

}  // namespace

Propagator::Propagator(const ModelMatrix& model) : model_(model) {
  const std::size_t nv = model.vars.size();
  rows_.resize(model.constraints.size());
  rows_of_var_.resize(nv);
  scale_.assign(nv, 1);

  // Scale every row to integer data.
  std::vector<std::vector<Wide>> scaled(model.constraints.size());
  std::vector<Wide> scaled_rhs(model.constraints.size(), 0);
  for (std::size_t i = 0; i < model.constraints.size(); ++i) {
    const auto& c = model.constraints[i];
    std::vector<Rational> data;
    bool ok = true;
    for (const auto& t : c.terms) {
      const auto r = Rational::from_double(t.coef);
      if (!r) {
        ok = false;
        break;
      }
      data.push_back(*r);
    }
    const auto rhs = Rational::from_double(c.rhs);
    if (!ok || !rhs) continue;
    data.push_back(*rhs);
    Wide lcm = 1;
    for (const auto& r : data) {
      lcm = lcm / wide_gcd(lcm, r.den()) * r.den();
      if (lcm > kMaxScale) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    for (const auto& r : data) {
      const Wide v = static_cast<Wide>(r.num()) * (lcm / r.den());
      if (wide_abs(v) > kMaxValue) ok = false;
      scaled[i].push_back(v);
    }
    if (!ok) {
      scaled[i].clear();
      continue;
    }
    scaled_rhs[i] = scaled[i].back();
    scaled[i].pop_back();
    rows_[i].usable = true;
  }

  // Continuous variables are counted in units of 1 / gcd of their scaled coefficients.
  std::vector<Wide> var_gcd(nv, 0);
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (!rows_[i].usable) continue;
    const auto& terms = model.constraints[i].terms;
    for (std::size_t k = 0; k < terms.size(); ++k) {
      if (scaled[i][k] != 0) var_gcd[terms[k].var] = wide_gcd(var_gcd[terms[k].var], scaled[i][k]);
    }
  }
  for (std::size_t j = 0; j < nv; ++j) {
    if (!model.vars[j].integral && var_gcd[j] > 0 && var_gcd[j] <= kMaxScale) {
      scale_[j] = static_cast<long long>(var_gcd[j]);
    }
  }

  for (std::size_t i = 0; i < rows_.size(); ++i) {
    Row& row = rows_[i];
    if (!row.usable) continue;
    const auto& c = model.constraints[i];
    row.relation = c.relation;
    row.rhs = static_cast<long long>(scaled_rhs[i]);
    for (std::size_t k = 0; k < c.terms.size(); ++k) {
      if (scaled[i][k] == 0) continue;
      const std::size_t j = c.terms[k].var;
      const Wide a = scaled[i][k] / scale_[j];
      if (scaled[i][k] % scale_[j] != 0 || wide_abs(a) > kMaxCoef) row.usable = false;
      row.terms.push_back({j, static_cast<long long>(a)});
      row.continuous = row.continuous || !model.vars[j].integral;
    }
    if (!row.usable) row.terms.clear();
  }

  // Cliques: sum of binaries with equal coefficients, = or <= that coefficient.
  std::vector<std::vector<std::size_t>> cliques_of_var(nv);
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const Row& row = rows_[i];
    if (!row.usable || row.terms.size() < 2 || row.relation == Relation::greater_equal) continue;
    const long long a = row.terms.front().coef;
    const bool binary = std::all_of(row.terms.begin(), row.terms.end(), [&](const Entry& e) {
      const auto& v = model.vars[e.var];
      return e.coef == a && v.integral && v.lower >= 0.0 && v.upper <= 1.0;
    });
    if (!binary || a <= 0 || row.rhs != a) continue;
    Clique cl;
    for (const auto& e : row.terms) cl.vars.push_back(e.var);
    cl.exact = row.relation == Relation::equal;
    for (const auto& e : row.terms) cliques_of_var[e.var].push_back(cliques_.size());
    cliques_.push_back(std::move(cl));
  }

  // Group each row's binary terms by the clique covering most of them.
  for (Row& row : rows_) {
    row.group_of.assign(row.terms.size(), -1);
    while (true) {
      std::map<std::size_t, std::vector<std::size_t>> members;
      for (std::size_t k = 0; k < row.terms.size(); ++k) {
        if (row.group_of[k] >= 0) continue;
        for (const std::size_t c : cliques_of_var[row.terms[k].var]) members[c].push_back(k);
      }
      const std::vector<std::size_t>* best = nullptr;
      std::size_t best_clique = 0;
      for (const auto& [c, ks] : members) {
        if (!best || ks.size() > best->size()) {
          best = &ks;
          best_clique = c;
        }
      }
      if (!best || best->size() < 2) break;
      for (const std::size_t k : *best) row.group_of[k] = static_cast<int>(row.groups.size());
      row.groups.push_back({*best, best_clique});
    }
  }

  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (!rows_[i].usable) continue;
    for (const auto& e : rows_[i].terms) rows_of_var_[e.var].push_back(i);
    // A group's range also moves with clique members outside the row.
    for (const auto& g : rows_[i].groups) {
      for (const std::size_t j : cliques_[g.clique].vars) rows_of_var_[j].push_back(i);
    }
  }
  for (auto& rs : rows_of_var_) {
    std::sort(rs.begin(), rs.end());
    rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
  }
}

Propagation Propagator::run(std::vector<double> lower, std::vector<double> upper,
                            bool round_integral) const {
  Propagation out;
  out.active.assign(rows_.size(), 1);
  const std::size_t nv = lower.size();

  // Bounds in each variable's integer unit; absent means unbounded.
  std::vector<std::optional<Wide>> lo(nv), hi(nv);
  for (std::size_t j = 0; j < nv; ++j) {
    const bool inward = round_integral && model_.vars[j].integral;
    lo[j] = scaled_bound(lower[j], scale_[j], inward);
    hi[j] = scaled_bound(upper[j], scale_[j], !inward);
    if (lo[j] && hi[j] && *lo[j] > *hi[j]) {
      out.infeasible = true;
      return out;
    }
  }

  std::deque<std::size_t> queue;
  std::vector<char> queued(rows_.size(), 0);
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i].usable) {
      queue.push_back(i);
      queued[i] = 1;
    }
  }
  std::size_t budget = 50 * (rows_.size() + nv) + 1000;

  auto tighten = [&](std::size_t j, bool is_upper, Wide v) {
    if (std::abs(static_cast<double>(v)) > static_cast<double>(kMaxValue)) return true;
    if (is_upper) {
      if (hi[j] && *hi[j] <= v) return true;
      hi[j] = v;
    } else {
      if (lo[j] && *lo[j] >= v) return true;
      lo[j] = v;
    }
    // Write back only values the LP sees exactly; tighter internal bounds stay valid.
    const double d = static_cast<double>(v) / static_cast<double>(scale_[j]);
    const auto back = Rational::from_double(d);
    if (back && static_cast<Wide>(back->num()) * scale_[j] == v * back->den()) {
      (is_upper ? upper : lower)[j] = d;
    }
    if (lo[j] && hi[j] && *lo[j] > *hi[j]) return false;
    for (const std::size_t r : rows_of_var_[j]) {
      if (out.active[r] && !queued[r]) {
        queue.push_back(r);
        queued[r] = 1;
      }
    }
    return true;
  };

  struct Range {
    std::optional<Wide> min, max;
  };
  std::vector<Range> contrib;
  std::vector<Range> group_range;

  while (!queue.empty() && budget > 0) {
    --budget;
    const std::size_t i = queue.front();
    queue.pop_front();
    queued[i] = 0;
    if (!out.active[i]) continue;
    const Row& row = rows_[i];

    contrib.assign(row.terms.size(), {});
    for (std::size_t k = 0; k < row.terms.size(); ++k) {
      const auto& e = row.terms[k];
      const auto& low = e.coef > 0 ? lo[e.var] : hi[e.var];
      const auto& high = e.coef > 0 ? hi[e.var] : lo[e.var];
      if (low) contrib[k].min = e.coef * *low;
      if (high) contrib[k].max = e.coef * *high;
    }

    // A group contributes one of its coefficients (or 0 when none may be chosen).
    group_range.assign(row.groups.size(), {});
    bool infeasible = false;
    for (std::size_t g = 0; g < row.groups.size() && !infeasible; ++g) {
      const auto& grp = row.groups[g];
      const Clique& cl = cliques_[grp.clique];
      std::size_t forced = 0;
      Wide forced_value = 0;
      std::optional<Wide> mn, mx;
      for (const std::size_t k : grp.terms) {
        const auto& e = row.terms[k];
        if (lo[e.var] && *lo[e.var] >= 1) {
          ++forced;
          forced_value = e.coef;
        }
        if (!hi[e.var] || *hi[e.var] >= 1) {
          mn = mn ? std::min<Wide>(*mn, e.coef) : Wide{e.coef};
          mx = mx ? std::max<Wide>(*mx, e.coef) : Wide{e.coef};
        }
      }
      bool outside_forced = false, outside_open = false;
      for (const std::size_t j : cl.vars) {
        if (std::any_of(grp.terms.begin(), grp.terms.end(), [&](std::size_t k) { return row.terms[k].var == j; })) {
          continue;
        }
        if (lo[j] && *lo[j] >= 1) outside_forced = true;
        if (!hi[j] || *hi[j] >= 1) outside_open = true;
      }
      if (forced > 1 || (forced == 1 && outside_forced)) {
        infeasible = true;
        break;
      }
      if (forced == 1) {
        group_range[g] = {forced_value, forced_value};
        continue;
      }
      if (outside_forced) {
        group_range[g] = {0, 0};
        continue;
      }
      const bool zero = !cl.exact || outside_open;
      if (!mn && !zero) {
        infeasible = true;
        break;
      }
      Wide lo_g = mn.value_or(0), hi_g = mx.value_or(0);
      if (zero) {
        lo_g = std::min<Wide>(lo_g, 0);
        hi_g = std::max<Wide>(hi_g, 0);
      }
      group_range[g] = {lo_g, hi_g};
    }
    if (infeasible) {
      out.infeasible = true;
      return out;
    }

    // Box activity treats every term alone; grouped activity counts each group once.
    // Only the box view may drop a row: group ranges lean on the clique rows, which
    // must stay in force for the LP.
    struct Activity {
      Wide min = 0, max = 0;
      int min_inf = 0, max_inf = 0;
    };
    Activity box, grouped;
    for (std::size_t k = 0; k < row.terms.size(); ++k) {
      for (Activity* a : {&box, &grouped}) {
        if (a == &grouped && row.group_of[k] >= 0) continue;
        if (contrib[k].min) a->min += *contrib[k].min; else ++a->min_inf;
        if (contrib[k].max) a->max += *contrib[k].max; else ++a->max_inf;
      }
    }
    for (const auto& r : group_range) {
      grouped.min += *r.min;
      grouped.max += *r.max;
    }

    const bool need_max = row.relation != Relation::less_equal;     // sum >= rhs side
    const bool need_min = row.relation != Relation::greater_equal;  // sum <= rhs side
    if ((need_min && grouped.min_inf == 0 && grouped.min > row.rhs) ||
        (need_max && grouped.max_inf == 0 && grouped.max < row.rhs)) {
      out.infeasible = true;
      return out;
    }
    const bool min_slack = !need_min || (box.max_inf == 0 && box.max <= row.rhs);
    const bool max_slack = !need_max || (box.min_inf == 0 && box.min >= row.rhs);
    if (min_slack && max_slack && !row.continuous) {
      out.active[i] = 0;
      continue;
    }

    for (std::size_t k = 0; k < row.terms.size(); ++k) {
      const Activity& act = row.group_of[k] >= 0 ? box : grouped;
      const auto& e = row.terms[k];
      const std::size_t j = e.var;
      const bool inward = round_integral && model_.vars[j].integral;
      const auto& [cmin, cmax] = contrib[k];
      // coef * x_j <= rhs - (min activity of the other terms)
      if (need_min && act.min_inf - (cmin ? 0 : 1) == 0) {
        const Wide num = row.rhs - (act.min - cmin.value_or(0));
        const bool ok = e.coef > 0 ? tighten(j, true, inward ? floor_div(num, e.coef) : ceil_div(num, e.coef))
                                   : tighten(j, false, inward ? ceil_div(num, e.coef) : floor_div(num, e.coef));
        if (!ok) {
          out.infeasible = true;
          return out;
        }
      }
      // coef * x_j >= rhs - (max activity of the other terms)
      if (need_max && act.max_inf - (cmax ? 0 : 1) == 0) {
        const Wide num = row.rhs - (act.max - cmax.value_or(0));
        const bool ok = e.coef > 0 ? tighten(j, false, inward ? ceil_div(num, e.coef) : floor_div(num, e.coef))
                                   : tighten(j, true, inward ? floor_div(num, e.coef) : ceil_div(num, e.coef));
        if (!ok) {
          out.infeasible = true;
          return out;
        }
      }
    }

    // Group members whose coefficient falls outside the room left by the other terms
    // cannot be the chosen one. Integer reasoning only.
    if (!round_integral) continue;
    for (std::size_t g = 0; g < row.groups.size(); ++g) {
      const auto& r = group_range[g];
      std::optional<Wide> room_hi, room_lo;
      if (need_min && grouped.min_inf == 0) room_hi = row.rhs - (grouped.min - *r.min);
      if (need_max && grouped.max_inf == 0) room_lo = row.rhs - (grouped.max - *r.max);
      std::size_t open = 0, last_open = 0;
      for (const std::size_t k : row.groups[g].terms) {
        const auto& e = row.terms[k];
        if (hi[e.var] && *hi[e.var] < 1) continue;
        if ((room_hi && e.coef > *room_hi) || (room_lo && e.coef < *room_lo)) {
          if (!tighten(e.var, true, 0)) {
            out.infeasible = true;
            return out;
          }
          continue;
        }
        ++open;
        last_open = e.var;
      }
      const bool zero_fits = (!room_hi || *room_hi >= 0) && (!room_lo || *room_lo <= 0);
      if (!zero_fits && open == 0) {
        out.infeasible = true;
        return out;
      }
      if (!zero_fits && open == 1 && !tighten(last_open, false, 1)) {
        out.infeasible = true;
        return out;
      }
    }
  }
  out.lower = std::move(lower);
  out.upper = std::move(upper);
  return out;
}

}  // namespace turnpike::detail
