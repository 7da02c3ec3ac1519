#include "turnpike/io.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace turnpike {
namespace {

using Json = nlohmann::ordered_json;

Json parse_json(std::string_view text, std::string_view what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InvalidInput(std::string(what) + " is not valid JSON: " + e.what());
  }
}

const Json& field(const Json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw InvalidInput(std::string("missing field \"") + key + "\"");
  return *it;
}

std::vector<double> number_array(const Json& arr, const char* key) {
  if (!arr.is_array()) throw InvalidInput(std::string("\"") + key + "\" must be an array");
  std::vector<double> out;
  for (const auto& v : arr) {
    if (!v.is_number()) throw InvalidInput(std::string("\"") + key + "\" must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::int64_t integer(const Json& v, const char* key) {
  if (!v.is_number_integer()) throw InvalidInput(std::string("\"") + key + "\" must be an integer");
  return v.get<std::int64_t>();
}

// Tick of v on the grid `unit`, if v is exactly a grid point in double terms.
std::optional<std::int64_t> tick_of(double v, const Rational& unit) {
  const double q = std::round(v / unit.to_double());
  if (!(std::abs(q) <= static_cast<double>(kMaxExactTicks))) return std::nullopt;
  const auto t = static_cast<std::int64_t>(q);
  if (scaled_value(t, unit) != v) return std::nullopt;
  return t;
}

Rational parse_scale(const Json& v) {
  Rational unit;
  if (v.is_string()) {
    unit = Rational::parse(v.get<std::string>());
  } else if (v.is_number()) {
    const auto r = Rational::from_double(v.get<double>());
    if (!r) throw InvalidInput("\"scale\" has no exact decimal form");
    unit = *r;
  } else {
    throw InvalidInput("\"scale\" must be a number or a rational string");
  }
  if (unit <= Rational(0)) throw InvalidInput("\"scale\" must be positive");
  return unit;
}

Json scale_json(const Rational& unit) {
  // Decimal units are written as numbers; anything else as "num/den".
  const std::string text = unit.to_string();
  if (text.find('/') != std::string::npos) return text;
  return unit.to_double();
}

}  // namespace

std::optional<Rational> detect_grid(std::span<const double> values) {
  // The grid is 1 / lcm of the reduced denominators, so integer data stays on unit 1.
  __int128 den_lcm = 1;
  constexpr __int128 limit = std::numeric_limits<std::int64_t>::max();
  std::vector<Rational> exact;
  for (const double v : values) {
    if (!std::isfinite(v)) return std::nullopt;
    const auto r = Rational::from_double(std::abs(v));
    if (!r) return std::nullopt;
    exact.push_back(*r);
    const std::int64_t g = std::gcd(static_cast<std::int64_t>(den_lcm), r->den());
    den_lcm = den_lcm / g * r->den();
    if (den_lcm > limit) return std::nullopt;
  }
  for (const auto& r : exact) {
    const __int128 ticks = static_cast<__int128>(r.num()) * (den_lcm / r.den());
    if (ticks > kMaxExactTicks) return std::nullopt;
  }
  return Rational(1, static_cast<std::int64_t>(den_lcm));
}

Instance parse_instance(std::string_view text) {
  const Json doc = parse_json(text, "instance");
  if (!doc.is_object()) throw InvalidInput("instance must be a JSON object");
  const std::int64_t n = integer(field(doc, "n"), "n");
  if (n < 2) throw InvalidInput("instances need n >= 2");
  const auto values = number_array(field(doc, "values"), "values");
  std::vector<int> mu;
  const Json& mults = field(doc, "multiplicities");
  if (!mults.is_array()) throw InvalidInput("\"multiplicities\" must be an array");
  for (const auto& m : mults) {
    const auto v = integer(m, "multiplicities");
    if (v < 1 || v > std::numeric_limits<int>::max()) throw InvalidInput("multiplicities must be >= 1");
    mu.push_back(static_cast<int>(v));
  }
  std::optional<std::vector<double>> coords;
  if (const auto it = doc.find("ground_truth"); it != doc.end() && !it->is_null()) {
    coords = number_array(*it, "ground_truth");
  }

  std::optional<Rational> unit;
  if (const auto it = doc.find("scale"); it != doc.end() && !it->is_null()) {
    unit = parse_scale(*it);
  } else {
    std::vector<double> all = values;
    if (coords) all.insert(all.end(), coords->begin(), coords->end());
    unit = detect_grid(all);
  }

  auto on_grid = [&](const std::vector<double>& xs, const char* what) {
    std::vector<std::int64_t> ticks;
    for (const double v : xs) {
      const auto t = tick_of(v, *unit);
      if (!t) throw InvalidInput(std::string(what) + " value " + format_double(v) + " is not on the grid");
      ticks.push_back(*t);
    }
    return ticks;
  };

  Instance inst{unit ? DistanceMultiset(on_grid(values, "distance"), mu, *unit)
                     : DistanceMultiset(values, mu),
                std::nullopt, ""};
  if (inst.y.point_count() != static_cast<std::size_t>(n)) {
    throw InvalidInput("multiplicities sum to " + std::to_string(inst.y.total()) + ", not C(" +
                       std::to_string(n) + ",2)");
  }
  if (coords) {
    if (coords->size() != static_cast<std::size_t>(n)) {
      throw InvalidInput("\"ground_truth\" needs n coordinates");
    }
    PointSet ps = unit ? PointSet(on_grid(*coords, "coordinate"), *unit) : PointSet(*coords);
    if (unit && !(delta(ps) == inst.y)) {
      throw InvalidInput("ground truth coordinates do not produce the distances");
    }
    inst.ground_truth = std::move(ps);
  }
  if (const auto it = doc.find("provenance"); it != doc.end() && !it->is_null()) {
    inst.provenance = it->dump();
  }
  return inst;
}

std::string instance_to_json(const Instance& inst) {
  Json doc;
  doc["n"] = *inst.y.point_count();
  doc["values"] = std::vector<double>(inst.y.values().begin(), inst.y.values().end());
  doc["multiplicities"] = std::vector<int>(inst.y.multiplicities().begin(), inst.y.multiplicities().end());
  if (inst.y.exact()) doc["scale"] = scale_json(inst.y.unit());
  if (inst.ground_truth) {
    const auto c = inst.ground_truth->coords();
    doc["ground_truth"] = std::vector<double>(c.begin(), c.end());
  }
  if (!inst.provenance.empty()) doc["provenance"] = Json::parse(inst.provenance);
  return doc.dump(2) + "\n";
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

Instance read_instance(const std::filesystem::path& path) { return parse_instance(read_text(path)); }

std::string assignment_to_json(const AssignmentMatrix& p, double integrality_tol) {
  Json doc;
  doc["n"] = p.points();
  doc["m_prime"] = p.labels();
  doc["integral"] = p.integral(integrality_tol);
  Json entries = Json::array();
  const std::size_t n = p.points();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t r = 0; r < p.labels(); ++r) {
        const double w = p.at(i, j, r);
        if (w != 0.0) entries.push_back(Json::array({i + 1, j + 1, r + 1, w}));
      }
    }
  }
  doc["entries"] = std::move(entries);
  return doc.dump(2) + "\n";
}

AssignmentMatrix parse_assignment(std::string_view text) {
  const Json doc = parse_json(text, "assignment");
  if (!doc.is_object()) throw InvalidInput("assignment must be a JSON object");
  const auto n = integer(field(doc, "n"), "n");
  const auto m = integer(field(doc, "m_prime"), "m_prime");
  if (n < 2 || m < 1) throw InvalidInput("assignment needs n >= 2 and m_prime >= 1");
  AssignmentMatrix p(static_cast<std::size_t>(n), static_cast<std::size_t>(m));
  const Json& entries = field(doc, "entries");
  if (!entries.is_array()) throw InvalidInput("\"entries\" must be an array");
  for (const auto& e : entries) {
    if (!e.is_array() || e.size() != 4) throw InvalidInput("entries are [i, j, r, weight]");
    const auto i = integer(e[0], "i");
    const auto j = integer(e[1], "j");
    const auto r = integer(e[2], "r");
    if (!(1 <= i && i < j && j <= n && 1 <= r && r <= m)) throw InvalidInput("entry index out of range");
    if (!e[3].is_number()) throw InvalidInput("entry weight must be a number");
    p(interval_id(static_cast<std::size_t>(n), static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1)),
      static_cast<std::size_t>(r - 1)) = e[3].get<double>();
  }
  return p;
}

std::string pipeline_result_to_json(const PipelineResult& result, const std::optional<Verification>& verification) {
  Json doc;
  doc["certificate"] = certificate_name(result.certificate);
  doc["status"] = status_name(result.status);
  doc["integral"] = result.integral;
  doc["induced_ruler_residual"] = result.induced_ruler_residual;
  if (result.status == SolveStatus::feasible) {
    doc["assignment"] = Json::parse(assignment_to_json(result.assignment, result.options.solver.integrality_tol));
  } else {
    doc["assignment"] = nullptr;
  }
  doc["coords"] = result.coords ? Json(*result.coords) : Json(nullptr);
  if (verification) doc["verification"] = {{"ok", verification->ok}, {"reason", verification->reason}};
  Json config;
  config["form"] = formulation_name(result.options.form);
  config["basis"] = result.options.model.basis;
  config["prune"] = result.options.model.prune;
  config["tau"] = result.options.tau ? Json(*result.options.tau) : Json(nullptr);
  config["approximate_partitions"] = result.approximate_partitions;
  config["partition_count"] = result.partition_count;
  config["exact"] = result.options.solver.exact;
  config["node_limit"] = result.options.solver.node_limit;
  config["time_limit"] = result.options.solver.time_limit;
  config["feasibility_tol"] = result.options.solver.feasibility_tol;
  config["integrality_tol"] = result.options.solver.integrality_tol;
  doc["provenance"] = std::move(config);
  doc["stats"] = {{"simplex_iterations", result.stats.simplex_iterations},
                  {"bb_nodes", result.stats.bb_nodes},
                  {"rational_fallbacks", result.stats.rational_fallbacks}};
  return doc.dump(2) + "\n";
}

std::string metrics_to_json(const Metrics& m) {
  Json doc;
  doc["labeling_error"] = m.labeling_error;
  doc["kendall_tau"] = m.kendall_tau;
  doc["mae"] = m.mae ? Json(*m.mae) : Json(nullptr);
  doc["integrality"] = m.integrality;
  doc["multiplicity_violation"] = m.multiplicity_violation;
  return doc.dump(2) + "\n";
}

std::string model_stats_to_json(const ModelStats& s) {
  Json doc;
  doc["n_vars"] = s.n_vars;
  doc["n_constraints"] = s.n_constraints;
  doc["n_assignment_vars"] = s.n_assignment_vars;
  doc["n_triangle_vars"] = s.n_triangle_vars;
  doc["n_coordinate_vars"] = s.n_coordinate_vars;
  doc["n_pruned_assignment_vars"] = s.n_pruned_assignment_vars;
  doc["n_refinements"] = s.n_refinements;
  doc["partition_count"] = s.partition_count;
  doc["n_integral"] = s.n_integral;
  return doc.dump(2) + "\n";
}

}  // namespace turnpike
