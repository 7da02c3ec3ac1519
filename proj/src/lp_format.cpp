#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "turnpike/model.hpp"

namespace turnpike {
namespace {

constexpr std::size_t kTermsPerLine = 8;

std::string header_line(const ModelMatrix& m) {
  std::ostringstream out;
  out << "\\ turnpike-model form=" << formulation_name(m.form) << " relaxed=" << m.relaxed
      << " n=" << m.n << " m_prime=" << m.m_prime << " basis=" << m.options.basis
      << " prune=" << m.options.prune << " partitions=" << m.partition_count
      << " refinements=" << m.refinements << " pruned=" << m.pruned_assignment_vars
      << " approximate=" << m.approximate_partitions
      << " trivially_infeasible=" << m.trivially_infeasible;
  return out.str();
}

std::string relation_token(Relation r) {
  switch (r) {
    case Relation::equal:
      return "=";
    case Relation::less_equal:
      return "<=";
    case Relation::greater_equal:
      return ">=";
  }
  return "=";
}

double parse_number(std::string_view tok) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  if (tok == "inf" || tok == "infinity" || tok == "Inf") return kInf;
  if (tok == "-inf" || tok == "-infinity" || tok == "-Inf") return -kInf;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw InvalidInput("malformed number '" + std::string(tok) + "' in LP text");
  }
  return v;
}

bool is_number(std::string_view tok) {
  if (tok.empty()) return false;
  const char c = tok.front();
  return (c >= '0' && c <= '9') || c == '.' || c == '-' || c == '+' || tok == "inf" ||
         tok == "-inf";
}

bool is_relation(std::string_view tok) {
  return tok == "=" || tok == "<=" || tok == ">=" || tok == "=<" || tok == "=>";
}

Relation parse_relation(std::string_view tok) {
  if (tok == "=") return Relation::equal;
  if (tok == "<=" || tok == "=<") return Relation::less_equal;
  return Relation::greater_equal;
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    std::size_t end = pos;
    while (end < line.size() && !std::isspace(static_cast<unsigned char>(line[end]))) ++end;
    if (end > pos) out.emplace_back(line.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

class LpReader {
 public:
  ModelMatrix read(std::string_view text) {
    declare_from_bounds(text);
    std::istringstream in{std::string(text)};
    std::string line;
    std::vector<std::string> pending;
    while (std::getline(in, line)) {
      if (!line.empty() && line[0] == '\\') {
        read_header(line);
        continue;
      }
      if (const auto c = line.find('\\'); c != std::string::npos) line.resize(c);
      const auto tokens = split(line);
      if (tokens.empty()) continue;
      const std::string head = lower(tokens[0]);
      const std::string two = tokens.size() > 1 ? head + " " + lower(tokens[1]) : head;
      if (head == "minimize" || head == "maximize" || head == "minimise" ||
          head == "maximise") {
        section_ = Section::objective;
        continue;
      }
      if (two == "subject to" || head == "st" || head == "s.t.") {
        section_ = Section::constraints;
        continue;
      }
      if (head == "bounds") {
        section_ = Section::bounds;
        continue;
      }
      if (head == "binaries" || head == "binary" || head == "generals" || head == "general") {
        section_ = Section::integers;
        continue;
      }
      if (head == "end") break;
      switch (section_) {
        case Section::objective:
          break;
        case Section::constraints:
          pending.insert(pending.end(), tokens.begin(), tokens.end());
          if (complete(pending)) {
            read_constraint(pending);
            pending.clear();
          }
          break;
        case Section::bounds:
          read_bound(tokens);
          break;
        case Section::integers:
          for (const auto& t : tokens) model_.vars[var(t)].integral = true;
          break;
        case Section::none:
          throw InvalidInput("LP text outside any section: '" + line + "'");
      }
    }
    if (!pending.empty()) throw InvalidInput("unterminated constraint in LP text");
    finish();
    return std::move(model_);
  }

 private:
  enum class Section { none, objective, constraints, bounds, integers };

  static bool complete(const std::vector<std::string>& toks) {
    return toks.size() >= 2 && is_relation(toks[toks.size() - 2]);
  }

  void read_header(const std::string& line) {
    const auto tokens = split(line.substr(1));
    if (tokens.empty() || tokens[0] != "turnpike-model") return;
    for (std::size_t k = 1; k < tokens.size(); ++k) {
      const auto eq = tokens[k].find('=');
      if (eq == std::string::npos) continue;
      const std::string key = tokens[k].substr(0, eq);
      const std::string val = tokens[k].substr(eq + 1);
      const auto num = [&] { return static_cast<std::size_t>(std::stoull(val)); };
      if (key == "form") model_.form = parse_formulation(val);
      else if (key == "relaxed") model_.relaxed = num() != 0;
      else if (key == "n") model_.n = num();
      else if (key == "m_prime") model_.m_prime = num();
      else if (key == "basis") model_.options.basis = num() != 0;
      else if (key == "prune") model_.options.prune = num() != 0;
      else if (key == "partitions") model_.partition_count = num();
      else if (key == "refinements") model_.refinements = num();
      else if (key == "pruned") model_.pruned_assignment_vars = num();
      else if (key == "approximate") model_.approximate_partitions = num() != 0;
      else if (key == "trivially_infeasible") model_.trivially_infeasible = num() != 0;
    }
  }

  std::size_t var(const std::string& name) {
    if (const auto it = index_.find(name); it != index_.end()) return it->second;
    auto v = parse_variable_name(name);
    if (!v) throw InvalidInput("unknown variable name '" + name + "'");
    // LP default bounds until a Bounds line says otherwise.
    v->lower = 0.0;
    v->upper = kInf;
    v->integral = false;
    index_.emplace(name, model_.vars.size());
    model_.vars.push_back(*v);
    return model_.vars.size() - 1;
  }

  void read_constraint(const std::vector<std::string>& toks) {
    std::size_t pos = toks[0].back() == ':' ? 1 : 0;
    const std::size_t rel = toks.size() - 2;
    Constraint row;
    double sign = 1.0;
    double coef = 1.0;
    bool have_coef = false;
    for (; pos < rel; ++pos) {
      const std::string& t = toks[pos];
      if (t == "+") {
        sign = 1.0;
      } else if (t == "-") {
        sign = -1.0;
      } else if (is_number(t) && !have_coef) {
        coef = parse_number(t);
        have_coef = true;
      } else {
        const double c = sign * coef;
        const std::size_t v = var(t);
        if (c != 0.0) row.terms.push_back({v, c});
        sign = 1.0;
        coef = 1.0;
        have_coef = false;
      }
    }
    if (have_coef) throw InvalidInput("dangling coefficient in LP constraint");
    row.relation = parse_relation(toks[rel]);
    row.rhs = parse_number(toks[rel + 1]);
    model_.constraints.push_back(std::move(row));
  }

  // Declares variables in the order of the Bounds section so indices survive a
  // write/read cycle.
  void declare_from_bounds(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    bool in_bounds = false;
    while (std::getline(in, line)) {
      if (!line.empty() && line[0] == '\\') continue;
      const auto tokens = split(line);
      if (tokens.empty()) continue;
      const std::string head = lower(tokens[0]);
      if (head == "bounds") {
        in_bounds = true;
        continue;
      }
      if (head == "binaries" || head == "binary" || head == "generals" || head == "general" ||
          head == "end" || head == "subject" || head == "minimize" || head == "maximize") {
        in_bounds = false;
        continue;
      }
      if (!in_bounds) continue;
      for (const auto& t : tokens) {
        if (!is_number(t) && !is_relation(t) && lower(t) != "free") var(t);
      }
    }
  }

  void read_bound(const std::vector<std::string>& t) {
    if (t.size() == 2 && lower(t[1]) == "free") {
      auto& v = model_.vars[var(t[0])];
      v.lower = -kInf;
      v.upper = kInf;
    } else if (t.size() == 5 && is_relation(t[1]) && is_relation(t[3])) {
      auto& v = model_.vars[var(t[2])];
      v.lower = parse_number(t[0]);
      v.upper = parse_number(t[4]);
    } else if (t.size() == 3 && is_relation(t[1])) {
      auto& v = model_.vars[var(t[0])];
      const double b = parse_number(t[2]);
      const Relation r = parse_relation(t[1]);
      if (r == Relation::equal) {
        v.lower = v.upper = b;
      } else if (r == Relation::less_equal) {
        v.upper = b;
      } else {
        v.lower = b;
      }
    } else {
      std::string line;
      for (const auto& s : t) line += s + " ";
      throw InvalidInput("malformed bound line '" + line + "'");
    }
  }

  void finish() {
    auto& m = model_;
    if (m.n == 0) {
      for (const auto& v : m.vars) {
        if (v.kind == VarKind::coordinate) m.n = std::max(m.n, v.index[0] + 1);
        if (v.kind != VarKind::coordinate) {
          m.n = std::max(m.n, v.index[1] + 1);
          if (v.kind == VarKind::triangle) m.n = std::max(m.n, v.index[2] + 1);
        }
      }
    }
    if (m.m_prime == 0) {
      for (const auto& v : m.vars) {
        if (v.kind == VarKind::assignment) m.m_prime = std::max(m.m_prime, v.index[2] + 1);
      }
    }
    m.assignment_index.assign(interval_count(m.n) * m.m_prime, ModelMatrix::npos);
    for (std::size_t k = 0; k < m.vars.size(); ++k) {
      const auto& v = m.vars[k];
      if (v.kind != VarKind::assignment) continue;
      if (v.index[0] >= v.index[1] || v.index[1] >= m.n || v.index[2] >= m.m_prime) {
        throw InvalidInput("assignment variable " + variable_name(v) + " out of range");
      }
      m.assignment_index[interval_id(m.n, v.index[0], v.index[1]) * m.m_prime + v.index[2]] = k;
    }
  }

  ModelMatrix model_;
  Section section_ = Section::none;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace

std::string to_lp_format(const ModelMatrix& model) {
  std::ostringstream out;
  out << header_line(model) << "\n";
  out << "Minimize\n obj:\n";
  out << "Subject To\n";
  std::vector<std::string> names;
  names.reserve(model.vars.size());
  for (const auto& v : model.vars) names.push_back(variable_name(v));
  for (std::size_t c = 0; c < model.constraints.size(); ++c) {
    const auto& row = model.constraints[c];
    out << " c" << (c + 1) << ":";
    if (row.terms.empty()) {
      if (names.empty()) throw InvalidInput("cannot write an empty row without variables");
      out << " 0 " << names.front();
    }
    for (std::size_t k = 0; k < row.terms.size(); ++k) {
      if (k > 0 && k % kTermsPerLine == 0) out << "\n  ";
      const auto& term = row.terms[k];
      const double a = std::abs(term.coef);
      out << (term.coef < 0 ? " - " : (k == 0 ? " " : " + "));
      if (a != 1.0) out << format_double(a) << " ";
      out << names[term.var];
    }
    out << " " << relation_token(row.relation) << " " << format_double(row.rhs) << "\n";
  }
  out << "Bounds\n";
  for (std::size_t k = 0; k < model.vars.size(); ++k) {
    const auto& v = model.vars[k];
    const bool lo = std::isfinite(v.lower);
    const bool hi = std::isfinite(v.upper);
    if (!lo && !hi) {
      out << " " << names[k] << " free\n";
    } else if (lo && !hi) {
      out << " " << names[k] << " >= " << format_double(v.lower) << "\n";
    } else {
      out << " " << (lo ? format_double(v.lower) : std::string("-inf")) << " <= " << names[k]
          << " <= " << format_double(v.upper) << "\n";
    }
  }
  bool any_integral = false;
  std::size_t on_line = 0;
  for (std::size_t k = 0; k < model.vars.size(); ++k) {
    if (!model.vars[k].integral) continue;
    if (!any_integral) out << "Binaries\n";
    any_integral = true;
    out << " " << names[k];
    if (++on_line == kTermsPerLine) {
      out << "\n";
      on_line = 0;
    }
  }
  if (on_line != 0) out << "\n";
  out << "End\n";
  return out.str();
}

ModelMatrix parse_lp_format(std::string_view text) { return LpReader{}.read(text); }

void export_model(const ModelMatrix& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out << to_lp_format(model);
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

ModelMatrix import_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_lp_format(buf.str());
}

}  // namespace turnpike
