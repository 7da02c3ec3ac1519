// Python bindings. Multisets, results and point sets cross as plain Python values;
// everything else (experiments, model export) is reachable through run_cli.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "turnpike/bench.hpp"
#include "turnpike/cli.hpp"
#include "turnpike/io.hpp"
#include "turnpike/metrics.hpp"
#include "turnpike/noise.hpp"
#include "turnpike/partitions.hpp"
#include "turnpike/pipeline.hpp"

namespace py = pybind11;
using namespace turnpike;

namespace {

DistanceMultiset make_multiset(std::vector<double> values, std::vector<int> mu,
                               const std::optional<std::string>& scale) {
  if (values.size() != mu.size()) throw InvalidInput("values and multiplicities differ in length");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<double> sorted_values;
  std::vector<int> sorted_mu;
  for (const std::size_t k : order) {
    sorted_values.push_back(values[k]);
    sorted_mu.push_back(mu[k]);
  }
  values = std::move(sorted_values);
  mu = std::move(sorted_mu);
  if (!scale) {
    // Integer or short-decimal data loads exactly, like an instance file.
    if (const auto unit = detect_grid(values)) {
      std::vector<std::int64_t> ticks;
      for (const double v : values) ticks.push_back(std::llround(v / unit->to_double()));
      return DistanceMultiset(ticks, mu, *unit);
    }
    return DistanceMultiset(values, mu);
  }
  const Rational unit = Rational::parse(*scale);
  std::vector<std::int64_t> ticks;
  for (const double v : values) ticks.push_back(std::llround(v / unit.to_double()));
  DistanceMultiset y(ticks, mu, unit);
  for (std::size_t r = 0; r < values.size(); ++r) {
    if (y.value(r) != values[r]) throw InvalidInput("value " + format_double(values[r]) + " is not on the grid");
  }
  return y;
}

PointSet make_points(const std::vector<double>& coords) {
  if (const auto unit = detect_grid(coords)) {
    std::vector<std::int64_t> ticks;
    for (const double v : coords) ticks.push_back(std::llround(v / unit->to_double()));
    return PointSet(ticks, *unit);
  }
  return PointSet(coords);
}

py::dict pipeline_dict(const PipelineResult& res, const DistanceMultiset& y) {
  py::dict d;
  d["certificate"] = std::string(certificate_name(res.certificate));
  d["status"] = std::string(status_name(res.status));
  d["integral"] = res.integral;
  d["induced_ruler_residual"] = res.induced_ruler_residual;
  d["coords"] = res.coords;
  d["partition_count"] = res.partition_count;
  if (res.status == SolveStatus::feasible) {
    d["labels"] = res.assignment.hard_labels();
  } else {
    d["labels"] = py::none();
  }
  const auto v = verify_certificate(res, y);
  d["verified"] = v.ok;
  d["verification"] = v.reason;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Turnpike reconstruction via triangle-equality assignment models";
  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);

  py::class_<DistanceMultiset>(m, "DistanceMultiset")
      .def(py::init(&make_multiset), py::arg("values"), py::arg("multiplicities"), py::arg("scale") = py::none(),
           "Distinct values (any order) with multiplicities; exact when the data lie on a decimal grid "
           "or `scale` (\"num/den\") is given.")
      .def_property_readonly("values", [](const DistanceMultiset& y) {
        return std::vector<double>(y.values().begin(), y.values().end());
      })
      .def_property_readonly("multiplicities", [](const DistanceMultiset& y) {
        return std::vector<int>(y.multiplicities().begin(), y.multiplicities().end());
      })
      .def_property_readonly("exact", &DistanceMultiset::exact)
      .def_property_readonly("point_count", &DistanceMultiset::point_count)
      .def_property_readonly("scale", [](const DistanceMultiset& y) -> std::optional<std::string> {
        if (!y.exact()) return std::nullopt;
        return y.unit().to_string();
      })
      .def("to_json", [](const DistanceMultiset& y) { return instance_to_json({y, std::nullopt, ""}); })
      .def("__eq__", [](const DistanceMultiset& a, const DistanceMultiset& b) { return a == b; })
      .def("__len__", &DistanceMultiset::total)
      .def("__repr__", [](const DistanceMultiset& y) {
        std::ostringstream s;
        s << "DistanceMultiset(distinct=" << y.distinct() << ", total=" << y.total() << ", exact=" << y.exact() << ")";
        return s.str();
      });

  m.def("delta", [](const std::vector<double>& coords) { return delta(make_points(coords)); }, py::arg("points"),
        "Multiset of pairwise distances of a point set.");
  m.def("parse_instance", [](const std::string& text) { return parse_instance(text).y; }, py::arg("text"));

  m.def(
      "two_partitions",
      [](const DistanceMultiset& y, std::optional<double> tau) {
        const auto p = tau ? approximate_two_partitions(y, *tau) : enumerate_two_partitions(y);
        std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> out;
        for (const auto& q : p) out.emplace_back(q.r, q.s, q.t);
        return out;
      },
      py::arg("y"), py::arg("tau") = py::none(),
      "(r, s, t) index triples (0-based, values in decreasing order) with y_r + y_s = y_t, "
      "or within tau when given.");
  m.def("gap_star", [](const DistanceMultiset& y) { return gaps(y).gap_star; }, py::arg("y"));

  m.def(
      "run_pipeline",
      [](const DistanceMultiset& y, const std::string& form, bool basis, bool prune, std::optional<double> tau,
         bool exact, std::int64_t node_limit) {
        PipelineOptions opts;
        opts.form = parse_formulation(form);
        opts.model = {basis, prune};
        opts.tau = tau;
        opts.coords = true;
        opts.solver.exact = exact;
        opts.solver.node_limit = node_limit;
        py::gil_scoped_release release;
        auto res = run_pipeline(y, opts);
        py::gil_scoped_acquire acquire;
        return pipeline_dict(res, y);
      },
      py::arg("y"), py::arg("form") = "tri-ilp", py::arg("basis") = false, py::arg("prune") = false,
      py::arg("tau") = py::none(), py::arg("exact") = true, py::arg("node_limit") = 200000);

  m.def(
      "oracle",
      [](const DistanceMultiset& y) {
        const auto r = oracle_realizable(y);
        switch (r.verdict) {
          case OracleVerdict::realizable:
            return std::string("realizable");
          case OracleVerdict::not_realizable:
            return std::string("not_realizable");
          case OracleVerdict::undecided:
            break;
        }
        return std::string("undecided");
      },
      py::arg("y"), "Backtracking realizability check.");

  m.def(
      "generate",
      [](const std::string& generator, std::size_t n, std::uint64_t seed, double quantum, std::int64_t length) {
        const auto inst = generate(parse_generator(generator), n, seed, quantum, length);
        return py::make_tuple(std::vector<double>(inst.x.coords().begin(), inst.x.coords().end()), inst.y);
      },
      py::arg("generator"), py::arg("n"), py::arg("seed"), py::arg("quantum") = 1e-6,
      py::arg("genome_length") = 1000, "Returns (coords, multiset).");

  m.def(
      "perturb",
      [](const DistanceMultiset& y, double r, double R, std::uint64_t seed, const std::string& mode,
         const std::string& distribution) {
        const NoiseSpec spec{r, R, seed, parse_noise_mode(mode), parse_noise_distribution(distribution)};
        return round_to_grid(perturb(y, spec), R);
      },
      py::arg("y"), py::arg("r"), py::arg("R"), py::arg("seed"), py::arg("mode") = "per_value",
      py::arg("distribution") = "uniform",
      "Noisy observation rounded to the R grid: one value per distinct value (per_value) or per copy.");

  m.def(
      "kendall_tau",
      [](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) { return kendall_tau(a, b); },
      py::arg("pi_hat"), py::arg("pi_star"),
      "Fraction of interval pairs the two orders rank oppositely (0 when they agree).");
  m.def(
      "coords_least_squares",
      [](const std::vector<std::vector<double>>& rho) {
        Ruler r(rho.size());
        for (std::size_t i = 0; i < rho.size(); ++i) {
          if (rho[i].size() != rho.size()) throw InvalidInput("ruler must be square");
          for (std::size_t j = 0; j < rho.size(); ++j) r(i, j) = rho[i][j];
        }
        return coords_least_squares(r);
      },
      py::arg("rho"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args, const std::string& stdin_text) {
        std::istringstream in(stdin_text);
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = run_cli(args, in, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), py::arg("stdin") = "", "Runs one CLI invocation; returns (exit_code, stdout, stderr).");
}
