#include "turnpike/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "turnpike/bench.hpp"
#include "turnpike/io.hpp"
#include "turnpike/log.hpp"
#include "turnpike/metrics.hpp"
#include "turnpike/noise.hpp"
#include "turnpike/partitions.hpp"
#include "turnpike/pipeline.hpp"
#include "turnpike/solver.hpp"

namespace turnpike {
namespace {

using Json = nlohmann::ordered_json;

struct ModelFlags {
  std::string form = "tri-ilp";
  bool basis = false;
  bool prune = false;
  std::optional<double> tau;
};

struct SolverFlags {
  std::int64_t node_limit = 200000;
  double time_limit = 0.0;
  bool exact = false;
  std::string pivot = "dantzig";
};

struct ExperimentFlags {
  std::string generator = "uniform01";
  std::string n = "6";
  std::size_t trials = 10;
  std::uint64_t seed = 1;
  double quantum = 1e-6;
  std::int64_t genome_length = 1000;
  std::vector<double> r_grid{0.0};
  std::vector<double> R_grid{0.0};
  std::string tau_rule = "half_gap_star";
  double tau = 0.0;
  std::string mode = "per_value";
  std::string distribution = "uniform_pm_r";
  double digest_r = 5.0;
  bool no_timing = false;
  std::size_t workers = 0;
  std::string out_dir;
  ModelFlags model;
  SolverFlags solver;
};

// "5", "4,6,8" or "4:7" (inclusive range).
std::vector<std::size_t> parse_n_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ',');) {
    const auto colon = part.find(':');
    try {
      if (colon == std::string::npos) {
        out.push_back(std::stoul(part));
      } else {
        const auto lo = std::stoul(part.substr(0, colon));
        const auto hi = std::stoul(part.substr(colon + 1));
        if (hi < lo) throw InvalidInput("empty n range '" + part + "'");
        for (auto v = lo; v <= hi; ++v) out.push_back(v);
      }
    } catch (const std::logic_error&) {
      throw InvalidInput("bad n list '" + text + "'");
    }
  }
  return out;
}

std::string read_input(const std::string& path, std::istream& in) {
  if (path == "-") {
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
  }
  return read_text(path);
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty() || out_path == "-") {
    out << text;
  } else {
    write_text(out_path, text);
  }
}

SolverConfig solver_config(const SolverFlags& f) {
  SolverConfig cfg;
  cfg.node_limit = f.node_limit;
  cfg.time_limit = f.time_limit;
  cfg.exact = f.exact;
  if (f.pivot == "bland") {
    cfg.pivot_rule = PivotRule::bland;
  } else if (f.pivot != "dantzig") {
    throw InvalidInput("unknown pivot rule '" + f.pivot + "'");
  }
  return cfg;
}

ModelMatrix build_model(const DistanceMultiset& y, const ModelFlags& f) {
  const Formulation form = parse_formulation(f.form);
  const ModelOptions opts{f.basis, f.prune};
  if (form == Formulation::milp) return build_milp(y, opts);
  if (!f.tau && !y.exact()) throw InvalidInput("this instance has no exact grid; pass --tau");
  const auto pset = f.tau ? approximate_two_partitions(y, *f.tau) : enumerate_two_partitions(y);
  auto model = build_triangle_ilp(y, pset, opts, f.tau.has_value());
  if (form == Formulation::triangle_lp) model = relax(std::move(model));
  return model;
}

void add_model_flags(CLI::App* cmd, ModelFlags& f, bool with_tau = true) {
  cmd->add_option("--form", f.form, "milp, tri-ilp or tri-lp")
      ->check(CLI::IsMember({"milp", "tri-ilp", "tri-lp"}))
      ->capture_default_str();
  cmd->add_flag("--basis", f.basis, "Only refinements through the first point");
  cmd->add_flag("--prune", f.prune, "Drop labels excluded by the containment bounds");
  if (with_tau) cmd->add_option("--tau", f.tau, "Tolerance test instead of exact two-partitions");
}

void add_solver_flags(CLI::App* cmd, SolverFlags& f) {
  cmd->add_option("--node-limit", f.node_limit)->capture_default_str();
  cmd->add_option("--time-limit", f.time_limit, "Seconds; 0 disables")->capture_default_str();
  cmd->add_flag("--exact", f.exact, "Certify verdicts in exact rational arithmetic");
  cmd->add_option("--pivot", f.pivot, "dantzig or bland")->check(CLI::IsMember({"dantzig", "bland"}));
}

void add_experiment_flags(CLI::App* cmd, ExperimentFlags& f, bool phase) {
  cmd->add_option("--generator", f.generator)->capture_default_str();
  cmd->add_option("--n", f.n, "Point counts: 6, 4,6,8 or 4:7")->capture_default_str();
  cmd->add_option("--trials", f.trials)->capture_default_str();
  cmd->add_option("--seed", f.seed)->capture_default_str();
  cmd->add_option("--quantum", f.quantum)->capture_default_str();
  cmd->add_option("--genome-length", f.genome_length)->capture_default_str();
  cmd->add_option("--R-grid", f.R_grid, "Rounding grids")->delimiter(',');
  if (phase) {
    cmd->add_option("--r-grid", f.r_grid, "Noise radii")->delimiter(',');
  } else {
    cmd->add_option("--r", f.digest_r, "Noise radius of the non-control rows")->capture_default_str();
  }
  cmd->add_option("--tau-rule", f.tau_rule)->check(CLI::IsMember({"half_gap_star", "fixed"}));
  cmd->add_option("--tau", f.tau, "Tolerance for --tau-rule fixed");
  cmd->add_option("--mode", f.mode)->check(CLI::IsMember({"per_value", "per_element"}));
  cmd->add_option("--dist", f.distribution);
  cmd->add_flag("--no-timing", f.no_timing, "Write 0 for wall times (byte-reproducible CSV)");
  cmd->add_option("--workers", f.workers, "Threads; 0 reads TURNPIKE_WORKERS");
  cmd->add_option("--out-dir", f.out_dir, "Write the CSV here instead of stdout");
  add_model_flags(cmd, f.model, false);
  cmd->add_option("--node-limit", f.solver.node_limit)->capture_default_str();
  cmd->add_option("--time-limit", f.solver.time_limit)->capture_default_str();
}

ExperimentSpec experiment_spec(const ExperimentFlags& f) {
  ExperimentSpec s;
  s.generator = parse_generator(f.generator);
  s.n_values = parse_n_list(f.n);
  s.trials = f.trials;
  s.seed = f.seed;
  s.quantum = f.quantum;
  s.genome_length = f.genome_length;
  s.model = {f.model.basis, f.model.prune};
  s.node_limit = f.solver.node_limit;
  s.time_limit = f.solver.time_limit;
  s.r_grid = f.r_grid;
  s.R_grid = f.R_grid;
  s.tau_rule = parse_tau_rule(f.tau_rule);
  s.tau = f.tau;
  s.mode = parse_noise_mode(f.mode);
  s.distribution = parse_noise_distribution(f.distribution);
  s.digest_r = f.digest_r;
  s.timing = !f.no_timing;
  s.workers = f.workers;
  s.validate();
  return s;
}

void emit_csv(const std::string& csv, const ExperimentFlags& f, const char* name, std::ostream& out) {
  if (f.out_dir.empty()) {
    out << csv;
    return;
  }
  std::filesystem::create_directories(f.out_dir);
  write_text(std::filesystem::path(f.out_dir) / name, csv);
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Turnpike reconstruction via triangle-equality assignment models", "turnpike"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log progress and repairs to stderr");

  std::string input = "-";
  std::string out_path;

  // gen
  auto* gen = app.add_subcommand("gen", "Generate an instance with its ground truth");
  std::string gen_dist = "uniform01";
  std::size_t gen_n = 6;
  std::uint64_t gen_seed = 1;
  double gen_quantum = 1e-6;
  std::int64_t gen_length = 1000;
  gen->add_option("--dist", gen_dist, "uniform01, normal, cauchy, digest_linear, digest_circular, beltway")
      ->capture_default_str();
  gen->add_option("--n", gen_n, "Number of points")->capture_default_str();
  gen->add_option("--seed", gen_seed)->capture_default_str();
  gen->add_option("--quantum", gen_quantum, "Coordinate grid")->capture_default_str();
  gen->add_option("--genome-length", gen_length)->capture_default_str();
  gen->add_option("--out", out_path);

  // partitions
  auto* parts = app.add_subcommand("partitions", "List the two-partition triples (1-based r s t)");
  std::optional<double> parts_tau;
  bool parts_gaps = false;
  parts->add_option("input", input, "Instance JSON ('-' for stdin)");
  parts->add_option("--tau", parts_tau, "Tolerance test instead of exact sums");
  parts->add_flag("--gaps", parts_gaps, "Include separation gaps in the summary");

  // build / export-lp
  ModelFlags model_flags;
  auto* build = app.add_subcommand("build", "Build a model and report its size");
  bool stats_json = false;
  build->add_option("input", input, "Instance JSON ('-' for stdin)");
  add_model_flags(build, model_flags);
  build->add_flag("--stats-json", stats_json, "Print the statistics as JSON");

  auto* export_lp = app.add_subcommand("export-lp", "Write the model in LP text format");
  export_lp->add_option("input", input, "Instance JSON ('-' for stdin)");
  add_model_flags(export_lp, model_flags);
  export_lp->add_option("--out", out_path);

  // solve
  SolverFlags solver_flags;
  auto* solve = app.add_subcommand("solve", "Solve a model and extract the assignment");
  solve->add_option("input", input, "Instance JSON ('-' for stdin)");
  add_model_flags(solve, model_flags);
  add_solver_flags(solve, solver_flags);
  solve->add_option("--out", out_path, "Write the assignment JSON here");

  // perturb
  auto* perturb_cmd = app.add_subcommand("perturb", "Apply bounded noise and grid rounding");
  NoiseSpec noise;
  std::string noise_mode = "per_value";
  std::string noise_dist = "uniform_pm_r";
  perturb_cmd->add_option("input", input, "Instance JSON ('-' for stdin)");
  perturb_cmd->add_option("--r", noise.r, "Noise radius")->capture_default_str();
  perturb_cmd->add_option("--R", noise.R, "Rounding grid")->capture_default_str();
  perturb_cmd->add_option("--seed", noise.seed)->capture_default_str();
  perturb_cmd->add_option("--mode", noise_mode)->check(CLI::IsMember({"per_value", "per_element"}));
  perturb_cmd->add_option("--dist", noise_dist);
  perturb_cmd->add_option("--out", out_path);

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "Partitions, model, solve, certificate");
  bool coords = false;
  bool verify = false;
  bool inexact = false;
  pipe->add_option("input", input, "Instance JSON ('-' for stdin)");
  add_model_flags(pipe, model_flags);
  pipe->add_flag("--coords", coords, "Also output coordinates");
  pipe->add_flag("--verify", verify, "Re-check a realizable claim independently");
  pipe->add_option("--node-limit", solver_flags.node_limit)->capture_default_str();
  pipe->add_option("--time-limit", solver_flags.time_limit)->capture_default_str();
  pipe->add_flag("--inexact", inexact, "Skip exact certification (infeasible becomes undecided)");
  pipe->add_option("--out", out_path);

  // score
  auto* score_cmd = app.add_subcommand("score", "Metrics of an assignment against the ground truth");
  std::string assignment_path;
  score_cmd->add_option("input", input, "Instance JSON with ground_truth ('-' for stdin)");
  score_cmd->add_option("--assignment", assignment_path, "Assignment or pipeline result JSON")->required();

  // experiments
  ExperimentFlags phase_flags, integrality_flags, digest_flags;
  auto* phase = app.add_subcommand("phase", "(r, R) phase diagram of two-partition recovery");
  add_experiment_flags(phase, phase_flags, true);
  auto* integrality = app.add_subcommand("integrality", "LP integrality scores");
  add_experiment_flags(integrality, integrality_flags, true);
  auto* digest = app.add_subcommand("digest", "Partial-digest sweep, linear and circular");
  digest_flags.n = "5:8";
  digest_flags.trials = 5;
  add_experiment_flags(digest, digest_flags, false);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    if (verbose) {
      set_log_sink([](LogLevel, std::string_view msg) { std::cerr << msg << '\n'; });
    }
    if (*phase || *integrality || *digest) {
      if (*phase) {
        const auto spec = experiment_spec(phase_flags);
        emit_csv(phase_csv(phase_experiment(spec), spec), phase_flags, "phase.csv", out);
      } else if (*integrality) {
        emit_csv(integrality_csv(integrality_experiment(experiment_spec(integrality_flags))), integrality_flags,
                 "integrality.csv", out);
      } else {
        emit_csv(digest_csv(digest_experiment(experiment_spec(digest_flags))), digest_flags, "digest.csv", out);
      }
      return 0;
    }
    if (*gen) {
      const Generator g = parse_generator(gen_dist);
      const auto made = generate(g, gen_n, gen_seed, gen_quantum, gen_length);
      Json prov;
      prov["generator"] = generator_name(g);
      prov["n"] = gen_n;
      prov["seed"] = gen_seed;
      prov["quantum"] = gen_quantum;
      prov["genome_length"] = gen_length;
      Instance inst{made.y, std::nullopt, ""};
      if (made.circumference) {
        // Shortest-arc distances are not the linear differences of the sites, so the
        // sites go into the provenance block instead of ground_truth.
        prov["circumference"] = *made.circumference;
        prov["sites"] = std::vector<double>(made.x.coords().begin(), made.x.coords().end());
      } else {
        inst.ground_truth = made.x;
      }
      inst.provenance = prov.dump();
      emit(instance_to_json(inst), out_path, out);
      return 0;
    }

    const Instance inst = parse_instance(read_input(input, in));
    const DistanceMultiset& y = inst.y;

    if (*parts) {
      if (!parts_tau && !y.exact()) throw InvalidInput("this instance has no exact grid; pass --tau");
      const auto pset = parts_tau ? approximate_two_partitions(y, *parts_tau) : enumerate_two_partitions(y);
      for (const auto& q : pset) out << q.r + 1 << ' ' << q.s + 1 << ' ' << q.t + 1 << '\n';
      Json summary;
      summary["count"] = pset.size();
      if (parts_gaps) {
        const auto g = gaps(y);
        summary["gap_star"] = finite_or_null(g.gap_star);
        Json per = Json::array();
        for (const double v : g.per_target) per.push_back(finite_or_null(v));
        summary["per_target_min"] = std::move(per);
      }
      out << summary.dump() << '\n';
      return 0;
    }

    if (*build || *export_lp) {
      const auto model = build_model(y, model_flags);
      if (*export_lp) {
        emit(to_lp_format(model), out_path, out);
      } else if (stats_json) {
        out << model_stats_to_json(model_stats(model));
      } else {
        const auto s = model_stats(model);
        out << "form " << formulation_name(model.form) << (model.relaxed ? " (relaxed)" : "") << '\n'
            << "variables " << s.n_vars << " (assignment " << s.n_assignment_vars << ", triangle "
            << s.n_triangle_vars << ", coordinate " << s.n_coordinate_vars << ")\n"
            << "constraints " << s.n_constraints << '\n'
            << "pruned " << s.n_pruned_assignment_vars << '\n'
            << "two-partitions " << s.partition_count << '\n';
      }
      return 0;
    }

    if (*solve) {
      const auto model = build_model(y, model_flags);
      const auto cfg = solver_config(solver_flags);
      const auto sol = model.relaxed ? solve_lp(model, cfg) : solve_ilp(model, cfg);
      Json doc;
      doc["status"] = status_name(sol.status);
      doc["certified"] = sol.certified;
      doc["simplex_iterations"] = sol.stats.simplex_iterations;
      doc["bb_nodes"] = sol.stats.bb_nodes;
      if (sol.status == SolveStatus::feasible) {
        const auto p = extract_assignment(sol, model);
        doc["integral"] = p.integral(cfg.integrality_tol);
        const std::string text = assignment_to_json(p, cfg.integrality_tol);
        if (!out_path.empty()) {
          write_text(out_path, text);
        } else {
          doc["assignment"] = Json::parse(text);
        }
      }
      out << doc.dump(2) << '\n';
      return 0;
    }

    if (*perturb_cmd) {
      noise.mode = parse_noise_mode(noise_mode);
      noise.distribution = parse_noise_distribution(noise_dist);
      const auto obs = observe(y, noise);
      const auto rounded = round_to_grid(obs.values, noise.R);
      const auto d = distortion(rounded, obs.source);
      Instance noisy{aggregate(rounded, noise.R), std::nullopt, ""};
      Json prov;
      prov["r"] = noise.r;
      prov["R"] = noise.R;
      prov["seed"] = noise.seed;
      prov["mode"] = noise_mode_name(noise.mode);
      prov["distribution"] = noise_distribution_name(noise.distribution);
      prov["splits"] = d.splits;
      prov["merges"] = d.merges;
      prov["repairs"] = obs.repairs;
      if (!inst.provenance.empty()) prov["source"] = Json::parse(inst.provenance);
      noisy.provenance = prov.dump();
      emit(instance_to_json(noisy), out_path, out);
      return 0;
    }

    if (*pipe) {
      PipelineOptions opts;
      opts.form = parse_formulation(model_flags.form);
      opts.model = {model_flags.basis, model_flags.prune};
      opts.tau = model_flags.tau;
      opts.coords = coords;
      opts.solver.node_limit = solver_flags.node_limit;
      opts.solver.time_limit = solver_flags.time_limit;
      opts.solver.exact = !inexact;
      const auto res = run_pipeline(y, opts);
      std::optional<Verification> v;
      if (verify) v = verify_certificate(res, y);
      emit(pipeline_result_to_json(res, v), out_path, out);
      return 0;
    }

    if (*score_cmd) {
      if (!inst.ground_truth) throw InvalidInput("the instance has no ground_truth");
      const Json doc = Json::parse(read_text(assignment_path));
      std::optional<std::vector<double>> x_hat;
      AssignmentMatrix p;
      if (doc.contains("certificate")) {
        if (doc["assignment"].is_null()) throw InvalidInput("the pipeline result has no assignment");
        p = parse_assignment(doc["assignment"].dump());
        if (doc.contains("coords") && doc["coords"].is_array()) x_hat = doc["coords"].get<std::vector<double>>();
      } else {
        p = parse_assignment(doc.dump());
      }
      const auto truth = ground_truth(*inst.ground_truth);
      if (p.points() != truth.coords.size() || p.labels() != truth.y.distinct()) {
        throw InvalidInput("assignment shape does not match the instance");
      }
      const auto m = x_hat ? score(p, truth, std::span<const double>(*x_hat)) : score(p, truth);
      out << metrics_to_json(m);
      return 0;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cin, std::cout, std::cerr);
}

}  // namespace turnpike
