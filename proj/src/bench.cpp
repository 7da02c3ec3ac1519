#include "turnpike/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "turnpike/metrics.hpp"
#include "turnpike/partitions.hpp"
#include "turnpike/pipeline.hpp"
#include "turnpike/solver.hpp"

namespace turnpike {
namespace {

constexpr int kMaxRedraws = 1000;
// Ticks of generated coordinates stay well inside the exact range so that sums of
// distances remain exact.
constexpr double kMaxTick = 0x1.0p50;

using Rng = std::mt19937_64;
using Clock = std::chrono::steady_clock;

double unit_draw(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Uniform integer in [0, k) without modulo bias.
std::uint64_t uniform_below(Rng& rng, std::uint64_t k) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % k;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % k;
}

double draw(Generator dist, Rng& rng) {
  switch (dist) {
    case Generator::normal: {
      // Box-Muller; the standard library's normal_distribution is not reproducible
      // across implementations.
      const double u1 = 1.0 - unit_draw(rng);
      const double u2 = unit_draw(rng);
      return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
    case Generator::cauchy:
      return std::tan(std::numbers::pi * (unit_draw(rng) - 0.5));
    default:
      return unit_draw(rng);
  }
}

Rational grid_unit(double quantum) {
  if (!(quantum > 0)) throw InvalidInput("quantum must be positive");
  const auto unit = Rational::from_double(quantum);
  if (!unit) throw InvalidInput("quantum " + format_double(quantum) + " has no exact decimal form");
  return *unit;
}

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::size_t worker_count(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("TURNPIKE_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return 1;
}

// Runs fn(0..count-1) on a pool; results are written by index so output order never
// depends on scheduling.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t k = next.fetch_add(1);
        if (k >= count) return;
        try {
          fn(k);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

double elapsed_ms(Clock::time_point start, bool timing) {
  if (!timing) return 0.0;
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string csv_number(double v) { return format_double(v); }

std::string csv_optional(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

struct SetComparison {
  std::size_t spurious = 0;
  std::size_t missing = 0;
};

SetComparison compare(const TwoPartitionSet& estimate, const TwoPartitionSet& truth) {
  SetComparison c;
  const std::set<TwoPartition> t(truth.begin(), truth.end());
  const std::set<TwoPartition> e(estimate.begin(), estimate.end());
  for (const auto& x : e) c.spurious += !t.count(x);
  for (const auto& x : t) c.missing += !e.count(x);
  return c;
}

// Label of each interval under the point set's own (linear or circular) distances.
std::vector<std::size_t> interval_labels(const GeneratedInstance& inst) {
  const auto& x = inst.x;
  const std::size_t n = x.size();
  std::vector<std::size_t> labels(interval_count(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      std::int64_t d = x.ticks()[j] - x.ticks()[i];
      if (inst.circumference) {
        const auto c = static_cast<std::int64_t>(std::llround(*inst.circumference / x.unit().to_double()));
        d = std::min(d, c - d);
      }
      const auto r = inst.y.find_ticks(d);
      if (!r) throw InvalidInput("interval distance missing from the instance");
      labels[interval_id(n, i, j)] = *r;
    }
  }
  return labels;
}

}  // namespace

std::string_view generator_name(Generator g) {
  switch (g) {
    case Generator::uniform01:
      return "uniform01";
    case Generator::normal:
      return "normal";
    case Generator::cauchy:
      return "cauchy";
    case Generator::digest_linear:
      return "digest_linear";
    case Generator::digest_circular:
      return "digest_circular";
    case Generator::beltway:
      return "beltway";
  }
  return "";
}

Generator parse_generator(std::string_view name) {
  for (const auto g : {Generator::uniform01, Generator::normal, Generator::cauchy,
                       Generator::digest_linear, Generator::digest_circular, Generator::beltway}) {
    if (generator_name(g) == name) return g;
  }
  throw InvalidInput("unknown generator '" + std::string(name) + "'");
}

std::string_view tau_rule_name(TauRule t) {
  return t == TauRule::half_gap_star ? "half_gap_star" : "fixed";
}

TauRule parse_tau_rule(std::string_view name) {
  if (name == "half_gap_star") return TauRule::half_gap_star;
  if (name == "fixed") return TauRule::fixed;
  throw InvalidInput("unknown tau rule '" + std::string(name) + "'");
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return splitmix(splitmix(splitmix(splitmix(seed) ^ a) ^ b) ^ c);
}

GeneratedInstance gen_synthetic(Generator dist, std::size_t n, std::uint64_t seed, double quantum) {
  if (n < 2) throw InvalidInput("need n >= 2");
  if (dist != Generator::uniform01 && dist != Generator::normal && dist != Generator::cauchy) {
    throw InvalidInput("gen_synthetic takes uniform01, normal or cauchy");
  }
  const Rational unit = grid_unit(quantum);
  Rng rng(seed);
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    std::vector<std::int64_t> ticks;
    bool ok = true;
    for (std::size_t k = 0; k < n; ++k) {
      const double t = std::round(draw(dist, rng) / quantum);
      if (!(std::abs(t) < kMaxTick)) ok = false;
      ticks.push_back(ok ? static_cast<std::int64_t>(t) : 0);
    }
    if (!ok) continue;
    std::sort(ticks.begin(), ticks.end());
    if (std::adjacent_find(ticks.begin(), ticks.end()) != ticks.end()) continue;
    PointSet x(std::move(ticks), unit);
    auto y = delta(x);
    return {std::move(x), std::move(y), std::nullopt};
  }
  throw InvalidInput("could not draw " + std::to_string(n) + " distinct grid points");
}

GeneratedInstance gen_partial_digest(std::size_t sites, std::int64_t genome_length, bool circular,
                                     std::uint64_t seed) {
  if (genome_length < 1) throw InvalidInput("genome length must be positive");
  const auto length = static_cast<std::uint64_t>(genome_length);
  // Linear sites are interior positions 1..L-1; circular ones any of 0..L-1.
  const std::uint64_t slots = circular ? length : length - 1;
  if (sites > slots) throw InvalidInput("more sites than genome positions");
  if (circular ? sites < 2 : sites < 1) throw InvalidInput("too few sites");
  Rng rng(seed);
  std::set<std::int64_t> chosen;
  while (chosen.size() < sites) {
    chosen.insert(static_cast<std::int64_t>(uniform_below(rng, slots) + (circular ? 0 : 1)));
  }
  std::vector<std::int64_t> ticks(chosen.begin(), chosen.end());
  if (!circular) {
    ticks.insert(ticks.begin(), 0);
    ticks.push_back(genome_length);
  }
  PointSet x(std::move(ticks), Rational(1));
  if (circular) {
    auto y = beltway_delta_ticks(x, genome_length);
    return {std::move(x), std::move(y), static_cast<double>(genome_length)};
  }
  auto y = delta(x);
  return {std::move(x), std::move(y), std::nullopt};
}

GeneratedInstance gen_beltway(std::size_t n, std::uint64_t seed, double quantum) {
  if (n < 2) throw InvalidInput("need n >= 2");
  const Rational unit = grid_unit(quantum);
  const double slots = std::round(1.0 / quantum);
  if (!(slots >= static_cast<double>(n)) || slots >= kMaxTick) {
    throw InvalidInput("quantum does not fit the unit circle");
  }
  const auto circumference = static_cast<std::int64_t>(slots);
  Rng rng(seed);
  std::set<std::int64_t> chosen;
  while (chosen.size() < n) {
    chosen.insert(static_cast<std::int64_t>(uniform_below(rng, static_cast<std::uint64_t>(circumference))));
  }
  PointSet x(std::vector<std::int64_t>(chosen.begin(), chosen.end()), unit);
  auto y = beltway_delta_ticks(x, circumference);
  return {std::move(x), std::move(y), scaled_value(circumference, unit)};
}

GeneratedInstance generate(Generator g, std::size_t n, std::uint64_t seed, double quantum,
                           std::int64_t genome_length) {
  switch (g) {
    case Generator::digest_linear:
      if (n < 3) throw InvalidInput("linear digests need n >= 3 (two ends plus a site)");
      return gen_partial_digest(n - 2, genome_length, false, seed);
    case Generator::digest_circular:
      return gen_partial_digest(n, genome_length, true, seed);
    case Generator::beltway:
      return gen_beltway(n, seed, quantum);
    default:
      return gen_synthetic(g, n, seed, quantum);
  }
}

OracleResult oracle_realizable(const DistanceMultiset& y, std::size_t node_budget) {
  if (!y.exact()) throw InvalidInput("the realizability oracle needs an exact multiset");
  const auto n = y.point_count();
  if (!n) throw InvalidInput("distance count " + std::to_string(y.total()) + " is not C(n,2)");

  std::map<std::int64_t, int> remaining;
  for (std::size_t k = 0; k < y.distinct(); ++k) remaining[y.ticks()[k]] = y.multiplicity(k);
  const std::int64_t width = y.ticks().front();
  if (--remaining[width] == 0) remaining.erase(width);
  std::vector<std::int64_t> placed{0, width};

  OracleResult out;
  bool exhausted = false;
  std::vector<std::int64_t> removed;

  // Removes |c - p| for every placed p; on failure restores and returns false.
  auto take = [&](std::int64_t c) {
    removed.clear();
    for (const std::int64_t p : placed) {
      const std::int64_t d = std::abs(c - p);
      const auto it = remaining.find(d);
      if (it == remaining.end()) {
        for (const std::int64_t r : removed) ++remaining[r];
        return false;
      }
      if (--it->second == 0) remaining.erase(it);
      removed.push_back(d);
    }
    return true;
  };
  auto give_back = [&](std::int64_t c) {
    for (const std::int64_t p : placed) ++remaining[std::abs(c - p)];
  };

  std::function<bool()> search = [&]() -> bool {
    if (remaining.empty()) return true;
    if (++out.nodes > node_budget) {
      exhausted = true;
      return false;
    }
    const std::int64_t top = remaining.rbegin()->first;
    for (const std::int64_t c : {top, width - top}) {
      if (!take(c)) {
        if (top == width - top) break;
        continue;
      }
      placed.push_back(c);
      if (search()) return true;
      placed.pop_back();
      give_back(c);
      if (exhausted) return false;
      if (top == width - top) break;
    }
    return false;
  };

  if (search()) {
    std::sort(placed.begin(), placed.end());
    PointSet witness(placed, y.unit());
    if (!(delta(witness) == y)) throw std::logic_error("oracle witness does not reproduce the multiset");
    out.verdict = OracleVerdict::realizable;
    out.witness = std::move(witness);
  } else {
    out.verdict = exhausted ? OracleVerdict::undecided : OracleVerdict::not_realizable;
  }
  return out;
}

void ExperimentSpec::validate() const {
  if (n_values.empty()) throw InvalidInput("n range is empty");
  for (const auto n : n_values) {
    if (n < 2) throw InvalidInput("every n must be >= 2");
  }
  if (trials < 1) throw InvalidInput("trials must be >= 1");
  if (r_grid.empty() || R_grid.empty()) throw InvalidInput("noise grids must be nonempty");
  for (const double v : r_grid) {
    if (!(v >= 0)) throw InvalidInput("r grid values must be >= 0");
  }
  for (const double v : R_grid) {
    if (!(v >= 0)) throw InvalidInput("R grid values must be >= 0");
  }
  if (tau_rule == TauRule::fixed && !(tau >= 0)) throw InvalidInput("fixed tau must be >= 0");
  if (!(digest_r >= 0)) throw InvalidInput("digest r must be >= 0");
}

std::vector<PhaseCell> phase_experiment(const ExperimentSpec& spec) {
  spec.validate();
  struct Trial {
    DistanceMultiset y;
    TwoPartitionSet truth;
    double gap_star;
  };
  struct Outcome {
    bool recovered = false;
    bool identified = true;
    double fp = 0.0;
    double fn = 0.0;
    std::size_t redrawn = 0;
  };

  std::vector<PhaseCell> cells;
  const std::size_t workers = worker_count(spec.workers);
  for (const std::size_t n : spec.n_values) {
    std::vector<Trial> trials;
    for (std::size_t t = 0; t < spec.trials; ++t) {
      auto inst = generate(spec.generator, n, trial_seed(spec.seed, n, t), spec.quantum, spec.genome_length);
      auto truth = enumerate_two_partitions(inst.y);
      const double g = gaps(inst.y).gap_star;
      trials.push_back({std::move(inst.y), std::move(truth), g});
    }
    std::vector<std::pair<double, double>> grid;
    for (const double r : spec.r_grid) {
      for (const double R : spec.R_grid) grid.emplace_back(r, R);
    }
    std::vector<Outcome> outcomes(grid.size() * spec.trials);
    parallel_for(outcomes.size(), workers, [&](std::size_t k) {
      const std::size_t cell = k / spec.trials;
      const std::size_t t = k % spec.trials;
      const auto [r, R] = grid[cell];
      const Trial& trial = trials[t];
      const double tau = spec.tau_rule == TauRule::half_gap_star ? trial.gap_star / 2.0 : spec.tau;
      Outcome& out = outcomes[k];
      for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
        NoiseSpec noise{r, R, trial_seed(spec.seed, n, t, 1 + cell * kMaxRedraws + attempt), spec.mode,
                        spec.distribution};
        const auto obs = observe(trial.y, noise);
        const auto rounded = round_to_grid(obs.values, R);
        if (std::any_of(rounded.begin(), rounded.end(), [](double v) { return !(v > 0); })) {
          ++out.redrawn;
          continue;
        }
        TwoPartitionSet estimate;
        if (spec.mode == NoiseMode::per_value) {
          std::vector<double> reps(trial.y.distinct());
          for (std::size_t e = 0; e < rounded.size(); ++e) reps[obs.source[e]] = rounded[e];
          estimate = approximate_two_partitions(reps, trial.y.multiplicities(), tau);
        } else {
          const auto y_hat = aggregate(rounded, R);
          const bool same_shape = y_hat.distinct() == trial.y.distinct() &&
                                  std::equal(y_hat.multiplicities().begin(), y_hat.multiplicities().end(),
                                             trial.y.multiplicities().begin());
          if (!same_shape) {
            out.identified = false;
            return;
          }
          estimate = approximate_two_partitions(y_hat, tau);
        }
        const auto cmp = compare(estimate, trial.truth);
        out.recovered = cmp.spurious == 0 && cmp.missing == 0;
        out.fp = estimate.empty() ? 0.0 : static_cast<double>(cmp.spurious) / static_cast<double>(estimate.size());
        out.fn = trial.truth.empty() ? 0.0
                                     : static_cast<double>(cmp.missing) / static_cast<double>(trial.truth.size());
        return;
      }
      // Every redraw rounded some distance to zero or below: nothing to compare.
      out.identified = false;
    });

    for (std::size_t cell = 0; cell < grid.size(); ++cell) {
      PhaseCell c;
      c.n = n;
      c.r = grid[cell].first;
      c.R = grid[cell].second;
      c.trials = spec.trials;
      c.threshold = 6.0 * (c.r + c.R);
      c.min_gap_star = kInfiniteGap;
      c.max_gap_star = 0.0;
      std::size_t recovered = 0, identified = 0;
      double fp = 0.0, fn = 0.0;
      for (std::size_t t = 0; t < spec.trials; ++t) {
        const Outcome& o = outcomes[cell * spec.trials + t];
        c.min_gap_star = std::min(c.min_gap_star, trials[t].gap_star);
        c.max_gap_star = std::max(c.max_gap_star, trials[t].gap_star);
        c.redrawn += o.redrawn;
        recovered += o.recovered;
        if (!o.identified) {
          ++c.unidentified;
          continue;
        }
        ++identified;
        fp += o.fp;
        fn += o.fn;
      }
      c.recovery_rate = static_cast<double>(recovered) / static_cast<double>(spec.trials);
      c.false_positive_rate = identified ? fp / static_cast<double>(identified) : 0.0;
      c.false_negative_rate = identified ? fn / static_cast<double>(identified) : 0.0;
      c.inside_theorem = c.threshold < c.min_gap_star;
      cells.push_back(c);
    }
  }
  return cells;
}

std::string phase_csv(const std::vector<PhaseCell>& cells, const ExperimentSpec& spec) {
  std::ostringstream out;
  out << "generator,n,mode,distribution,r,R,trials,recovery_rate,false_positive_rate,"
         "false_negative_rate,threshold,min_gap_star,max_gap_star,inside_theorem,redrawn,"
         "unidentified\n";
  for (const auto& c : cells) {
    out << generator_name(spec.generator) << ',' << c.n << ',' << noise_mode_name(spec.mode) << ','
        << noise_distribution_name(spec.distribution) << ',' << csv_number(c.r) << ','
        << csv_number(c.R) << ',' << c.trials << ',' << csv_number(c.recovery_rate) << ','
        << csv_number(c.false_positive_rate) << ',' << csv_number(c.false_negative_rate) << ','
        << csv_number(c.threshold) << ',' << csv_number(c.min_gap_star) << ','
        << csv_number(c.max_gap_star) << ',' << (c.inside_theorem ? 1 : 0) << ',' << c.redrawn
        << ',' << c.unidentified << '\n';
  }
  return out.str();
}

std::vector<IntegralityRow> integrality_experiment(const ExperimentSpec& spec) {
  spec.validate();
  struct Job {
    std::size_t n;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const std::size_t n : spec.n_values) {
    for (std::size_t t = 0; t < spec.trials; ++t) jobs.push_back({n, trial_seed(spec.seed, n, t)});
  }
  std::vector<IntegralityRow> rows(jobs.size());
  parallel_for(jobs.size(), worker_count(spec.workers), [&](std::size_t k) {
    const auto start = Clock::now();
    const auto inst = generate(spec.generator, jobs[k].n, jobs[k].seed, spec.quantum, spec.genome_length);
    const auto pset = enumerate_two_partitions(inst.y);
    const auto model = relax(build_triangle_ilp(inst.y, pset, spec.model));
    SolverConfig cfg;
    cfg.node_limit = spec.node_limit;
    cfg.time_limit = spec.time_limit;
    const auto sol = solve_lp(model, cfg);
    IntegralityRow& row = rows[k];
    row.generator = generator_name(spec.generator);
    row.n = jobs[k].n;
    row.seed = jobs[k].seed;
    if (sol.status == SolveStatus::feasible) {
      row.status = "feasible";
      row.int_score = integrality_score(extract_assignment(sol, model));
    } else {
      row.status = sol.status == SolveStatus::infeasible ? "infeasible" : "undecided";
    }
    row.time_ms = elapsed_ms(start, spec.timing);
  });
  return rows;
}

std::string integrality_csv(const std::vector<IntegralityRow>& rows) {
  std::ostringstream out;
  out << "generator,n,seed,status,int_score,time_ms\n";
  for (const auto& r : rows) {
    out << r.generator << ',' << r.n << ',' << r.seed << ',' << r.status << ','
        << csv_optional(r.int_score) << ',' << csv_number(r.time_ms) << '\n';
  }
  return out.str();
}

std::vector<DigestRow> digest_experiment(const ExperimentSpec& spec) {
  spec.validate();
  struct Job {
    bool circular;
    std::size_t n;
    std::size_t trial;
    double r;
    double R;
  };
  std::vector<Job> jobs;
  std::vector<double> radii{0.0};
  if (spec.digest_r != 0.0) radii.push_back(spec.digest_r);
  for (const bool circular : {false, true}) {
    for (const std::size_t n : spec.n_values) {
      for (std::size_t t = 0; t < spec.trials; ++t) {
        for (const double r : radii) {
          for (const double R : spec.R_grid) jobs.push_back({circular, n, t, r, R});
        }
      }
    }
  }

  std::vector<DigestRow> rows(jobs.size());
  parallel_for(jobs.size(), worker_count(spec.workers), [&](std::size_t k) {
    const Job& job = jobs[k];
    const auto start = Clock::now();
    const Generator g = job.circular ? Generator::digest_circular : Generator::digest_linear;
    const std::uint64_t seed = trial_seed(spec.seed, job.n, job.trial, job.circular ? 2 : 1);
    DigestRow& row = rows[k];
    row.generator = generator_name(g);
    row.n = job.n;
    row.sites = job.circular ? job.n : job.n - 2;
    row.seed = seed;
    row.r = job.r;
    row.R = job.R;

    const auto inst = generate(g, job.n, seed, spec.quantum, spec.genome_length);
    const NoiseSpec noise{job.r, job.R, trial_seed(seed, 7), spec.mode, spec.distribution};
    const auto obs = observe(inst.y, noise);
    const auto rounded = round_to_grid(obs.values, job.R);
    std::optional<DistanceMultiset> y_hat;
    try {
      y_hat = aggregate(rounded, job.R);
    } catch (const DegenerateInstance&) {
      row.certificate = "degenerate";
      row.time_ms = elapsed_ms(start, spec.timing);
      return;
    }

    PipelineOptions opts;
    opts.solver.node_limit = spec.node_limit;
    opts.solver.time_limit = spec.time_limit;
    opts.model = spec.model;
    const bool noiseless = *y_hat == inst.y;
    if (!noiseless) {
      opts.tau = spec.tau_rule == TauRule::half_gap_star ? gaps(inst.y).gap_star / 2.0 : spec.tau;
      opts.solver.exact = false;
    }
    const auto result = run_pipeline(noiseless ? inst.y : *y_hat, opts);
    row.certificate = certificate_name(result.certificate);
    if (result.status == SolveStatus::feasible) {
      // Observed (rounded) value of every interval: copies of one true value go to its
      // intervals in lexicographic order.
      const auto truth_labels = interval_labels(inst);
      std::vector<std::size_t> first(inst.y.distinct(), 0);
      for (std::size_t r = 1; r < inst.y.distinct(); ++r) {
        first[r] = first[r - 1] + static_cast<std::size_t>(inst.y.multiplicity(r - 1));
      }
      std::vector<double> observed(truth_labels.size());
      for (std::size_t iv = 0; iv < truth_labels.size(); ++iv) observed[iv] = rounded[first[truth_labels[iv]]++];

      const auto hard = hard_assignment(result.assignment);
      const double tol = 1e-9 * (1.0 + y_hat->max_value());
      auto recovered = [&](const AssignmentMatrix& p) {
        const auto labels = p.hard_labels();
        std::size_t hits = 0;
        for (std::size_t iv = 0; iv < labels.size(); ++iv) {
          hits += std::abs(y_hat->value(labels[iv]) - observed[iv]) <= tol;
        }
        return static_cast<double>(hits) / static_cast<double>(labels.size());
      };
      row.fragment_recovery = std::max(recovered(hard), recovered(reflect_assignment(hard)));

      // Labeling error needs rounded values that identify true indices one-to-one.
      std::map<double, std::size_t> index_of_value;
      bool identifiable = y_hat->distinct() == inst.y.distinct();
      for (std::size_t iv = 0; identifiable && iv < observed.size(); ++iv) {
        const auto [it, fresh] = index_of_value.emplace(observed[iv], truth_labels[iv]);
        if (!fresh && it->second != truth_labels[iv]) identifiable = false;
      }
      if (identifiable) {
        std::vector<std::size_t> est(hard.intervals());
        const auto labels = hard.hard_labels();
        for (std::size_t iv = 0; iv < labels.size(); ++iv) {
          const auto it = index_of_value.find(y_hat->value(labels[iv]));
          if (it == index_of_value.end()) {
            identifiable = false;
            break;
          }
          est[iv] = it->second;
        }
        if (identifiable) {
          const auto p_hat = AssignmentMatrix::from_labels(job.n, inst.y.distinct(), est);
          const auto p_star = AssignmentMatrix::from_labels(job.n, inst.y.distinct(), truth_labels);
          row.labeling_error = labeling_error(p_hat, p_star);
        }
      }
    }
    row.time_ms = elapsed_ms(start, spec.timing);
  });
  return rows;
}

std::string digest_csv(const std::vector<DigestRow>& rows) {
  std::ostringstream out;
  out << "generator,method,n,sites,seed,r,R,certificate,labeling_error,fragment_recovery,time_ms\n";
  for (const auto& r : rows) {
    out << r.generator << ",tri-ilp," << r.n << ',' << r.sites << ',' << r.seed << ','
        << csv_number(r.r) << ',' << csv_number(r.R) << ',' << r.certificate << ','
        << csv_optional(r.labeling_error) << ',' << csv_optional(r.fragment_recovery) << ','
        << csv_number(r.time_ms) << '\n';
  }
  return out.str();
}

}  // namespace turnpike
