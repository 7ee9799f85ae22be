#include "mepsim_cli/commands.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <memory>
#include <mutex>
#include <ostream>
#include <thread>

#include <spdlog/spdlog.h>

#include "mepsim/error.hpp"
#include "mepsim/trace_io.hpp"
#include "mepsim_cli/pipeline.hpp"

namespace mepsim::cli {

namespace fs = std::filesystem;

ExperimentConfig build_config(const CommonOptions& options) {
  ExperimentConfig cfg = options.config ? load_config(*options.config) : ExperimentConfig{};
  for (const std::string& o : options.overrides) apply_override(cfg, o);
  return cfg;
}

namespace {

int run_one(const ExperimentConfig& cfg, const Experiment& exp, std::uint64_t seed,
            const fs::path& dir) {
  spdlog::info("run {} seed={} horizon={} ns", exp.graph.spec(), seed, exp.horizon);
  const Trace trace = run_simulation(cfg, exp, seed);
  write_manifest(dir, cfg, seed, "run");
  save_trace(dir / "trace.csv", trace);
  const AnalysisOptions options = analysis_options(cfg);
  const Analysis analysis = analyze(trace, options);
  write_analysis_artifacts(dir, trace, analysis, options);
  const int code = analysis.exit_code();
  spdlog::info("seed={} stabilized={} rounds={} exit={}", seed,
               analysis.stabilization.stabilized, analysis.stabilization.rounds.size(), code);
  return code;
}

}  // namespace

int cmd_run(const RunOptions& options) {
  ExperimentConfig cfg = build_config(options);
  if (options.seed) cfg.seed = *options.seed;
  if (options.horizon_ns) cfg.horizon_ns = *options.horizon_ns;
  const Experiment exp = resolve(cfg);
  if (exp.horizon < lemma5_bound(exp.params)) {
    throw Error(ErrorKind::kInsufficientHorizon,
                "horizon " + std::to_string(exp.horizon) + " ns is below the compliance instant " +
                    std::to_string(lemma5_bound(exp.params)) + " ns");
  }
  if (cfg.replicas == 1) return run_one(cfg, exp, cfg.seed, options.out);
  int worst = kExitOk;
  for (std::size_t r = 0; r < cfg.replicas; ++r) {
    const std::uint64_t seed = cfg.seed + r;
    ExperimentConfig replica = cfg;
    replica.seed = seed;
    replica.replicas = 1;
    worst = std::max(worst, run_one(replica, exp, seed, options.out / ("seed-" + std::to_string(seed))));
  }
  return worst;
}

int cmd_analyze(const AnalyzeOptions& options) {
  const ExperimentConfig cfg = build_config(options);
  const Trace trace = load_trace(options.trace);
  const AnalysisOptions analysis_opts = analysis_options(cfg);
  const Analysis analysis = analyze(trace, analysis_opts);
  write_analysis_artifacts(options.out, trace, analysis, analysis_opts);
  return analysis.exit_code();
}

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(const std::string& text) {
  const auto dots = text.find("..");
  auto bad = [&] { return Error(ErrorKind::kConfiguration, "seed range must be A..B, got '" + text + "'"); };
  if (dots == std::string::npos) throw bad();
  try {
    std::size_t used = 0;
    const std::string a = text.substr(0, dots);
    const std::string b = text.substr(dots + 2);
    const auto lo = std::stoull(a, &used);
    if (used != a.size()) throw bad();
    const auto hi = std::stoull(b, &used);
    if (used != b.size() || hi < lo) throw bad();
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw bad();
  }
}

std::string resize_topology(const std::string& base, std::int64_t n) {
  auto fail = [&](const std::string& why) {
    return Error(ErrorKind::kConfiguration, "cannot resize '" + base + "' to n=" +
                                                std::to_string(n) + ": " + why);
  };
  if (n <= 0) throw fail("n must be positive");
  const std::string family = base.substr(0, base.find(':'));
  if (family == "ring") return "ring:" + std::to_string(n);
  if (family == "grid") {
    auto side = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(n))));
    if (side * side != n) throw fail("not a square");
    return "grid:" + std::to_string(side) + "x" + std::to_string(side);
  }
  if (family == "hypercube") {
    int dim = 0;
    while ((std::int64_t{1} << dim) < n) ++dim;
    if ((std::int64_t{1} << dim) != n) throw fail("not a power of two");
    return "hypercube:" + std::to_string(dim);
  }
  throw fail("unsupported family");
}

namespace {

struct SweepTask {
  std::size_t point = 0;
  std::string value;
  std::size_t replica = 0;
  std::uint64_t seed = 0;
  ExperimentConfig cfg;
  std::shared_ptr<const Experiment> exp;
};

struct SweepRow {
  bool stabilized = false;
  std::optional<TimeNs> t_stab;
  std::optional<TimeNs> final_e1;
  std::optional<double> final_fraction;
  std::optional<double> mean_tau_pi;
  int exit_code = 0;
};

ExperimentConfig apply_axis(ExperimentConfig cfg, const std::string& axis,
                            const nlohmann::json& value) {
  try {
    if (axis == "n") {
      cfg.topology = resize_topology(cfg.topology, value.get<std::int64_t>());
    } else if (axis == "p") {
      cfg.omission_p = value.get<double>();
    } else if (axis == "rho") {
      cfg.rho = value.get<double>();
    } else if (axis == "topology") {
      cfg.topology = value.get<std::string>();
    } else {
      throw Error(ErrorKind::kConfiguration, "unknown sweep axis '" + axis + "'");
    }
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::kConfiguration, "sweep value " + value.dump() + " does not fit axis '" + axis + "'");
  }
  return cfg;
}

std::string value_text(const nlohmann::json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

std::string opt_text(const std::optional<TimeNs>& v) { return v ? std::to_string(*v) : ""; }
std::string opt_text(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

}  // namespace

int cmd_sweep(const SweepOptions& options) {
  ExperimentConfig base = build_config(options);
  if (options.horizon_ns) base.horizon_ns = *options.horizon_ns;
  if (!base.sweep) throw Error(ErrorKind::kConfiguration, "config has no sweep section");
  const SweepSpec spec = *base.sweep;
  if (!spec.values.is_array() || spec.values.empty()) {
    throw Error(ErrorKind::kConfiguration, "sweep values must be a nonempty list");
  }
  if (spec.replicas == 0) throw Error(ErrorKind::kConfiguration, "sweep replicas must be >= 1");

  std::vector<std::uint64_t> seeds;
  if (options.seeds) {
    for (std::uint64_t s = options.seeds->first; s <= options.seeds->second; ++s) seeds.push_back(s);
  } else {
    for (std::size_t r = 0; r < spec.replicas; ++r) seeds.push_back(base.seed + r);
  }

  // Resolve every point up front so a bad point fails before any run.
  std::vector<SweepTask> tasks;
  for (std::size_t point = 0; point < spec.values.size(); ++point) {
    const auto& value = spec.values[point];
    ExperimentConfig cfg = apply_axis(base, spec.axis, value);
    cfg.sweep.reset();
    cfg.replicas = 1;
    std::shared_ptr<const Experiment> exp;
    try {
      exp = std::make_shared<const Experiment>(resolve(cfg));
    } catch (const Error& e) {
      throw Error(e.kind(), "sweep point " + std::to_string(point) + " (" + spec.axis + "=" +
                                value_text(value) + "): " + e.what());
    }
    for (std::size_t r = 0; r < seeds.size(); ++r) {
      ExperimentConfig c = cfg;
      c.seed = seeds[r];
      tasks.push_back({point, value_text(value), r, seeds[r], std::move(c), exp});
    }
  }

  std::vector<SweepRow> rows(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      const SweepTask& task = tasks[t];
      try {
        const Trace trace = run_simulation(task.cfg, *task.exp, task.seed);
        const AnalysisOptions ao{task.cfg.association_checks, {}};
        const Analysis a = analyze(trace, ao);
        const fs::path dir = options.out / "runs" /
                             ("p" + std::to_string(task.point) + "-s" + std::to_string(task.seed));
        fs::create_directories(dir);
        write_manifest(dir, task.cfg, task.seed, "sweep");
        write_text(dir / "metrics.json", dump_json(metrics_json(trace, a)));
        SweepRow& row = rows[t];
        const auto& st = a.stabilization;
        row.stabilized = st.stabilized;
        row.exit_code = a.exit_code();
        if (st.stabilized) {
          row.t_stab = st.t_stab;
          row.final_e1 = st.rounds.back().e1;
          row.final_fraction = a.series.points.back().source_fraction;
          TimeNs sum = 0;
          for (std::size_t k = st.first_stable_round; k < st.rounds.size(); ++k) sum += st.rounds[k].span;
          row.mean_tau_pi = static_cast<double>(sum) /
                            static_cast<double>(st.rounds.size() - st.first_stable_round);
        }
        spdlog::info("sweep point {} seed {} stabilized={}", task.point, task.seed, st.stabilized);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };
  std::size_t jobs = options.jobs ? options.jobs : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, tasks.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < jobs; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (std::size_t t = 0; t < tasks.size(); ++t) {
    if (!errors[t]) continue;
    try {
      std::rethrow_exception(errors[t]);
    } catch (const Error& e) {
      throw Error(e.kind(), "sweep point " + std::to_string(tasks[t].point) + " (" + spec.axis +
                                "=" + tasks[t].value + ") seed " + std::to_string(tasks[t].seed) +
                                ": " + e.what());
    }
  }

  std::string csv =
      "point,value,replica,seed,stabilized,t_stab_ns,final_e1_ns,final_source_fraction,"
      "mean_tau_pi_ns,exit_code\n";
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const SweepTask& task = tasks[t];
    const SweepRow& row = rows[t];
    csv += std::to_string(task.point) + ',' + task.value + ',' + std::to_string(task.replica) +
           ',' + std::to_string(task.seed) + ',' + (row.stabilized ? "1" : "0") + ',' +
           opt_text(row.t_stab) + ',' + opt_text(row.final_e1) + ',' +
           opt_text(row.final_fraction) + ',' + opt_text(row.mean_tau_pi) + ',' +
           std::to_string(row.exit_code) + '\n';
  }
  fs::create_directories(options.out);
  write_text(options.out / "sweep.csv", csv);
  write_manifest(options.out, base, base.seed, "sweep");
  return kExitOk;
}

int cmd_topology(const TopologyOptions& options, std::ostream& out) {
  const Graph g = parse_topology_spec(options.spec);
  const TopologyStats stats = topology_stats(g, options.lg_override, options.lg_exact_cap);
  const SimParams p = derive_params(stats, options.d_ns, Drift::from_ratio(options.rho),
                                    parse_param_mode(options.param_mode));
  out << "topology=" << g.spec() << '\n'
      << "n=" << g.node_count() << '\n'
      << "edges=" << g.edge_count() << '\n'
      << "diameter=" << stats.diameter << '\n'
      << "longest_simple_path=" << stats.longest_simple_path << '\n'
      << "lg_is_exact=" << (stats.lg_is_exact ? "true" : "false") << '\n'
      << "d_ns=" << options.d_ns << '\n'
      << "rho_ppb=" << p.rho.ppb() << '\n'
      << "param_mode=" << to_string(p.mode) << '\n'
      << "tau0_ns=" << p.tau0 << '\n'
      << "tau1_ns=" << p.tau1 << '\n'
      << "tau2_ns=" << p.tau2 << '\n'
      << "strict_constraint=" << (satisfies_strict_constraint(p, p.lg) ? "true" : "false") << '\n'
      << "liveness_bound_ns=" << liveness_bound(p) << '\n'
      << "lemma5_bound_ns=" << lemma5_bound(p) << '\n';
  return kExitOk;
}

int guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: io: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << '\n';
    return kExitUnexpected;
  }
}

}  // namespace mepsim::cli
