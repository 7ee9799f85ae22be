#include "mepsim_cli/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "mepsim/engine.hpp"
#include "mepsim/error.hpp"
#include "mepsim/trace_io.hpp"

namespace mepsim::cli {

using nlohmann::json;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIo: return kExitIo;
    default: return kExitInvalid;
  }
}

int Analysis::exit_code() const {
  for (const CheckResult& c : checks) {
    if (c.asserted && !c.pass) return kExitCheckFailed;
  }
  return stabilization.stabilized ? kExitOk : kExitNotStabilized;
}

AnalysisOptions analysis_options(const ExperimentConfig& cfg) {
  return {cfg.association_checks, cfg.pattern_ks};
}

Trace run_simulation(const ExperimentConfig& cfg, const Experiment& exp, std::uint64_t seed) {
  Trace trace = simulate(exp.graph, exp.params, make_models(cfg, exp, seed),
                         make_init(cfg, exp, seed), exp.horizon, seed);
  trace.stats = exp.stats;
  return trace;
}

namespace {

std::string pair_text(const std::pair<Seq, Seq>& p) {
  return "triggers " + std::to_string(p.first) + " and " + std::to_string(p.second);
}

}  // namespace

Analysis analyze(const Trace& trace, const AnalysisOptions& options) {
  Analysis a;
  a.stabilization = detect_stabilization(trace);
  const StabilizationReport& st = a.stabilization;
  a.series = series_metrics(st, trace.graph.node_count());

  const SimParams& p = trace.params;
  const bool fault_free = p.omission_p == 0.0;

  if (st.stabilized) {
    a.checks.push_back({"stabilization_deadline", fault_free, st.t_stab <= st.lemma5_deadline,
                        "t_stab " + std::to_string(st.t_stab) + " ns, deadline " +
                            std::to_string(st.lemma5_deadline) + " ns"});
    const TimeNs precision_bound = static_cast<TimeNs>(trace.stats.diameter) * p.d_max;
    a.checks.push_back({"precision", fault_free, st.measured_tau_pi <= precision_bound,
                        "measured " + std::to_string(st.measured_tau_pi) + " ns, bound " +
                            std::to_string(precision_bound) + " ns"});
    a.checks.push_back({"liveness", true, st.measured_tau_nabla <= st.tau_nabla_bound,
                        "measured " + std::to_string(st.measured_tau_nabla) + " ns, bound " +
                            std::to_string(st.tau_nabla_bound) + " ns"});
    CheckResult bp{"pattern_properties", true, true, "all stable rounds"};
    for (std::size_t k = st.first_stable_round; k < st.rounds.size(); ++k) {
      const RoundSummary& r = st.rounds[k];
      if (!r.bp_pass) {
        bp.pass = false;
        bp.detail = "round " + std::to_string(k) + " BP" + std::to_string(r.bp_failure->id) +
                    ": " + r.bp_failure->detail;
        break;
      }
    }
    a.checks.push_back(bp);
    const bool monotone_expected = p.rho.ppb() == 0 && p.d_min == 0 && fault_free;
    a.checks.push_back(
        {"e1_monotone", monotone_expected, a.series.e1_monotone,
         a.series.e1_first_increase_k
             ? "e1 increases at k=" + std::to_string(*a.series.e1_first_increase_k)
             : "nonincreasing over the stable suffix"});
  }

  if (options.association_checks && st.lemma5_bound <= trace.horizon) {
    a.association = association_classes(trace, st.lemma5_bound, trace.horizon);
    const AssociationCheck& ac = *a.association;
    a.checks.push_back(
        {"association_partitions", fault_free, ac.partitions_coincide,
         ac.coincide_witness ? "split class: " + pair_text(*ac.coincide_witness)
                             : std::to_string(ac.classes.weak_count) + " classes"});
    a.checks.push_back({"association_span", fault_free, ac.span_within_bound,
                        ac.span_witness ? "span exceeded by " + pair_text(*ac.span_witness)
                                        : "max span " + std::to_string(ac.max_span) +
                                              " ns, bound " + std::to_string(ac.span_bound) +
                                              " ns"});
  }
  return a;
}

namespace {

json counts_json(const PatternCounts& c) {
  return {{"source", c.source}, {"sink", c.sink}, {"flow", c.flow},  {"united", c.united},
          {"bank", c.bank},     {"ridge", c.ridge}, {"flat", c.flat}};
}

}  // namespace

json metrics_json(const Trace& trace, const Analysis& a) {
  const SimParams& p = trace.params;
  const StabilizationReport& st = a.stabilization;
  json m;
  m["schema"] = 1;
  m["seed"] = trace.seed;
  m["horizon_ns"] = trace.horizon;
  m["topology"] = {{"spec", trace.graph.spec()},
                   {"n", trace.graph.node_count()},
                   {"edges", trace.graph.edge_count()},
                   {"diameter", trace.stats.diameter},
                   {"longest_simple_path", trace.stats.longest_simple_path},
                   {"lg_is_exact", trace.stats.lg_is_exact}};
  m["params"] = {{"d_min_ns", p.d_min},
                 {"d_max_ns", p.d_max},
                 {"rho_ppb", p.rho.ppb()},
                 {"tau0_ns", p.tau0},
                 {"tau1_ns", p.tau1},
                 {"tau2_ns", p.tau2},
                 {"omission_p", p.omission_p},
                 {"dmin_compensation", p.dmin_compensation},
                 {"param_mode", to_string(p.mode)},
                 {"lg", p.lg}};
  m["segmentation"] = {{"tau_pi_ns", st.plan.tau_pi},
                       {"tau_delta_ns", st.plan.tau_delta},
                       {"fallback", st.plan.fallback}};

  json s;
  s["stabilized"] = st.stabilized;
  s["t_stab_ns"] = st.stabilized ? json(st.t_stab) : json(nullptr);
  s["stable_since_ns"] = st.stabilized ? json(st.stable_since) : json(nullptr);
  s["lemma5_bound_ns"] = st.lemma5_bound;
  s["lemma5_deadline_ns"] = st.lemma5_deadline;
  s["measured_tau_pi_ns"] = st.measured_tau_pi;
  s["tau_pi_bound_ns"] = static_cast<TimeNs>(trace.stats.diameter) * p.d_max;
  s["measured_tau_nabla_ns"] = st.measured_tau_nabla;
  s["tau_nabla_bound_ns"] = st.tau_nabla_bound;
  s["rounds"] = st.rounds.size();
  s["first_stable_round"] = st.first_stable_round;
  s["stable_rounds"] = st.rounds.size() - st.first_stable_round;
  s["pending_triggers"] = st.pending_triggers;
  if (st.last_violation_round) {
    s["last_violation"] = {{"round", *st.last_violation_round},
                           {"t_min_ns", st.rounds[*st.last_violation_round].t_min},
                           {"reason", st.last_violation_reason}};
  } else {
    s["last_violation"] = nullptr;
  }
  m["stabilization"] = s;

  json series;
  json ks = json::array(), t_min = json::array(), e1 = json::array(), frac = json::array(),
       valid = json::array(), ideal = json::array(), sources = json::array(),
       sinks = json::array(), ridges = json::array();
  for (const SeriesPoint& pt : a.series.points) {
    ks.push_back(pt.k);
    t_min.push_back(pt.t_min);
    e1.push_back(pt.e1);
    frac.push_back(pt.source_fraction);
    valid.push_back(pt.valid);
    ideal.push_back(pt.ideal);
    sources.push_back(pt.counts.source);
    sinks.push_back(pt.counts.sink);
    ridges.push_back(pt.counts.ridge);
  }
  series["k"] = ks;
  series["t_min_ns"] = t_min;
  series["e1_ns"] = e1;
  series["source_fraction"] = frac;
  series["valid"] = valid;
  series["ideal"] = ideal;
  series["sources"] = sources;
  series["sinks"] = sinks;
  series["ridges"] = ridges;
  m["series"] = series;

  json summary;
  const std::size_t first = st.first_stable_round;
  if (st.stabilized) {
    const RoundSummary& last = st.rounds.back();
    summary["final_e1_ns"] = last.e1;
    summary["final_source_fraction"] = a.series.points.back().source_fraction;
    summary["final_counts"] = counts_json(last.counts);
    TimeNs span_sum = 0;
    std::size_t ideal_rounds = 0;
    for (std::size_t k = first; k < st.rounds.size(); ++k) {
      span_sum += st.rounds[k].span;
      if (st.rounds[k].ideal) ++ideal_rounds;
    }
    const auto count = static_cast<double>(st.rounds.size() - first);
    summary["mean_tau_pi_ns"] = static_cast<double>(span_sum) / count;
    summary["ideal_rounds"] = ideal_rounds;
  } else {
    summary["final_e1_ns"] = nullptr;
    summary["final_source_fraction"] = nullptr;
    summary["final_counts"] = nullptr;
    summary["mean_tau_pi_ns"] = nullptr;
    summary["ideal_rounds"] = 0;
  }
  m["summary"] = summary;

  json checks = json::array();
  for (const CheckResult& c : a.checks) {
    checks.push_back(
        {{"name", c.name}, {"asserted", c.asserted}, {"pass", c.pass}, {"detail", c.detail}});
  }
  m["checks"] = checks;
  if (a.association) {
    m["association"] = {{"window_start_ns", st.lemma5_bound},
                        {"window_end_ns", trace.horizon},
                        {"events", a.association->classes.events.size()},
                        {"classes", a.association->classes.weak_count},
                        {"strong_classes", a.association->classes.strong_count},
                        {"max_span_ns", a.association->max_span},
                        {"span_bound_ns", a.association->span_bound}};
  } else {
    m["association"] = nullptr;
  }
  m["warnings"] = trace.warnings;
  m["exit_code"] = a.exit_code();
  return m;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorKind::kIo, "write failed for '" + path.string() + "'");
}

namespace {

std::pair<std::size_t, std::size_t> cell_position(const Graph& g, CellId i) {
  const auto [rows, cols] = g.grid_shape();
  if (rows > 0 && cols > 0) return {i / cols, i % cols};
  return {0, i};
}

std::pair<std::size_t, std::size_t> map_shape(const Graph& g) {
  const auto [rows, cols] = g.grid_shape();
  if (rows > 0 && cols > 0) return {rows, cols};
  return {1, g.node_count()};
}

/// Round indices to render: configured k values, else the first and last
/// stable rounds (all rounds when not stabilized).
std::vector<std::pair<std::int64_t, std::size_t>> pattern_rounds(const Analysis& a,
                                                                 const AnalysisOptions& o) {
  std::vector<std::pair<std::int64_t, std::size_t>> out;
  const auto& pts = a.series.points;
  if (pts.empty()) return out;
  std::vector<std::int64_t> ks = o.pattern_ks;
  if (ks.empty()) {
    const std::size_t first = a.stabilization.stabilized ? a.stabilization.first_stable_round : 0;
    ks = {pts[first].k, pts.back().k};
  }
  for (std::int64_t k : ks) {
    for (std::size_t idx = 0; idx < pts.size(); ++idx) {
      if (pts[idx].k == k) {
        if (out.empty() || out.back().second != idx) out.emplace_back(k, idx);
        break;
      }
    }
  }
  return out;
}

}  // namespace

std::string pattern_map_text(const Graph& g, const RoundSummary& round) {
  const auto [rows, cols] = map_shape(g);
  std::string out;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t i = r * cols + c;
      out += i < round.is_source.size() && round.is_source[i] ? '#' : '.';
    }
    out += '\n';
  }
  return out;
}

std::string pattern_map_svg(const Graph& g, const RoundSummary& round) {
  const auto [rows, cols] = map_shape(g);
  constexpr int kCell = 12;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << cols * kCell << "\" height=\""
      << rows * kCell << "\">\n";
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t i = r * cols + c;
      const bool src = i < round.is_source.size() && round.is_source[i];
      out << "<rect x=\"" << c * kCell << "\" y=\"" << r * kCell << "\" width=\"" << kCell
          << "\" height=\"" << kCell << "\" fill=\"" << (src ? "#202020" : "#f0f0f0")
          << "\" stroke=\"#909090\"/>\n";
    }
  }
  out << "</svg>\n";
  return out.str();
}

std::string offsets_svg(const StabilizationReport& report) {
  constexpr double kWidth = 800;
  constexpr double kHeight = 400;
  constexpr std::size_t kMaxRounds = 200;
  const auto& rounds = report.rounds;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!rounds.empty()) {
    const double x_max = std::max<double>(1.0, static_cast<double>(rounds.back().t_min));
    TimeNs y_max_ns = 1;
    for (const auto& r : rounds) {
      for (TimeNs t : r.t_tilde) y_max_ns = std::max(y_max_ns, t);
    }
    const double y_max = static_cast<double>(y_max_ns);
    const std::size_t stride = std::max<std::size_t>(1, rounds.size() / kMaxRounds);
    for (std::size_t k = 0; k < rounds.size(); k += stride) {
      const auto& r = rounds[k];
      const double x = static_cast<double>(r.t_min) / x_max * (kWidth - 20) + 10;
      for (std::size_t i = 0; i < r.t_tilde.size(); ++i) {
        if (r.t_tilde[i] < 0) continue;
        const double y =
            kHeight - 10 - static_cast<double>(r.t_tilde[i]) / y_max * (kHeight - 20);
        out << "<circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"1.5\" fill=\""
            << (r.is_source[i] ? "#c03030" : "#3050c0") << "\"/>\n";
      }
    }
  }
  out << "</svg>\n";
  return out.str();
}

void write_analysis_artifacts(const std::filesystem::path& dir, const Trace& trace,
                              const Analysis& a, const AnalysisOptions& options) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir / "plotdata", ec);
  fs::create_directories(dir / "patterns", ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create '" + dir.string() + "': " + ec.message());

  write_text(dir / "metrics.json", dump_json(metrics_json(trace, a)));

  const StabilizationReport& st = a.stabilization;
  const auto& pts = a.series.points;
  std::string offsets = "k,t_min_ns,cell,t_tilde_ns,is_source\n";
  std::string series = "k,t_min_ns,e1_ns,source_fraction,valid,ideal\n";
  for (std::size_t idx = 0; idx < st.rounds.size(); ++idx) {
    const RoundSummary& r = st.rounds[idx];
    const std::string k = std::to_string(pts[idx].k);
    for (std::size_t i = 0; i < r.t_tilde.size(); ++i) {
      if (r.t_tilde[i] < 0) continue;
      offsets += k + ',' + std::to_string(r.t_min) + ',' + std::to_string(i) + ',' +
                 std::to_string(r.t_tilde[i]) + ',' + (r.is_source[i] ? "1" : "0") + '\n';
    }
    series += k + ',' + std::to_string(r.t_min) + ',' + std::to_string(r.e1) + ',' +
              format_double(pts[idx].source_fraction) + ',' + (r.valid ? "1" : "0") + ',' +
              (r.ideal ? "1" : "0") + '\n';
  }
  write_text(dir / "plotdata" / "offsets.csv", offsets);
  write_text(dir / "plotdata" / "series.csv", series);
  write_text(dir / "plotdata" / "offsets.svg", offsets_svg(st));

  std::string maps = "k,row,col,is_source\n";
  for (const auto& [k, idx] : pattern_rounds(a, options)) {
    const RoundSummary& r = st.rounds[idx];
    for (CellId i = 0; i < trace.graph.node_count(); ++i) {
      const auto [row, col] = cell_position(trace.graph, i);
      maps += std::to_string(k) + ',' + std::to_string(row) + ',' + std::to_string(col) + ',' +
              (r.is_source[i] ? "1" : "0") + '\n';
    }
    const std::string stem = "k" + std::to_string(k);
    write_text(dir / "patterns" / (stem + ".txt"), pattern_map_text(trace.graph, r));
    write_text(dir / "patterns" / (stem + ".svg"), pattern_map_svg(trace.graph, r));
  }
  write_text(dir / "plotdata" / "patterns.csv", maps);
}

void write_manifest(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                    std::uint64_t seed, const std::string& command) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create '" + dir.string() + "': " + ec.message());
  const json config = config_to_json(cfg);
  write_text(dir / "config.json", dump_json(config));
  json manifest = {{"tool", "mepsim"},
                   {"version", MEPSIM_VERSION},
                   {"command", command},
                   {"seed", seed},
                   {"trace_schema", Trace::kSchemaVersion},
                   {"metrics_schema", 1},
                   {"config", config}};
  write_text(dir / "manifest.json", dump_json(manifest));
}

}  // namespace mepsim::cli
