// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "fixtures.hpp"
#include "mepsim/oracle.hpp"
#include "mepsim/trace_io.hpp"
#include "mepsim_cli/commands.hpp"
#include "mepsim_cli/pipeline.hpp"

namespace {

using namespace mepsim;
using testing::kMs;
using testing::RunSetup;
using testing::seeded_run;

// Pinned thresholds and sample sizes.
constexpr double kC1LimitSeconds = 60.0;
constexpr double kC2LimitSeconds = 60.0;
constexpr std::uint64_t kC2Inits = 100;
constexpr std::int64_t kC2Periods = 8;
constexpr std::uint64_t kC3UniformRuns = 50;
constexpr std::uint64_t kC4Seeds = 50;
constexpr std::int64_t kC4Periods = 40;
constexpr std::uint64_t kC5Seeds = 20;
constexpr std::int64_t kC5Round = 500;
constexpr double kC5Fraction = 0.2;
constexpr double kC5LimitSeconds = 120.0;
constexpr std::uint64_t kC6Seeds = 10;
constexpr std::int64_t kC6Early = 5;
constexpr std::int64_t kC6Late = 1600;
constexpr std::uint64_t kC6MinImproved = 9;
constexpr std::uint64_t kC7Seeds = 20;
constexpr std::int64_t kC7Periods = 400;
constexpr double kC7Factor = 0.5;
constexpr std::uint64_t kC8Seeds = 20;
constexpr std::int64_t kC8Periods = 1700;
constexpr double kC8MinStabilized = 0.9;
constexpr double kC9LimitSeconds = 5.0;

struct Verdict {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Independent recomputations from raw trigger records.

TimeNs raw_span(const Trace& t, const Segment& s) {
  TimeNs lo = t.triggers.at(s.members.front()).time;
  TimeNs hi = lo;
  for (Seq q : s.members) {
    lo = std::min(lo, t.triggers[q].time);
    hi = std::max(hi, t.triggers[q].time);
  }
  return hi - lo;
}

TimeNs raw_e1(const Trace& t, const Segment& s) {
  TimeNs lo = t.triggers.at(s.members.front()).time;
  for (Seq q : s.members) lo = std::min(lo, t.triggers[q].time);
  TimeNs sum = 0;
  for (Seq q : s.members) sum += t.triggers[q].time - lo;
  return sum;
}

/// Largest gap between consecutive triggers of one cell, both at or after `from`.
TimeNs raw_max_cell_gap(const Trace& t, TimeNs from) {
  std::vector<TimeNs> last(t.graph.node_count(), -1);
  TimeNs worst = 0;
  for (const auto& r : t.triggers) {
    if (r.time < from) continue;
    if (last[r.cell] >= 0) worst = std::max(worst, r.time - last[r.cell]);
    last[r.cell] = r.time;
  }
  return worst;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2.0;
}

/// Round at stable index k (1-based), if observed.
const RoundSummary* stable_round(const StabilizationReport& r, std::int64_t k) {
  const std::size_t idx = r.first_stable_round + static_cast<std::size_t>(k - 1);
  return r.stabilized && idx < r.rounds.size() ? &r.rounds[idx] : nullptr;
}

// ---------------------------------------------------------------------------

Verdict criterion1() {
  Stopwatch clock;
  constexpr TimeNs kD = 2000;
  const std::vector<Graph> graphs{
      testing::graph_of(1, {}),
      testing::graph_of(2, {{0, 1}}),
      testing::graph_of(3, {{0, 1}, {1, 2}}),
      testing::graph_of(3, {{0, 1}, {0, 2}}),
      testing::graph_of(3, {{0, 2}, {1, 2}}),
      testing::graph_of(3, {{0, 1}, {1, 2}, {0, 2}}),
  };
  const TimeNs grid[] = {0, kD / 2, kD};
  std::size_t configs = 0;
  std::size_t mismatches = 0;
  std::size_t errors = 0;
  std::string first_failure;
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const Graph& g = graphs[gi];
    const std::size_t n = g.node_count();
    for (double rho : {0.0, 1e-4}) {
      const SimParams p = testing::params_for(g, kD, rho);
      const TimeNs inits[] = {0, p.tau0, p.tau2};
      std::size_t combos = 1;
      for (std::size_t i = 0; i < n; ++i) combos *= 3;
      // schedules: three constant ones plus two seeded mixes over the grid
      for (int schedule = 0; schedule < 5; ++schedule) {
        for (std::size_t combo = 0; combo < combos; ++combo) {
          OracleConfig cfg;
          cfg.graph = g;
          cfg.params = p;
          cfg.horizon = 8 * p.tau2;
          std::size_t code = combo;
          for (std::size_t i = 0; i < n; ++i) {
            cfg.elapsed.push_back(inits[code % 3]);
            code /= 3;
            const Drift drifts[] = {p.rho, -p.rho, Drift{}};
            cfg.drifts.push_back(drifts[(i + combo) % 3]);
          }
          RngStream rng(1000 * gi + 100 * schedule + combo);
          for (const auto& [a, b] : g.edges()) {
            for (const Edge e : {Edge{a, b}, Edge{b, a}}) {
              auto& list = cfg.schedule[e];
              for (int m = 0; m < 64; ++m) {
                list.push_back(schedule < 3 ? grid[schedule] : grid[rng.uniform_int(0, 2)]);
              }
            }
          }
          ++configs;
          try {
            const Trace oracle = brute_force_simulate(cfg);
            Models models{DelayModel::adversarial_schedule(p.d_min, p.d_max, cfg.schedule),
                          FaultModel{}, cfg.drifts};
            const Trace engine =
                simulate(g, p, std::move(models),
                         InitState::explicit_state(cfg.elapsed, cfg.injected), cfg.horizon, 0);
            if (!same_events(oracle, engine)) {
              ++mismatches;
              if (first_failure.empty()) {
                first_failure = fmt::format(" first mismatch: graph {} rho {} schedule {} init {}",
                                            gi, rho, schedule, combo);
              }
            }
          } catch (const std::exception& e) {
            ++errors;
            if (first_failure.empty()) first_failure = std::string(" error: ") + e.what();
          }
        }
      }
    }
  }
  const double secs = clock.seconds();
  return {configs >= 200 && mismatches == 0 && errors == 0 && secs < kC1LimitSeconds,
          fmt::format("{} configs on {} graphs, {} mismatches, {} errors, {:.1f} s (limit {} s){}",
                      configs, graphs.size(), mismatches, errors, secs, kC1LimitSeconds,
                      first_failure)};
}

RunSetup adversarial_setup() {
  RunSetup s;
  s.rho = 1e-4;
  s.adversarial_init = true;
  s.adversarial_delays = true;
  s.adversarial_drifts = true;
  s.mode = ParamMode::kStrictConstraint;
  s.periods = kC2Periods;
  return s;
}

Verdict criterion2() {
  Stopwatch clock;
  std::size_t runs = 0;
  std::size_t late = 0;
  std::size_t unstable = 0;
  TimeNs worst_margin = std::numeric_limits<TimeNs>::max();
  std::string first_failure;
  for (const Graph& g : {build_ring(8), build_grid(4, 4)}) {
    for (std::uint64_t seed = 1; seed <= kC2Inits; ++seed) {
      const Trace t = seeded_run(g, adversarial_setup(), seed);
      const StabilizationReport r = detect_stabilization(t);
      ++runs;
      // deadline recomputed from the closed form with exact rounding
      const SimParams& p = t.params;
      const TimeNs deadline = stretch_by_slow_clock(p.tau2 + p.tau0, p.rho) + p.d_max + p.tau1 +
                              p.tau2;
      if (!r.stabilized) {
        ++unstable;
        if (first_failure.empty()) {
          first_failure = fmt::format(" first: {} seed {} not stabilized ({})", g.spec(), seed,
                                      r.last_violation_reason);
        }
        continue;
      }
      worst_margin = std::min(worst_margin, deadline - r.t_stab);
      if (r.t_stab > deadline) {
        ++late;
        if (first_failure.empty()) {
          first_failure = fmt::format(" first: {} seed {} t_stab {} > {}", g.spec(), seed,
                                      r.t_stab, deadline);
        }
      }
    }
  }
  const double secs = clock.seconds();
  return {late == 0 && unstable == 0 && secs < kC2LimitSeconds,
          fmt::format("{} adversarial runs, {} not stabilized, {} past t2+tau2, smallest margin "
                      "{} ns, {:.1f} s (limit {} s){}",
                      runs, unstable, late, worst_margin, secs, kC2LimitSeconds, first_failure)};
}

Verdict criterion3() {
  std::size_t suffixes = 0;
  std::size_t precision_failures = 0;
  std::size_t liveness_failures = 0;
  std::size_t unstable = 0;
  double worst_pi_ratio = 0.0;
  double worst_nabla_ratio = 0.0;
  for (const Graph& g : {build_ring(8), build_grid(4, 4)}) {
    const TopologyStats stats = topology_stats(g);
    auto check = [&](const Trace& t) {
      const StabilizationReport r = detect_stabilization(t);
      if (!r.stabilized) {
        ++unstable;
        return;
      }
      ++suffixes;
      const TimeNs pi_bound = static_cast<TimeNs>(stats.diameter) * t.params.d_max;
      const TimeNs nabla_bound = stretch_by_slow_clock(t.params.tau2, t.params.rho);
      TimeNs pi = 0;
      for (std::size_t k = r.first_stable_round; k < r.rounds.size(); ++k) {
        pi = std::max(pi, raw_span(t, r.rounds[k].segment));
      }
      const TimeNs nabla = raw_max_cell_gap(t, r.t_stab);
      worst_pi_ratio = std::max(worst_pi_ratio, static_cast<double>(pi) / pi_bound);
      worst_nabla_ratio = std::max(worst_nabla_ratio, static_cast<double>(nabla) / nabla_bound);
      if (pi > pi_bound) ++precision_failures;
      if (nabla > nabla_bound) ++liveness_failures;
    };
    for (std::uint64_t seed = 1; seed <= kC2Inits; ++seed) {
      check(seeded_run(g, adversarial_setup(), seed));
    }
    for (std::uint64_t seed = 1; seed <= kC3UniformRuns; ++seed) {
      RunSetup s;
      s.rho = 1e-4;
      s.periods = kC2Periods;
      check(seeded_run(g, s, 10'000 + seed));
    }
  }
  return {precision_failures == 0 && liveness_failures == 0 && unstable == 0,
          fmt::format("{} stabilized suffixes ({} runs not stabilized), tau_pi/(D_G d) max {:.3f}, "
                      "cell gap/(tau2/(1-rho)) max {:.4f}, {} precision and {} liveness violations",
                      suffixes, unstable, worst_pi_ratio, worst_nabla_ratio, precision_failures,
                      liveness_failures)};
}

Verdict criterion4() {
  std::size_t runs = 0;
  std::size_t increases = 0;
  std::size_t unstable = 0;
  std::size_t rounds_checked = 0;
  std::string first_failure;
  for (const Graph& g : {build_ring(16), build_grid(4, 4)}) {
    for (std::uint64_t seed = 1; seed <= kC4Seeds; ++seed) {
      RunSetup s;
      s.periods = kC4Periods;
      const Trace t = seeded_run(g, s, seed);
      const StabilizationReport r = detect_stabilization(t);
      ++runs;
      if (!r.stabilized) {
        ++unstable;
        continue;
      }
      TimeNs previous = std::numeric_limits<TimeNs>::max();
      for (std::size_t k = r.first_stable_round; k < r.rounds.size(); ++k) {
        const TimeNs e1 = raw_e1(t, r.rounds[k].segment);
        ++rounds_checked;
        if (e1 > previous) {
          ++increases;
          if (first_failure.empty()) {
            first_failure = fmt::format(" first: {} seed {} k {}: {} > {}", g.spec(), seed,
                                        k - r.first_stable_round + 1, e1, previous);
          }
          break;
        }
        previous = e1;
      }
    }
  }
  return {increases == 0 && unstable == 0,
          fmt::format("{} runs, {} stable rounds checked, {} runs not stabilized, {} runs with an "
                      "e1 increase{}",
                      runs, rounds_checked, unstable, increases, first_failure)};
}

Verdict criterion5() {
  Stopwatch clock;
  std::vector<std::string> parts;
  bool pass = true;
  for (const Graph& g : {build_ring(16), build_grid(4, 4)}) {
    std::vector<double> offsets;
    std::size_t short_runs = 0;
    for (std::uint64_t seed = 1; seed <= kC5Seeds; ++seed) {
      RunSetup s;
      s.periods = kC5Round + 30;
      const Trace t = seeded_run(g, s, seed);
      const StabilizationReport r = detect_stabilization(t);
      const RoundSummary* round = stable_round(r, kC5Round);
      if (!round) {
        ++short_runs;
        continue;
      }
      TimeNs lo = std::numeric_limits<TimeNs>::max();
      for (Seq q : round->segment.members) lo = std::min(lo, t.triggers[q].time);
      for (Seq q : round->segment.members) {
        offsets.push_back(static_cast<double>(t.triggers[q].time - lo));
      }
    }
    const double med = median(offsets) / static_cast<double>(kMs);
    const bool ok = short_runs == 0 && med < kC5Fraction;
    pass = pass && ok;
    parts.push_back(fmt::format("{}: median offset {:.4f} d over {} cells ({} runs short)",
                                g.spec(), med, offsets.size(), short_runs));
  }
  const double secs = clock.seconds();
  pass = pass && secs < kC5LimitSeconds;
  return {pass, fmt::format("k={}, threshold {} d: {}; {}; {:.1f} s (limit {} s)", kC5Round,
                            kC5Fraction, parts[0], parts[1], secs, kC5LimitSeconds)};
}

Verdict criterion6() {
  const Graph g = build_grid(16, 16);
  const auto n = static_cast<double>(g.node_count());
  std::uint64_t improved = 0;
  std::uint64_t reached_ideal = 0;
  std::uint64_t short_runs = 0;
  std::vector<std::string> fractions;
  for (std::uint64_t seed = 1; seed <= kC6Seeds; ++seed) {
    RunSetup s;
    s.periods = kC6Late + 20;
    const Trace t = seeded_run(g, s, seed);
    const StabilizationReport r = detect_stabilization(t);
    const RoundSummary* early = stable_round(r, kC6Early);
    const RoundSummary* late = stable_round(r, kC6Late);
    if (!early || !late) {
      ++short_runs;
      continue;
    }
    const double f_early = static_cast<double>(early->counts.source) / n;
    const double f_late = static_cast<double>(late->counts.source) / n;
    if (f_late > f_early) ++improved;
    bool ideal = false;
    for (std::size_t k = r.first_stable_round;
         k < r.rounds.size() && k < r.first_stable_round + kC6Late; ++k) {
      ideal = ideal || r.rounds[k].counts.source == g.node_count();
    }
    if (ideal) ++reached_ideal;
    fractions.push_back(fmt::format("{:.2f}->{:.2f}", f_early, f_late));
  }
  std::string joined;
  for (const auto& f : fractions) joined += (joined.empty() ? "" : " ") + f;
  return {improved >= kC6MinImproved && reached_ideal >= 1 && short_runs == 0,
          fmt::format("grid:16x16, {} seeds: source fraction k={} -> k={} improved in {} (need "
                      "{}), ideal pattern reached in {}, {} runs short [{}]",
                      kC6Seeds, kC6Early, kC6Late, improved, kC6MinImproved, reached_ideal,
                      short_runs, joined)};
}

Verdict criterion7() {
  struct Outcome {
    double mean_rounds = 0;
    std::size_t censored = 0;
  };
  auto measure = [](const Graph& g) {
    Outcome out;
    const auto threshold =
        static_cast<TimeNs>(kC7Factor * static_cast<double>(g.node_count()) * kMs);
    double total = 0;
    for (std::uint64_t seed = 1; seed <= kC7Seeds; ++seed) {
      RunSetup s;
      s.rho = 1e-4;
      s.periods = kC7Periods;
      const Trace t = seeded_run(g, s, seed);
      const StabilizationReport r = detect_stabilization(t);
      std::size_t k = 0;
      while (k < r.rounds.size() && raw_e1(t, r.rounds[k].segment) >= threshold) ++k;
      if (k == r.rounds.size()) ++out.censored;
      total += static_cast<double>(k + 1);
    }
    out.mean_rounds = total / kC7Seeds;
    return out;
  };
  const Outcome grid = measure(build_grid(8, 8));
  const Outcome cube = measure(build_hypercube(6));
  return {cube.mean_rounds < grid.mean_rounds,
          fmt::format("mean o-MEPs until e1 < {} n d: hypercube:6 {:.2f} ({} censored) vs "
                      "grid:8x8 {:.2f} ({} censored)",
                      kC7Factor, cube.mean_rounds, cube.censored, grid.mean_rounds, grid.censored)};
}

Verdict criterion8() {
  const Graph g = build_grid(16, 16);
  bool pass = true;
  std::vector<std::string> parts;
  for (double p : {0.01, 0.1, 0.2, 0.3}) {
    std::size_t stabilized = 0;
    std::size_t completed = 0;
    for (std::uint64_t seed = 1; seed <= kC8Seeds; ++seed) {
      RunSetup s;
      s.rho = 1e-4;
      s.omission_p = p;
      s.periods = kC8Periods;
      const Trace t = seeded_run(g, s, seed);
      const StabilizationReport r = detect_stabilization(t);
      ++completed;
      if (r.stabilized) ++stabilized;
    }
    const double rate = static_cast<double>(stabilized) / kC8Seeds;
    if (p < 0.25) {
      pass = pass && rate >= kC8MinStabilized;
    } else {
      pass = pass && completed == kC8Seeds;
    }
    parts.push_back(fmt::format("p={}: {}/{} stabilized", p, stabilized, completed));
  }
  std::string joined;
  for (const auto& s : parts) joined += (joined.empty() ? "" : ", ") + s;
  return {pass, fmt::format("grid:16x16, rho=1e-4, {} periods: {} (need >= {:.0f}% for p <= 0.2)",
                            kC8Periods, joined, 100 * kC8MinStabilized)};
}

// Hand-built fixtures: each must be classified as expected.
Verdict criterion9() {
  Stopwatch clock;
  using testing::graph_of;
  using testing::propagation_of;
  std::vector<std::pair<std::string, std::function<bool()>>> cases;
  auto omep = [](std::size_t n, std::vector<Edge> edges, std::vector<testing::Trig> trig,
                 std::vector<CellId> allowed = {}) {
    const Graph g = graph_of(n, std::move(edges));
    return validate_omep(propagation_of(n, trig), g, allowed);
  };
  const std::vector<Edge> path3{{0, 1}, {1, 2}};
  const std::vector<Edge> ring4{{0, 1}, {1, 2}, {2, 3}, {0, 3}};

  cases.push_back({"valid+", [&] { return omep(3, path3, {{0, 0, 0}, {1, 1, 0}, {2, 2, 1}}).valid; }});
  cases.push_back({"valid-", [&] {
                     return !omep(2, {{0, 1}}, {{0, 0, 0}, {1, 1, 0}}, {1}).valid;
                   }});
  cases.push_back({"simple+", [&] { return omep(3, path3, {{0, 0, 0}, {1, 1, 0}, {2, 2, 1}}).simple; }});
  cases.push_back({"simple-", [&] {
                     return !omep(3, path3, {{0, 0, 0}, {1, 1, 0}, {0, 2, 1}, {2, 3, 0}}).simple;
                   }});
  cases.push_back({"complete+", [&] { return omep(2, {{0, 1}}, {{0, 0, 0}, {1, 1, 0}}).complete; }});
  cases.push_back({"complete-", [&] { return !omep(3, path3, {{0, 0, 0}, {1, 1, 0}}).complete; }});
  cases.push_back({"exclusive+", [&] {
                     return omep(4, {{0, 1}, {1, 2}, {2, 3}}, {{0, 0, 0}, {3, 0, 3}, {1, 1, 0}, {2, 1, 3}})
                         .exclusive;
                   }});
  cases.push_back({"exclusive-", [&] {
                     return !omep(3, path3, {{0, 0, 0}, {2, 0, 2}, {1, 1, 0}, {1, 2, 2}}).exclusive;
                   }});
  cases.push_back({"propagative+", [&] {
                     return omep(4, ring4, {{0, 0, 0}, {1, 1, 0}, {3, 1, 0}, {2, 2, 1}}).propagative;
                   }});
  cases.push_back({"propagative-", [&] {
                     const auto r = omep(4, ring4, {{0, 0, 0}, {1, 1, 0}, {3, 1, 0}, {2, 2, 1}, {2, 3, 3}});
                     return !r.propagative && r.exclusive;
                   }});

  // BP fixtures: a valid propagation passes all seven; a mutated report fails
  // the targeted property.
  struct BpFixture {
    Graph graph;
    Propagation prop;
    PatternReport report;
  };
  auto chain = [&] {
    Graph g = graph_of(3, path3);
    Propagation p = propagation_of(3, {{0, 0, 0}, {1, 1, 0}, {2, 2, 1}});
    PatternReport r = classify_patterns(p, g);
    return BpFixture{std::move(g), std::move(p), std::move(r)};
  };
  auto star = [&] {
    Graph g = graph_of(4, {{0, 1}, {0, 2}, {0, 3}});
    Propagation p = propagation_of(4, {{0, 0, 0}, {1, 1, 0}, {2, 1, 0}, {3, 1, 0}});
    PatternReport r = classify_patterns(p, g);
    return BpFixture{std::move(g), std::move(p), std::move(r)};
  };
  auto bp_pass = [](BpFixture f, int id) {
    f.report.counts = count_patterns(f.report);
    return check_pattern_properties(f.report, f.prop, f.graph).at(id - 1).pass;
  };
  for (int id = 1; id <= 7; ++id) {
    cases.push_back({fmt::format("bp{}+", id), [&, id] { return bp_pass(chain(), id) && bp_pass(star(), id); }});
  }
  cases.push_back({"bp1-", [&] { auto f = chain(); f.report.role[2] = CellRole::kFlow; return !bp_pass(f, 1); }});
  cases.push_back({"bp2-", [&] {
                     Graph g = graph_of(2, {{0, 1}});
                     Propagation p = propagation_of(2, {{0, 0, 0}, {1, 0, 1}});
                     PatternReport r = classify_patterns(p, g);
                     r.role = {CellRole::kSource, CellRole::kSource};
                     return !bp_pass({g, p, r}, 2);
                   }});
  cases.push_back({"bp3-", [&] { auto f = chain(); f.report.role[0] = CellRole::kUnited; return !bp_pass(f, 3); }});
  cases.push_back({"bp4-", [&] { auto f = chain(); f.report.terrain[1] = CellTerrain::kRidge; return !bp_pass(f, 4); }});
  cases.push_back({"bp5-", [&] { auto f = chain(); f.report.role[1] = CellRole::kSink; return !bp_pass(f, 5); }});
  cases.push_back({"bp6-", [&] { auto f = star(); f.report.role[3] = CellRole::kFlow; return !bp_pass(f, 6); }});
  cases.push_back({"bp7-", [&] {
                     auto f = star();
                     f.report.role[2] = CellRole::kFlow;
                     f.report.role[3] = CellRole::kFlow;
                     return !bp_pass(f, 7);
                   }});

  // Association fixtures on K2.
  auto k2 = [] {
    Trace t;
    t.graph = graph_of(2, {{0, 1}});
    t.params = testing::params_for(t.graph, kMs);
    t.stats = topology_stats(t.graph);
    return t;
  };
  auto ext = [](Seq s, TimeNs time, CellId c) {
    return TriggerRecord{s, time, c, TriggerKind::kExternal, c};
  };
  auto in = [](Seq s, TimeNs time, CellId c, CellId from) {
    return TriggerRecord{s, time, c, TriggerKind::kInternal, from};
  };
  cases.push_back({"accept-reject-class", [&] {
                     Trace t = k2();
                     t.triggers = {ext(0, 0, 0), in(1, kMs, 1, 0)};
                     t.arrivals = {{kMs, 0, 1, ArrivalOutcome::kAccepted, std::nullopt, 0},
                                   {2 * kMs, 1, 0, ArrivalOutcome::kRejected, 0, 1}};
                     const auto c = association_classes(t, 0, 10 * kMs);
                     return c.classes.weak_count == 1 && c.max_span <= kMs;
                   }});
  cases.push_back({"strong-weak-coincide", [&] {
                     Trace t = k2();
                     t.triggers = {ext(0, 0, 0), ext(1, 0, 1)};
                     t.arrivals = {{kMs, 0, 1, ArrivalOutcome::kRejected, 1, 0},
                                   {kMs, 1, 0, ArrivalOutcome::kRejected, 0, 1}};
                     return association_classes(t, 0, 10 * kMs).partitions_coincide;
                   }});
  cases.push_back({"strong-weak-differ", [&] {
                     Trace t = k2();
                     t.triggers = {ext(0, 0, 1), ext(1, 3 * kMs, 0)};
                     t.arrivals = {{4 * kMs, 0, 1, ArrivalOutcome::kRejected, 0, 1}};
                     return !association_classes(t, 0, 10 * kMs).partitions_coincide;
                   }});
  cases.push_back({"class-span-within", [&] {
                     Trace t = k2();
                     t.triggers = {ext(0, 0, 0), in(1, kMs, 1, 0)};
                     t.arrivals = {{kMs, 0, 1, ArrivalOutcome::kAccepted, std::nullopt, 0}};
                     return association_classes(t, 0, 10 * kMs).span_within_bound;
                   }});
  cases.push_back({"class-span-exceeds", [&] {
                     Trace t = k2();
                     t.triggers = {ext(0, 0, 0), in(1, kMs, 1, 0), in(2, 2 * kMs, 0, 1)};
                     t.arrivals = {{kMs, 0, 1, ArrivalOutcome::kAccepted, std::nullopt, 0},
                                   {2 * kMs, 1, 0, ArrivalOutcome::kAccepted, std::nullopt, 1}};
                     const auto c = association_classes(t, 0, 10 * kMs);
                     return !c.span_within_bound && c.partitions_coincide;
                   }});

  std::vector<std::string> wrong;
  for (const auto& [name, run] : cases) {
    if (!run()) wrong.push_back(name);
  }
  const double secs = clock.seconds();
  std::string joined;
  for (const auto& w : wrong) joined += " " + w;
  return {wrong.empty() && secs < kC9LimitSeconds,
          fmt::format("{} fixtures (o-MEP properties, BP1-BP7, association classes and spans), {} "
                      "misclassified{}, {:.2f} s (limit {} s)",
                      cases.size(), wrong.size(), joined, secs, kC9LimitSeconds)};
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

Verdict criterion10() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "mepsim_acceptance_c10";
  fs::remove_all(root);
  const std::vector<std::vector<std::string>> setups{
      {"topology=grid:4x4", "horizon_periods=30"},
      {"topology=ring:16", "rho=0.0001", "omission_p=0.1", "init_mode=adversarial",
       "horizon_periods=30"},
      {"topology=hypercube:4", "rho=0.0001", "delay_model=adversarial-max",
       "drift_mode=adversarial", "horizon_periods=30"},
  };
  std::size_t files_compared = 0;
  std::vector<std::string> differing;
  for (std::size_t k = 0; k < setups.size(); ++k) {
    const fs::path a = root / fmt::format("s{}a", k);
    const fs::path b = root / fmt::format("s{}b", k);
    const fs::path c = root / fmt::format("s{}c", k);
    for (const fs::path& dir : {a, b}) {
      cli::RunOptions run;
      run.out = dir;
      run.overrides = setups[k];
      run.seed = 7 + k;
      cli::cmd_run(run);
    }
    for (const auto& entry : fs::recursive_directory_iterator(a)) {
      if (!entry.is_regular_file()) continue;
      const fs::path rel = fs::relative(entry.path(), a);
      ++files_compared;
      if (slurp(a / rel) != slurp(b / rel)) differing.push_back(rel.string());
    }
    cli::AnalyzeOptions analyze;
    analyze.trace = a / "trace.csv";
    analyze.out = c;
    analyze.overrides = setups[k];
    cli::cmd_analyze(analyze);
    ++files_compared;
    if (slurp(c / "metrics.json") != slurp(a / "metrics.json")) {
      differing.push_back(fmt::format("s{} analyze metrics.json", k));
    }
  }
  fs::remove_all(root);
  std::string joined;
  for (const auto& d : differing) joined += " " + d;
  return {differing.empty() && files_compared > 3 * setups.size(),
          fmt::format("{} setups, {} files compared byte for byte, {} differ{}", setups.size(),
                      files_compared, differing.size(), joined)};
}

struct Criterion {
  int id;
  const char* name;
  Verdict (*run)();
};

constexpr Criterion kCriteria[] = {
    {1, "oracle-equivalence", criterion1},     {2, "stabilization-deadline", criterion2},
    {3, "precision-and-liveness", criterion3}, {4, "e1-monotone", criterion4},
    {5, "offsets-small", criterion5},          {6, "source-fraction-grows", criterion6},
    {7, "hypercube-converges-faster", criterion7}, {8, "omission-tolerance", criterion8},
    {9, "checker-fixtures", criterion9},       {10, "determinism-round-trip", criterion10},
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> selected;
  app.add_option("--criterion,-c", selected, "criterion number (repeatable); default all")
      ->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  bool all_pass = true;
  for (const Criterion& c : kCriteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) {
      continue;
    }
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    all_pass = all_pass && v.pass;
    std::printf("C%-2d %s %s: %s\n", c.id, v.pass ? "PASS" : "FAIL", c.name, v.detail.c_str());
    std::fflush(stdout);
  }
  return all_pass ? 0 : 1;
}
