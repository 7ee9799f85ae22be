#include "mepsim/engine.hpp"

#include <algorithm>
#include <tuple>

#include "mepsim/error.hpp"

namespace mepsim {

InitState InitState::random_uniform(std::size_t n, const SimParams& params, RngStream& rng) {
  InitState init;
  init.mode = InitMode::kRandomUniform;
  init.elapsed.reserve(n);
  for (std::size_t i = 0; i < n; ++i) init.elapsed.push_back(rng.uniform_int(0, params.tau2));
  return init;
}

InitState InitState::random_adversarial(const Graph& g, const SimParams& params,
                                        RngStream& rng) {
  InitState init;
  init.mode = InitMode::kAdversarialExplicit;
  const std::size_t n = g.node_count();
  init.elapsed.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    init.elapsed.push_back(rng.uniform_int(0, 2 * params.tau2));
  }
  for (const auto& [i, j] : g.edges()) {
    for (const auto& [from, to] : {std::pair{i, j}, std::pair{j, i}}) {
      if (rng.uniform_int(0, 1) == 1) {
        init.injected.push_back({from, to, rng.uniform_int(0, params.d_max)});
      }
    }
  }
  return init;
}

InitState InitState::explicit_state(std::vector<TimeNs> elapsed,
                                    std::vector<PendingSignal> injected) {
  InitState init;
  init.mode = InitMode::kAdversarialExplicit;
  init.elapsed = std::move(elapsed);
  init.injected = std::move(injected);
  return init;
}

bool Simulator::Later::operator()(const Event& a, const Event& b) const {
  return std::tie(a.time, a.cls, a.cell, a.sender, a.order) >
         std::tie(b.time, b.cls, b.cell, b.sender, b.order);
}

Simulator::Simulator(const Graph& g, const SimParams& params, Models models,
                     const InitState& init, std::uint64_t seed)
    : graph_(g),
      params_(params),
      models_(std::move(models)),
      delay_rng_(derive_stream(seed, "delays")),
      omission_rng_(derive_stream(seed, "omissions")) {
  validate_params(params_);
  const std::size_t n = g.node_count();
  if (init.elapsed.size() != n) {
    throw Error(ErrorKind::kValidation, "initial state has " + std::to_string(init.elapsed.size()) +
                                            " timer readings for " + std::to_string(n) + " cells");
  }
  if (models_.drifts.empty()) models_.drifts.assign(n, Drift{});
  if (models_.drifts.size() != n) {
    throw Error(ErrorKind::kValidation, "drift assignment size does not match the graph");
  }
  for (Drift drift : models_.drifts) {
    if (drift > params_.rho || drift < -params_.rho) {
      throw Error(ErrorKind::kValidation, "cell drift exceeds the bound rho");
    }
  }
  if (models_.delay.d_min() < params_.d_min || models_.delay.d_max() > params_.d_max) {
    throw Error(ErrorKind::kValidation, "delay model bounds exceed [d_min, d_max]");
  }
  models_.fault.omission_p = params_.omission_p;

  cells_.resize(n);
  for (CellId i = 0; i < n; ++i) {
    CellState& c = cells_[i];
    const TimeNs elapsed = init.elapsed[i];
    if (elapsed < 0) throw Error(ErrorKind::kValidation, "negative initial elapsed time");
    c.drift = models_.drifts[i];
    c.origin = 0;
    c.restore_offset = elapsed;
    c.liveness_offset = elapsed;
    c.excited = elapsed < params_.tau0;
    if (c.excited) schedule_restoration(i);
    schedule_external(i);
  }
  for (const PendingSignal& s : init.injected) {
    if (s.to >= n || s.from >= n || !g.adjacent(s.from, s.to)) {
      throw Error(ErrorKind::kValidation, "injected signal on a non-edge");
    }
    if (s.arrival < 0 || s.arrival > params_.d_max) {
      throw Error(ErrorKind::kValidation, "injected signal must arrive within [0, d_max]");
    }
    push({s.arrival, EventClass::kArrival, s.to, s.from, 0, 0, -1});
  }
}

void Simulator::push(Event e) {
  e.order = next_order_++;
  queue_.push(e);
}

void Simulator::schedule_restoration(CellId i) {
  CellState& c = cells_[i];
  const TimeNs remaining = std::max<TimeNs>(0, params_.tau0 - c.restore_offset);
  c.restoration_due = c.origin + local_to_real(remaining, c.drift);
  ++c.restore_epoch;
  push({c.restoration_due, EventClass::kRestoration, i, i, 0, c.restore_epoch, -1});
}

void Simulator::schedule_external(CellId i) {
  CellState& c = cells_[i];
  // Readings past the threshold are invalid and recover immediately.
  const TimeNs remaining = std::max<TimeNs>(0, params_.tau2 - c.liveness_offset);
  c.external_due = c.origin + local_to_real(remaining, c.drift);
  ++c.external_epoch;
  push({c.external_due, EventClass::kExternal, i, i, 0, c.external_epoch, -1});
}

TriggerRecord Simulator::trigger(CellId i, TimeNs now, TriggerKind kind, CellId pioneer) {
  CellState& c = cells_[i];
  const Seq seq = triggers_.size();
  TriggerRecord rec{seq, now, i, kind, pioneer};
  triggers_.push_back(rec);

  c.excited = true;
  c.latest_trigger = seq;
  c.origin = now;
  c.restore_offset = 0;
  c.liveness_offset = 0;
  schedule_restoration(i);
  schedule_external(i);
  if (kind == TriggerKind::kInternal && params_.dmin_compensation && params_.d_min > 0) {
    apply_dmin_compensation(i);
  }

  for (CellId j : graph_.neighbors(i)) {
    const TimeNs delay = models_.delay.sample(i, j, delay_rng_);
    push({now + delay, EventClass::kArrival, j, i, 0, 0, static_cast<std::int64_t>(seq)});
  }
  return rec;
}

void Simulator::apply_dmin_compensation(CellId i) {
  cells_.at(i).liveness_offset += params_.d_min;
  schedule_external(i);
}

ArrivalResult Simulator::handle_arrival(std::span<const PendingSignal> group,
                                        std::span<const std::optional<Seq>> emitters,
                                        TimeNs now) {
  const CellId to = group.front().to;
  CellState& c = cells_.at(to);

  ArrivalResult result;
  if (c.excited) {
    result = ArrivalResult::kRejected;
  } else if (models_.fault.omit(omission_rng_)) {
    result = ArrivalResult::kOmitted;
  } else {
    result = ArrivalResult::kAccepted;
    trigger(to, now, TriggerKind::kInternal, group.front().from);
  }

  const ArrivalOutcome outcome = result == ArrivalResult::kAccepted   ? ArrivalOutcome::kAccepted
                                 : result == ArrivalResult::kRejected ? ArrivalOutcome::kRejected
                                                                      : ArrivalOutcome::kOmitted;
  for (std::size_t k = 0; k < group.size(); ++k) {
    ArrivalRecord rec{now, group[k].from, to, outcome, std::nullopt, emitters[k]};
    if (result == ArrivalResult::kRejected) rec.rejecting_seq = c.latest_trigger;
    arrivals_.push_back(rec);
  }
  return result;
}

void Simulator::handle_restoration(CellId i, TimeNs) { cells_.at(i).excited = false; }

TriggerRecord Simulator::handle_external_trigger(CellId i, TimeNs now) {
  return trigger(i, now, TriggerKind::kExternal, i);
}

void Simulator::run_until(TimeNs horizon) {
  while (!queue_.empty() && queue_.top().time <= horizon) {
    const Event e = queue_.top();
    queue_.pop();
    now_ = e.time;
    switch (e.cls) {
      case EventClass::kArrival: {
        group_.clear();
        group_emitters_.clear();
        auto add = [this](const Event& ev) {
          group_.push_back({ev.sender, ev.cell, ev.time});
          group_emitters_.push_back(ev.emit < 0 ? std::nullopt
                                                : std::optional<Seq>(static_cast<Seq>(ev.emit)));
        };
        add(e);
        while (!queue_.empty() && queue_.top().time == e.time &&
               queue_.top().cls == EventClass::kArrival && queue_.top().cell == e.cell) {
          add(queue_.top());
          queue_.pop();
        }
        handle_arrival(group_, group_emitters_, now_);
        break;
      }
      case EventClass::kRestoration:
        if (e.epoch == cells_[e.cell].restore_epoch) handle_restoration(e.cell, now_);
        break;
      case EventClass::kExternal:
        if (e.epoch == cells_[e.cell].external_epoch) handle_external_trigger(e.cell, now_);
        break;
    }
  }
  processed_until_ = std::max(processed_until_, horizon);
}

Trace Simulator::finish() && {
  Trace trace;
  trace.graph = graph_;
  trace.params = params_;
  trace.horizon = processed_until_;
  trace.triggers = std::move(triggers_);
  trace.arrivals = std::move(arrivals_);
  trace.warnings = std::move(warnings_);
  canonicalize(trace);
  return trace;
}

Trace simulate(const Graph& g, const SimParams& params, Models models, const InitState& init,
               TimeNs horizon, std::uint64_t seed) {
  if (horizon <= 0) throw Error(ErrorKind::kValidation, "horizon must be positive");
  Simulator sim(g, params, std::move(models), init, seed);
  sim.run_until(horizon);
  Trace trace = std::move(sim).finish();
  trace.seed = seed;
  trace.stats.diameter = diameter(g);
  trace.stats.longest_simple_path = params.lg;
  trace.stats.lg_is_exact = g.family() != TopologyFamily::kCustom;
  if (horizon < liveness_bound(params)) {
    trace.warnings.push_back("horizon is shorter than one liveness period");
  }
  return trace;
}

}  // namespace mepsim
