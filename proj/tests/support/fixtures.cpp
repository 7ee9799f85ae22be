#include "fixtures.hpp"

namespace mepsim::testing {

SimParams params_for(const Graph& g, TimeNs d, double rho, ParamMode mode) {
  return derive_params(topology_stats(g), d, Drift::from_ratio(rho), mode);
}

Trace seeded_run(const Graph& g, const RunSetup& s, std::uint64_t seed) {
  const TopologyStats stats = topology_stats(g);
  SimParams p = derive_params(stats, s.d, Drift::from_ratio(s.rho), s.mode);
  p.d_min = s.d_min;
  p.omission_p = s.omission_p;
  RngStream drift_rng = derive_stream(seed, "drifts");
  RngStream init_rng = derive_stream(seed, "init");
  auto drifts = s.adversarial_drifts ? adversarial_drifts(g.node_count(), p.rho, drift_rng)
                                     : sample_drifts(g.node_count(), p.rho, drift_rng);
  Models models{s.adversarial_delays ? DelayModel::adversarial_max(p.d_min, p.d_max)
                                     : DelayModel::uniform(p.d_min, p.d_max),
                FaultModel{p.omission_p}, std::move(drifts)};
  const InitState init = s.adversarial_init
                             ? InitState::random_adversarial(g, p, init_rng)
                             : InitState::random_uniform(g.node_count(), p, init_rng);
  const TimeNs horizon = lemma5_bound(p) + s.periods * p.tau2;
  Trace t = simulate(g, p, std::move(models), init, horizon, seed);
  t.stats = stats;
  return t;
}

Propagation propagation_of(std::size_t n, const std::vector<Trig>& triggers) {
  std::vector<PropagationEntry> entries;
  Seq seq = 0;
  for (const Trig& t : triggers) entries.push_back({seq++, t.cell, t.time, t.pioneer, {}});
  return make_propagation(n, std::move(entries));
}

Graph graph_of(std::size_t n, std::vector<Edge> edges) {
  return from_edge_list(n, edges);
}

}  // namespace mepsim::testing
