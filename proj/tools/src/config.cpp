#include "mepsim_cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "mepsim/error.hpp"

namespace mepsim::cli {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& msg) {
  throw Error(ErrorKind::kConfiguration, msg);
}

template <class T>
void read(const json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    config_error(std::string("config key '") + key + "' has the wrong type");
  }
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "topology",   "d_min_ns",       "d_max_ns",           "rho",          "delay_model",
      "schedule_file", "omission_p",  "param_mode",         "tau0_ns",      "tau1_ns",
      "tau2_ns",    "horizon_ns",     "horizon_periods",    "seed",         "replicas",
      "dmin_compensation", "init_mode", "drift_mode",       "association_checks",
      "lg_override", "lg_exact_cap",  "pattern_ks",         "sweep"};
  return keys;
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) config_error("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known_keys().contains(key)) config_error("unknown config key '" + key + "'");
  }
  ExperimentConfig c;
  read(j, "topology", c.topology);
  read(j, "d_min_ns", c.d_min_ns);
  read(j, "d_max_ns", c.d_max_ns);
  read(j, "rho", c.rho);
  read(j, "delay_model", c.delay_model);
  read(j, "schedule_file", c.schedule_file);
  read(j, "omission_p", c.omission_p);
  read(j, "param_mode", c.param_mode);
  read(j, "tau0_ns", c.tau0_ns);
  read(j, "tau1_ns", c.tau1_ns);
  read(j, "tau2_ns", c.tau2_ns);
  read(j, "horizon_ns", c.horizon_ns);
  read(j, "horizon_periods", c.horizon_periods);
  read(j, "seed", c.seed);
  read(j, "replicas", c.replicas);
  read(j, "dmin_compensation", c.dmin_compensation);
  read(j, "init_mode", c.init_mode);
  read(j, "drift_mode", c.drift_mode);
  read(j, "association_checks", c.association_checks);
  read(j, "lg_exact_cap", c.lg_exact_cap);
  read(j, "pattern_ks", c.pattern_ks);
  if (j.contains("lg_override") && !j["lg_override"].is_null()) {
    std::size_t lg = 0;
    read(j, "lg_override", lg);
    c.lg_override = lg;
  }
  if (j.contains("sweep") && !j["sweep"].is_null()) {
    const json& s = j["sweep"];
    if (!s.is_object()) config_error("config key 'sweep' must be an object");
    for (const auto& [key, value] : s.items()) {
      if (key != "axis" && key != "values" && key != "replicas") {
        config_error("unknown sweep key '" + key + "'");
      }
    }
    SweepSpec spec;
    read(s, "axis", spec.axis);
    read(s, "replicas", spec.replicas);
    if (s.contains("values")) spec.values = s["values"];
    c.sweep = spec;
  }
  if (c.replicas == 0) config_error("replicas must be >= 1");
  if (c.horizon_ns < 0) config_error("horizon_ns must be >= 0");
  if (c.horizon_periods <= 0) config_error("horizon_periods must be positive");
  if (!std::isfinite(c.rho)) config_error("rho must be finite");
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json j;
  j["topology"] = c.topology;
  j["d_min_ns"] = c.d_min_ns;
  j["d_max_ns"] = c.d_max_ns;
  j["rho"] = c.rho;
  j["delay_model"] = c.delay_model;
  j["schedule_file"] = c.schedule_file;
  j["omission_p"] = c.omission_p;
  j["param_mode"] = c.param_mode;
  j["tau0_ns"] = c.tau0_ns;
  j["tau1_ns"] = c.tau1_ns;
  j["tau2_ns"] = c.tau2_ns;
  j["horizon_ns"] = c.horizon_ns;
  j["horizon_periods"] = c.horizon_periods;
  j["seed"] = c.seed;
  j["replicas"] = c.replicas;
  j["dmin_compensation"] = c.dmin_compensation;
  j["init_mode"] = c.init_mode;
  j["drift_mode"] = c.drift_mode;
  j["association_checks"] = c.association_checks;
  j["lg_override"] = c.lg_override ? json(*c.lg_override) : json(nullptr);
  j["lg_exact_cap"] = c.lg_exact_cap;
  j["pattern_ks"] = c.pattern_ks;
  if (c.sweep) {
    j["sweep"] = {{"axis", c.sweep->axis}, {"values", c.sweep->values},
                  {"replicas", c.sweep->replicas}};
  } else {
    j["sweep"] = nullptr;
  }
  return j;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParse, "config '" + path.string() + "': " + e.what());
  }
  ExperimentConfig c = config_from_json(j);
  c.base_dir = path.parent_path();
  return c;
}

void apply_override(ExperimentConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    config_error("override must be KEY=VALUE, got '" + std::string(assignment) + "'");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  json value = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = text;

  json j = config_to_json(cfg);
  json* target = &j;
  std::string_view rest = key;
  for (;;) {
    const auto dot = rest.find('.');
    const std::string part(rest.substr(0, dot));
    if (dot == std::string_view::npos) {
      (*target)[part] = value;
      break;
    }
    json& next = (*target)[part];
    if (next.is_null()) next = json::object();
    if (!next.is_object()) config_error("override key '" + key + "' does not name an object");
    target = &next;
    rest = rest.substr(dot + 1);
  }
  const auto base = cfg.base_dir;
  cfg = config_from_json(j);
  cfg.base_dir = base;
}

namespace {

std::filesystem::path resolve_path(const ExperimentConfig& cfg, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !cfg.base_dir.empty()) path = cfg.base_dir / path;
  return path;
}

}  // namespace

Experiment resolve(const ExperimentConfig& cfg) {
  Experiment exp;
  if (cfg.topology.rfind("file:", 0) == 0) {
    const auto path = resolve_path(cfg, cfg.topology.substr(5));
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::kIo, "cannot open edge list '" + path.string() + "'");
    exp.graph = read_edge_list(in);
  } else {
    exp.graph = parse_topology_spec(cfg.topology);
  }
  exp.stats = topology_stats(exp.graph, cfg.lg_override, cfg.lg_exact_cap);

  if (cfg.d_max_ns <= 0) config_error("d_max_ns must be positive");
  if (cfg.rho < 0.0 || cfg.rho >= 1.0) config_error("rho must lie in [0, 1)");
  const Drift rho = Drift::from_ratio(cfg.rho);
  const ParamMode mode = parse_param_mode(cfg.param_mode);
  SimParams p;
  if (mode == ParamMode::kExplicit) {
    p.d_max = cfg.d_max_ns;
    p.rho = rho;
    p.tau0 = cfg.tau0_ns;
    p.tau1 = cfg.tau1_ns;
    p.tau2 = cfg.tau2_ns;
    p.mode = mode;
    p.lg = exp.stats.longest_simple_path;
  } else {
    p = derive_params(exp.stats, cfg.d_max_ns, rho, mode);
  }
  p.d_min = cfg.d_min_ns;
  p.omission_p = cfg.omission_p;
  p.dmin_compensation = cfg.dmin_compensation;
  validate_params(p);
  exp.params = p;

  exp.horizon = cfg.horizon_ns > 0 ? cfg.horizon_ns
                                   : lemma5_bound(p) + cfg.horizon_periods * p.tau2;

  const DelayKind kind = parse_delay_kind(cfg.delay_model);
  if (kind == DelayKind::kAdversarialSchedule) {
    if (cfg.schedule_file.empty()) config_error("adversarial-schedule needs schedule_file");
    const auto path = resolve_path(cfg, cfg.schedule_file);
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::kIo, "cannot open schedule '" + path.string() + "'");
    exp.schedule = read_delay_schedule(in);
  }
  if (cfg.init_mode != "random-uniform" && cfg.init_mode != "adversarial") {
    config_error("unknown init_mode '" + cfg.init_mode + "'");
  }
  if (cfg.drift_mode != "uniform" && cfg.drift_mode != "adversarial" &&
      cfg.drift_mode != "zero") {
    config_error("unknown drift_mode '" + cfg.drift_mode + "'");
  }
  return exp;
}

Models make_models(const ExperimentConfig& cfg, const Experiment& exp, std::uint64_t seed) {
  const SimParams& p = exp.params;
  auto delay = [&] {
    switch (parse_delay_kind(cfg.delay_model)) {
      case DelayKind::kUniform: return DelayModel::uniform(p.d_min, p.d_max);
      case DelayKind::kFixed: return DelayModel::fixed(p.d_max);
      case DelayKind::kAdversarialMax: return DelayModel::adversarial_max(p.d_min, p.d_max);
      case DelayKind::kAdversarialSchedule:
        return DelayModel::adversarial_schedule(p.d_min, p.d_max, exp.schedule);
    }
    config_error("unknown delay_model");
  }();
  RngStream rng = derive_stream(seed, "drifts");
  std::vector<Drift> drifts;
  const std::size_t n = exp.graph.node_count();
  if (cfg.drift_mode == "uniform") {
    drifts = sample_drifts(n, p.rho, rng);
  } else if (cfg.drift_mode == "adversarial") {
    drifts = adversarial_drifts(n, p.rho, rng);
  } else {
    drifts.assign(n, Drift{});
  }
  return Models{std::move(delay), FaultModel{p.omission_p}, std::move(drifts)};
}

InitState make_init(const ExperimentConfig& cfg, const Experiment& exp, std::uint64_t seed) {
  RngStream rng = derive_stream(seed, "init");
  if (cfg.init_mode == "adversarial") {
    return InitState::random_adversarial(exp.graph, exp.params, rng);
  }
  return InitState::random_uniform(exp.graph.node_count(), exp.params, rng);
}

}  // namespace mepsim::cli
