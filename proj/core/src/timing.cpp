#include "mepsim/timing.hpp"

#include <cmath>
#include <istream>
#include <sstream>

#include "mepsim/error.hpp"

namespace mepsim {

namespace {

__extension__ using Wide = __int128;
constexpr Wide kScale = Drift::kScale;

TimeNs ceil_div(Wide num, Wide den) {
  // num >= 0, den > 0
  return static_cast<TimeNs>((num + den - 1) / den);
}

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorKind::kParameter, message);
}

}  // namespace

Drift Drift::from_ratio(double ratio) {
  return Drift(static_cast<std::int64_t>(std::llround(ratio * static_cast<double>(kScale))));
}

std::string to_string(ParamMode mode) {
  switch (mode) {
    case ParamMode::kPaperSim: return "paper-sim";
    case ParamMode::kStrictConstraint: return "strict-constraint";
    case ParamMode::kExplicit: return "explicit";
  }
  return "unknown";
}

ParamMode parse_param_mode(const std::string& text) {
  if (text == "paper-sim") return ParamMode::kPaperSim;
  if (text == "strict-constraint" || text == "strict") return ParamMode::kStrictConstraint;
  if (text == "explicit") return ParamMode::kExplicit;
  throw Error(ErrorKind::kConfiguration, "unknown param_mode '" + text + "'");
}

SimParams derive_params(const TopologyStats& stats, TimeNs d, Drift rho, ParamMode mode) {
  require(d > 0, "d must be positive");
  require(rho.ppb() >= 0 && rho.ppb() < Drift::kScale, "rho must lie in [0, 1)");

  const Wide up = kScale + rho.ppb();
  const Wide down = kScale - rho.ppb();
  const Wide lg = static_cast<Wide>(stats.longest_simple_path);

  SimParams p;
  p.d_min = 0;
  p.d_max = d;
  p.rho = rho;
  p.mode = mode;
  p.lg = stats.longest_simple_path;
  p.tau0 = ceil_div(up * (lg + 2) * d, kScale);
  // 3(1+rho)(tau0/(1-rho) + d) = 3 up (tau0 S + d down) / (down S)
  p.tau2 = ceil_div(3 * up * (p.tau0 * kScale + static_cast<Wide>(d) * down), down * kScale);
  p.tau1 = ceil_div(static_cast<Wide>(p.tau2) * kScale, up);

  if (mode == ParamMode::kStrictConstraint && !satisfies_strict_constraint(p, p.lg)) {
    throw Error(ErrorKind::kParameter,
                "derived parameters violate (1-rho)tau1/3 > tau0 > (1+rho)(L_G+1)d");
  }
  return p;
}

bool satisfies_strict_constraint(const SimParams& p, std::size_t lg) {
  const Wide up = kScale + p.rho.ppb();
  const Wide down = kScale - p.rho.ppb();
  const bool upper = down * p.tau1 > 3 * static_cast<Wide>(p.tau0) * kScale;
  const bool lower =
      static_cast<Wide>(p.tau0) * kScale > up * (static_cast<Wide>(lg) + 1) * p.d_max;
  return upper && lower;
}

void validate_params(const SimParams& p) {
  require(p.d_min >= 0, "d_min must be >= 0");
  require(p.d_min <= p.d_max, "d_min must not exceed d_max");
  require(p.rho.ppb() >= 0 && p.rho.ppb() < Drift::kScale, "rho must lie in [0, 1)");
  require(p.tau0 > 0, "tau0 must be positive");
  require(p.tau2 > p.tau0, "tau2 must exceed tau0");
  require(p.tau1 > 0, "tau1 must be positive");
  require(p.omission_p >= 0.0 && p.omission_p <= 1.0, "omission_p must lie in [0, 1]");
  require(!p.dmin_compensation || p.tau2 - p.d_min > p.tau0,
          "d_min compensation would fire the liveness timer before restoration");
  if (p.mode == ParamMode::kStrictConstraint) {
    require(satisfies_strict_constraint(p, p.lg),
            "parameters violate (1-rho)tau1/3 > tau0 > (1+rho)(L_G+1)d_max with L_G=" +
                std::to_string(p.lg));
  }
}

TimeNs local_to_real(TimeNs duration_local, Drift drift) {
  // round-half-up(L S / (S + drift)) = floor((2 L S + (S + drift)) / (2 (S + drift)))
  const Wide den = kScale + drift.ppb();
  return static_cast<TimeNs>((2 * static_cast<Wide>(duration_local) * kScale + den) / (2 * den));
}

TimeNs stretch_by_slow_clock(TimeNs t, Drift rho) {
  return ceil_div(static_cast<Wide>(t) * kScale, kScale - rho.ppb());
}

TimeNs liveness_bound(const SimParams& p) { return stretch_by_slow_clock(p.tau2, p.rho); }

TimeNs lemma5_bound(const SimParams& p) {
  return stretch_by_slow_clock(p.tau2 + p.tau0, p.rho) + p.d_max + p.tau1;
}

// ---------------------------------------------------------------------------

std::string to_string(DelayKind kind) {
  switch (kind) {
    case DelayKind::kUniform: return "uniform";
    case DelayKind::kFixed: return "fixed";
    case DelayKind::kAdversarialMax: return "adversarial-max";
    case DelayKind::kAdversarialSchedule: return "adversarial-schedule";
  }
  return "unknown";
}

DelayKind parse_delay_kind(const std::string& text) {
  if (text == "uniform") return DelayKind::kUniform;
  if (text == "fixed") return DelayKind::kFixed;
  if (text == "adversarial-max") return DelayKind::kAdversarialMax;
  if (text == "adversarial-schedule") return DelayKind::kAdversarialSchedule;
  throw Error(ErrorKind::kConfiguration, "unknown delay_model '" + text + "'");
}

DelaySchedule read_delay_schedule(std::istream& in) {
  DelaySchedule schedule;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::int64_t src = 0;
    std::int64_t dst = 0;
    TimeNs delay = 0;
    if (!(fields >> src)) continue;
    if (!(fields >> dst >> delay) || src < 0 || dst < 0) {
      throw Error(ErrorKind::kParse, "delay schedule line " + std::to_string(line_no) +
                                         ": expected 'src dst delay_ns'");
    }
    schedule[{static_cast<CellId>(src), static_cast<CellId>(dst)}].push_back(delay);
  }
  return schedule;
}

DelayModel::DelayModel(DelayKind kind, TimeNs d_min, TimeNs d_max)
    : kind_(kind), d_min_(d_min), d_max_(d_max) {
  require(d_min >= 0 && d_min <= d_max, "delay bounds must satisfy 0 <= d_min <= d_max");
}

DelayModel DelayModel::uniform(TimeNs d_min, TimeNs d_max) {
  return DelayModel(DelayKind::kUniform, d_min, d_max);
}

DelayModel DelayModel::fixed(TimeNs d) { return DelayModel(DelayKind::kFixed, d, d); }

DelayModel DelayModel::adversarial_max(TimeNs d_min, TimeNs d_max) {
  return DelayModel(DelayKind::kAdversarialMax, d_min, d_max);
}

DelayModel DelayModel::adversarial_schedule(TimeNs d_min, TimeNs d_max, DelaySchedule schedule) {
  DelayModel model(DelayKind::kAdversarialSchedule, d_min, d_max);
  for (const auto& [edge, delays] : schedule) {
    for (TimeNs delay : delays) {
      require(delay >= d_min && delay <= d_max,
              "scheduled delay " + std::to_string(delay) + " on " + std::to_string(edge.first) +
                  "->" + std::to_string(edge.second) + " outside [d_min, d_max]");
    }
  }
  model.schedule_ = std::move(schedule);
  return model;
}

TimeNs DelayModel::sample(CellId from, CellId to, RngStream& rng) {
  switch (kind_) {
    case DelayKind::kUniform: return rng.uniform_int(d_min_, d_max_);
    case DelayKind::kFixed:
    case DelayKind::kAdversarialMax: return d_max_;
    case DelayKind::kAdversarialSchedule: {
      const auto key = std::make_pair(from, to);
      const auto it = schedule_.find(key);
      std::size_t& next = cursor_[key];
      if (it == schedule_.end() || next >= it->second.size()) {
        throw Error(ErrorKind::kScheduleUnderrun, "delay schedule exhausted on edge " +
                                                      std::to_string(from) + "->" +
                                                      std::to_string(to));
      }
      return it->second[next++];
    }
  }
  return d_max_;
}

std::vector<Drift> sample_drifts(std::size_t n, Drift rho, RngStream& rng) {
  std::vector<Drift> drifts;
  drifts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    drifts.push_back(Drift::from_ppb(rng.uniform_int(-rho.ppb(), rho.ppb())));
  }
  return drifts;
}

std::vector<Drift> adversarial_drifts(std::size_t n, Drift rho, RngStream& rng) {
  std::vector<Drift> drifts;
  drifts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    drifts.push_back(rng.uniform_int(0, 1) == 0 ? -rho : rho);
  }
  return drifts;
}

}  // namespace mepsim
