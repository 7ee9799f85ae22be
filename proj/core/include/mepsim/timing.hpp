#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mepsim/rng.hpp"
#include "mepsim/topology.hpp"

namespace mepsim {

/// Real or local time, integer nanoseconds.
using TimeNs = std::int64_t;

/// Dimensionless clock drift rate, stored exactly in parts per billion so that
/// every clock conversion is exact integer arithmetic.
class Drift {
 public:
  static constexpr std::int64_t kScale = 1'000'000'000;

  constexpr Drift() = default;
  static constexpr Drift from_ppb(std::int64_t ppb) { return Drift(ppb); }
  /// Rounds to the nearest part per billion.
  static Drift from_ratio(double ratio);

  constexpr std::int64_t ppb() const noexcept { return ppb_; }
  double ratio() const noexcept { return static_cast<double>(ppb_) / kScale; }
  constexpr Drift operator-() const noexcept { return Drift(-ppb_); }

  friend constexpr auto operator<=>(Drift, Drift) = default;

 private:
  constexpr explicit Drift(std::int64_t ppb) : ppb_(ppb) {}
  std::int64_t ppb_ = 0;
};

enum class ParamMode { kPaperSim, kStrictConstraint, kExplicit };

std::string to_string(ParamMode mode);
ParamMode parse_param_mode(const std::string& text);

/// Protocol time parameters. tau0 and tau2 are thresholds in local ticks;
/// tau1 and the delay bounds are real nanoseconds.
struct SimParams {
  TimeNs d_min = 0;
  TimeNs d_max = 0;
  Drift rho;
  TimeNs tau0 = 0;
  TimeNs tau1 = 0;
  TimeNs tau2 = 0;
  double omission_p = 0.0;
  bool dmin_compensation = false;
  ParamMode mode = ParamMode::kPaperSim;
  /// L_G the parameters were derived or checked against.
  std::size_t lg = 0;

  friend bool operator==(const SimParams&, const SimParams&) = default;
};

/// tau0 = (1+rho)(L_G+2)d, tau2 = 3(1+rho)(tau0/(1-rho)+d), tau1 = tau2/(1+rho),
/// each rounded up to whole nanoseconds. Strict mode also enforces
/// (1-rho)tau1/3 > tau0 > (1+rho)(L_G+1)d.
SimParams derive_params(const TopologyStats& stats, TimeNs d, Drift rho, ParamMode mode);

/// Exact integer evaluation of (1-rho)tau1/3 > tau0 > (1+rho)(L_G+1)d_max.
bool satisfies_strict_constraint(const SimParams& p, std::size_t lg);

/// Structural checks every parameter set must pass; strict mode additionally
/// checks the inequality chain against p.lg. Throws Error(kParameter).
void validate_params(const SimParams& p);

/// Real duration of `duration_local` ticks on a clock with the given drift:
/// round-half-up of duration / (1 + drift).
TimeNs local_to_real(TimeNs duration_local, Drift drift);

/// ceil(t / (1 - rho)).
TimeNs stretch_by_slow_clock(TimeNs t, Drift rho);

/// Per-cell liveness bound tau2 / (1 - rho), rounded up.
TimeNs liveness_bound(const SimParams& p);

/// Compliance instant t2 = (tau2 + tau0)/(1 - rho) + d + tau1 after which the
/// trace must form a periodic MEP process within one further tau2.
TimeNs lemma5_bound(const SimParams& p);

// ---------------------------------------------------------------------------
// Delay, drift and fault models

enum class DelayKind { kUniform, kFixed, kAdversarialMax, kAdversarialSchedule };

std::string to_string(DelayKind kind);
DelayKind parse_delay_kind(const std::string& text);

/// Per directed edge (src, dst) sequence of delays, consumed in order.
using DelaySchedule = std::map<std::pair<CellId, CellId>, std::vector<TimeNs>>;

/// Schedule file: lines "src dst delay_ns"; '#' starts a comment.
DelaySchedule read_delay_schedule(std::istream& in);

class DelayModel {
 public:
  static DelayModel uniform(TimeNs d_min, TimeNs d_max);
  static DelayModel fixed(TimeNs d);
  static DelayModel adversarial_max(TimeNs d_min, TimeNs d_max);
  static DelayModel adversarial_schedule(TimeNs d_min, TimeNs d_max, DelaySchedule schedule);

  DelayKind kind() const noexcept { return kind_; }
  TimeNs d_min() const noexcept { return d_min_; }
  TimeNs d_max() const noexcept { return d_max_; }

  /// Delay for the next signal on directed edge from -> to. Always within
  /// [d_min, d_max]. Schedules throw Error(kScheduleUnderrun) when exhausted.
  TimeNs sample(CellId from, CellId to, RngStream& rng);

 private:
  DelayModel(DelayKind kind, TimeNs d_min, TimeNs d_max);

  DelayKind kind_;
  TimeNs d_min_;
  TimeNs d_max_;
  DelaySchedule schedule_;
  std::map<std::pair<CellId, CellId>, std::size_t> cursor_;
};

/// Receiver-side omission of internal triggers; external triggers and
/// restorations are never affected.
struct FaultModel {
  double omission_p = 0.0;

  bool omit(RngStream& rng) const {
    if (omission_p <= 0.0) return false;
    if (omission_p >= 1.0) return true;
    return rng.bernoulli(omission_p);
  }
};

/// Constant per-cell drift drawn uniformly from [-rho, +rho].
std::vector<Drift> sample_drifts(std::size_t n, Drift rho, RngStream& rng);
/// Constant per-cell drift of exactly -rho or +rho.
std::vector<Drift> adversarial_drifts(std::size_t n, Drift rho, RngStream& rng);

}  // namespace mepsim
