#include "tclsim/semi_markov.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace tclsim {

namespace {

bool valid_probability(double u) { return u > 0.0 && u <= 1.0; }

// Lock countdown remainders at or below this fraction of a tick are zero.
constexpr double kLockEpsilon = 1e-9;

}  // namespace

std::string_view to_string(SwitchState s) noexcept
{
  switch (s) {
  case SwitchState::On: return "on";
  case SwitchState::Off: return "off";
  case SwitchState::OnLock: return "onlock";
  case SwitchState::OffLock: return "offlock";
  }
  return "?";
}

SwitchState parse_switch_state(std::string_view text)
{
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "on") return SwitchState::On;
  if (lower == "off") return SwitchState::Off;
  if (lower == "onlock") return SwitchState::OnLock;
  if (lower == "offlock") return SwitchState::OffLock;
  throw std::invalid_argument("unknown switch state '" + std::string(text) + "'");
}

std::string_view to_string(Regime r) noexcept
{
  switch (r) {
  case Regime::ForcedOff: return "forced_off";
  case Regime::LowDuty: return "u0=1";
  case Regime::LowerMid: return "u0=0.005";
  case Regime::UpperMid: return "u1=0.005";
  case Regime::HighDuty: return "u1=1";
  case Regime::ForcedOn: return "forced_on";
  }
  return "?";
}

ControlPair ControlPair::probabilistic(double u0, double u1)
{
  if (!valid_probability(u0) || !valid_probability(u1))
    throw std::domain_error("transition probabilities must lie in (0,1]");
  return {ControlMode::Probabilistic, u0, u1, false};
}

SojournStats sojourn_stats(double u0, double u1, double dt, double t_lock)
{
  if (!valid_probability(u0) || !valid_probability(u1))
    throw std::domain_error("sojourn_stats: u0 and u1 must lie in (0,1]");
  if (!(dt > 0.0)) throw std::domain_error("sojourn_stats: dt must be positive");
  if (!(t_lock >= 0.0)) throw std::domain_error("sojourn_stats: t_lock must be non-negative");

  SojournStats s;
  s.on = dt / u0;
  s.off = dt / u1;
  s.on_lock = t_lock;
  s.off_lock = t_lock;
  // Exponential sojourn: standard deviation equals the mean.
  s.sigma_on = s.on;
  s.sigma_off = s.off;
  return s;
}

StationaryDistribution stationary_distribution(const SojournStats& stats)
{
  const double total = stats.total();
  if (!(total > 0.0)) throw std::domain_error("stationary_distribution: sojourn sum must be positive");
  // The embedded jump chain is a deterministic 4-cycle, so every state has
  // embedded weight 1/4 and the occupancy is proportional to the mean sojourn.
  StationaryDistribution d;
  d.p = {stats.on / total, stats.off / total, stats.on_lock / total, stats.off_lock / total};
  return d;
}

double duty_ratio(const SojournStats& stats)
{
  const double total = stats.total();
  if (!(total > 0.0)) throw std::domain_error("duty_ratio: sojourn sum must be positive");
  return (stats.on + stats.on_lock) / total;
}

std::pair<double, double> regime_thresholds(const SolverTiming& t)
{
  const double high = (t.t_min + t.t_lock) / (t.t_min + t.t_lock + t.dt + t.t_lock);
  const double low = (t.dt + t.t_lock) / (t.dt + t.t_lock + t.t_min + t.t_lock);
  return {low, high};
}

Regime select_regime(double duty, const SolverTiming& timing)
{
  if (duty <= 0.0) return Regime::ForcedOff;
  if (duty >= 1.0) return Regime::ForcedOn;
  const auto [low, high] = regime_thresholds(timing);
  // Threshold points belong to the outer regimes, where the solved sojourn
  // equals t_min exactly.
  if (duty > 0.5) return duty >= high ? Regime::HighDuty : Regime::UpperMid;
  return duty <= low ? Regime::LowDuty : Regime::LowerMid;
}

ControlPair solve_controls(double target_power, double rated_power, const SolverTiming& timing)
{
  if (!(rated_power > 0.0)) throw std::domain_error("solve_controls: rated power must be positive");
  if (!(target_power >= 0.0) || target_power > rated_power)
    throw std::domain_error("solve_controls: target power outside [0, rated power]");
  if (!(timing.dt > 0.0) || !(timing.t_lock >= 0.0) || !(timing.t_min > 0.0))
    throw std::domain_error("solve_controls: invalid timing");

  const double d = target_power / rated_power;
  const double dt = timing.dt;
  const double lock = timing.t_lock;

  ControlPair out;
  out.mode = ControlMode::Probabilistic;

  // Clamp a solved probability into (0,1], flagging when it bites.
  auto to_probability = [&](double sojourn) {
    const double u = dt / sojourn;
    if (!(sojourn > 0.0) || u > 1.0) {
      out.clamped = true;
      return 1.0;
    }
    if (!(u > 0.0)) {
      out.clamped = true;
      return std::numeric_limits<double>::min();
    }
    return u;
  };

  switch (select_regime(d, timing)) {
  case Regime::ForcedOff: return ControlPair::forced_off();
  case Regime::ForcedOn: return ControlPair::forced_on();
  case Regime::HighDuty:
  case Regime::UpperMid: {
    out.u1 = select_regime(d, timing) == Regime::HighDuty ? 1.0 : kMidRegimeProbability;
    const double t_off = dt / out.u1;
    const double t_on = (d * t_off + (2.0 * d - 1.0) * lock) / (1.0 - d);
    out.u0 = to_probability(t_on);
    break;
  }
  case Regime::LowDuty:
  case Regime::LowerMid: {
    out.u0 = select_regime(d, timing) == Regime::LowDuty ? 1.0 : kMidRegimeProbability;
    const double t_on = dt / out.u0;
    const double t_off = ((1.0 - d) * t_on + (1.0 - 2.0 * d) * lock) / d;
    out.u1 = to_probability(t_off);
    break;
  }
  }
  return out;
}

StepResult step(SwitchState state, double lock_remaining, const ControlPair& controls, double dt,
                double t_lock, double draw) noexcept
{
  auto enter_lock = [&](SwitchState lock_state) -> StepResult {
    if (t_lock <= kLockEpsilon * dt) return {successor(lock_state), 0.0};
    return {lock_state, t_lock};
  };

  switch (state) {
  case SwitchState::On: {
    bool leave = false;
    switch (controls.mode) {
    case ControlMode::Probabilistic: leave = draw < controls.u0; break;
    case ControlMode::ForcedOn: leave = false; break;
    case ControlMode::ForcedOff: leave = true; break;
    }
    return leave ? enter_lock(SwitchState::OffLock) : StepResult{state, 0.0};
  }
  case SwitchState::Off: {
    bool leave = false;
    switch (controls.mode) {
    case ControlMode::Probabilistic: leave = draw < controls.u1; break;
    case ControlMode::ForcedOn: leave = true; break;
    case ControlMode::ForcedOff: leave = false; break;
    }
    return leave ? enter_lock(SwitchState::OnLock) : StepResult{state, 0.0};
  }
  case SwitchState::OnLock:
  case SwitchState::OffLock: {
    const double remaining = lock_remaining - dt;
    if (remaining <= kLockEpsilon * dt) return {successor(state), 0.0};
    return {state, remaining};
  }
  }
  return {state, lock_remaining};
}

}  // namespace tclsim
