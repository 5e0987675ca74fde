#pragma once

// Four-state ON/OFF switching machine with lock states, its analytic
// sojourn/stationary characterization and the duty-ratio -> transition
// probability solver.

#include <array>
#include <string_view>
#include <utility>

namespace tclsim {

enum class SwitchState : int { On = 1, Off = 2, OnLock = 3, OffLock = 4 };

/// True for the states in which the compressor draws rated power.
constexpr bool is_powered(SwitchState s) noexcept
{
  return s == SwitchState::On || s == SwitchState::OnLock;
}

constexpr bool is_locked(SwitchState s) noexcept
{
  return s == SwitchState::OnLock || s == SwitchState::OffLock;
}

/// Zero-based index in the order On, Off, OnLock, OffLock.
constexpr std::size_t state_index(SwitchState s) noexcept
{
  return static_cast<std::size_t>(s) - 1;
}

/// The unique successor in the cycle On -> OffLock -> Off -> OnLock -> On.
constexpr SwitchState successor(SwitchState s) noexcept
{
  switch (s) {
  case SwitchState::On: return SwitchState::OffLock;
  case SwitchState::OffLock: return SwitchState::Off;
  case SwitchState::Off: return SwitchState::OnLock;
  case SwitchState::OnLock: return SwitchState::On;
  }
  return s;
}

std::string_view to_string(SwitchState s) noexcept;
/// Parses "on", "off", "onlock", "offlock" (case-insensitive). Throws std::invalid_argument.
SwitchState parse_switch_state(std::string_view text);

enum class ControlMode { Probabilistic, ForcedOn, ForcedOff };

/// Per-tick leave probabilities for On (u0) and Off (u1), or a forced mode.
struct ControlPair {
  ControlMode mode = ControlMode::Probabilistic;
  double u0 = 1.0;
  double u1 = 1.0;
  /// Set when a solved probability fell outside (0,1] and was clamped.
  bool clamped = false;

  static ControlPair probabilistic(double u0, double u1);
  static ControlPair forced_on() noexcept { return {ControlMode::ForcedOn, 0.0, 0.0, false}; }
  static ControlPair forced_off() noexcept { return {ControlMode::ForcedOff, 0.0, 0.0, false}; }

  bool operator==(const ControlPair&) const = default;
};

/// Mean sojourn times in seconds, plus the std devs of the two random sojourns.
struct SojournStats {
  double on = 0.0;
  double off = 0.0;
  double on_lock = 0.0;
  double off_lock = 0.0;
  double sigma_on = 0.0;
  double sigma_off = 0.0;

  double total() const noexcept { return on + off + on_lock + off_lock; }
};

/// Long-run occupancy, indexed like state_index().
struct StationaryDistribution {
  std::array<double, 4> p{};

  double operator[](SwitchState s) const noexcept { return p[state_index(s)]; }
};

SojournStats sojourn_stats(double u0, double u1, double dt, double t_lock);

StationaryDistribution stationary_distribution(const SojournStats& stats);

/// Fraction of time powered: (T_on + T_onlock) / sum of all sojourns.
double duty_ratio(const SojournStats& stats);

/// Tick length, lock time and the minimum mean sojourn the solver must respect.
struct SolverTiming {
  double dt = 2.0;
  double t_lock = 180.0;
  double t_min = 60.0;
};

/// Probability the solver pins in the two middle regimes.
inline constexpr double kMidRegimeProbability = 0.005;

enum class Regime {
  ForcedOff,
  LowDuty,   // u0 = 1, u1 solved
  LowerMid,  // u0 = 0.005, u1 solved
  UpperMid,  // u1 = 0.005, u0 solved
  HighDuty,  // u1 = 1, u0 solved
  ForcedOn,
};

std::string_view to_string(Regime r) noexcept;

/// Duty thresholds (low, high) separating the outer and middle regimes.
std::pair<double, double> regime_thresholds(const SolverTiming& timing);

Regime select_regime(double duty, const SolverTiming& timing);

/// Inverts a target average power into a ControlPair whose stationary duty
/// ratio equals target_power / rated_power.
///
/// One probability is pinned by the regime; the other is obtained from the
/// closed-form inverse of duty_ratio. The outer regimes keep the solved
/// sojourn at or above timing.t_min. Throws std::domain_error when the target
/// lies outside [0, rated_power] or the timing is invalid.
ControlPair solve_controls(double target_power, double rated_power, const SolverTiming& timing);

/// Result of one machine tick.
struct StepResult {
  SwitchState state;
  double lock_remaining;
};

/// Advances the machine by one tick of length dt.
///
/// `draw` is a uniform variate on [0,1) consumed only in On/Off. Lock states
/// count down by dt and release once the remainder is (numerically) zero,
/// so a lock lasts ceil(t_lock/dt) ticks.
StepResult step(SwitchState state, double lock_remaining, const ControlPair& controls, double dt,
                double t_lock, double draw) noexcept;

}  // namespace tclsim
