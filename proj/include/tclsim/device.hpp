#pragma once

// One air-conditioner: the switching machine gates the thermal model.
// Control periods are piecewise constant: begin_period solves the controls
// from the dispatched target, tick advances one machine step, end_period
// reports the envelope for the next period.

#include <cstdint>
#include <utility>

#include "tclsim/semi_markov.hpp"
#include "tclsim/thermal.hpp"

namespace tclsim {

struct DeviceState {
  SwitchState switch_state = SwitchState::Off;
  double lock_remaining = 0.0;
  double ta = 25.0;

  bool operator==(const DeviceState&) const = default;
};

struct DeviceRecord {
  double power = 0.0;
  double ta = 0.0;
  SwitchState switch_state = SwitchState::Off;
  std::int64_t tick = 0;

  bool operator==(const DeviceRecord&) const = default;
};

/// Controls for the coming period. Throws std::domain_error if the target is
/// outside [0, p_rate].
ControlPair begin_period(const DeviceState& state, double target_power, const ThermalParams& params,
                         double dt_tick, double t_min);

struct TickOptions {
  /// Force a switch once the room leaves the comfort band (still honouring
  /// the lock). Off by default.
  bool thermostat_override = false;
};

/// One tick: machine transition first, then a thermal advance at the
/// post-transition power.
std::pair<DeviceState, DeviceRecord> tick(const DeviceState& state, const ControlPair& controls, double to,
                                          const ThermalParams& params, double dt_tick, double draw,
                                          std::int64_t tick_index = 0, TickOptions options = {});

PowerEnvelope end_period(const DeviceState& state, double to_next, const ThermalParams& params,
                         double dt_period);

}  // namespace tclsim
