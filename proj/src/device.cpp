#include "tclsim/device.hpp"

namespace tclsim {

ControlPair begin_period(const DeviceState&, double target_power, const ThermalParams& params, double dt_tick,
                         double t_min)
{
  return solve_controls(target_power, params.p_rate, SolverTiming{dt_tick, params.t_lock, t_min});
}

std::pair<DeviceState, DeviceRecord> tick(const DeviceState& state, const ControlPair& controls, double to,
                                          const ThermalParams& params, double dt_tick, double draw,
                                          std::int64_t tick_index, TickOptions options)
{
  ControlPair effective = controls;
  if (options.thermostat_override) {
    if (state.switch_state == SwitchState::Off && state.ta > params.t_max_comfort)
      effective = ControlPair::forced_on();
    else if (state.switch_state == SwitchState::On && state.ta < params.t_min_comfort)
      effective = ControlPair::forced_off();
  }

  const StepResult next = step(state.switch_state, state.lock_remaining, effective, dt_tick, params.t_lock, draw);
  const double power = is_powered(next.state) ? params.p_rate : 0.0;

  DeviceState out{next.state, next.lock_remaining, advance_temperature(state.ta, to, power, params, dt_tick)};
  return {out, DeviceRecord{power, out.ta, out.switch_state, tick_index}};
}

PowerEnvelope end_period(const DeviceState& state, double to_next, const ThermalParams& params, double dt_period)
{
  return power_envelope(state.ta, to_next, params, dt_period);
}

}  // namespace tclsim
