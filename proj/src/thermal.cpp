#include "tclsim/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tclsim {

void validate(const ThermalParams& p)
{
  if (!(p.ra > 0.0)) throw std::invalid_argument("thermal resistance must be positive");
  if (!(p.ca > 0.0)) throw std::invalid_argument("thermal capacitance must be positive");
  if (!(p.cop > 0.0)) throw std::invalid_argument("COP must be positive");
  if (!(p.p_rate > 0.0)) throw std::invalid_argument("rated power must be positive");
  if (!(p.t_lock >= 0.0)) throw std::invalid_argument("lock time must be non-negative");
  if (!(p.t_min_comfort < p.t_max_comfort))
    throw std::invalid_argument("comfort band must satisfy t_min_comfort < t_max_comfort");
}

double advance_temperature(double ta, double to, double electrical_power, const ThermalParams& params,
                           double dt)
{
  const double equilibrium = to - params.ra * electrical_power * params.cop;
  const double one_minus_decay = -std::expm1(-dt / params.time_constant());
  return ta + (equilibrium - ta) * one_minus_decay;
}

double power_for_transition(double ta_now, double ta_next, double to, const ThermalParams& params, double dt)
{
  // ta_next = ta_now + (to - ra*Q - ta_now)*g with g = 1 - exp(-dt/(ra*ca)),
  // solved for Q = P*COP. expm1 keeps g accurate when dt << ra*ca.
  const double g = -std::expm1(-dt / params.time_constant());
  const double q = ((to - ta_now) * g + ta_now - ta_next) / (params.ra * g);
  return q / params.cop;
}

PowerEnvelope power_envelope(double ta, double to, const ThermalParams& params, double dt)
{
  // Less cooling ends warmer: the warm band edge bounds the power from below.
  const double raw_min = power_for_transition(ta, params.t_max_comfort, to, params, dt);
  const double raw_max = power_for_transition(ta, params.t_min_comfort, to, params, dt);

  PowerEnvelope env;
  env.p_min = std::max(raw_min, 0.0);
  env.p_max = std::min(raw_max, params.p_rate);
  if (env.p_min > env.p_max) {
    const double point = std::clamp(env.p_max, 0.0, params.p_rate);
    env = {point, point, true};
  }
  return env;
}

}  // namespace tclsim
