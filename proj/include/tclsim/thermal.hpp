#pragma once

// First-order equivalent-thermal-parameter room model for a cooling AC.
//
// Units: ra in degC/kW, ca in kWh/degC (so ra*ca is in hours), powers in kW,
// times in seconds, temperatures in degC.

namespace tclsim {

struct ThermalParams {
  double ra = 3.0;
  double ca = 2.0;
  double cop = 2.75;
  double p_rate = 2.75;
  double t_lock = 180.0;
  double t_min_comfort = 23.0;
  double t_max_comfort = 27.0;

  /// Ra*Ca in seconds.
  double time_constant() const noexcept { return ra * ca * 3600.0; }

  bool operator==(const ThermalParams&) const = default;
};

/// Throws std::invalid_argument if any physical constant is out of range.
void validate(const ThermalParams& params);

struct PowerEnvelope {
  double p_min = 0.0;
  double p_max = 0.0;
  /// The comfort band could not be honoured; the interval was collapsed.
  bool infeasible = false;

  double width() const noexcept { return p_max - p_min; }
  bool contains(double p) const noexcept { return p >= p_min && p <= p_max; }
};

/// Exact solution of Ca dTa/dt = -(Ta - To)/Ra - P*COP over dt at constant
/// electrical power P and outdoor temperature To.
double advance_temperature(double ta, double to, double electrical_power, const ThermalParams& params,
                           double dt);

/// Constant electrical power that takes the room from ta_now to ta_next in dt.
/// Not clamped: can be negative or exceed the rated power.
double power_for_transition(double ta_now, double ta_next, double to, const ThermalParams& params, double dt);

/// Feasible average-power range for the next dt seconds keeping the end
/// temperature inside the comfort band, clamped to [0, p_rate].
PowerEnvelope power_envelope(double ta, double to, const ThermalParams& params, double dt);

}  // namespace tclsim
