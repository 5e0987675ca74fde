#pragma once

// Population orchestration. Each control period the aggregator dispatches
// a target to every device, the devices tick independently, and at the
// period boundary each device uploads its power envelope.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "tclsim/device.hpp"
#include "tclsim/outdoor.hpp"
#include "tclsim/semi_markov.hpp"
#include "tclsim/thermal.hpp"

namespace tclsim {

class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Every device runs the same (u0, u1) for the whole horizon.
struct FixedControls {
  double u0 = 0.0075;
  double u1 = 0.0012;
};

/// Each device's target is drawn uniformly from its uploaded envelope.
struct RandomEnvelope {};

/// A cluster-level target per period, split across devices in proportion to
/// their envelope widths.
struct TargetTrace {
  std::vector<double> targets_kw;
};

using DispatchMode = std::variant<FixedControls, RandomEnvelope, TargetTrace>;

struct InitialStatePolicy {
  enum class Kind { Fixed, Uniform };
  Kind kind = Kind::Fixed;
  SwitchState switch_state = SwitchState::Off;
  /// Unset means the midpoint of each device's comfort band.
  std::optional<double> ta;
};

struct SoaBinning {
  double low = -0.25;
  double high = 1.25;
  std::size_t bins = 200;
};

struct ClusterConfig {
  std::size_t n_devices = 1000;
  double dt_tick = 2.0;
  double dt_period = 1800.0;
  double horizon = 86400.0;
  std::uint64_t seed = 1;
  DispatchMode dispatch = RandomEnvelope{};
  double t_min = 60.0;
  InitialStatePolicy initial{};
  bool thermostat_override = false;
  SoaBinning soa_binning{};
  /// Worker threads; 0 picks the hardware concurrency. Results do not depend on it.
  unsigned threads = 0;
  /// Devices whose per-tick records are kept in ClusterMetrics::traces.
  std::vector<std::size_t> traced_devices;
};

/// Throws ConfigError describing the first violated constraint.
void validate(const ClusterConfig& config);
std::int64_t ticks_per_period(const ClusterConfig& config);
std::int64_t period_count(const ClusterConfig& config);

/// Fixed-bin SOA histogram with exact in-band tallies.
struct SoaHistogram {
  /// Tolerance zone around [0,1] counted by fraction_beyond_margin().
  static constexpr double kMargin = 0.1;

  double low = -0.25;
  double high = 1.25;
  std::vector<std::uint64_t> counts;
  std::uint64_t below = 0;
  std::uint64_t above = 0;
  std::uint64_t total = 0;
  std::uint64_t inside_unit = 0;
  std::uint64_t beyond_margin = 0;

  SoaHistogram() = default;
  explicit SoaHistogram(const SoaBinning& binning);

  void add(double value) noexcept;
  void merge(const SoaHistogram& other);

  double bin_width() const noexcept { return (high - low) / static_cast<double>(counts.size()); }
  /// Probability density per bin (count / (total * width)); out-of-range samples count in total.
  std::vector<double> density() const;
  double fraction_inside_unit() const noexcept;
  double fraction_beyond_margin() const noexcept;

  bool operator==(const SoaHistogram&) const = default;
};

struct PeriodMetrics {
  double target_kw = 0.0;
  /// Period-average realized cluster power.
  double actual_kw = 0.0;
  double error = 0.0;
  /// Standard deviation of `error` if every device were an independent
  /// Bernoulli(d_i) draw at its target duty d_i: sqrt(sum p_i^2 d_i (1-d_i)) / sum p_i.
  double error_sigma = 0.0;
  std::size_t infeasible_envelopes = 0;
  std::size_t targets_outside_envelope = 0;
  std::size_t clamped_controls = 0;

  bool operator==(const PeriodMetrics&) const = default;
};

struct ClusterMetrics {
  double dt_tick = 2.0;
  std::int64_t ticks_per_period = 0;
  std::size_t n_devices = 0;
  double rated_total = 0.0;
  /// occupancy[t] is the state mix after tick t+1, in state_index order.
  std::vector<std::array<double, 4>> occupancy;
  /// Instantaneous cluster power after each tick, kW.
  std::vector<double> aggregate_power;
  std::vector<PeriodMetrics> periods;
  SoaHistogram soa;
  /// One record per tick for each entry of ClusterConfig::traced_devices. Not serialized.
  std::vector<std::vector<DeviceRecord>> traces;

  bool operator==(const ClusterMetrics&) const = default;
};

/// Uniform draw in each envelope from the device's dispatch substream.
std::vector<double> dispatch_random_targets(std::span<const PowerEnvelope> envelopes, std::uint64_t seed,
                                            std::uint64_t period);

/// Splits a cluster total across devices: p_min + alpha * width with one
/// common alpha, saturating at the summed envelope bounds.
std::vector<double> distribute_cluster_target(std::span<const PowerEnvelope> envelopes, double total_kw);

/// Indoor temperature normalized to the comfort band: 0 at the cool edge, 1 at the warm edge.
double soa(double ta, const ThermalParams& params);

/// (sum actual - sum target) / sum rated. Throws std::domain_error on empty
/// or mismatched inputs.
double tracking_error(std::span<const double> actual, std::span<const double> target,
                      std::span<const double> rated);

std::vector<DeviceState> initial_states(const ClusterConfig& config, std::span<const ThermalParams> population);

ClusterMetrics run(const ClusterConfig& config, std::span<const ThermalParams> population,
                   const OutdoorProfile& outdoor);

/// Per-state standard deviation of the occupancy series from `from_tick` on.
std::array<double, 4> occupancy_fluctuation_std(const ClusterMetrics& metrics, std::size_t from_tick);

}  // namespace tclsim
