#include "tclsim/aggregator.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "tclsim/numeric.hpp"
#include "tclsim/rng.hpp"

namespace tclsim {

namespace {

// Ratio a/b must be an integer within this relative slack.
std::int64_t integral_ratio(double a, double b, const char* message)
{
  const double r = a / b;
  const double rounded = std::round(r);
  if (std::fabs(r - rounded) > 1e-9 * std::max(1.0, std::fabs(r))) throw ConfigError(message);
  return static_cast<std::int64_t>(rounded);
}

struct PeriodPlan {
  std::vector<ControlPair> controls;
  std::vector<double> targets;
};

PeriodPlan plan_period(const ClusterConfig& config, std::span<const ThermalParams> population,
                       std::span<const DeviceState> states, std::span<const PowerEnvelope> envelopes,
                       std::int64_t period)
{
  const std::size_t n = population.size();
  PeriodPlan plan;
  plan.controls.resize(n);

  if (const auto* fixed = std::get_if<FixedControls>(&config.dispatch)) {
    const ControlPair pair = ControlPair::probabilistic(fixed->u0, fixed->u1);
    plan.targets.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      plan.controls[i] = pair;
      const double d = duty_ratio(sojourn_stats(fixed->u0, fixed->u1, config.dt_tick, population[i].t_lock));
      plan.targets[i] = d * population[i].p_rate;
    }
    return plan;
  }

  if (std::holds_alternative<RandomEnvelope>(config.dispatch))
    plan.targets = dispatch_random_targets(envelopes, config.seed, static_cast<std::uint64_t>(period));
  else
    plan.targets = distribute_cluster_target(
        envelopes, std::get<TargetTrace>(config.dispatch).targets_kw[static_cast<std::size_t>(period)]);

  for (std::size_t i = 0; i < n; ++i)
    plan.controls[i] = begin_period(states[i], plan.targets[i], population[i], config.dt_tick, config.t_min);
  return plan;
}

}  // namespace

void validate(const ClusterConfig& c)
{
  if (c.n_devices == 0) throw ConfigError("n_devices must be positive");
  if (!(c.dt_tick > 0.0)) throw ConfigError("dt_tick must be positive");
  if (!(c.dt_period > 0.0)) throw ConfigError("dt_period must be positive");
  if (!(c.horizon >= 0.0)) throw ConfigError("horizon must be non-negative");
  if (!(c.t_min > 0.0)) throw ConfigError("t_min must be positive");
  if (ticks_per_period(c) < 1) throw ConfigError("dt_period is shorter than dt_tick");
  const auto periods = period_count(c);
  for (auto i : c.traced_devices)
    if (i >= c.n_devices) throw ConfigError("traced device index out of range");
  if (!(c.soa_binning.high > c.soa_binning.low) || c.soa_binning.bins == 0)
    throw ConfigError("soa binning needs high > low and at least one bin");

  if (const auto* fixed = std::get_if<FixedControls>(&c.dispatch)) {
    if (!(fixed->u0 > 0.0 && fixed->u0 <= 1.0) || !(fixed->u1 > 0.0 && fixed->u1 <= 1.0))
      throw ConfigError("fixed controls need u0, u1 in (0,1]");
  }
  if (const auto* trace = std::get_if<TargetTrace>(&c.dispatch)) {
    if (static_cast<std::int64_t>(trace->targets_kw.size()) < periods)
      throw ConfigError("target trace has fewer entries than control periods");
    for (double t : trace->targets_kw)
      if (!(t >= 0.0)) throw ConfigError("target trace entries must be non-negative");
  }
}

std::int64_t ticks_per_period(const ClusterConfig& c)
{
  return integral_ratio(c.dt_period, c.dt_tick, "dt_period is not an integer multiple of dt_tick");
}

std::int64_t period_count(const ClusterConfig& c)
{
  return integral_ratio(c.horizon, c.dt_period, "horizon is not an integer multiple of dt_period");
}

SoaHistogram::SoaHistogram(const SoaBinning& b) : low(b.low), high(b.high), counts(b.bins, 0) {}

void SoaHistogram::add(double value) noexcept
{
  ++total;
  if (value >= 0.0 && value <= 1.0) ++inside_unit;
  if (value < -kMargin || value > 1.0 + kMargin) ++beyond_margin;
  if (value < low) {
    ++below;
    return;
  }
  if (value >= high) {
    ++above;
    return;
  }
  auto bin = static_cast<std::size_t>((value - low) / bin_width());
  counts[std::min(bin, counts.size() - 1)]++;
}

void SoaHistogram::merge(const SoaHistogram& other)
{
  if (other.counts.size() != counts.size() || other.low != low || other.high != high)
    throw std::invalid_argument("histogram binning mismatch");
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  below += other.below;
  above += other.above;
  total += other.total;
  inside_unit += other.inside_unit;
  beyond_margin += other.beyond_margin;
}

std::vector<double> SoaHistogram::density() const
{
  std::vector<double> d(counts.size(), 0.0);
  if (total == 0) return d;
  const double norm = static_cast<double>(total) * bin_width();
  for (std::size_t i = 0; i < counts.size(); ++i) d[i] = static_cast<double>(counts[i]) / norm;
  return d;
}

double SoaHistogram::fraction_inside_unit() const noexcept
{
  return total == 0 ? 0.0 : static_cast<double>(inside_unit) / static_cast<double>(total);
}

double SoaHistogram::fraction_beyond_margin() const noexcept
{
  return total == 0 ? 0.0 : static_cast<double>(beyond_margin) / static_cast<double>(total);
}

std::vector<double> dispatch_random_targets(std::span<const PowerEnvelope> envelopes, std::uint64_t seed,
                                            std::uint64_t period)
{
  std::vector<double> targets(envelopes.size());
  for (std::size_t i = 0; i < envelopes.size(); ++i) {
    const auto& env = envelopes[i];
    const CounterStream stream(seed, StreamDomain::Dispatch, i);
    targets[i] = std::clamp(stream.uniform(period, env.p_min, env.p_max), env.p_min, env.p_max);
  }
  return targets;
}

std::vector<double> distribute_cluster_target(std::span<const PowerEnvelope> envelopes, double total_kw)
{
  CompensatedSum lo, width;
  for (const auto& env : envelopes) {
    lo.add(env.p_min);
    width.add(env.width());
  }
  double alpha = 0.0;
  if (width.value() > 0.0) alpha = std::clamp((total_kw - lo.value()) / width.value(), 0.0, 1.0);

  std::vector<double> targets(envelopes.size());
  for (std::size_t i = 0; i < envelopes.size(); ++i)
    targets[i] = std::clamp(envelopes[i].p_min + alpha * envelopes[i].width(), envelopes[i].p_min,
                            envelopes[i].p_max);
  return targets;
}

double soa(double ta, const ThermalParams& params)
{
  return (ta - params.t_min_comfort) / (params.t_max_comfort - params.t_min_comfort);
}

double tracking_error(std::span<const double> actual, std::span<const double> target, std::span<const double> rated)
{
  if (rated.empty()) throw std::domain_error("tracking_error: empty population");
  if (actual.size() != rated.size() || target.size() != rated.size())
    throw std::domain_error("tracking_error: length mismatch");
  CompensatedSum a, t, r;
  for (std::size_t i = 0; i < rated.size(); ++i) {
    a.add(actual[i]);
    t.add(target[i]);
    r.add(rated[i]);
  }
  if (!(r.value() > 0.0)) throw std::domain_error("tracking_error: rated sum must be positive");
  return (a.value() - t.value()) / r.value();
}

std::vector<DeviceState> initial_states(const ClusterConfig& config, std::span<const ThermalParams> population)
{
  std::vector<DeviceState> states(population.size());
  for (std::size_t i = 0; i < population.size(); ++i) {
    const auto& p = population[i];
    auto& s = states[i];
    if (config.initial.kind == InitialStatePolicy::Kind::Fixed) {
      s.switch_state = config.initial.switch_state;
      s.ta = config.initial.ta.value_or(0.5 * (p.t_min_comfort + p.t_max_comfort));
      s.lock_remaining = 0.0;
      if (is_locked(s.switch_state)) {
        if (p.t_lock > 0.0)
          s.lock_remaining = p.t_lock;
        else
          s.switch_state = successor(s.switch_state);
      }
      continue;
    }

    const CounterStream stream(config.seed, StreamDomain::InitialState, i);
    const auto pick = std::min<std::uint64_t>(3, static_cast<std::uint64_t>(4.0 * stream.uniform(0)));
    s.switch_state = static_cast<SwitchState>(pick + 1);
    s.ta = stream.uniform(1, p.t_min_comfort, p.t_max_comfort);
    s.lock_remaining = 0.0;
    if (is_locked(s.switch_state)) {
      const double lock_ticks = std::ceil(p.t_lock / config.dt_tick);
      if (lock_ticks < 1.0) {
        s.switch_state = successor(s.switch_state);
      } else {
        // Remaining whole ticks uniform on 1..lock_ticks.
        const double k = std::min(lock_ticks, std::floor(stream.uniform(2) * lock_ticks) + 1.0);
        s.lock_remaining = k * config.dt_tick;
      }
    }
  }
  return states;
}

ClusterMetrics run(const ClusterConfig& config, std::span<const ThermalParams> population,
                   const OutdoorProfile& outdoor)
{
  validate(config);
  if (population.size() != config.n_devices)
    throw ConfigError("population size " + std::to_string(population.size()) + " does not match n_devices " +
                      std::to_string(config.n_devices));
  for (const auto& p : population) validate(p);

  const std::size_t n = population.size();
  const std::int64_t tpp = ticks_per_period(config);
  const std::int64_t periods = period_count(config);
  const double dt = config.dt_tick;
  const TickOptions options{config.thermostat_override};

  ClusterMetrics m;
  m.dt_tick = dt;
  m.ticks_per_period = tpp;
  m.n_devices = n;
  m.soa = SoaHistogram(config.soa_binning);
  m.occupancy.reserve(static_cast<std::size_t>(tpp * periods));
  m.aggregate_power.reserve(static_cast<std::size_t>(tpp * periods));

  std::vector<double> rated(n);
  {
    CompensatedSum total;
    for (std::size_t i = 0; i < n; ++i) {
      rated[i] = population[i].p_rate;
      total.add(rated[i]);
    }
    m.rated_total = total.value();
  }

  std::vector<DeviceState> states = initial_states(config, population);
  std::vector<PowerEnvelope> envelopes(n);
  for (std::size_t i = 0; i < n; ++i)
    envelopes[i] = end_period(states[i], outdoor.at(0.0), population[i], config.dt_period);

  unsigned workers = config.threads != 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));

  std::vector<std::uint8_t> codes(static_cast<std::size_t>(tpp) * n);
  std::vector<std::int64_t> on_ticks(n);
  std::vector<double> to_tick(static_cast<std::size_t>(tpp));
  std::vector<SoaHistogram> partial(workers, SoaHistogram(config.soa_binning));
  std::vector<double> actual(n);

  // Trace slot per device, or -1.
  std::vector<int> trace_slot(n, -1);
  m.traces.resize(config.traced_devices.size());
  for (std::size_t t = 0; t < config.traced_devices.size(); ++t) {
    trace_slot[config.traced_devices[t]] = static_cast<int>(t);
    m.traces[t].reserve(static_cast<std::size_t>(tpp * periods));
  }

  for (std::int64_t k = 0; k < periods; ++k) {
    const double t0 = static_cast<double>(k) * config.dt_period;
    for (std::int64_t j = 0; j < tpp; ++j) to_tick[static_cast<std::size_t>(j)] = outdoor.at(t0 + j * dt);

    const PeriodPlan plan = plan_period(config, population, states, envelopes, k);

    PeriodMetrics pm;
    for (std::size_t i = 0; i < n; ++i) {
      if (envelopes[i].infeasible) ++pm.infeasible_envelopes;
      if (plan.controls[i].clamped) ++pm.clamped_controls;
      if (!std::holds_alternative<FixedControls>(config.dispatch) && !envelopes[i].contains(plan.targets[i]))
        ++pm.targets_outside_envelope;
    }

    auto advance = [&](std::size_t begin, std::size_t end, SoaHistogram& hist) {
      for (std::size_t i = begin; i < end; ++i) {
        const CounterStream stream(config.seed, StreamDomain::Switching, i);
        const auto& params = population[i];
        DeviceState s = states[i];
        std::vector<DeviceRecord>* trace = trace_slot[i] >= 0 ? &m.traces[static_cast<std::size_t>(trace_slot[i])] : nullptr;
        std::int64_t on = 0;
        for (std::int64_t j = 0; j < tpp; ++j) {
          const std::int64_t global = k * tpp + j;
          const double draw = stream.uniform(static_cast<std::uint64_t>(global));
          auto [next, rec] =
              tick(s, plan.controls[i], to_tick[static_cast<std::size_t>(j)], params, dt, draw, global + 1, options);
          s = next;
          if (trace) trace->push_back(rec);
          codes[static_cast<std::size_t>(j) * n + i] = static_cast<std::uint8_t>(state_index(s.switch_state));
          if (is_powered(s.switch_state)) ++on;
          hist.add(soa(s.ta, params));
        }
        states[i] = s;
        on_ticks[i] = on;
      }
    };

    if (workers == 1) {
      advance(0, n, partial[0]);
    } else {
      std::vector<std::jthread> pool;
      pool.reserve(workers);
      for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = n * w / workers;
        const std::size_t end = n * (w + 1) / workers;
        pool.emplace_back([&, begin, end, w] { advance(begin, end, partial[w]); });
      }
    }

    // Reduce in device order so the result is independent of the worker split.
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::int64_t j = 0; j < tpp; ++j) {
      std::array<std::size_t, 4> counts{};
      CompensatedSum power;
      const std::uint8_t* row = codes.data() + static_cast<std::size_t>(j) * n;
      for (std::size_t i = 0; i < n; ++i) {
        ++counts[row[i]];
        if (row[i] == 0 || row[i] == 2) power.add(rated[i]);
      }
      m.occupancy.push_back({counts[0] * inv_n, counts[1] * inv_n, counts[2] * inv_n, counts[3] * inv_n});
      m.aggregate_power.push_back(power.value());
    }

    for (std::size_t i = 0; i < n; ++i)
      actual[i] = static_cast<double>(on_ticks[i]) * rated[i] / static_cast<double>(tpp);
    CompensatedSum target_sum, actual_sum, variance;
    for (std::size_t i = 0; i < n; ++i) {
      target_sum.add(plan.targets[i]);
      actual_sum.add(actual[i]);
      const double d = rated[i] > 0.0 ? std::clamp(plan.targets[i] / rated[i], 0.0, 1.0) : 0.0;
      variance.add(rated[i] * rated[i] * d * (1.0 - d));
    }
    pm.error_sigma = std::sqrt(variance.value()) / m.rated_total;
    pm.target_kw = target_sum.value();
    pm.actual_kw = actual_sum.value();
    pm.error = tracking_error(actual, plan.targets, rated);
    m.periods.push_back(pm);

    const double to_next = outdoor.at(t0 + config.dt_period);
    for (std::size_t i = 0; i < n; ++i) envelopes[i] = end_period(states[i], to_next, population[i], config.dt_period);
  }

  for (const auto& h : partial) m.soa.merge(h);
  return m;
}

std::array<double, 4> occupancy_fluctuation_std(const ClusterMetrics& metrics, std::size_t from_tick)
{
  std::array<double, 4> out{};
  if (from_tick >= metrics.occupancy.size()) return out;
  const double count = static_cast<double>(metrics.occupancy.size() - from_tick);
  for (std::size_t s = 0; s < 4; ++s) {
    double mean = 0.0;
    for (std::size_t t = from_tick; t < metrics.occupancy.size(); ++t) mean += metrics.occupancy[t][s];
    mean /= count;
    double var = 0.0;
    for (std::size_t t = from_tick; t < metrics.occupancy.size(); ++t) {
      const double d = metrics.occupancy[t][s] - mean;
      var += d * d;
    }
    out[s] = std::sqrt(var / count);
  }
  return out;
}

}  // namespace tclsim
