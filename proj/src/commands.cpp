#include "tclsim/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "tclsim/aggregator.hpp"
#include "tclsim/metrics_io.hpp"

namespace tclsim {

namespace {

constexpr double kRoundTripTolerance = 1e-9;
constexpr double kFloorTolerance = 1e-9;
constexpr double kHalfHour = 1800.0;

std::string fixed(double v, int decimals = 4)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

struct Run {
  ScenarioFile scenario;
  std::vector<ThermalParams> population;
  ClusterMetrics metrics;
};

Run execute(ScenarioFile scenario, std::ostream& err)
{
  Run r;
  r.scenario = std::move(scenario);
  const auto& c = r.scenario.cluster;
  r.population = sample_population(r.scenario.parameters, c.n_devices, c.seed);
  err << "simulating " << c.n_devices << " devices for " << c.horizon / 3600.0 << " h (seed " << c.seed << ")\n";
  const auto start = std::chrono::steady_clock::now();
  r.metrics = run(c, r.population, r.scenario.outdoor);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  err << "done in " << fixed(elapsed.count(), 2) << " s\n";
  write_metrics(r.metrics, r.scenario.output.directory, r.scenario.output.formats);
  err << "wrote results to " << r.scenario.output.directory.string() << "\n";
  return r;
}

template <class Body>
int guarded(std::ostream& err, Body&& body)
{
  try {
    return body();
  } catch (const std::invalid_argument& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::domain_error& e) {
    err << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace

ScenarioFile default_scenario(Experiment experiment)
{
  ScenarioFile s;
  auto& c = s.cluster;
  switch (experiment) {
  case Experiment::Stationary: {
    c.n_devices = 10000;
    c.horizon = 4 * 3600.0;
    c.dispatch = FixedControls{0.0075, 0.0012};
    // Identical devices: every range collapses to its midpoint.
    auto& d = s.parameters;
    for (UniformRange* r : {&d.ra, &d.ca, &d.p_rate, &d.cop}) *r = {0.5 * (r->low + r->high), 0.5 * (r->low + r->high)};
    s.output.directory = "out/stationary";
    break;
  }
  case Experiment::Comfort:
  case Experiment::Track:
    c.n_devices = 1000;
    c.horizon = 24 * 3600.0;
    c.dispatch = RandomEnvelope{};
    s.output.directory = experiment == Experiment::Comfort ? "out/comfort" : "out/track";
    break;
  }
  return s;
}

ScenarioFile resolve_scenario(Experiment experiment, const RunOptions& o)
{
  ScenarioFile s = o.scenario ? load_scenario(*o.scenario) : default_scenario(experiment);
  if (o.seed) s.cluster.seed = *o.seed;
  if (o.n_devices) s.cluster.n_devices = *o.n_devices;
  if (o.horizon) s.cluster.horizon = *o.horizon;
  if (o.output_dir) s.output.directory = *o.output_dir;
  validate(s.cluster);
  validate(s.parameters);
  return s;
}

int cmd_stationary(const RunOptions& options, std::ostream& out, std::ostream& err)
{
  return guarded(err, [&] {
    ScenarioFile scenario = resolve_scenario(Experiment::Stationary, options);
    const auto* fixed_controls = std::get_if<FixedControls>(&scenario.cluster.dispatch);
    if (!fixed_controls) throw ConfigError("stationary needs dispatch mode fixed_controls");
    const FixedControls controls = *fixed_controls;
    Run r = execute(std::move(scenario), err);
    const auto& m = r.metrics;
    const double dt = r.scenario.cluster.dt_tick;
    const auto analytic = stationary_distribution(
        sojourn_stats(controls.u0, controls.u1, dt, r.population.front().t_lock));

    const auto half_hour_tick = static_cast<std::size_t>(std::llround(kHalfHour / dt));
    out << "state     analytic  t=0.5h    final\n";
    const char* names[] = {"on", "off", "onlock", "offlock"};
    for (std::size_t s = 0; s < 4; ++s) {
      out << names[s];
      for (std::size_t pad = std::char_traits<char>::length(names[s]); pad < 10; ++pad) out << ' ';
      out << fixed(analytic.p[s]) << "    ";
      out << (m.occupancy.size() >= half_hour_tick ? fixed(m.occupancy[half_hour_tick - 1][s]) : std::string("n/a   "))
          << "    ";
      out << (m.occupancy.empty() ? std::string("n/a") : fixed(m.occupancy.back()[s])) << "\n";
    }
    const auto sd = occupancy_fluctuation_std(m, half_hour_tick);
    out << "fluctuation std after 0.5h:";
    for (double v : sd) out << ' ' << fixed(v, 5);
    out << "\n";
    return static_cast<int>(kExitOk);
  });
}

int cmd_comfort(const RunOptions& options, std::ostream& out, std::ostream& err)
{
  return guarded(err, [&] {
    Run r = execute(resolve_scenario(Experiment::Comfort, options), err);
    const auto& h = r.metrics.soa;
    const ThermalParams& first = r.population.front();
    const double mid = 0.5 * (first.t_min_comfort + first.t_max_comfort);
    out << "soa samples: " << h.total << "\n";
    out << "fraction in [0,1]: " << fixed(h.fraction_inside_unit(), 5) << "\n";
    out << "fraction beyond [-0.1,1.1]: " << fixed(h.fraction_beyond_margin(), 5) << "\n";
    out << "spot check: ta=" << fixed(mid, 2) << " in [" << fixed(first.t_min_comfort, 2) << ","
        << fixed(first.t_max_comfort, 2) << "] -> soa " << fixed(soa(mid, first), 3) << "\n";
    return static_cast<int>(kExitOk);
  });
}

int cmd_track(const RunOptions& options, std::ostream& out, std::ostream& err)
{
  return guarded(err, [&] {
    Run r = execute(resolve_scenario(Experiment::Track, options), err);
    double worst = 0.0;
    std::size_t outside = 0;
    std::size_t beyond_4sigma = 0;
    out << "period\ttarget_kw\tactual_kw\terror\tsigma\n";
    for (std::size_t k = 0; k < r.metrics.periods.size(); ++k) {
      const auto& p = r.metrics.periods[k];
      worst = std::max(worst, std::fabs(p.error));
      outside += p.targets_outside_envelope;
      if (std::fabs(p.error) > 4.0 * p.error_sigma) ++beyond_4sigma;
      out << k << "\t" << fixed(p.target_kw, 3) << "\t" << fixed(p.actual_kw, 3) << "\t" << fixed(p.error, 5) << "\t"
          << fixed(p.error_sigma, 5) << "\n";
    }
    out << "max |error|: " << fixed(worst, 5) << "\n";
    out << "periods with |error| > 4 sigma: " << beyond_4sigma << " of " << r.metrics.periods.size() << "\n";
    if (outside != 0) {
      err << outside << " targets fell outside their envelopes\n";
      return static_cast<int>(kExitViolation);
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_validate(const std::filesystem::path& scenario, std::ostream& out, std::ostream& err)
{
  return guarded(err, [&] {
    const ScenarioFile s = load_scenario(scenario);
    out << to_json(s).dump(2) << "\n";
    return static_cast<int>(kExitOk);
  });
}

std::vector<SweepRow> solver_sweep(const SolverTiming& timing)
{
  std::vector<double> duties;
  for (int i = 1; i <= 99; ++i) duties.push_back(i / 100.0);
  const auto [low, high] = regime_thresholds(timing);
  duties.push_back(low);
  duties.push_back(high);

  std::vector<SweepRow> rows;
  for (double d : duties) {
    SweepRow row;
    row.duty = d;
    row.regime = select_regime(d, timing);
    row.controls = solve_controls(d, 1.0, timing);
    if (row.controls.mode != ControlMode::Probabilistic) {
      rows.push_back(row);
      continue;
    }
    row.sojourn = sojourn_stats(row.controls.u0, row.controls.u1, timing.dt, timing.t_lock);
    row.round_trip_error = std::fabs(duty_ratio(row.sojourn) - d);
    const bool solved_on = row.regime == Regime::HighDuty || row.regime == Regime::UpperMid;
    row.solved_sojourn = solved_on ? row.sojourn.on : row.sojourn.off;
    const bool middle = row.regime == Regime::UpperMid || row.regime == Regime::LowerMid;
    const double floor_checked = middle ? std::min(row.sojourn.on, row.sojourn.off) : row.solved_sojourn;
    row.ok = (row.controls.clamped || row.round_trip_error < kRoundTripTolerance) &&
             floor_checked >= timing.t_min - kFloorTolerance;
    rows.push_back(row);
  }
  return rows;
}

int cmd_sweep(const SolverTiming& timing, std::ostream& out, std::ostream& err)
{
  return guarded(err, [&] {
    if (!(timing.dt > 0.0) || !(timing.t_lock >= 0.0) || !(timing.t_min > 0.0))
      throw ConfigError("sweep needs dt > 0, t_lock >= 0, t_min > 0");
    const auto [low, high] = regime_thresholds(timing);
    out << "# dt=" << timing.dt << " t_lock=" << timing.t_lock << " t_min=" << timing.t_min
        << " theta_lo=" << fixed(low, 6) << " theta_hi=" << fixed(high, 6) << "\n";
    out << "duty,regime,u0,u1,T1,T2,round_trip_error,ok\n";
    std::size_t violations = 0;
    for (const auto& r : solver_sweep(timing)) {
      char line[256];
      std::snprintf(line, sizeof line, "%.6f,%s,%.6g,%.6g,%.6f,%.6f,%.3g,%s\n", r.duty,
                    std::string(to_string(r.regime)).c_str(), r.controls.u0, r.controls.u1, r.sojourn.on,
                    r.sojourn.off, r.round_trip_error, r.ok ? "yes" : "NO");
      out << line;
      if (!r.ok) ++violations;
    }
    if (violations != 0) {
      err << violations << " rows violate the round-trip or t_min floor property\n";
      return static_cast<int>(kExitViolation);
    }
    return static_cast<int>(kExitOk);
  });
}

}  // namespace tclsim
