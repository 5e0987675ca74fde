// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "tclsim/aggregator.hpp"
#include "tclsim/commands.hpp"
#include "tclsim/metrics_io.hpp"
#include "tclsim/scenario.hpp"

using namespace tclsim;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail)
{
  std::printf("%s criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(Clock::time_point start)
{
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0)
{
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

const ThermalParams kMid{3.0, 2.0, 2.75, 2.75, 180.0, 23.0, 27.0};
constexpr FixedControls kStationaryControls{0.0075, 0.0012};

ClusterConfig stationary_config(std::size_t n)
{
  ClusterConfig c;
  c.n_devices = n;
  c.horizon = 4 * 3600.0;
  c.seed = 2024;
  c.dispatch = kStationaryControls;
  return c;
}

ClusterMetrics stationary_run(std::size_t n, double* elapsed)
{
  const auto start = Clock::now();
  const std::vector<ThermalParams> pop(n, kMid);
  auto m = run(stationary_config(n), pop, OutdoorProfile(32.0));
  if (elapsed) *elapsed = seconds_since(start);
  return m;
}

double max_deviation(const std::array<double, 4>& got, const StationaryDistribution& want)
{
  double worst = 0.0;
  for (std::size_t s = 0; s < 4; ++s) worst = std::max(worst, std::fabs(got[s] - want.p[s]));
  return worst;
}

void stationary_and_scale()
{
  const auto analytic =
      stationary_distribution(sojourn_stats(kStationaryControls.u0, kStationaryControls.u1, 2.0, kMid.t_lock));
  double elapsed = 0.0;
  const auto large = stationary_run(10000, &elapsed);
  const std::size_t tick_6min = 180, tick_30min = 900;
  const double err_early = max_deviation(large.occupancy[tick_6min - 1], analytic);
  const double err_half = max_deviation(large.occupancy[tick_30min - 1], analytic);
  const bool ok1 = err_half <= 0.02 && err_half <= err_early && elapsed <= 10.0;
  report(1, ok1, "10k devices from all-Off reach the stationary mix within 0.02 by 0.5 h in <= 10 s",
         fmt("max dev 0.1h=%.4f 0.5h=%.4f, run %.2f s", err_early, err_half, elapsed));

  const auto small = stationary_run(1000, nullptr);
  const auto sd_small = occupancy_fluctuation_std(small, tick_30min);
  const auto sd_large = occupancy_fluctuation_std(large, tick_30min);
  bool ok2 = true;
  std::string detail = "ratios";
  for (std::size_t s = 0; s < 4; ++s) {
    const double ratio = sd_small[s] / sd_large[s];
    ok2 = ok2 && ratio >= 2.1 && ratio <= 4.7;
    detail += fmt(" %.2f", ratio);
  }
  report(2, ok2, "occupancy fluctuation std shrinks by ~sqrt(10) from 1k to 10k devices (ratio in [2.1,4.7])",
         detail);
}

void on_sojourn_mean()
{
  const double dt = 2.0, u0 = 0.01;
  const auto controls = ControlPair::probabilistic(u0, 0.01);
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  SwitchState s = SwitchState::On;
  double rem = 0.0;
  long run_ticks = 0;
  std::vector<double> sojourns;
  while (sojourns.size() < 100000) {
    const auto r = step(s, rem, controls, dt, 180.0, unif(gen));
    if (s == SwitchState::On) ++run_ticks;
    if (s == SwitchState::On && r.state != s) {
      sojourns.push_back(run_ticks * dt);
      run_ticks = 0;
    }
    s = r.state;
    rem = r.lock_remaining;
  }
  double mean = 0.0;
  for (double x : sojourns) mean += x;
  mean /= sojourns.size();
  double var = 0.0;
  for (double x : sojourns) var += (x - mean) * (x - mean);
  const double se = std::sqrt(var / (sojourns.size() - 1) / sojourns.size());
  const double expected = dt / u0;
  report(3, std::fabs(mean - expected) <= 4.0 * se, "On sojourn mean at u0=0.01 matches dt/u0 within 4 SE",
         fmt("n=%.0f mean=%.3f s expected=%.1f s SE=%.3f", static_cast<double>(sojourns.size()), mean, expected, se));
}

void solver_suite()
{
  const auto start = Clock::now();
  bool ok = true;
  std::size_t rows = 0;
  double worst_round_trip = 0.0, worst_threshold = 0.0;
  for (const SolverTiming timing : {SolverTiming{2.0, 180.0, 60.0}, SolverTiming{2.0, 300.0, 60.0},
                                    SolverTiming{1.0, 240.0, 120.0}}) {
    for (const auto& r : solver_sweep(timing)) {
      ++rows;
      ok = ok && r.ok;
      worst_round_trip = std::max(worst_round_trip, r.round_trip_error);
    }
    const auto [low, high] = regime_thresholds(timing);
    // At each threshold the solved sojourn (Off below one half, On above) equals t_min.
    const auto lo = solve_controls(low, 1.0, timing);
    const auto hi = solve_controls(high, 1.0, timing);
    const double off_at_low = sojourn_stats(lo.u0, lo.u1, timing.dt, timing.t_lock).off;
    const double on_at_high = sojourn_stats(hi.u0, hi.u1, timing.dt, timing.t_lock).on;
    worst_threshold = std::max({worst_threshold, std::fabs(off_at_low - timing.t_min), std::fabs(on_at_high - timing.t_min)});
  }
  const double elapsed = seconds_since(start);
  ok = ok && worst_threshold < 1e-9 && elapsed < 1.0;
  report(4, ok, "control solver round-trips duty, honours the t_min floor and hits t_min at both thresholds",
         fmt("%.0f rows, worst round trip %.2e, threshold dev %.2e, %.3f s", static_cast<double>(rows),
             worst_round_trip, worst_threshold, elapsed));
}

void thermal_oracles()
{
  std::mt19937_64 gen(5150);
  std::uniform_real_distribution<double> ra(2.5, 3.5), ca(1.5, 2.5), pr(2.5, 3.0), cop(2.5, 3.0);
  std::uniform_real_distribution<double> ta(15.0, 35.0), to(20.0, 40.0), frac(0.0, 1.0), dt(1.0, 3600.0);
  double worst_ode = 0.0, worst_inverse = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const ThermalParams p{ra(gen), ca(gen), cop(gen), pr(gen), 180.0, 23.0, 27.0};
    const double a = ta(gen), o = to(gen), w = frac(gen) * p.p_rate, h = dt(gen);
    const double next = advance_temperature(a, o, w, p, h);
    worst_ode = std::max(worst_ode, std::fabs(next - oracle::integrate_room(a, o, w, p, h)));
    worst_inverse = std::max(worst_inverse, std::fabs(power_for_transition(a, next, o, p, h) - w));
  }
  report(5, worst_ode < 1e-9 && worst_inverse < 1e-9,
         "closed-form room update matches an adaptive ODE solve and inverts exactly (1000 draws, < 1e-9)",
         fmt("worst ODE dev %.2e degC, worst inverse dev %.2e kW", worst_ode, worst_inverse));
}

void envelope_safety()
{
  std::mt19937_64 gen(6060);
  std::uniform_real_distribution<double> ra(2.5, 3.5), ca(1.5, 2.5), pr(2.5, 3.0), cop(2.5, 3.0);
  std::uniform_real_distribution<double> band(23.0, 27.0), to(24.0, 38.0), frac(0.0, 1.0);
  const double period = 1800.0;
  int feasible = 0, violations = 0;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const ThermalParams p{ra(gen), ca(gen), cop(gen), pr(gen), 180.0, 23.0, 27.0};
    const double a = band(gen), o = to(gen);
    const auto env = power_envelope(a, o, p, period);
    if (!(0.0 <= env.p_min && env.p_min <= env.p_max && env.p_max <= p.p_rate)) ++violations;
    if (env.infeasible) continue;
    ++feasible;
    for (double power : {env.p_min, env.p_max, env.p_min + frac(gen) * env.width()}) {
      for (int k = 1; k <= 30; ++k) {
        const double t = advance_temperature(a, o, power, p, period * k / 30.0);
        const double excess = std::max(t - p.t_max_comfort, p.t_min_comfort - t);
        worst = std::max(worst, excess);
        if (excess > 1e-9) ++violations;
      }
    }
  }
  report(6, violations == 0 && feasible > 0,
         "any constant power inside the envelope keeps the room in band for the whole period",
         fmt("%.0f feasible of 1000 states, %.0f violations, worst excess %.2e degC", feasible, violations, worst));
}

void tracking()
{
  ClusterConfig c;
  c.n_devices = 1000;
  c.horizon = 24 * 3600.0;
  c.seed = 31;
  c.dispatch = RandomEnvelope{};
  const auto pop = sample_population(ParameterDistributions{}, c.n_devices, c.seed);
  const auto start = Clock::now();
  const auto m = run(c, pop, OutdoorProfile(32.0));
  const double elapsed = seconds_since(start);
  int within = 0;
  std::size_t outside_envelope = 0;
  double worst = 0.0, worst_ratio = 0.0;
  for (const auto& p : m.periods) {
    if (std::fabs(p.error) <= 4.0 * p.error_sigma) ++within;
    outside_envelope += p.targets_outside_envelope;
    worst = std::max(worst, std::fabs(p.error));
    worst_ratio = std::max(worst_ratio, std::fabs(p.error) / p.error_sigma);
  }
  const bool ok = m.periods.size() == 48 && within >= 47 && outside_envelope == 0 && elapsed <= 60.0;
  report(7, ok, "1k heterogeneous devices track random envelope targets within 4 sigma in >= 47 of 48 periods",
         fmt("%.0f/48 within, max |error| %.4f, max |error|/sigma %.2f, run %.2f s", within, worst, worst_ratio,
             elapsed));
}

void comfort()
{
  ClusterConfig c;
  c.n_devices = 1000;
  c.horizon = 24 * 3600.0;
  c.seed = 47;
  const auto pop = sample_population(ParameterDistributions{}, c.n_devices, c.seed);
  const auto m = run(c, pop, OutdoorProfile(32.0));
  const double inside = m.soa.fraction_inside_unit(), beyond = m.soa.fraction_beyond_margin();
  report(8, inside >= 0.95 && beyond < 0.01, "SOA stays in [0,1] >= 95% of the time and beyond [-0.1,1.1] < 1%",
         fmt("inside %.4f, beyond margin %.4f", inside, beyond));
}

std::string slurp(const fs::path& p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void determinism()
{
  const auto root = fs::temp_directory_path() / "tclsim_acceptance_determinism";
  fs::remove_all(root);
  ClusterConfig c;
  c.n_devices = 500;
  c.horizon = 6 * 3600.0;
  c.seed = 99;
  const auto pop = sample_population(ParameterDistributions{}, c.n_devices, c.seed);
  const std::vector<OutputFormat> csv{OutputFormat::Csv};
  c.threads = 1;
  write_metrics(run(c, pop, OutdoorProfile(32.0)), root / "a", csv);
  c.threads = 4;
  write_metrics(run(c, pop, OutdoorProfile(32.0)), root / "b", csv);
  bool identical = true;
  std::size_t bytes = 0;
  for (const char* f : {"occupancy.csv", "power.csv", "soa_hist.csv"}) {
    const auto a = slurp(root / "a" / f), b = slurp(root / "b" / f);
    identical = identical && !a.empty() && a == b;
    bytes += a.size();
  }
  fs::remove_all(root);
  report(9, identical, "same seed gives byte-identical CSV output (1 vs 4 worker threads)",
         fmt("%.0f bytes compared", static_cast<double>(bytes)));
}

}  // namespace

int main()
{
  stationary_and_scale();
  on_sojourn_mean();
  solver_suite();
  thermal_oracles();
  envelope_safety();
  tracking();
  comfort();
  determinism();
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
