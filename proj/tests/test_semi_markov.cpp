#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "tclsim/semi_markov.hpp"

using namespace tclsim;

namespace {

constexpr double kDt = 2.0;
constexpr double kLock = 180.0;
const SolverTiming kTable1{kDt, kLock, 60.0};

double solved_duty(const ControlPair& c, const SolverTiming& t)
{
  return duty_ratio(sojourn_stats(c.u0, c.u1, t.dt, t.t_lock));
}

}  // namespace

TEST(SojournStats, ReferenceProbabilities)
{
  const auto s = sojourn_stats(0.0075, 0.0012, kDt, kLock);
  EXPECT_NEAR(s.on, 266.67, 0.005);
  EXPECT_NEAR(s.off, 1666.67, 0.005);
  EXPECT_DOUBLE_EQ(s.on_lock, 180.0);
  EXPECT_DOUBLE_EQ(s.off_lock, 180.0);
  EXPECT_DOUBLE_EQ(s.sigma_on, s.on);
  EXPECT_DOUBLE_EQ(s.sigma_off, s.off);
}

TEST(SojournStats, UnitProbabilityIsOneTick)
{
  const auto s = sojourn_stats(1.0, 1.0, kDt, kLock);
  EXPECT_DOUBLE_EQ(s.on, 2.0);
  EXPECT_DOUBLE_EQ(s.off, 2.0);
}

TEST(SojournStats, DirectRatio)
{
  const auto s = sojourn_stats(0.5, 0.25, kDt, 0.0);
  EXPECT_DOUBLE_EQ(s.on, 4.0);
  EXPECT_DOUBLE_EQ(s.off, 8.0);
  EXPECT_DOUBLE_EQ(s.on_lock, 0.0);
}

TEST(SojournStats, RejectsOutOfRangeInputs)
{
  EXPECT_THROW(sojourn_stats(0.0, 0.5, kDt, kLock), std::domain_error);
  EXPECT_THROW(sojourn_stats(0.5, 1.5, kDt, kLock), std::domain_error);
  EXPECT_THROW(sojourn_stats(0.5, 0.5, 0.0, kLock), std::domain_error);
  EXPECT_THROW(sojourn_stats(0.5, 0.5, kDt, -1.0), std::domain_error);
}

TEST(Stationary, ReferenceDistribution)
{
  // Occupancy proportional to mean sojourn, evaluated by hand.
  const SojournStats s{2.0 / 0.0075, 2.0 / 0.0012, 180.0, 180.0, 0.0, 0.0};
  const auto p = stationary_distribution(s);
  EXPECT_NEAR(p[SwitchState::On], 0.1163, 5e-5);
  EXPECT_NEAR(p[SwitchState::Off], 0.7267, 5e-5);
  EXPECT_NEAR(p[SwitchState::OnLock], 0.0785, 5e-5);
  EXPECT_NEAR(p[SwitchState::OffLock], 0.0785, 5e-5);
  EXPECT_NEAR(p.p[0] + p.p[1] + p.p[2] + p.p[3], 1.0, 1e-12);
}

TEST(Stationary, EqualSojournsAreUniform)
{
  for (double a : {0.1, 2.0, 1234.5}) {
    const auto p = stationary_distribution({a, a, a, a, a, a});
    for (double v : p.p) EXPECT_DOUBLE_EQ(v, 0.25);
  }
}

TEST(Stationary, NearLoopCase)
{
  const auto p = stationary_distribution({2.0, 2.0, 180.0, 180.0, 2.0, 2.0});
  EXPECT_NEAR(p[SwitchState::On], 0.00549, 5e-6);
  EXPECT_NEAR(p[SwitchState::Off], 0.00549, 5e-6);
  EXPECT_NEAR(p[SwitchState::OnLock], 0.4945, 5e-5);
  EXPECT_NEAR(p[SwitchState::OffLock], 0.4945, 5e-5);
}

TEST(Stationary, ZeroSumIsDomainError)
{
  EXPECT_THROW(stationary_distribution({}), std::domain_error);
  EXPECT_THROW(duty_ratio({}), std::domain_error);
}

TEST(DutyRatio, Examples)
{
  EXPECT_NEAR(duty_ratio({2.0 / 0.0075, 2.0 / 0.0012, 180.0, 180.0, 0, 0}), 0.1948, 5e-5);
  EXPECT_DOUBLE_EQ(duty_ratio({37.0, 37.0, 180.0, 180.0, 0, 0}), 0.5);
  EXPECT_NEAR(duty_ratio({800.0, 2.0, 180.0, 180.0, 0, 0}), 0.8434, 5e-5);
}

TEST(DutyRatio, MatchesPoweredStationaryMass)
{
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(1e-4, 1.0), lock(0.0, 600.0);
  for (int i = 0; i < 200; ++i) {
    const auto s = sojourn_stats(u(gen), u(gen), kDt, lock(gen));
    const auto p = stationary_distribution(s);
    EXPECT_NEAR(duty_ratio(s), p[SwitchState::On] + p[SwitchState::OnLock], 1e-15);
  }
}

TEST(SolveControls, ZeroAndFullTargetsAreForced)
{
  EXPECT_EQ(solve_controls(0.0, 2.5, kTable1).mode, ControlMode::ForcedOff);
  EXPECT_EQ(solve_controls(2.5, 2.5, kTable1).mode, ControlMode::ForcedOn);
}

TEST(SolveControls, HighDutyExample)
{
  // duty of T = (800, 2, 180, 180)
  const double d = (800.0 + 180.0) / (800.0 + 2.0 + 360.0);
  const double high = regime_thresholds(kTable1).second;
  EXPECT_NEAR(high, 240.0 / 422.0, 1e-15);
  EXPECT_GT(d, high);
  const auto c = solve_controls(d, 1.0, kTable1);
  EXPECT_EQ(c.mode, ControlMode::Probabilistic);
  EXPECT_DOUBLE_EQ(c.u1, 1.0);
  EXPECT_NEAR(c.u0, 0.0025, 1e-14);
  EXPECT_NEAR(solved_duty(c, kTable1), d, 1e-9);
}

TEST(SolveControls, HalfDutyIsSymmetric)
{
  const auto c = solve_controls(1.375, 2.75, kTable1);
  EXPECT_DOUBLE_EQ(c.u0, 0.005);
  EXPECT_NEAR(c.u1, 0.005, 1e-15);
  EXPECT_EQ(select_regime(0.5, kTable1), Regime::LowerMid);
  EXPECT_NEAR(solved_duty(c, kTable1), 0.5, 1e-12);
}

TEST(SolveControls, RegimeSelection)
{
  const auto [low, high] = regime_thresholds(kTable1);
  EXPECT_LT(low, 0.5);
  EXPECT_GT(high, 0.5);
  EXPECT_EQ(select_regime(0.99, kTable1), Regime::HighDuty);
  EXPECT_EQ(select_regime(0.55, kTable1), Regime::UpperMid);
  EXPECT_EQ(select_regime(0.45, kTable1), Regime::LowerMid);
  EXPECT_EQ(select_regime(0.01, kTable1), Regime::LowDuty);
  EXPECT_EQ(select_regime(high, kTable1), Regime::HighDuty);
  EXPECT_EQ(select_regime(low, kTable1), Regime::LowDuty);
}

TEST(SolveControls, RejectsTargetsOutsideRatedRange)
{
  EXPECT_THROW(solve_controls(-0.1, 2.5, kTable1), std::domain_error);
  EXPECT_THROW(solve_controls(2.6, 2.5, kTable1), std::domain_error);
  EXPECT_THROW(solve_controls(1.0, 0.0, kTable1), std::domain_error);
  EXPECT_THROW(solve_controls(1.0, 2.5, SolverTiming{0.0, kLock, 60.0}), std::domain_error);
}

// Threshold duties put the solved sojourn exactly on t_min.
TEST(SolveControlsProperty, ThresholdsHitMinimumSojourn)
{
  for (const SolverTiming t : {kTable1, SolverTiming{2.0, 300.0, 60.0}, SolverTiming{1.0, 240.0, 120.0},
                               SolverTiming{0.5, 90.0, 30.0}, SolverTiming{4.0, 180.0, 100.0}}) {
    const auto [low, high] = regime_thresholds(t);
    const auto hi = solve_controls(high, 1.0, t);
    const auto lo = solve_controls(low, 1.0, t);
    EXPECT_NEAR(t.dt / hi.u0, t.t_min, 1e-9);
    EXPECT_DOUBLE_EQ(hi.u1, 1.0);
    EXPECT_NEAR(t.dt / lo.u1, t.t_min, 1e-9);
    EXPECT_DOUBLE_EQ(lo.u0, 1.0);
  }
}

TEST(SolveControlsProperty, RoundTripAndFloorOnGrid)
{
  for (const SolverTiming t : {kTable1, SolverTiming{2.0, 300.0, 60.0}, SolverTiming{1.0, 240.0, 120.0}}) {
    for (int i = 1; i <= 99; ++i) {
      const double d = i / 100.0;
      const auto c = solve_controls(d, 1.0, t);
      ASSERT_FALSE(c.clamped) << d;
      const auto s = sojourn_stats(c.u0, c.u1, t.dt, t.t_lock);
      EXPECT_NEAR(duty_ratio(s), d, 1e-9) << d;
      switch (select_regime(d, t)) {
      case Regime::HighDuty: EXPECT_GE(s.on, t.t_min - 1e-9); break;
      case Regime::LowDuty: EXPECT_GE(s.off, t.t_min - 1e-9); break;
      default: EXPECT_GE(std::min(s.on, s.off), t.t_min - 1e-9) << d; break;
      }
    }
  }
}

// The solved duty equals the request everywhere, including either side of
// each regime boundary, so it is continuous even where (u0,u1) jump.
TEST(SolveControlsProperty, DutyContinuousAcrossBoundaries)
{
  const auto [low, high] = regime_thresholds(kTable1);
  for (double b : {low, 0.5, high}) {
    for (double eps : {1e-6, 1e-9}) {
      for (double d : {b - eps, b, b + eps}) EXPECT_NEAR(solved_duty(solve_controls(d, 1.0, kTable1), kTable1), d, 1e-9);
    }
  }
}

TEST(SolveControls, ExtremeDutiesStayInRange)
{
  for (const SolverTiming t : {kTable1, SolverTiming{10.0, 0.0, 1.0}}) {
    for (double d : {1e-12, 1e-6, 0.5 + 1e-15, 1.0 - 1e-6, 1.0 - 1e-15}) {
      const auto c = solve_controls(d, 1.0, t);
      EXPECT_FALSE(c.clamped) << d;
      EXPECT_GT(c.u0, 0.0);
      EXPECT_LE(c.u0, 1.0);
      EXPECT_GT(c.u1, 0.0);
      EXPECT_LE(c.u1, 1.0);
    }
  }
}

TEST(Step, CertainTransitionEntersLock)
{
  const auto r = step(SwitchState::On, 0.0, ControlPair::probabilistic(1.0, 0.5), kDt, kLock, 0.999999);
  EXPECT_EQ(r.state, SwitchState::OffLock);
  EXPECT_DOUBLE_EQ(r.lock_remaining, kLock);
}

TEST(Step, LockExpires)
{
  const auto r = step(SwitchState::OnLock, 2.0, ControlPair::probabilistic(0.5, 0.5), kDt, kLock, 0.0);
  EXPECT_EQ(r.state, SwitchState::On);
  EXPECT_DOUBLE_EQ(r.lock_remaining, 0.0);
}

TEST(Step, ForcedModes)
{
  const auto on = ControlPair::forced_on();
  EXPECT_EQ(step(SwitchState::On, 0.0, on, kDt, kLock, 0.0).state, SwitchState::On);
  EXPECT_EQ(step(SwitchState::Off, 0.0, on, kDt, kLock, 0.999).state, SwitchState::OnLock);
  const auto off = ControlPair::forced_off();
  EXPECT_EQ(step(SwitchState::Off, 0.0, off, kDt, kLock, 0.0).state, SwitchState::Off);
  EXPECT_EQ(step(SwitchState::On, 0.0, off, kDt, kLock, 0.999).state, SwitchState::OffLock);
}

TEST(Step, ZeroLockPassesThrough)
{
  const auto r = step(SwitchState::On, 0.0, ControlPair::probabilistic(1.0, 1.0), kDt, 0.0, 0.5);
  EXPECT_EQ(r.state, SwitchState::Off);
}

TEST(StepProperty, CycleOrderAndLockExactness)
{
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (double lock : {180.0, 181.0, 1.0, 7.3}) {
    const auto controls = ControlPair::probabilistic(0.3, 0.2);
    const long expected_lock_ticks = static_cast<long>(std::ceil(lock / kDt));
    SwitchState s = SwitchState::Off;
    double rem = 0.0;
    long run = 1;
    for (int i = 0; i < 200000; ++i) {
      const auto r = step(s, rem, controls, kDt, lock, unif(gen));
      if (r.state != s) {
        ASSERT_EQ(r.state, successor(s));
        if (is_locked(s)) {
          ASSERT_EQ(run, expected_lock_ticks) << "lock " << lock;
        }
        run = 1;
      } else {
        ++run;
      }
      ASSERT_EQ(r.lock_remaining > 0.0, is_locked(r.state));
      s = r.state;
      rem = r.lock_remaining;
    }
  }
}

TEST(StepProperty, OffSojournMeanMatchesGeometric)
{
  // 1e6 ticks in Off with u1 = 0.0012, restarting Off after each exit.
  const double u1 = 0.0012;
  const auto controls = ControlPair::probabilistic(0.5, u1);
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double sum = 0.0, sum_sq = 0.0;
  long completed = 0, ticks = 0;
  for (long i = 0; i < 1000000; ++i) {
    ++ticks;
    if (step(SwitchState::Off, 0.0, controls, kDt, kLock, unif(gen)).state != SwitchState::Off) {
      const double len = ticks * kDt;
      sum += len;
      sum_sq += len * len;
      ++completed;
      ticks = 0;
    }
  }
  const double mean = sum / completed;
  const double sigma = std::sqrt(sum_sq / completed - mean * mean);
  EXPECT_NEAR(mean, 2.0 / u1, 3.0 * sigma / std::sqrt(static_cast<double>(completed)));
}

TEST(StepProperty, OnSojournMeanWithinFourStandardErrors)
{
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (double u0 : {1.0, 0.5, 0.01}) {
    const auto controls = ControlPair::probabilistic(u0, 0.5);
    double sum = 0.0, sum_sq = 0.0;
    long completed = 0, ticks = 0;
    while (completed < 100000) {
      ++ticks;
      if (step(SwitchState::On, 0.0, controls, kDt, kLock, unif(gen)).state != SwitchState::On) {
        const double len = ticks * kDt;
        sum += len;
        sum_sq += len * len;
        ++completed;
        ticks = 0;
      }
    }
    const double mean = sum / completed;
    const double se = std::sqrt(std::max(sum_sq / completed - mean * mean, 0.0) / completed);
    EXPECT_NEAR(mean, kDt / u0, std::max(4.0 * se, 1e-12)) << u0;
  }
}
