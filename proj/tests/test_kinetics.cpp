#include "doseopt/error.hpp"
#include "doseopt/kinetics.hpp"
#include "doseopt/regimen.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace doseopt;
using doseopt::testing::random_schedule;
using doseopt::testing::rel_err;

namespace {

double max_effect_gap(const Trajectory& a, const Trajectory& b, std::size_t b_per_a) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a.effects[i] - b.effects[i * b_per_a]));
  return m;
}

}  // namespace

TEST_CASE("derivatives at rest are zero") {
  const auto d = derivatives(caffeine_params(), State{}, 0.0);
  CHECK(d == State{});
}

TEST_CASE("derivatives by hand substitution") {
  const auto p = caffeine_params();
  CHECK(derivatives(p, {2.5, 0, 0, 0}, 0.0).c == doctest::Approx(-0.005).epsilon(1e-12));
  CHECK(derivatives(p, {0, 1, 0, 0}, 0.0).e_b == doctest::Approx(-0.3 * p.k3).epsilon(1e-12));
  const auto d = derivatives(p, {1.0, 0.5, 0.2, -0.1}, 100.0);
  CHECK(d.c == doctest::Approx(p.k1 * (p.k7 * 100.0 - 1.0)));
  CHECK(d.c_mem == doctest::Approx(p.k5 * 0.5));
  CHECK(d.f == doctest::Approx(p.k2 * (p.k6 - 0.2)));
  CHECK(d.e_b == doctest::Approx(p.k3 * (0.0 - 0.3 * 0.5 + 0.1)));
}

TEST_CASE("effect formula") {
  auto p = caffeine_params();
  const State s{1.0, 0.0, 0.7, -0.2};
  CHECK(effect(p, s) == -0.2 + 0.7);

  p.c_half = 0.25;
  CHECK(effect(p, {1.0, 0.25, 0.7, -0.2}) == doctest::Approx(-0.2 + 0.35));
  CHECK(effect(p, s) == -0.2 + 0.7);

  p.c_half.reset();
  CHECK(effect(p, {1.0, 1e6, 0.7, -0.2}) == -0.2 + 0.7);
}

TEST_CASE("euler step") {
  const auto p = caffeine_params();
  const State s{2.5, 0.1, 0.3, -0.05};
  CHECK(euler_step(p, s, 42.0, 0.0) == s);
  CHECK(euler_step(p, {2.5, 0, 0, 0}, 0.0, 1.0).c == doctest::Approx(2.495).epsilon(1e-14));

  CHECK_THROWS_AS(euler_step(p, s, 0.0, 20.0), Error);
  CHECK_THROWS_AS(euler_step(p, s, 0.0, -1.0), Error);
  CHECK_THROWS_AS(euler_step(p, s, -1.0, 1.0), Error);
  CHECK_THROWS_AS(euler_step(p, {std::nan(""), 0, 0, 0}, 0.0, 1.0), Error);
}

TEST_CASE("two half steps differ from one full step at second order") {
  const auto p = caffeine_params();
  const State s{1.0, 0.2, 0.1, -0.05};
  auto gap = [&](double dt) {
    const State full = euler_step(p, s, 500.0, dt);
    const State half = euler_step(p, euler_step(p, s, 500.0, dt / 2), 500.0, dt / 2);
    return std::abs(full.f - half.f);
  };
  const double ratio = gap(2.0) / gap(1.0);
  CHECK(ratio == doctest::Approx(4.0).epsilon(1e-6));
}

TEST_CASE("zero schedule from rest is constant") {
  for (const auto& p : {caffeine_params(), nicotine_params()}) {
    const auto traj = integrate(p, rest_state(p), DoseSchedule({}, 2880), 1.0, 2880.0);
    REQUIRE(traj.size() == 2881);
    for (std::size_t i = 0; i < traj.size(); ++i) {
      CHECK(traj.states[i] == rest_state(p));
      CHECK(traj.effects[i] == p.e0);
    }
    const auto ref = integrate_reference(p, rest_state(p), DoseSchedule({}, 2880), 1.0, 2880.0);
    CHECK(ref.states.back() == rest_state(p));
  }
}

TEST_CASE("peak concentration of a 15 minute cup matches the closed form") {
  const auto p = caffeine_params();
  const double rate = 1e5 / 15.0;
  const double closed = p.k7 * rate * (1.0 - std::exp(-p.k1 * 15.0));
  CHECK(closed == doctest::Approx(2.463).epsilon(2e-4));

  const DoseSchedule cup({{0.0, 15.0, rate}}, 60.0);
  const auto traj = integrate(p, rest_state(p), cup, 0.1, 60.0);
  double peak = 0.0, peak_t = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i)
    if (traj.states[i].c > peak) peak = traj.states[i].c, peak_t = traj.times[i];
  CHECK(peak_t == doctest::Approx(15.0));
  CHECK(rel_err(peak, closed) < 1e-3);
}

TEST_CASE("single-step dose converges to the impulse response") {
  const auto p = caffeine_params();
  auto worst = [&](double dt) {
    const DoseSchedule bolus({{0.0, dt, 1e5 / dt}}, 1440.0);
    const auto traj = integrate(p, rest_state(p), bolus, dt, 1440.0);
    double w = 0.0;
    for (std::size_t i = 1; i < traj.size(); ++i) {
      const double exact = p.k1 * p.k7 * 1e5 * std::exp(-p.k1 * traj.times[i]);
      w = std::max(w, rel_err(traj.states[i].c, exact));
    }
    return w;
  };
  const double coarse = worst(1.0);
  const double fine = worst(0.1);
  CHECK(fine < coarse);
  CHECK(fine < 0.01);
  CHECK(coarse / fine == doctest::Approx(10.0).epsilon(0.05));
}

TEST_CASE("grid checks") {
  const auto p = caffeine_params();
  const DoseSchedule off({{720.0, 735.0, 1.0}}, 1440.0);
  CHECK_THROWS_AS(integrate(p, rest_state(p), off, 2.0, 1440.0), Error);
  CHECK_NOTHROW(integrate(p, rest_state(p), off, 0.5, 1440.0));
  CHECK_THROWS_AS(integrate(p, rest_state(p), off, 1.0, 1440.5), Error);
  CHECK_THROWS_AS(integrate(p, rest_state(p), off, 25.0, 1440.0), Error);
  CHECK_THROWS_AS(integrate(p, rest_state(p), off, 1.0, 1440.0, 0), Error);
  CHECK_THROWS_AS(integrate_reference(p, rest_state(p), off, 2.0, 1440.0), Error);
}

TEST_CASE("record stride keeps both endpoints") {
  const auto p = caffeine_params();
  const auto sched = preset_regimen("daily-one-cup");
  const auto full = integrate(p, rest_state(p), sched, 1.0, 1000.0);
  const auto strided = integrate(p, rest_state(p), sched, 1.0, 1000.0, 300);
  REQUIRE(strided.size() == 5);  // 0, 300, 600, 900, 1000
  CHECK(strided.times.front() == 0.0);
  CHECK(strided.times.back() == 1000.0);
  for (std::size_t i = 0; i < strided.size(); ++i) {
    const auto k = static_cast<std::size_t>(strided.times[i]);
    CHECK(strided.states[i] == full.states[k]);
    CHECK(strided.effects[i] == effect(p, strided.states[i]));
  }
}

TEST_CASE("integration is deterministic") {
  const auto p = caffeine_params();
  const auto sched = preset_regimen("weekday-140");
  const auto a = integrate(p, rest_state(p), sched, 1.0, sched.horizon());
  const auto b = integrate(p, rest_state(p), sched, 1.0, sched.horizon());
  CHECK(a.times == b.times);
  CHECK(a.states == b.states);
  CHECK(a.effects == b.effects);
}

TEST_CASE("property: nonnegativity under random schedules") {
  std::mt19937_64 rng(11);
  for (const auto& p : {caffeine_params(), nicotine_params()}) {
    // dt just under 1 / max(k1, k2, k5)
    const double dt = p.k2 > 0.09 ? 9.5 : 12.0;
    for (int trial = 0; trial < 20; ++trial) {
      const auto sched = random_schedule(rng, dt, 14 * 1440.0, 6, 5000.0);
      const auto traj = integrate(p, rest_state(p), sched, dt, sched.horizon());
      for (const auto& s : traj.states) {
        REQUIRE(s.c >= 0.0);
        REQUIRE(s.c_mem >= 0.0);
        REQUIRE(s.f >= 0.0);
      }
    }
  }
}

TEST_CASE("property: superposition without tolerance") {
  auto p = caffeine_params();
  p.k4 = 0.0;
  p.c_half.reset();
  std::mt19937_64 rng(5);
  const double dt = 1.0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = random_schedule(rng, dt, 7 * 1440.0, 5, 3000.0);
    const auto b = random_schedule(rng, dt, 7 * 1440.0, 5, 3000.0);
    const auto ta = integrate(p, rest_state(p), a, dt, 7 * 1440.0);
    const auto tb = integrate(p, rest_state(p), b, dt, 7 * 1440.0);
    const auto tab = integrate(p, rest_state(p), a + b, dt, 7 * 1440.0);
    double scale = 1e-12;
    for (double e : tab.effects) scale = std::max(scale, std::abs(e - p.e0));
    for (std::size_t i = 0; i < tab.size(); ++i) {
      const double sum = (ta.effects[i] - p.e0) + (tb.effects[i] - p.e0);
      REQUIRE(std::abs(tab.effects[i] - p.e0 - sum) <= 10 * dt * scale);
      REQUIRE(std::abs(tab.effects[i] - p.e0 - sum) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("property: discrete exponential decay after dosing") {
  const auto p = caffeine_params();
  const double dt = 0.5;
  const DoseSchedule cup({{0.0, 15.0, 1e5 / 15.0}}, 2000.0);
  const auto traj = integrate(p, rest_state(p), cup, dt, 2000.0);
  for (std::size_t i = 31; i + 1 < traj.size(); ++i) {
    const double expected = traj.states[i].c * (1.0 - p.k1 * dt);
    REQUIRE(traj.states[i + 1].c == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("euler converges linearly to the fourth-order reference") {
  const auto p = caffeine_params();
  const auto sched = preset_regimen("daily-one-cup");
  const double t_end = sched.horizon();
  const auto ref = integrate_reference(p, rest_state(p), sched, 0.25, t_end);
  const double e1 = max_effect_gap(integrate(p, rest_state(p), sched, 1.0, t_end), ref, 4);
  const double e2 = max_effect_gap(integrate(p, rest_state(p), sched, 0.5, t_end), ref, 2);
  const double e3 = max_effect_gap(integrate(p, rest_state(p), sched, 0.25, t_end), ref, 1);
  CHECK(std::log2(e1 / e2) == doctest::Approx(1.0).epsilon(0.2));
  CHECK(std::log2(e2 / e3) == doctest::Approx(1.0).epsilon(0.2));
  // Day-1 agreement within O(dt).
  CHECK(e1 < 0.05);
}

TEST_CASE("reference integrator self-converges at fourth order") {
  const auto p = caffeine_params();
  WeeklyPlan plan;
  plan.doses.fill(1.0);
  plan.window_length = 16.0;  // breakpoints on the 2-minute grid
  const auto sched = plan_to_schedule(plan, 1);
  const double t_end = sched.horizon();
  const auto r2 = integrate_reference(p, rest_state(p), sched, 2.0, t_end);
  const auto r1 = integrate_reference(p, rest_state(p), sched, 1.0, t_end);
  const auto r05 = integrate_reference(p, rest_state(p), sched, 0.5, t_end);
  const double e_coarse = max_effect_gap(r2, r1, 2);
  const double e_fine = max_effect_gap(r1, r05, 2);
  CHECK(std::log2(e_coarse / e_fine) == doctest::Approx(4.0).epsilon(0.1));
}
