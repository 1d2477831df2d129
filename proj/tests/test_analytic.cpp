#include "doseopt/analytic.hpp"
#include "doseopt/error.hpp"
#include "doseopt/kinetics.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace doseopt;
using doseopt::testing::rel_err;

namespace {

constexpr double kCupPerDay = 1e5 / 1440.0;

State run_constant(const ModelParams& p, double rate, double t_end, double dt) {
  const DoseSchedule s({{0.0, t_end, rate}}, t_end);
  return integrate(p, rest_state(p), s, dt, t_end, 1000000).states.back();
}

}  // namespace

TEST_CASE("impulse concentration") {
  const auto p = caffeine_params();
  CHECK(impulse_concentration(p, 1e5, 0.0) == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(impulse_concentration(p, 1e5, std::log(2.0) / p.k1) == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(std::log(2.0) / p.k1 == doctest::Approx(346.57).epsilon(2e-5));
  for (double t : {0.0, 10.0, 1e4}) CHECK(impulse_concentration(p, 0.0, t) == 0.0);
  CHECK_THROWS_AS(impulse_concentration(p, 1e5, -1.0), Error);
}

TEST_CASE("constant-dose equilibrium") {
  const auto p = caffeine_params();
  const auto zero = constant_dose_equilibrium(p, 0.0);
  CHECK(zero.c_eq == 0.0);
  CHECK(zero.c_mem_eq == 0.0);
  CHECK(zero.e_drug == p.e0);
  CHECK(zero.e_drug_tol == p.e0);
  CHECK(zero.e_withdrawal == p.e0);

  const auto eq = constant_dose_equilibrium(p, kCupPerDay);
  CHECK(eq.c_eq == doctest::Approx(0.868).epsilon(1e-3));
  CHECK(eq.c_mem_eq == eq.c_eq);
  CHECK(eq.e_drug_tol - p.e0 == doctest::Approx(0.0868).epsilon(1e-3));
  CHECK(eq.e_withdrawal == doctest::Approx(-0.260).epsilon(2e-3));
  CHECK(eq.e_drug - eq.e_drug_tol == doctest::Approx(p.k4 * p.k7 * kCupPerDay));
  CHECK(eq.e_withdrawal == doctest::Approx(p.e0 - p.k4 * p.k7 * kCupPerDay));

  auto cancel = p;
  cancel.k4 = cancel.k6;
  CHECK(constant_dose_equilibrium(cancel, kCupPerDay).e_drug_tol == doctest::Approx(p.e0));

  CHECK_THROWS_AS(constant_dose_equilibrium(nicotine_params(), 1.0), Error);
  CHECK_THROWS_AS(constant_dose_equilibrium(p, -1.0), Error);
}

TEST_CASE("k4 estimator") {
  CHECK(estimate_k4(0.4, 0.0, 2.0, 0.5) == 0.3);
  CHECK(estimate_k4(0.4, 0.0, 2.0, 2.0) == 0.0);
  CHECK(estimate_k4(0.4, 1.0, 3.0, 1.0) == 0.4);
  CHECK_THROWS_AS(estimate_k4(0.4, 1.0, 1.0, 0.5), Error);
}

TEST_CASE("oracle agreement: one-step bolus against the impulse curve") {
  const auto p = caffeine_params();
  const double dt = 0.1;
  const DoseSchedule bolus({{0.0, dt, 1e5 / dt}}, 1440.0);
  const auto traj = integrate(p, rest_state(p), bolus, dt, 1440.0);
  double worst = 0.0;
  for (std::size_t i = 1; i < traj.size(); ++i)
    worst = std::max(worst, rel_err(traj.states[i].c, impulse_concentration(p, 1e5, traj.times[i])));
  CHECK(worst < 0.01);
}

TEST_CASE("equilibrium convergence under constant dosing") {
  const auto p = caffeine_params();
  const double t_end = 10.0 / std::min({p.k1, p.k3, p.k5});
  const State s = run_constant(p, kCupPerDay, t_end, 1.0);
  const auto eq = constant_dose_equilibrium(p, kCupPerDay);
  CHECK(rel_err(s.c, eq.c_eq) < 1e-3);
  CHECK(rel_err(s.c_mem, eq.c_mem_eq) < 1e-3);
  CHECK(rel_err(s.e_b, eq.e_withdrawal) < 1e-3);
  CHECK(rel_err(s.f, eq.e_drug - p.e0) < 1e-3);
  CHECK(effect(p, s) == doctest::Approx(eq.e_drug_tol).epsilon(2e-3));
}

TEST_CASE("k4 round trip through simulated equilibria") {
  auto base = caffeine_params();
  const double t_end = 10.0 / std::min({base.k1, base.k3, base.k5});
  auto naive = base;
  naive.k4 = 0.0;
  const double e_drug = effect(naive, run_constant(naive, kCupPerDay, t_end, 1.0));
  for (double k4 : {0.0, 0.1, 0.3, 0.55, 0.8, 1.0}) {
    auto p = base;
    p.k4 = k4;
    const double e_tol = effect(p, run_constant(p, kCupPerDay, t_end, 1.0));
    const double est = estimate_k4(p.k6, p.e0, e_drug, e_tol);
    CAPTURE(k4);
    CHECK(std::abs(est - k4) <= 0.05 * std::max(k4, 1e-3));
  }
}
