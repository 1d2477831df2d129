#include "doseopt/error.hpp"
#include "doseopt/optimizer.hpp"

#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace doseopt;
using doseopt::testing::uniform;

namespace {

const Constraint kDaily{Constraint::Kind::DailyMax, 2.0};
const Constraint kWeekly{Constraint::Kind::WeeklyMax, 10.0};

double norm(const WeekValues& a, const WeekValues& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < 7; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double total(const WeekValues& d) { return std::accumulate(d.begin(), d.end(), 0.0); }

// Threshold for the capped simplex by bisection on sum max(d - theta, 0) = cap.
WeekValues bisection_projection(const WeekValues& d, double cap) {
  double lo = -1e3, hi = 1e3;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    double s = 0.0;
    for (double v : d) s += std::max(v - mid, 0.0);
    (s > cap ? lo : hi) = mid;
  }
  WeekValues x{};
  for (std::size_t i = 0; i < 7; ++i) x[i] = std::max(d[i] - hi, 0.0);
  return x;
}

WeekValues random_vector(std::mt19937_64& rng) {
  WeekValues d{};
  for (double& v : d) v = uniform(rng, -3.0, 6.0);
  return d;
}

WeekValues random_feasible(std::mt19937_64& rng, const Constraint& c) {
  WeekValues d{};
  for (double& v : d) v = uniform(rng, 0.0, c.cap);
  return project(d, c);
}

ModelParams tolerance_off() {
  auto p = caffeine_params();
  p.k4 = 0.0;
  p.c_half.reset();
  return p;
}

OptimizerOptions serial() {
  OptimizerOptions o;
  o.parallel = false;
  return o;
}

}  // namespace

TEST_CASE("projection examples") {
  CHECK(project({2.5, -0.3, 1, 1, 1, 1, 1}, kDaily) == WeekValues{2, 0, 1, 1, 1, 1, 1});

  const WeekValues d{3, 3, 3, 3, 0, 0, 0};
  const auto x = project(d, kWeekly);
  const WeekValues expected{2.5, 2.5, 2.5, 2.5, 0, 0, 0};
  for (std::size_t i = 0; i < 7; ++i) CHECK(x[i] == doctest::Approx(expected[i]).epsilon(1e-14));
  // KKT: d - x = theta on the support, d <= theta off it.
  const auto oracle = bisection_projection(d, 10.0);
  for (std::size_t i = 0; i < 7; ++i) CHECK(x[i] == doctest::Approx(oracle[i]).epsilon(1e-12));
  for (std::size_t i = 0; i < 4; ++i) CHECK(d[i] - x[i] == doctest::Approx(0.5));

  const WeekValues inside{1, 0, 2, 0.5, 0, 0, 3};
  CHECK(project(inside, kWeekly) == inside);
  CHECK(project({2, 0, 1, 1, 0, 0, 0}, kDaily) == WeekValues{2, 0, 1, 1, 0, 0, 0});
}

TEST_CASE("property: projections on random vectors") {
  std::mt19937_64 rng(101);
  for (const auto& c : {kDaily, kWeekly}) {
    for (int trial = 0; trial < 1000; ++trial) {
      const auto d = random_vector(rng);
      const auto x = project(d, c);
      REQUIRE(is_feasible(x, c));
      REQUIRE(project(x, c) == x);
      if (c.kind == Constraint::Kind::WeeklyMax && total(d) > 0) {
        WeekValues clamped{};
        for (std::size_t i = 0; i < 7; ++i) clamped[i] = std::max(d[i], 0.0);
        if (total(clamped) > c.cap) {
          const auto oracle = bisection_projection(d, c.cap);
          REQUIRE(norm(x, oracle) < 1e-9);
        }
      }
      // Nonexpansive toward feasible points and between pairs.
      const auto z = random_feasible(rng, c);
      REQUIRE(norm(x, z) <= norm(d, z) + 1e-12);
      const auto e = random_vector(rng);
      REQUIRE(norm(x, project(e, c)) <= norm(d, e) + 1e-12);
    }
  }
}

TEST_CASE("constraint validation") {
  CHECK_THROWS_AS(validate(Constraint{Constraint::Kind::WeeklyMax, -1.0}), Error);
  CHECK_THROWS_AS(validate(Constraint{Constraint::Kind::DailyMax, 0.0}), Error);
  CHECK_THROWS_AS(optimize(caffeine_params(), {}, {}, {Constraint::Kind::DailyMax, -2.0}, 1),
                  Error);
  CHECK_THROWS_AS(optimize(caffeine_params(), {}, {}, kDaily, 1, 0), Error);
}

TEST_CASE("random starts are uniform on the unit cube and seeded") {
  const auto a = random_starts(7, 50);
  CHECK(a == random_starts(7, 50));
  CHECK(a != random_starts(8, 50));
  for (const auto& x : a)
    for (double v : x) CHECK((v >= 0.0 && v < 1.0));
}

TEST_CASE("no tolerance with a daily cap saturates every day") {
  const auto r = optimize(tolerance_off(), {}, {}, kDaily, 1, 4);
  for (double d : r.doses) CHECK(d == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(is_feasible(r.doses, kDaily));
  WeeklyPlan plan;
  plan.doses = r.doses;
  CHECK(r.f_value == evaluate_plan(tolerance_off(), plan, {}));
}

TEST_CASE("no tolerance with a weekly cap spends the budget on the heavy days") {
  const auto r = optimize(tolerance_off(), {}, {}, kWeekly, 1, 2);
  CHECK(total(r.doses) == doctest::Approx(10.0).epsilon(1e-4));
  CHECK(r.doses[0] >= 4.99);
  CHECK(r.doses[3] >= 4.99);
  CHECK(is_feasible(r.doses, kWeekly));
}

TEST_CASE("seed determinism and start bookkeeping") {
  const auto p = caffeine_params();
  const auto a = optimize(p, {}, {}, kDaily, 42, 3);
  const auto b = optimize(p, {}, {}, kDaily, 42, 3, serial());
  CHECK(a.doses == b.doses);
  CHECK(a.f_value == b.f_value);
  CHECK(a.evaluations == b.evaluations);
  CHECK(a.best_start == b.best_start);
  REQUIRE(a.history.size() == 3);
  CHECK(a.seed == 42);
  long evals = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a.history[i].initial == random_starts(42, 3)[i]);
    CHECK(a.history[i].f_value <= a.f_value);
    evals += a.history[i].evaluations;
  }
  CHECK(evals == a.evaluations);
}

TEST_CASE("property: ascent within a start") {
  const auto r = optimize(caffeine_params(), {}, {}, kWeekly, 9, 2, serial());
  for (const auto& s : r.history) {
    REQUIRE(s.trace.size() == static_cast<std::size_t>(s.iterations) + 1);
    for (std::size_t i = 1; i < s.trace.size(); ++i) CHECK(s.trace[i] >= s.trace[i - 1]);
    CHECK(s.trace.back() == s.f_value);
  }
}
