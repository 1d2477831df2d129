#include "doseopt/regimen.hpp"

#include "doseopt/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace doseopt {

void validate(const WeeklyPlan& plan) {
  for (std::size_t i = 0; i < kDaysPerWeek; ++i)
    if (!std::isfinite(plan.doses[i]) || plan.doses[i] < 0)
      fail(ErrorKind::InvalidArgument, "plan dose for day " + std::to_string(i + 1) + " must be >= 0");
  if (!std::isfinite(plan.cup_mass) || plan.cup_mass < 0)
    fail(ErrorKind::InvalidArgument, "cup mass must be finite and >= 0");
  if (!(plan.window_length > 0) || !std::isfinite(plan.window_length))
    fail(ErrorKind::InvalidArgument, "dosing window length must be positive");
  if (!(plan.window_start >= 0) || plan.window_start + plan.window_length > kMinutesPerDay)
    fail(ErrorKind::InvalidArgument, "dosing window must fit within one day");
}

void validate(const ObjectiveSpec& spec) {
  for (double w : spec.weights)
    if (!std::isfinite(w) || w < 0) fail(ErrorKind::InvalidArgument, "objective weights must be >= 0");
  if (!(spec.sample_minute >= 0) || !(spec.sample_minute < kMinutesPerDay))
    fail(ErrorKind::InvalidArgument, "sample minute must lie within the day");
  if (spec.horizon_weeks < 1) fail(ErrorKind::InvalidArgument, "horizon must be at least one week");
  if (spec.evaluation_week < 0 || spec.evaluation_week >= spec.horizon_weeks)
    fail(ErrorKind::InvalidArgument, "evaluation week must be inside the horizon");
}

DoseSchedule plan_to_schedule(const WeeklyPlan& plan, int weeks) {
  validate(plan);
  if (weeks < 0) fail(ErrorKind::InvalidArgument, "week count must be >= 0");
  std::vector<DoseSegment> segments;
  for (int w = 0; w < weeks; ++w) {
    for (std::size_t d = 0; d < kDaysPerWeek; ++d) {
      if (plan.doses[d] == 0.0) continue;
      const double day_start = (w * static_cast<double>(kDaysPerWeek) + d) * kMinutesPerDay;
      const double start = day_start + plan.window_start;
      segments.push_back({start, start + plan.window_length,
                          plan.doses[d] * plan.cup_mass / plan.window_length});
    }
  }
  return DoseSchedule(std::move(segments), weeks * kMinutesPerWeek);
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"daily-one-cup", "two-cups-two-weeks",
                                              "weekday-140"};
  return names;
}

DoseSchedule preset_regimen(std::string_view name) {
  constexpr int kWeeks = 4;
  WeeklyPlan plan;
  if (name == "daily-one-cup") {
    plan.doses.fill(1.0);
    return plan_to_schedule(plan, kWeeks);
  }
  if (name == "two-cups-two-weeks") {
    plan.doses.fill(2.0);
    const auto first = plan_to_schedule(plan, 2);
    return DoseSchedule(first.segments(), kWeeks * kMinutesPerWeek);
  }
  if (name == "weekday-140") {
    plan.doses = {1.4, 1.4, 1.4, 1.4, 1.4, 0.0, 0.0};
    return plan_to_schedule(plan, kWeeks);
  }
  std::string valid;
  for (const auto& n : preset_names()) valid += (valid.empty() ? "" : ", ") + n;
  fail(ErrorKind::InvalidArgument, "unknown preset '" + std::string(name) + "' (valid: " + valid + ")");
}

namespace {

std::array<double, kDaysPerWeek> sample_times(const ObjectiveSpec& spec) {
  std::array<double, kDaysPerWeek> t{};
  for (std::size_t i = 0; i < kDaysPerWeek; ++i)
    t[i] = (spec.evaluation_week * static_cast<double>(kDaysPerWeek) + i) * kMinutesPerDay +
           spec.sample_minute;
  return t;
}

}  // namespace

WeekValues sample_alertness(const Trajectory& traj, const ObjectiveSpec& spec) {
  validate(spec);
  WeekValues e{};
  const auto when = sample_times(spec);
  for (std::size_t i = 0; i < kDaysPerWeek; ++i) {
    const double t = when[i];
    const double tol = 1e-9 * std::max(1.0, t);
    auto it = std::lower_bound(traj.times.begin(), traj.times.end(), t - tol);
    if (it == traj.times.end() || std::abs(*it - t) > tol)
      fail(ErrorKind::InvalidArgument,
           "sample instant t = " + std::to_string(t) + " min is not a recorded grid point");
    e[i] = traj.effects[static_cast<std::size_t>(it - traj.times.begin())];
  }
  return e;
}

double objective(const WeekValues& e, const WeekValues& weights) {
  double f = 0.0;
  for (std::size_t i = 0; i < kDaysPerWeek; ++i) f += weights[i] * std::sqrt(std::max(e[i], 0.0));
  return f;
}

WeekValues plan_alertness(const ModelParams& p, const WeeklyPlan& plan,
                          const ObjectiveSpec& spec, double dt) {
  validate(p);
  validate(spec);
  const auto schedule = snap_to_grid(plan_to_schedule(plan, spec.horizon_weeks), dt);
  const double t_end = spec.horizon_weeks * kMinutesPerWeek;
  const std::size_t steps = detail::check_grid(p, schedule, dt, t_end);

  // Sample steps, in increasing order.
  std::array<std::size_t, kDaysPerWeek> sample_steps{};
  const auto when = sample_times(spec);
  for (std::size_t i = 0; i < kDaysPerWeek; ++i) {
    if (!on_grid(when[i], dt))
      fail(ErrorKind::InvalidArgument, "sample minute is not on the dt grid");
    sample_steps[i] = static_cast<std::size_t>(std::llround(when[i] / dt));
  }

  WeekValues e{};
  std::size_t next = 0;
  const detail::StepRates rates(schedule, dt);
  while (next < kDaysPerWeek && sample_steps[next] == 0) e[next++] = effect(p, rest_state(p));
  const std::size_t last = sample_steps.back();
  detail::run_euler(p, rest_state(p), rates, dt, std::min(steps, last),
                    [&](std::size_t i, const State& s) {
                      if (next < kDaysPerWeek && i == sample_steps[next]) e[next++] = effect(p, s);
                    });
  for (double v : e)
    if (!std::isfinite(v)) fail(ErrorKind::Numeric, "objective evaluation produced a non-finite effect");
  return e;
}

double evaluate_plan(const ModelParams& p, const WeeklyPlan& plan, const ObjectiveSpec& spec,
                     double dt) {
  return objective(plan_alertness(p, plan, spec, dt), spec.weights);
}

}  // namespace doseopt
