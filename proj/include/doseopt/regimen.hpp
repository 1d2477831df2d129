#pragma once

#include "doseopt/kinetics.hpp"
#include "doseopt/schedule.hpp"

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace doseopt {

inline constexpr std::size_t kDaysPerWeek = 7;
inline constexpr double kMinutesPerWeek = kDaysPerWeek * kMinutesPerDay;

using WeekValues = std::array<double, kDaysPerWeek>;

/// One dose per weekday (in cups), taken in a fixed daily window.
struct WeeklyPlan {
  WeekValues doses{};
  double cup_mass = 1e5;        // ug per cup
  double window_start = 720.0;  // minute of day
  double window_length = 15.0;  // minutes
};

/// Weighted square-root objective sampled once a day in one week.
struct ObjectiveSpec {
  WeekValues weights{10.0, 0.2, 0.2, 10.0, 0.2, 0.2, 0.2};
  double sample_minute = 900.0;  // minute of day
  int horizon_weeks = 3;
  int evaluation_week = 2;  // zero-based
};

void validate(const WeeklyPlan& plan);
void validate(const ObjectiveSpec& spec);

/// Repeats the plan for `weeks` weeks. Day i of each week gets rate
/// doses[i] * cup_mass / window_length over its window; zero-dose days add
/// no segment. The horizon is `weeks` whole weeks.
DoseSchedule plan_to_schedule(const WeeklyPlan& plan, int weeks);

/// Names: "daily-one-cup", "two-cups-two-weeks", "weekday-140".
DoseSchedule preset_regimen(std::string_view name);
const std::vector<std::string>& preset_names();

/// Alertness at the sample minute of each day of the evaluation week, read
/// from recorded grid points (no interpolation).
WeekValues sample_alertness(const Trajectory& traj, const ObjectiveSpec& spec);

/// sum_i w_i sqrt(max(e_i, 0)).
double objective(const WeekValues& e, const WeekValues& weights);

/// Builds the schedule, snaps it to the dt grid, integrates from rest with
/// forward Euler and returns the objective.
double evaluate_plan(const ModelParams& p, const WeeklyPlan& plan, const ObjectiveSpec& spec,
                     double dt = 1.0);

/// Same pipeline, returning the sampled alertness values.
WeekValues plan_alertness(const ModelParams& p, const WeeklyPlan& plan,
                          const ObjectiveSpec& spec, double dt = 1.0);

}  // namespace doseopt
