#pragma once

#include "doseopt/analytic.hpp"
#include "doseopt/kinetics.hpp"
#include "doseopt/optimizer.hpp"
#include "doseopt/regimen.hpp"

#include <json.hpp>

#include <ostream>
#include <string>

// JSON and CSV encodings of the library types.
namespace doseopt {

using nlohmann::json;

/// Accepts {e0, k1..k7, c_half, units: {field: tag}}; c_half may be the
/// string "inf". Returned parameters are normalized to per-minute rates.
ModelParams params_from_json(const json& j);
/// Normalized form; all units "per_min", c_half "inf" when disabled.
json params_to_json(const ModelParams& p);

WeeklyPlan plan_from_json(const json& j);
json plan_to_json(const WeeklyPlan& plan);

ObjectiveSpec objective_from_json(const json& j);
json objective_to_json(const ObjectiveSpec& spec);

DoseSchedule schedule_from_json(const json& j);
json schedule_to_json(const DoseSchedule& s);

json equilibrium_to_json(const EquilibriumSummary& e);
json opt_result_to_json(const OptResult& r);

/// Parses a file as JSON; Io errors for unreadable files, Parse errors for
/// malformed contents.
json read_json_file(const std::string& path);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

/// Header `t_min,C,C_mem,F,E_b,E` then one row per sample.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

/// Restriction of a trajectory to samples with t_from <= time <= t_to.
Trajectory slice(const Trajectory& traj, double t_from, double t_to);

}  // namespace doseopt
