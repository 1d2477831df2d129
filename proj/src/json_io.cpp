#include "doseopt/json_io.hpp"

#include "doseopt/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

namespace doseopt {

namespace {

double number(const json& j, const char* key) {
  if (!j.contains(key)) fail(ErrorKind::Parse, std::string("missing field '") + key + "'");
  const auto& v = j.at(key);
  if (!v.is_number()) fail(ErrorKind::Parse, std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? number(j, key) : fallback;
}

WeekValues week(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array() || j.at(key).size() != kDaysPerWeek)
    fail(ErrorKind::Parse, std::string("field '") + key + "' must be an array of 7 numbers");
  WeekValues out{};
  for (std::size_t i = 0; i < kDaysPerWeek; ++i) {
    if (!j.at(key)[i].is_number())
      fail(ErrorKind::Parse, std::string("field '") + key + "' must contain numbers");
    out[i] = j.at(key)[i].get<double>();
  }
  return out;
}

json week_json(const WeekValues& v) { return json(std::vector<double>(v.begin(), v.end())); }

}  // namespace

ModelParams params_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorKind::Parse, "parameter file must hold a JSON object");
  ModelParams raw;
  raw.e0 = number(j, "e0");
  raw.k1 = number(j, "k1");
  raw.k2 = number(j, "k2");
  raw.k3 = number(j, "k3");
  raw.k4 = number(j, "k4");
  raw.k5 = number(j, "k5");
  raw.k6 = number(j, "k6");
  raw.k7 = number(j, "k7");
  if (!j.contains("c_half")) fail(ErrorKind::Parse, "missing field 'c_half'");
  const auto& ch = j.at("c_half");
  if (ch.is_string()) {
    const auto s = ch.get<std::string>();
    if (s != "inf" && s != "Infinity" && s != "infinity")
      fail(ErrorKind::Parse, "c_half must be a number or \"inf\"");
    raw.c_half.reset();
  } else if (ch.is_number()) {
    raw.c_half = ch.get<double>();
  } else {
    fail(ErrorKind::Parse, "c_half must be a number or \"inf\"");
  }

  std::map<std::string, std::string> units;
  if (j.contains("units")) {
    if (!j.at("units").is_object()) fail(ErrorKind::Parse, "'units' must be an object");
    for (const auto& [field, tag] : j.at("units").items()) {
      if (!tag.is_string()) fail(ErrorKind::Parse, "unit tag for field " + field + " must be a string");
      units[field] = tag.get<std::string>();
    }
  }
  auto p = normalize_params(raw, units);
  validate(p);
  return p;
}

json params_to_json(const ModelParams& p) {
  json j;
  j["e0"] = p.e0;
  j["k1"] = p.k1;
  j["k2"] = p.k2;
  j["k3"] = p.k3;
  j["k4"] = p.k4;
  j["k5"] = p.k5;
  j["k6"] = p.k6;
  j["k7"] = p.k7;
  j["c_half"] = p.c_half ? json(*p.c_half) : json("inf");
  j["units"] = {{"k1", "per_min"}, {"k2", "per_min"}, {"k3", "per_min"}, {"k5", "per_min"}};
  return j;
}

WeeklyPlan plan_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorKind::Parse, "plan must be a JSON object");
  WeeklyPlan plan;
  plan.doses = week(j, "doses");
  plan.cup_mass = number_or(j, "cup_mass_ug", plan.cup_mass);
  plan.window_start = number_or(j, "window_start_min", plan.window_start);
  plan.window_length = number_or(j, "window_length_min", plan.window_length);
  validate(plan);
  return plan;
}

json plan_to_json(const WeeklyPlan& plan) {
  return {{"doses", week_json(plan.doses)},
          {"cup_mass_ug", plan.cup_mass},
          {"window_start_min", plan.window_start},
          {"window_length_min", plan.window_length}};
}

ObjectiveSpec objective_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorKind::Parse, "objective spec must be a JSON object");
  ObjectiveSpec spec;
  if (j.contains("weights")) spec.weights = week(j, "weights");
  spec.sample_minute = number_or(j, "sample_minute", spec.sample_minute);
  spec.horizon_weeks = static_cast<int>(number_or(j, "horizon_weeks", spec.horizon_weeks));
  spec.evaluation_week = j.contains("evaluation_week")
                             ? static_cast<int>(number(j, "evaluation_week"))
                             : spec.horizon_weeks - 1;
  validate(spec);
  return spec;
}

json objective_to_json(const ObjectiveSpec& spec) {
  return {{"weights", week_json(spec.weights)},
          {"sample_minute", spec.sample_minute},
          {"horizon_weeks", spec.horizon_weeks},
          {"evaluation_week", spec.evaluation_week}};
}

DoseSchedule schedule_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorKind::Parse, "schedule must be a JSON object");
  const double horizon = number(j, "horizon_min");
  std::vector<DoseSegment> segs;
  if (j.contains("segments")) {
    if (!j.at("segments").is_array()) fail(ErrorKind::Parse, "'segments' must be an array");
    for (const auto& s : j.at("segments"))
      segs.push_back({number(s, "start_min"), number(s, "end_min"), number(s, "rate_ug_per_min")});
  }
  return DoseSchedule(std::move(segs), horizon);
}

json schedule_to_json(const DoseSchedule& s) {
  json segs = json::array();
  for (const auto& seg : s.segments())
    segs.push_back({{"start_min", seg.start}, {"end_min", seg.end}, {"rate_ug_per_min", seg.rate}});
  return {{"horizon_min", s.horizon()}, {"segments", segs}};
}

json equilibrium_to_json(const EquilibriumSummary& e) {
  return {{"c_eq", e.c_eq},
          {"c_mem_eq", e.c_mem_eq},
          {"e_drug", e.e_drug},
          {"e_drug_tol", e.e_drug_tol},
          {"e_withdrawal", e.e_withdrawal}};
}

json opt_result_to_json(const OptResult& r) {
  json history = json::array();
  for (std::size_t i = 0; i < r.history.size(); ++i) {
    const auto& h = r.history[i];
    history.push_back({{"start", i},
                       {"initial", week_json(h.initial)},
                       {"doses", week_json(h.doses)},
                       {"f_value", h.f_value},
                       {"iterations", h.iterations},
                       {"evaluations", h.evaluations},
                       {"converged", h.converged},
                       {"stop_reason", h.stop_reason}});
  }
  return {{"doses", week_json(r.doses)}, {"f_value", r.f_value},
          {"evaluations", r.evaluations}, {"starts", r.starts},
          {"converged", r.converged},     {"seed", r.seed},
          {"best_start", r.best_start},   {"history", history}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Parse, path + ": " + e.what());
  }
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t_min,C,C_mem,F,E_b,E\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& s = traj.states[i];
    out << format_double(traj.times[i]) << ',' << format_double(s.c) << ','
        << format_double(s.c_mem) << ',' << format_double(s.f) << ',' << format_double(s.e_b)
        << ',' << format_double(traj.effects[i]) << '\n';
  }
}

Trajectory slice(const Trajectory& traj, double t_from, double t_to) {
  Trajectory out;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (traj.times[i] < t_from || traj.times[i] > t_to) continue;
    out.times.push_back(traj.times[i]);
    out.states.push_back(traj.states[i]);
    out.effects.push_back(traj.effects[i]);
  }
  return out;
}

}  // namespace doseopt
