// Command-line front end over the doseopt C interface.
#include "doseopt/doseopt.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

class CommandError : public std::runtime_error {
public:
  CommandError(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int code() const { return code_; }

private:
  int code_;
};

[[noreturn]] void config_error(const std::string& what) { throw CommandError(kExitConfig, what); }

void check(doseopt_status st) {
  if (st == DOSEOPT_OK) return;
  throw CommandError(st == DOSEOPT_ERR_NUMERIC ? kExitNumeric : kExitConfig, doseopt_last_error());
}

template <auto Fn>
struct Release {
  template <class T>
  void operator()(T* p) const { Fn(p); }
};

using Params = std::unique_ptr<doseopt_params, Release<doseopt_params_free>>;
using Schedule = std::unique_ptr<doseopt_schedule, Release<doseopt_schedule_free>>;
using Trajectory = std::unique_ptr<doseopt_trajectory, Release<doseopt_trajectory_free>>;
using Series = std::unique_ptr<doseopt_series, Release<doseopt_series_free>>;
using OptResult = std::unique_ptr<doseopt_opt_result, Release<doseopt_opt_result_free>>;

json take_json(char* text) {
  std::unique_ptr<char, Release<doseopt_string_free>> owned(text);
  return json::parse(owned.get());
}

// Output files are written under temporary names and renamed together on
// commit, so a failing command leaves nothing behind.
class OutputDir {
public:
  explicit OutputDir(fs::path dir) : dir_(std::move(dir)) {}
  OutputDir(const OutputDir&) = delete;
  OutputDir& operator=(const OutputDir&) = delete;

  ~OutputDir() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& [tmp, dest] : staged_) fs::remove(tmp, ec);
  }

  fs::path stage(const std::string& name) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) config_error("cannot create output directory " + dir_.string() + ": " + ec.message());
    const fs::path dest = dir_ / name;
    const fs::path tmp = dir_ / (name + ".partial");
    staged_.emplace_back(tmp, dest);
    return tmp;
  }

  void write_json(const std::string& name, const json& j) {
    const auto path = stage(name);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << j.dump(2) << '\n';
    if (!out) config_error("cannot write " + path.string());
  }

  void write_text(const std::string& name, const std::string& text) {
    const auto path = stage(name);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) config_error("cannot write " + path.string());
  }

  void commit() {
    for (const auto& [tmp, dest] : staged_) {
      std::error_code ec;
      fs::rename(tmp, dest, ec);
      if (ec) config_error("cannot finalize " + dest.string() + ": " + ec.message());
    }
    committed_ = true;
  }

private:
  fs::path dir_;
  std::vector<std::pair<fs::path, fs::path>> staged_;
  bool committed_ = false;
};

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Params load_params(const std::string& name_or_path) {
  doseopt_params* p = nullptr;
  check(doseopt_params_load(name_or_path.c_str(), &p));
  return Params(p);
}

json params_json(const doseopt_params* p) {
  char* text = nullptr;
  check(doseopt_params_to_json(p, &text));
  return take_json(text);
}

json schedule_json(const doseopt_schedule* s) {
  char* text = nullptr;
  check(doseopt_schedule_to_json(s, &text));
  return take_json(text);
}

Schedule snapped(const doseopt_schedule* s, double dt) {
  doseopt_schedule* out = nullptr;
  check(doseopt_schedule_snap(s, dt, &out));
  return Schedule(out);
}

doseopt_constraint parse_constraint(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) config_error("constraint must look like daily:2 or weekly:10");
  const std::string kind = text.substr(0, colon);
  doseopt_constraint c{};
  if (kind == "daily") c.kind = DOSEOPT_DAILY_MAX;
  else if (kind == "weekly") c.kind = DOSEOPT_WEEKLY_MAX;
  else config_error("unknown constraint kind '" + kind + "' (use daily or weekly)");
  try {
    std::size_t used = 0;
    c.cap = std::stod(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    config_error("constraint cap in '" + text + "' is not a number");
  }
  if (!(c.cap > 0) || !std::isfinite(c.cap)) config_error("constraint cap must be positive");
  return c;
}

json constraint_json(const doseopt_constraint& c) {
  return {{"kind", c.kind == DOSEOPT_DAILY_MAX ? "daily_max" : "weekly_max"}, {"cap", c.cap}};
}

json plan_json(const doseopt_weekly_plan& p) {
  return {{"doses", std::vector<double>(p.doses, p.doses + DOSEOPT_DAYS)},
          {"cup_mass_ug", p.cup_mass_ug},
          {"window_start_min", p.window_start_min},
          {"window_length_min", p.window_length_min}};
}

json objective_json(const doseopt_objective_spec& s) {
  return {{"weights", std::vector<double>(s.weights, s.weights + DOSEOPT_DAYS)},
          {"sample_minute", s.sample_minute},
          {"horizon_weeks", s.horizon_weeks},
          {"evaluation_week", s.evaluation_week}};
}

// ---------------------------------------------------------------------------

struct Common {
  std::string params = "caffeine";
  double dt = 1.0;
  std::uint64_t seed = 0;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c, bool with_out = true) {
  cmd->add_option("--params", c.params, "Built-in parameter set (caffeine, nicotine) or JSON file")
      ->capture_default_str();
  cmd->add_option("--dt", c.dt, "Integration step in minutes")->capture_default_str();
  cmd->add_option("--seed", c.seed, "Random seed recorded in outputs")->capture_default_str();
  if (with_out) cmd->add_option("--out", c.out, "Output directory")->required();
}

json run_header(const std::string& command, const Common& c, const doseopt_params* p) {
  return {{"command", command},
          {"version", doseopt_version()},
          {"params", params_json(p)},
          {"dt", c.dt},
          {"seed", c.seed}};
}

struct SimulateArgs {
  Common common;
  std::string preset;
  std::string plan;
  std::string schedule;
  int weeks = 4;
  std::size_t stride = 1;
  std::optional<double> t_end;
};

int cmd_simulate(const SimulateArgs& a) {
  const auto params = load_params(a.common.params);
  const int sources = !a.preset.empty() + !a.plan.empty() + !a.schedule.empty();
  if (sources > 1) config_error("use only one of --preset, --plan and --schedule");

  Schedule schedule;
  json source;
  doseopt_schedule* raw = nullptr;
  if (!a.preset.empty()) {
    check(doseopt_schedule_preset(a.preset.c_str(), &raw));
    schedule = snapped(Schedule(raw).get(), a.common.dt);
    source = {{"preset", a.preset}};
  } else if (!a.plan.empty()) {
    doseopt_weekly_plan plan{};
    check(doseopt_weekly_plan_load(a.plan.c_str(), &plan));
    check(doseopt_schedule_from_plan(&plan, a.weeks, &raw));
    schedule = snapped(Schedule(raw).get(), a.common.dt);
    source = {{"plan", plan_json(plan)}, {"weeks", a.weeks}};
  } else if (!a.schedule.empty()) {
    check(doseopt_schedule_load(a.schedule.c_str(), &raw));
    schedule.reset(raw);
    source = {{"schedule_file", a.schedule}};
  } else {
    check(doseopt_schedule_create(a.weeks * 7 * 1440.0, &raw));
    schedule.reset(raw);
    source = {{"empty_weeks", a.weeks}};
  }

  const double t_end = a.t_end.value_or(doseopt_schedule_horizon(schedule.get()));
  doseopt_trajectory* traj_raw = nullptr;
  check(doseopt_integrate(params.get(), nullptr, schedule.get(), a.common.dt, t_end, a.stride,
                          &traj_raw));
  const Trajectory traj(traj_raw);

  const std::size_t n = doseopt_trajectory_size(traj.get());
  double peak = -INFINITY, peak_t = 0, low = INFINITY, low_t = 0;
  doseopt_state last{};
  for (std::size_t i = 0; i < n; ++i) {
    double t = 0, e = 0;
    check(doseopt_trajectory_sample(traj.get(), i, &t, &last, &e));
    if (e > peak) peak = e, peak_t = t;
    if (e < low) low = e, low_t = t;
  }

  json summary = run_header("simulate", a.common, params.get());
  summary["record_stride"] = a.stride;
  summary["t_end_min"] = t_end;
  summary["source"] = source;
  summary["schedule"] = schedule_json(schedule.get());
  summary["samples"] = n;
  summary["peak_E"] = peak;
  summary["peak_E_time_min"] = peak_t;
  summary["min_E"] = low;
  summary["min_E_time_min"] = low_t;
  summary["final_E_b"] = last.e_b;
  summary["total_dose_mass_ug"] = doseopt_schedule_total_mass(schedule.get());

  OutputDir out(a.common.out);
  check(doseopt_trajectory_write_csv(traj.get(), out.stage("trajectory.csv").c_str()));
  out.write_json("summary.json", summary);
  out.commit();

  std::cout << "samples " << n << ", peak E " << fmt_short(peak) << ", min E " << fmt_short(low)
            << ", final E_b " << fmt_short(last.e_b) << "\n";
  return kExitOk;
}

struct AnalyzeArgs {
  Common common;
  double dose_rate = 0.0;
  std::optional<double> e_drug;
  std::optional<double> e_drug_tol;
};

int cmd_analyze(const AnalyzeArgs& a) {
  const auto params = load_params(a.common.params);
  doseopt_equilibrium eq{};
  check(doseopt_constant_dose_equilibrium(params.get(), a.dose_rate, &eq));

  json report = run_header("analyze", a.common, params.get());
  report["dose_rate_ug_per_min"] = a.dose_rate;
  report["equilibrium"] = {{"c_eq", eq.c_eq},
                           {"c_mem_eq", eq.c_mem_eq},
                           {"e_drug", eq.e_drug},
                           {"e_drug_tol", eq.e_drug_tol},
                           {"e_withdrawal", eq.e_withdrawal}};

  double k6 = 0, e0 = 0;
  check(doseopt_params_get(params.get(), "k6", &k6));
  check(doseopt_params_get(params.get(), "e0", &e0));
  double k4 = 0;
  if (eq.e_drug != e0 && doseopt_estimate_k4(k6, e0, eq.e_drug, eq.e_drug_tol, &k4) == DOSEOPT_OK)
    report["k4_from_equilibrium"] = k4;
  else
    report["k4_from_equilibrium"] = nullptr;

  if (a.e_drug || a.e_drug_tol) {
    if (!a.e_drug || !a.e_drug_tol) config_error("--e-drug and --e-drug-tol go together");
    check(doseopt_estimate_k4(k6, e0, *a.e_drug, *a.e_drug_tol, &k4));
    report["k4_estimate"] = {{"e_drug", *a.e_drug}, {"e_drug_tol", *a.e_drug_tol}, {"k4", k4}};
  }

  OutputDir out(a.common.out);
  out.write_json("analysis.json", report);
  out.commit();

  std::cout << "c_eq " << fmt_short(eq.c_eq) << ", E_drug " << fmt_short(eq.e_drug)
            << ", E_drug+tol " << fmt_short(eq.e_drug_tol) << ", E_withdrawal "
            << fmt_short(eq.e_withdrawal) << "\n";
  return kExitOk;
}

struct OptimizeArgs {
  Common common;
  std::string condition;
  std::string constraint;
  std::string plan;
  std::string objective;
  int starts = 8;
};

int cmd_optimize(const OptimizeArgs& a) {
  auto params = load_params(a.common.params);
  std::optional<doseopt_constraint> constraint;
  if (!a.constraint.empty()) constraint = parse_constraint(a.constraint);

  if (!a.condition.empty()) {
    struct Condition { const char* name; double k4; doseopt_constraint c; };
    static const Condition conditions[] = {
        {"no-tol-daily", 0.0, {DOSEOPT_DAILY_MAX, 2.0}},
        {"tol-daily", 0.3, {DOSEOPT_DAILY_MAX, 2.0}},
        {"no-tol-weekly", 0.0, {DOSEOPT_WEEKLY_MAX, 10.0}},
        {"tol-weekly", 0.3, {DOSEOPT_WEEKLY_MAX, 10.0}},
    };
    const Condition* found = nullptr;
    for (const auto& c : conditions)
      if (a.condition == c.name) found = &c;
    if (!found)
      config_error("unknown condition '" + a.condition +
                   "' (valid: no-tol-daily, tol-daily, no-tol-weekly, tol-weekly)");
    if (constraint) config_error("--condition already fixes the constraint");
    check(doseopt_params_set(params.get(), "k4", found->k4));
    constraint = found->c;
  }
  if (!constraint) config_error("either --condition or --constraint is required");

  doseopt_weekly_plan plan{};
  doseopt_weekly_plan_default(&plan);
  if (!a.plan.empty()) check(doseopt_weekly_plan_load(a.plan.c_str(), &plan));
  doseopt_objective_spec spec{};
  doseopt_objective_spec_default(&spec);
  if (!a.objective.empty()) check(doseopt_objective_spec_load(a.objective.c_str(), &spec));

  doseopt_optimizer_options options{};
  doseopt_optimizer_options_default(&options);
  options.dt = a.common.dt;

  doseopt_opt_result* raw = nullptr;
  check(doseopt_optimize(params.get(), &plan, &spec, &*constraint, a.common.seed, a.starts,
                         &options, &raw));
  const OptResult result(raw);

  char* text = nullptr;
  check(doseopt_opt_result_to_json(result.get(), &text));
  json report = run_header("optimize", a.common, params.get());
  report["condition"] = a.condition.empty() ? json(nullptr) : json(a.condition);
  report["constraint"] = constraint_json(*constraint);
  report["plan_template"] = plan_json(plan);
  report["objective"] = objective_json(spec);
  report["starts"] = a.starts;
  report["result"] = take_json(text);

  // Alertness over the evaluation week of the optimal plan.
  doseopt_weekly_plan best = plan;
  doseopt_opt_result_doses(result.get(), best.doses);
  doseopt_schedule* sched_raw = nullptr;
  check(doseopt_schedule_from_plan(&best, spec.horizon_weeks, &sched_raw));
  const auto schedule = snapped(Schedule(sched_raw).get(), a.common.dt);
  doseopt_trajectory* traj_raw = nullptr;
  check(doseopt_integrate(params.get(), nullptr, schedule.get(), a.common.dt,
                          spec.horizon_weeks * 7 * 1440.0, 1, &traj_raw));
  const Trajectory traj(traj_raw);
  const double week_start = spec.evaluation_week * 7 * 1440.0;

  OutputDir out(a.common.out);
  out.write_json("opt_result.json", report);
  check(doseopt_trajectory_write_csv_range(traj.get(), week_start, week_start + 7 * 1440.0,
                                           out.stage("optimal_week.csv").c_str()));
  out.commit();

  std::cout << "f = " << fmt_short(doseopt_opt_result_f_value(result.get())) << ", doses";
  for (double d : best.doses) std::cout << ' ' << fmt_short(d);
  std::cout << "\n";
  return kExitOk;
}

struct CalibrationArgs {
  Common common;
  std::string schedule;
  std::vector<std::string> observed;
  std::string field;
  std::vector<double> values;
};

struct CalibrationInputs {
  Params params;
  Schedule schedule;
  std::vector<Series> series;
  std::vector<const doseopt_series*> views;
};

CalibrationInputs load_calibration(const CalibrationArgs& a) {
  CalibrationInputs in;
  in.params = load_params(a.common.params);
  doseopt_schedule* raw = nullptr;
  check(doseopt_schedule_load(a.schedule.c_str(), &raw));
  in.schedule.reset(raw);
  for (const auto& path : a.observed) {
    doseopt_series* s = nullptr;
    check(doseopt_series_load(path.c_str(), &s));
    in.series.emplace_back(s);
    in.views.push_back(s);
  }
  return in;
}

int cmd_fit_loss(const CalibrationArgs& a) {
  const auto in = load_calibration(a);
  double value = 0.0;
  check(doseopt_loss(in.params.get(), in.schedule.get(), in.views.data(), in.views.size(),
                     a.common.dt, &value));
  json report = run_header("fit-loss", a.common, in.params.get());
  report["schedule_file"] = a.schedule;
  report["observed"] = a.observed;
  report["loss"] = value;

  OutputDir out(a.common.out);
  out.write_json("loss.json", report);
  out.commit();
  std::cout << "loss " << fmt_short(value) << "\n";
  return kExitOk;
}

int cmd_sweep(const CalibrationArgs& a) {
  const auto in = load_calibration(a);
  std::vector<double> losses(a.values.size());
  check(doseopt_sweep(in.params.get(), a.field.c_str(), a.values.data(), a.values.size(),
                      in.schedule.get(), in.views.data(), in.views.size(), a.common.dt,
                      losses.data()));
  std::string csv = "value,loss\n";
  json rows = json::array();
  for (std::size_t i = 0; i < losses.size(); ++i) {
    csv += fmt_double(a.values[i]) + "," + fmt_double(losses[i]) + "\n";
    rows.push_back({{"value", a.values[i]}, {"loss", losses[i]}});
  }
  json report = run_header("sweep", a.common, in.params.get());
  report["schedule_file"] = a.schedule;
  report["observed"] = a.observed;
  report["field"] = a.field;
  report["results"] = rows;

  OutputDir out(a.common.out);
  out.write_text("sweep.csv", csv);
  out.write_json("sweep.json", report);
  out.commit();
  for (std::size_t i = 0; i < losses.size(); ++i)
    std::cout << a.field << " = " << fmt_short(a.values[i]) << ": loss " << fmt_short(losses[i])
              << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Drug tolerance simulation and dosing schedule optimization"};
  app.require_subcommand(1);
  app.set_version_flag("--version", doseopt_version());

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Integrate the model and export a trajectory");
  add_common(simulate, sim.common);
  simulate->add_option("--preset", sim.preset, "daily-one-cup, two-cups-two-weeks or weekday-140");
  simulate->add_option("--plan", sim.plan, "Weekly plan JSON file");
  simulate->add_option("--schedule", sim.schedule, "Dose schedule JSON file");
  simulate->add_option("--weeks", sim.weeks, "Weeks to repeat a plan")->capture_default_str();
  simulate->add_option("--stride", sim.stride, "Record every n-th step")->capture_default_str();
  simulate->add_option("--t-end", sim.t_end, "End time in minutes (default: schedule horizon)");

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Constant-dose equilibria and k4 estimation");
  add_common(analyze, an.common);
  analyze->add_option("--dose-rate", an.dose_rate, "Constant dose rate in ug/min")->required();
  analyze->add_option("--e-drug", an.e_drug, "Observed effect before tolerance");
  analyze->add_option("--e-drug-tol", an.e_drug_tol, "Observed effect after tolerance");

  OptimizeArgs opt;
  opt.common.seed = 1;
  auto* optimize = app.add_subcommand("optimize", "Optimize a weekly dosing plan");
  add_common(optimize, opt.common);
  optimize->add_option("--condition", opt.condition,
                       "no-tol-daily, tol-daily, no-tol-weekly or tol-weekly");
  optimize->add_option("--constraint", opt.constraint, "daily:<cups> or weekly:<cups>");
  optimize->add_option("--plan", opt.plan, "Plan template JSON (window and cup mass)");
  optimize->add_option("--objective", opt.objective, "Objective spec JSON");
  optimize->add_option("--starts", opt.starts, "Random starts")->capture_default_str();

  CalibrationArgs fit;
  auto* fit_loss = app.add_subcommand("fit-loss", "Score parameters against observations");
  add_common(fit_loss, fit.common);
  fit_loss->add_option("--schedule", fit.schedule, "Dose schedule JSON file")->required();
  fit_loss->add_option("--observed", fit.observed, "Observation CSV (repeatable)")->required();

  CalibrationArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Loss over candidate values of one parameter");
  add_common(sweep, sw.common);
  sweep->add_option("--schedule", sw.schedule, "Dose schedule JSON file")->required();
  sweep->add_option("--observed", sw.observed, "Observation CSV (repeatable)")->required();
  sweep->add_option("--field", sw.field, "Parameter name (e0, k1..k7, c_half)")->required();
  sweep->add_option("--values", sw.values, "Comma-separated candidate values")
      ->required()
      ->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim);
    if (analyze->parsed()) return cmd_analyze(an);
    if (optimize->parsed()) return cmd_optimize(opt);
    if (fit_loss->parsed()) return cmd_fit_loss(fit);
    if (sweep->parsed()) return cmd_sweep(sw);
  } catch (const CommandError& e) {
    std::cerr << "doseopt: " << e.what() << "\n";
    return e.code();
  } catch (const std::exception& e) {
    std::cerr << "doseopt: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
