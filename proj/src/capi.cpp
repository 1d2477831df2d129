#include "doseopt/doseopt.h"

#include "doseopt/analytic.hpp"
#include "doseopt/calibration.hpp"
#include "doseopt/error.hpp"
#include "doseopt/json_io.hpp"
#include "doseopt/kinetics.hpp"
#include "doseopt/optimizer.hpp"
#include "doseopt/regimen.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <string>

struct doseopt_params {
  doseopt::ModelParams value;
};
struct doseopt_schedule {
  doseopt::DoseSchedule value;
};
struct doseopt_trajectory {
  doseopt::Trajectory value;
};
struct doseopt_series {
  doseopt::ObservedSeries value;
};
struct doseopt_opt_result {
  doseopt::OptResult value;
};

namespace {

using namespace doseopt;

thread_local std::string last_error;

doseopt_status to_status(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return DOSEOPT_ERR_INVALID_ARGUMENT;
    case ErrorKind::Parse: return DOSEOPT_ERR_PARSE;
    case ErrorKind::Io: return DOSEOPT_ERR_IO;
    case ErrorKind::Numeric: return DOSEOPT_ERR_NUMERIC;
  }
  return DOSEOPT_ERR_INTERNAL;
}

template <class F>
doseopt_status guarded(F&& body) noexcept {
  try {
    body();
    return DOSEOPT_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return to_status(e.kind());
  } catch (const nlohmann::json::exception& e) {
    last_error = e.what();
    return DOSEOPT_ERR_PARSE;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return DOSEOPT_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return DOSEOPT_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return DOSEOPT_ERR_INTERNAL;
  }
}

void require(const void* ptr, const char* name) {
  if (!ptr) fail(ErrorKind::InvalidArgument, std::string(name) + " must not be null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

State from_c(const doseopt_state& s) { return {s.c, s.c_mem, s.f, s.e_b}; }
doseopt_state to_c(const State& s) { return {s.c, s.c_mem, s.f, s.e_b}; }

WeekValues week(const double* v) {
  WeekValues out{};
  std::copy(v, v + kDaysPerWeek, out.begin());
  return out;
}

WeeklyPlan from_c(const doseopt_weekly_plan& p) {
  WeeklyPlan plan;
  plan.doses = week(p.doses);
  plan.cup_mass = p.cup_mass_ug;
  plan.window_start = p.window_start_min;
  plan.window_length = p.window_length_min;
  return plan;
}

doseopt_weekly_plan to_c(const WeeklyPlan& plan) {
  doseopt_weekly_plan out{};
  std::copy(plan.doses.begin(), plan.doses.end(), out.doses);
  out.cup_mass_ug = plan.cup_mass;
  out.window_start_min = plan.window_start;
  out.window_length_min = plan.window_length;
  return out;
}

ObjectiveSpec from_c(const doseopt_objective_spec& s) {
  ObjectiveSpec spec;
  spec.weights = week(s.weights);
  spec.sample_minute = s.sample_minute;
  spec.horizon_weeks = s.horizon_weeks;
  spec.evaluation_week = s.evaluation_week;
  return spec;
}

doseopt_objective_spec to_c(const ObjectiveSpec& spec) {
  doseopt_objective_spec out{};
  std::copy(spec.weights.begin(), spec.weights.end(), out.weights);
  out.sample_minute = spec.sample_minute;
  out.horizon_weeks = spec.horizon_weeks;
  out.evaluation_week = spec.evaluation_week;
  return out;
}

Constraint from_c(const doseopt_constraint& c) {
  if (c.kind != DOSEOPT_DAILY_MAX && c.kind != DOSEOPT_WEEKLY_MAX)
    fail(ErrorKind::InvalidArgument, "unknown constraint kind");
  return {c.kind == DOSEOPT_DAILY_MAX ? Constraint::Kind::DailyMax : Constraint::Kind::WeeklyMax,
          c.cap};
}

std::vector<ObservedSeries> gather(const doseopt_series* const* series, size_t count) {
  if (count) require(series, "series");
  std::vector<ObservedSeries> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    require(series[i], "series element");
    out.push_back(series[i]->value);
  }
  return out;
}

}  // namespace

extern "C" {

const char* doseopt_version(void) { return "0.1.0"; }
const char* doseopt_last_error(void) { return last_error.c_str(); }
void doseopt_string_free(char* s) { std::free(s); }

void doseopt_weekly_plan_default(doseopt_weekly_plan* plan) {
  if (plan) *plan = to_c(WeeklyPlan{});
}

void doseopt_objective_spec_default(doseopt_objective_spec* spec) {
  if (spec) *spec = to_c(ObjectiveSpec{});
}

void doseopt_optimizer_options_default(doseopt_optimizer_options* options) {
  if (!options) return;
  const OptimizerOptions d;
  *options = {d.dt, d.fd_step, d.pg_tol, d.df_tol, d.max_iterations, d.parallel ? 1 : 0};
}

/* Parameters */

doseopt_status doseopt_params_builtin(const char* name, doseopt_params** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    auto p = builtin_params(name);
    if (!p) fail(ErrorKind::InvalidArgument, std::string("unknown parameter set '") + name + "'");
    *out = new doseopt_params{*p};
  });
}

doseopt_status doseopt_params_from_json(const char* text, doseopt_params** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new doseopt_params{params_from_json(json::parse(text))};
  });
}

doseopt_status doseopt_params_load(const char* name_or_path, doseopt_params** out) {
  return guarded([&] {
    require(name_or_path, "name_or_path");
    require(out, "out");
    if (auto p = builtin_params(name_or_path)) {
      *out = new doseopt_params{*p};
      return;
    }
    *out = new doseopt_params{params_from_json(read_json_file(name_or_path))};
  });
}

doseopt_status doseopt_params_clone(const doseopt_params* p, doseopt_params** out) {
  return guarded([&] {
    require(p, "params");
    require(out, "out");
    *out = new doseopt_params{p->value};
  });
}

void doseopt_params_free(doseopt_params* p) { delete p; }

doseopt_status doseopt_params_get(const doseopt_params* p, const char* field, double* out) {
  return guarded([&] {
    require(p, "params");
    require(field, "field");
    require(out, "out");
    *out = get_field(p->value, field);
  });
}

doseopt_status doseopt_params_set(doseopt_params* p, const char* field, double value) {
  return guarded([&] {
    require(p, "params");
    require(field, "field");
    const auto q = with_field(p->value, field, value);
    validate(q);
    p->value = q;
  });
}

doseopt_status doseopt_params_to_json(const doseopt_params* p, char** out) {
  return guarded([&] {
    require(p, "params");
    require(out, "out");
    *out = dup_string(params_to_json(p->value).dump());
  });
}

doseopt_status doseopt_params_stability_bound(const doseopt_params* p, double* out) {
  return guarded([&] {
    require(p, "params");
    require(out, "out");
    *out = stability_bound(p->value);
  });
}

/* Kinetics */

doseopt_status doseopt_rest_state(const doseopt_params* p, doseopt_state* out) {
  return guarded([&] {
    require(p, "params");
    require(out, "out");
    *out = to_c(rest_state(p->value));
  });
}

doseopt_status doseopt_derivatives(const doseopt_params* p, const doseopt_state* s,
                                   double dose_rate, doseopt_state* out) {
  return guarded([&] {
    require(p, "params");
    require(s, "state");
    require(out, "out");
    const State st = from_c(*s);
    if (!detail::is_finite(st) || !std::isfinite(dose_rate))
      fail(ErrorKind::Numeric, "derivatives require finite inputs");
    *out = to_c(derivatives(p->value, st, dose_rate));
  });
}

doseopt_status doseopt_effect(const doseopt_params* p, const doseopt_state* s, double* out) {
  return guarded([&] {
    require(p, "params");
    require(s, "state");
    require(out, "out");
    *out = effect(p->value, from_c(*s));
  });
}

doseopt_status doseopt_euler_step(const doseopt_params* p, const doseopt_state* s,
                                  double dose_rate, double dt, doseopt_state* out) {
  return guarded([&] {
    require(p, "params");
    require(s, "state");
    require(out, "out");
    *out = to_c(euler_step(p->value, from_c(*s), dose_rate, dt));
  });
}

/* Schedules */

doseopt_status doseopt_schedule_create(double horizon_min, doseopt_schedule** out) {
  return guarded([&] {
    require(out, "out");
    *out = new doseopt_schedule{DoseSchedule({}, horizon_min)};
  });
}

doseopt_status doseopt_schedule_add_segment(doseopt_schedule* s, double start_min,
                                            double end_min, double rate_ug_per_min) {
  return guarded([&] {
    require(s, "schedule");
    auto segs = s->value.segments();
    segs.push_back({start_min, end_min, rate_ug_per_min});
    s->value = DoseSchedule(std::move(segs), s->value.horizon());
  });
}

doseopt_status doseopt_schedule_preset(const char* name, doseopt_schedule** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    *out = new doseopt_schedule{preset_regimen(name)};
  });
}

doseopt_status doseopt_schedule_from_plan(const doseopt_weekly_plan* plan, int weeks,
                                          doseopt_schedule** out) {
  return guarded([&] {
    require(plan, "plan");
    require(out, "out");
    *out = new doseopt_schedule{plan_to_schedule(from_c(*plan), weeks)};
  });
}

doseopt_status doseopt_schedule_from_json(const char* text, doseopt_schedule** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new doseopt_schedule{schedule_from_json(json::parse(text))};
  });
}

doseopt_status doseopt_schedule_load(const char* path, doseopt_schedule** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new doseopt_schedule{schedule_from_json(read_json_file(path))};
  });
}

doseopt_status doseopt_schedule_snap(const doseopt_schedule* s, double dt, doseopt_schedule** out) {
  return guarded([&] {
    require(s, "schedule");
    require(out, "out");
    *out = new doseopt_schedule{snap_to_grid(s->value, dt)};
  });
}

void doseopt_schedule_free(doseopt_schedule* s) { delete s; }

size_t doseopt_schedule_segment_count(const doseopt_schedule* s) {
  return s ? s->value.segments().size() : 0;
}

doseopt_status doseopt_schedule_segment(const doseopt_schedule* s, size_t index,
                                        double* start_min, double* end_min,
                                        double* rate_ug_per_min) {
  return guarded([&] {
    require(s, "schedule");
    if (index >= s->value.segments().size())
      fail(ErrorKind::InvalidArgument, "segment index out of range");
    const auto& seg = s->value.segments()[index];
    if (start_min) *start_min = seg.start;
    if (end_min) *end_min = seg.end;
    if (rate_ug_per_min) *rate_ug_per_min = seg.rate;
  });
}

double doseopt_schedule_horizon(const doseopt_schedule* s) { return s ? s->value.horizon() : 0.0; }

double doseopt_schedule_total_mass(const doseopt_schedule* s) {
  return s ? s->value.total_mass() : 0.0;
}

doseopt_status doseopt_schedule_to_json(const doseopt_schedule* s, char** out) {
  return guarded([&] {
    require(s, "schedule");
    require(out, "out");
    *out = dup_string(schedule_to_json(s->value).dump());
  });
}

/* Integration */

doseopt_status doseopt_integrate(const doseopt_params* p, const doseopt_state* s0,
                                 const doseopt_schedule* schedule, double dt, double t_end,
                                 size_t record_stride, doseopt_trajectory** out) {
  return guarded([&] {
    require(p, "params");
    require(schedule, "schedule");
    require(out, "out");
    const State start = s0 ? from_c(*s0) : rest_state(p->value);
    *out = new doseopt_trajectory{integrate(p->value, start, schedule->value, dt, t_end, record_stride)};
  });
}

doseopt_status doseopt_integrate_reference(const doseopt_params* p, const doseopt_state* s0,
                                           const doseopt_schedule* schedule, double dt,
                                           double t_end, doseopt_trajectory** out) {
  return guarded([&] {
    require(p, "params");
    require(schedule, "schedule");
    require(out, "out");
    const State start = s0 ? from_c(*s0) : rest_state(p->value);
    *out = new doseopt_trajectory{integrate_reference(p->value, start, schedule->value, dt, t_end)};
  });
}

void doseopt_trajectory_free(doseopt_trajectory* t) { delete t; }

size_t doseopt_trajectory_size(const doseopt_trajectory* t) { return t ? t->value.size() : 0; }

doseopt_status doseopt_trajectory_sample(const doseopt_trajectory* t, size_t index,
                                         double* time_min, doseopt_state* state, double* effect) {
  return guarded([&] {
    require(t, "trajectory");
    if (index >= t->value.size()) fail(ErrorKind::InvalidArgument, "sample index out of range");
    if (time_min) *time_min = t->value.times[index];
    if (state) *state = to_c(t->value.states[index]);
    if (effect) *effect = t->value.effects[index];
  });
}

doseopt_status doseopt_trajectory_write_csv(const doseopt_trajectory* t, const char* path) {
  return guarded([&] {
    require(t, "trajectory");
    require(path, "path");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, std::string("cannot write ") + path);
    write_trajectory_csv(out, t->value);
    out.flush();
    if (!out) fail(ErrorKind::Io, std::string("error writing ") + path);
  });
}

doseopt_status doseopt_trajectory_write_csv_range(const doseopt_trajectory* t, double t_from,
                                                  double t_to, const char* path) {
  return guarded([&] {
    require(t, "trajectory");
    require(path, "path");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, std::string("cannot write ") + path);
    write_trajectory_csv(out, slice(t->value, t_from, t_to));
    out.flush();
    if (!out) fail(ErrorKind::Io, std::string("error writing ") + path);
  });
}

/* Closed forms */

doseopt_status doseopt_impulse_concentration(const doseopt_params* p, double total_dose_ug,
                                             double t_min, double* out) {
  return guarded([&] {
    require(p, "params");
    require(out, "out");
    *out = impulse_concentration(p->value, total_dose_ug, t_min);
  });
}

doseopt_status doseopt_constant_dose_equilibrium(const doseopt_params* p, double dose_rate,
                                                 doseopt_equilibrium* out) {
  return guarded([&] {
    require(p, "params");
    require(out, "out");
    const auto e = constant_dose_equilibrium(p->value, dose_rate);
    *out = {e.c_eq, e.c_mem_eq, e.e_drug, e.e_drug_tol, e.e_withdrawal};
  });
}

doseopt_status doseopt_estimate_k4(double k6, double e0, double e_drug, double e_drug_tol,
                                   double* out) {
  return guarded([&] {
    require(out, "out");
    *out = estimate_k4(k6, e0, e_drug, e_drug_tol);
  });
}

/* Regimens */

doseopt_status doseopt_weekly_plan_from_json(const char* text, doseopt_weekly_plan* out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = to_c(plan_from_json(json::parse(text)));
  });
}

doseopt_status doseopt_weekly_plan_load(const char* path, doseopt_weekly_plan* out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = to_c(plan_from_json(read_json_file(path)));
  });
}

doseopt_status doseopt_objective_spec_from_json(const char* text, doseopt_objective_spec* out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = to_c(objective_from_json(json::parse(text)));
  });
}

doseopt_status doseopt_objective_spec_load(const char* path, doseopt_objective_spec* out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = to_c(objective_from_json(read_json_file(path)));
  });
}

doseopt_status doseopt_sample_alertness(const doseopt_trajectory* t,
                                        const doseopt_objective_spec* spec,
                                        double e_out[DOSEOPT_DAYS]) {
  return guarded([&] {
    require(t, "trajectory");
    require(spec, "spec");
    require(e_out, "e_out");
    const auto e = sample_alertness(t->value, from_c(*spec));
    std::copy(e.begin(), e.end(), e_out);
  });
}

doseopt_status doseopt_objective(const double e[DOSEOPT_DAYS], const double weights[DOSEOPT_DAYS],
                                 double* out) {
  return guarded([&] {
    require(e, "e");
    require(weights, "weights");
    require(out, "out");
    const auto w = week(weights);
    for (double v : w)
      if (!(v >= 0)) fail(ErrorKind::InvalidArgument, "objective weights must be >= 0");
    *out = objective(week(e), w);
  });
}

doseopt_status doseopt_evaluate_plan(const doseopt_params* p, const doseopt_weekly_plan* plan,
                                     const doseopt_objective_spec* spec, double dt, double* out) {
  return guarded([&] {
    require(p, "params");
    require(plan, "plan");
    require(spec, "spec");
    require(out, "out");
    *out = evaluate_plan(p->value, from_c(*plan), from_c(*spec), dt);
  });
}

/* Optimization */

doseopt_status doseopt_project(const double d[DOSEOPT_DAYS], const doseopt_constraint* c,
                               double out[DOSEOPT_DAYS]) {
  return guarded([&] {
    require(d, "d");
    require(c, "constraint");
    require(out, "out");
    const auto con = from_c(*c);
    validate(con);
    const auto x = project(week(d), con);
    std::copy(x.begin(), x.end(), out);
  });
}

doseopt_status doseopt_optimize(const doseopt_params* p, const doseopt_weekly_plan* plan_template,
                                const doseopt_objective_spec* spec, const doseopt_constraint* c,
                                uint64_t seed, int starts, const doseopt_optimizer_options* options,
                                doseopt_opt_result** out) {
  return guarded([&] {
    require(p, "params");
    require(plan_template, "plan_template");
    require(spec, "spec");
    require(c, "constraint");
    require(out, "out");
    OptimizerOptions opt;
    if (options) {
      opt.dt = options->dt;
      opt.fd_step = options->fd_step;
      opt.pg_tol = options->pg_tol;
      opt.df_tol = options->df_tol;
      opt.max_iterations = options->max_iterations;
      opt.parallel = options->parallel != 0;
    }
    *out = new doseopt_opt_result{
        optimize(p->value, from_c(*plan_template), from_c(*spec), from_c(*c), seed, starts, opt)};
  });
}

void doseopt_opt_result_free(doseopt_opt_result* r) { delete r; }

void doseopt_opt_result_doses(const doseopt_opt_result* r, double out[DOSEOPT_DAYS]) {
  if (r && out) std::copy(r->value.doses.begin(), r->value.doses.end(), out);
}

double doseopt_opt_result_f_value(const doseopt_opt_result* r) { return r ? r->value.f_value : 0.0; }
long doseopt_opt_result_evaluations(const doseopt_opt_result* r) {
  return r ? r->value.evaluations : 0;
}
int doseopt_opt_result_converged(const doseopt_opt_result* r) {
  return r && r->value.converged ? 1 : 0;
}
int doseopt_opt_result_best_start(const doseopt_opt_result* r) {
  return r ? r->value.best_start : -1;
}
size_t doseopt_opt_result_start_count(const doseopt_opt_result* r) {
  return r ? r->value.history.size() : 0;
}

doseopt_status doseopt_opt_result_start(const doseopt_opt_result* r, size_t index,
                                        doseopt_start_summary* out) {
  return guarded([&] {
    require(r, "result");
    require(out, "out");
    if (index >= r->value.history.size()) fail(ErrorKind::InvalidArgument, "start index out of range");
    const auto& h = r->value.history[index];
    std::copy(h.initial.begin(), h.initial.end(), out->initial);
    std::copy(h.doses.begin(), h.doses.end(), out->doses);
    out->f_value = h.f_value;
    out->iterations = h.iterations;
    out->evaluations = h.evaluations;
    out->converged = h.converged ? 1 : 0;
    out->stop_reason = h.stop_reason.c_str();
  });
}

doseopt_status doseopt_opt_result_to_json(const doseopt_opt_result* r, char** out) {
  return guarded([&] {
    require(r, "result");
    require(out, "out");
    *out = dup_string(opt_result_to_json(r->value).dump());
  });
}

/* Calibration */

doseopt_status doseopt_series_load(const char* path, doseopt_series** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new doseopt_series{load_series(path)};
  });
}

doseopt_status doseopt_series_parse(const char* text, doseopt_series** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new doseopt_series{parse_series(text)};
  });
}

void doseopt_series_free(doseopt_series* s) { delete s; }

size_t doseopt_series_size(const doseopt_series* s) { return s ? s->value.points.size() : 0; }

const char* doseopt_series_channel(const doseopt_series* s) {
  if (!s) return "";
  return s->value.channel == Channel::Concentration ? "concentration" : "effect";
}

doseopt_status doseopt_loss(const doseopt_params* p, const doseopt_schedule* schedule,
                            const doseopt_series* const* series, size_t count, double dt,
                            double* out) {
  return guarded([&] {
    require(p, "params");
    require(schedule, "schedule");
    require(out, "out");
    *out = loss(p->value, schedule->value, gather(series, count), dt);
  });
}

doseopt_status doseopt_sweep(const doseopt_params* p, const char* field, const double* values,
                             size_t value_count, const doseopt_schedule* schedule,
                             const doseopt_series* const* series, size_t count, double dt,
                             double* losses_out) {
  return guarded([&] {
    require(p, "params");
    require(field, "field");
    require(schedule, "schedule");
    if (value_count) {
      require(values, "values");
      require(losses_out, "losses_out");
    }
    const auto result = sweep(p->value, field, std::vector<double>(values, values + value_count),
                              schedule->value, gather(series, count), dt);
    for (size_t i = 0; i < result.size(); ++i) losses_out[i] = result[i].second;
  });
}

}  // extern "C"
