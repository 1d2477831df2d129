/*
 * doseopt C interface.
 *
 * All objects are opaque handles created by the library and released with the
 * matching *_free function. Every fallible call returns a doseopt_status; on
 * failure doseopt_last_error() describes the problem (per thread, valid until
 * the next failing call on that thread). Output pointers are left untouched
 * on failure.
 *
 * Units: time in minutes, mass in micrograms, concentration in ug/mL, doses
 * in plans counted in cups.
 */
#ifndef DOSEOPT_H
#define DOSEOPT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(DOSEOPT_BUILDING)
#    define DOSEOPT_API __declspec(dllexport)
#  else
#    define DOSEOPT_API __declspec(dllimport)
#  endif
#else
#  define DOSEOPT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define DOSEOPT_DAYS 7

typedef enum doseopt_status {
  DOSEOPT_OK = 0,
  DOSEOPT_ERR_INVALID_ARGUMENT = 1,
  DOSEOPT_ERR_PARSE = 2,
  DOSEOPT_ERR_IO = 3,
  DOSEOPT_ERR_NUMERIC = 4,
  DOSEOPT_ERR_INTERNAL = 5
} doseopt_status;

typedef struct doseopt_params doseopt_params;
typedef struct doseopt_schedule doseopt_schedule;
typedef struct doseopt_trajectory doseopt_trajectory;
typedef struct doseopt_series doseopt_series;
typedef struct doseopt_opt_result doseopt_opt_result;

typedef struct doseopt_state {
  double c;
  double c_mem;
  double f;
  double e_b;
} doseopt_state;

typedef struct doseopt_weekly_plan {
  double doses[DOSEOPT_DAYS];
  double cup_mass_ug;
  double window_start_min;
  double window_length_min;
} doseopt_weekly_plan;

typedef struct doseopt_objective_spec {
  double weights[DOSEOPT_DAYS];
  double sample_minute;
  int horizon_weeks;
  int evaluation_week;
} doseopt_objective_spec;

typedef struct doseopt_equilibrium {
  double c_eq;
  double c_mem_eq;
  double e_drug;
  double e_drug_tol;
  double e_withdrawal;
} doseopt_equilibrium;

typedef enum doseopt_constraint_kind {
  DOSEOPT_DAILY_MAX = 0,
  DOSEOPT_WEEKLY_MAX = 1
} doseopt_constraint_kind;

typedef struct doseopt_constraint {
  doseopt_constraint_kind kind;
  double cap;
} doseopt_constraint;

typedef struct doseopt_optimizer_options {
  double dt;
  double fd_step;
  double pg_tol;
  double df_tol;
  int max_iterations;
  int parallel;
} doseopt_optimizer_options;

typedef struct doseopt_start_summary {
  double initial[DOSEOPT_DAYS];
  double doses[DOSEOPT_DAYS];
  double f_value;
  long iterations;
  long evaluations;
  int converged;
  const char* stop_reason; /* owned by the result handle */
} doseopt_start_summary;

DOSEOPT_API const char* doseopt_version(void);
DOSEOPT_API const char* doseopt_last_error(void);
DOSEOPT_API void doseopt_string_free(char* s);

DOSEOPT_API void doseopt_weekly_plan_default(doseopt_weekly_plan* plan);
DOSEOPT_API void doseopt_objective_spec_default(doseopt_objective_spec* spec);
DOSEOPT_API void doseopt_optimizer_options_default(doseopt_optimizer_options* options);

/* Parameters. Loaded sets are normalized to per-minute rates. */
DOSEOPT_API doseopt_status doseopt_params_builtin(const char* name, doseopt_params** out);
DOSEOPT_API doseopt_status doseopt_params_from_json(const char* text, doseopt_params** out);
/* Built-in name ("caffeine", "nicotine") or path to a JSON file. */
DOSEOPT_API doseopt_status doseopt_params_load(const char* name_or_path, doseopt_params** out);
DOSEOPT_API doseopt_status doseopt_params_clone(const doseopt_params* p, doseopt_params** out);
DOSEOPT_API void doseopt_params_free(doseopt_params* p);
/* Fields: e0, k1..k7, c_half (reads +inf when disabled; setting +inf disables). */
DOSEOPT_API doseopt_status doseopt_params_get(const doseopt_params* p, const char* field, double* out);
DOSEOPT_API doseopt_status doseopt_params_set(doseopt_params* p, const char* field, double value);
DOSEOPT_API doseopt_status doseopt_params_to_json(const doseopt_params* p, char** out);
DOSEOPT_API doseopt_status doseopt_params_stability_bound(const doseopt_params* p, double* out);

/* Kinetics. */
DOSEOPT_API doseopt_status doseopt_rest_state(const doseopt_params* p, doseopt_state* out);
DOSEOPT_API doseopt_status doseopt_derivatives(const doseopt_params* p, const doseopt_state* s,
                                               double dose_rate, doseopt_state* out);
DOSEOPT_API doseopt_status doseopt_effect(const doseopt_params* p, const doseopt_state* s,
                                          double* out);
DOSEOPT_API doseopt_status doseopt_euler_step(const doseopt_params* p, const doseopt_state* s,
                                              double dose_rate, double dt, doseopt_state* out);

/* Schedules. */
DOSEOPT_API doseopt_status doseopt_schedule_create(double horizon_min, doseopt_schedule** out);
DOSEOPT_API doseopt_status doseopt_schedule_add_segment(doseopt_schedule* s, double start_min,
                                                        double end_min, double rate_ug_per_min);
/* Names: "daily-one-cup", "two-cups-two-weeks", "weekday-140". */
DOSEOPT_API doseopt_status doseopt_schedule_preset(const char* name, doseopt_schedule** out);
DOSEOPT_API doseopt_status doseopt_schedule_from_plan(const doseopt_weekly_plan* plan, int weeks,
                                                      doseopt_schedule** out);
DOSEOPT_API doseopt_status doseopt_schedule_from_json(const char* text, doseopt_schedule** out);
DOSEOPT_API doseopt_status doseopt_schedule_load(const char* path, doseopt_schedule** out);
DOSEOPT_API doseopt_status doseopt_schedule_snap(const doseopt_schedule* s, double dt,
                                                 doseopt_schedule** out);
DOSEOPT_API void doseopt_schedule_free(doseopt_schedule* s);
DOSEOPT_API size_t doseopt_schedule_segment_count(const doseopt_schedule* s);
DOSEOPT_API doseopt_status doseopt_schedule_segment(const doseopt_schedule* s, size_t index,
                                                    double* start_min, double* end_min,
                                                    double* rate_ug_per_min);
DOSEOPT_API double doseopt_schedule_horizon(const doseopt_schedule* s);
DOSEOPT_API double doseopt_schedule_total_mass(const doseopt_schedule* s);
DOSEOPT_API doseopt_status doseopt_schedule_to_json(const doseopt_schedule* s, char** out);

/* Integration. A null s0 starts from rest (0, 0, 0, e0). */
DOSEOPT_API doseopt_status doseopt_integrate(const doseopt_params* p, const doseopt_state* s0,
                                             const doseopt_schedule* schedule, double dt,
                                             double t_end, size_t record_stride,
                                             doseopt_trajectory** out);
DOSEOPT_API doseopt_status doseopt_integrate_reference(const doseopt_params* p,
                                                       const doseopt_state* s0,
                                                       const doseopt_schedule* schedule,
                                                       double dt, double t_end,
                                                       doseopt_trajectory** out);
DOSEOPT_API void doseopt_trajectory_free(doseopt_trajectory* t);
DOSEOPT_API size_t doseopt_trajectory_size(const doseopt_trajectory* t);
DOSEOPT_API doseopt_status doseopt_trajectory_sample(const doseopt_trajectory* t, size_t index,
                                                     double* time_min, doseopt_state* state,
                                                     double* effect);
/* CSV with header t_min,C,C_mem,F,E_b,E at full double precision. */
DOSEOPT_API doseopt_status doseopt_trajectory_write_csv(const doseopt_trajectory* t,
                                                        const char* path);
/* Only samples with t_from <= time <= t_to. */
DOSEOPT_API doseopt_status doseopt_trajectory_write_csv_range(const doseopt_trajectory* t,
                                                              double t_from, double t_to,
                                                              const char* path);

/* Closed forms. */
DOSEOPT_API doseopt_status doseopt_impulse_concentration(const doseopt_params* p,
                                                         double total_dose_ug, double t_min,
                                                         double* out);
DOSEOPT_API doseopt_status doseopt_constant_dose_equilibrium(const doseopt_params* p,
                                                             double dose_rate,
                                                             doseopt_equilibrium* out);
DOSEOPT_API doseopt_status doseopt_estimate_k4(double k6, double e0, double e_drug,
                                               double e_drug_tol, double* out);

/* Regimens and the weekly objective. */
DOSEOPT_API doseopt_status doseopt_weekly_plan_from_json(const char* text, doseopt_weekly_plan* out);
DOSEOPT_API doseopt_status doseopt_weekly_plan_load(const char* path, doseopt_weekly_plan* out);
DOSEOPT_API doseopt_status doseopt_objective_spec_from_json(const char* text,
                                                            doseopt_objective_spec* out);
DOSEOPT_API doseopt_status doseopt_objective_spec_load(const char* path,
                                                       doseopt_objective_spec* out);
DOSEOPT_API doseopt_status doseopt_sample_alertness(const doseopt_trajectory* t,
                                                    const doseopt_objective_spec* spec,
                                                    double e_out[DOSEOPT_DAYS]);
DOSEOPT_API doseopt_status doseopt_objective(const double e[DOSEOPT_DAYS],
                                             const double weights[DOSEOPT_DAYS], double* out);
DOSEOPT_API doseopt_status doseopt_evaluate_plan(const doseopt_params* p,
                                                 const doseopt_weekly_plan* plan,
                                                 const doseopt_objective_spec* spec, double dt,
                                                 double* out);

/* Optimization. A null options pointer uses the defaults. */
DOSEOPT_API doseopt_status doseopt_project(const double d[DOSEOPT_DAYS],
                                           const doseopt_constraint* c,
                                           double out[DOSEOPT_DAYS]);
DOSEOPT_API doseopt_status doseopt_optimize(const doseopt_params* p,
                                            const doseopt_weekly_plan* plan_template,
                                            const doseopt_objective_spec* spec,
                                            const doseopt_constraint* c, uint64_t seed,
                                            int starts, const doseopt_optimizer_options* options,
                                            doseopt_opt_result** out);
DOSEOPT_API void doseopt_opt_result_free(doseopt_opt_result* r);
DOSEOPT_API void doseopt_opt_result_doses(const doseopt_opt_result* r, double out[DOSEOPT_DAYS]);
DOSEOPT_API double doseopt_opt_result_f_value(const doseopt_opt_result* r);
DOSEOPT_API long doseopt_opt_result_evaluations(const doseopt_opt_result* r);
DOSEOPT_API int doseopt_opt_result_converged(const doseopt_opt_result* r);
DOSEOPT_API int doseopt_opt_result_best_start(const doseopt_opt_result* r);
DOSEOPT_API size_t doseopt_opt_result_start_count(const doseopt_opt_result* r);
DOSEOPT_API doseopt_status doseopt_opt_result_start(const doseopt_opt_result* r, size_t index,
                                                    doseopt_start_summary* out);
DOSEOPT_API doseopt_status doseopt_opt_result_to_json(const doseopt_opt_result* r, char** out);

/* Calibration. */
DOSEOPT_API doseopt_status doseopt_series_load(const char* path, doseopt_series** out);
DOSEOPT_API doseopt_status doseopt_series_parse(const char* text, doseopt_series** out);
DOSEOPT_API void doseopt_series_free(doseopt_series* s);
DOSEOPT_API size_t doseopt_series_size(const doseopt_series* s);
/* Returns "concentration" or "effect". */
DOSEOPT_API const char* doseopt_series_channel(const doseopt_series* s);
DOSEOPT_API doseopt_status doseopt_loss(const doseopt_params* p, const doseopt_schedule* schedule,
                                        const doseopt_series* const* series, size_t count,
                                        double dt, double* out);
/* losses_out must hold value_count entries. */
DOSEOPT_API doseopt_status doseopt_sweep(const doseopt_params* p, const char* field,
                                         const double* values, size_t value_count,
                                         const doseopt_schedule* schedule,
                                         const doseopt_series* const* series, size_t count,
                                         double dt, double* losses_out);

#ifdef __cplusplus
}
#endif

#endif /* DOSEOPT_H */
