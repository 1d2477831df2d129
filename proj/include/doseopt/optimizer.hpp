#pragma once

#include "doseopt/regimen.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace doseopt {

struct Constraint {
  enum class Kind { DailyMax, WeeklyMax };
  Kind kind = Kind::DailyMax;
  double cap = 2.0;  // cups
};

void validate(const Constraint& c);

/// Euclidean projection onto the feasible set: a box [0, cap]^7 for a daily
/// cap, the capped simplex {d >= 0, sum d <= cap} for a weekly cap.
WeekValues project(const WeekValues& d, const Constraint& c);

bool is_feasible(const WeekValues& d, const Constraint& c, double tol = 1e-9);

struct OptimizerOptions {
  double dt = 1.0;
  double fd_step = 1e-4;
  double pg_tol = 1e-6;
  double df_tol = 1e-8;
  int max_iterations = 10000;
  double armijo = 1e-4;
  bool parallel = true;
};

struct StartSummary {
  WeekValues initial{};
  WeekValues doses{};
  double f_value = 0.0;
  long iterations = 0;
  long evaluations = 0;
  bool converged = false;
  std::string stop_reason;
  std::vector<double> trace;  // f after each accepted iteration, starting with f(start)
};

struct OptResult {
  WeekValues doses{};
  double f_value = 0.0;
  long evaluations = 0;
  int starts = 0;
  bool converged = false;
  std::uint64_t seed = 0;
  int best_start = 0;
  std::vector<StartSummary> history;
};

/// Uniform [0, 1)^7 starting points drawn from one seeded stream.
std::vector<WeekValues> random_starts(std::uint64_t seed, int starts);

/// Multi-start projected gradient ascent with central finite differences and
/// backtracking (Barzilai-Borwein trial steps). The best start wins; ties go
/// to the lowest start index.
OptResult optimize(const ModelParams& p, const WeeklyPlan& plan_template,
                   const ObjectiveSpec& spec, const Constraint& c, std::uint64_t seed,
                   int starts = 8, const OptimizerOptions& options = {});

}  // namespace doseopt
