#include "doseopt/optimizer.hpp"

#include "doseopt/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <numeric>
#include <random>

namespace doseopt {

void validate(const Constraint& c) {
  if (!(c.cap > 0) || !std::isfinite(c.cap))
    fail(ErrorKind::InvalidArgument, "constraint cap must be positive and finite");
}

namespace {

double sum(const WeekValues& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

double dot(const WeekValues& a, const WeekValues& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < kDaysPerWeek; ++i) s += a[i] * b[i];
  return s;
}

WeekValues axpy(const WeekValues& x, double a, const WeekValues& d) {
  WeekValues r{};
  for (std::size_t i = 0; i < kDaysPerWeek; ++i) r[i] = x[i] + a * d[i];
  return r;
}

WeekValues minus(const WeekValues& a, const WeekValues& b) { return axpy(a, -1.0, b); }

// Sums within this slack of the cap count as feasible, so that projected
// points map to themselves despite rounding in the threshold step.
double sum_slack(double cap) { return 1e-12 * std::max(1.0, cap); }

}  // namespace

WeekValues project(const WeekValues& d, const Constraint& c) {
  WeekValues x{};
  if (c.kind == Constraint::Kind::DailyMax) {
    for (std::size_t i = 0; i < kDaysPerWeek; ++i) x[i] = std::clamp(d[i], 0.0, c.cap);
    return x;
  }
  for (std::size_t i = 0; i < kDaysPerWeek; ++i) x[i] = std::max(d[i], 0.0);
  if (sum(x) <= c.cap + sum_slack(c.cap)) return x;

  // Project onto {x >= 0, sum x = cap}: x_i = max(d_i - theta, 0).
  WeekValues u = d;
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < kDaysPerWeek; ++j) {
    cumulative += u[j];
    const double t = (cumulative - c.cap) / static_cast<double>(j + 1);
    if (u[j] - t > 0) theta = t;
  }
  for (std::size_t i = 0; i < kDaysPerWeek; ++i) x[i] = std::max(d[i] - theta, 0.0);
  return x;
}

bool is_feasible(const WeekValues& d, const Constraint& c, double tol) {
  for (double v : d)
    if (!(v >= -tol)) return false;
  if (c.kind == Constraint::Kind::DailyMax)
    return std::all_of(d.begin(), d.end(), [&](double v) { return v <= c.cap + tol; });
  return sum(d) <= c.cap + tol;
}

std::vector<WeekValues> random_starts(std::uint64_t seed, int starts) {
  std::mt19937_64 rng(seed);
  std::vector<WeekValues> out(static_cast<std::size_t>(std::max(starts, 0)));
  for (auto& x : out)
    for (double& v : x) v = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return out;
}

namespace {

class Objective {
public:
  Objective(const ModelParams& p, const WeeklyPlan& plan, const ObjectiveSpec& spec, double dt)
      : p_(p), plan_(plan), spec_(spec), dt_(dt) {}

  double operator()(const WeekValues& d) {
    plan_.doses = d;
    ++evaluations_;
    return evaluate_plan(p_, plan_, spec_, dt_);
  }

  // Central differences, forward differences where the backward point
  // would be a negative dose.
  WeekValues gradient(const WeekValues& x, double fx, double h) {
    WeekValues g{};
    for (std::size_t i = 0; i < kDaysPerWeek; ++i) {
      WeekValues up = x;
      up[i] += h;
      if (x[i] >= h) {
        WeekValues down = x;
        down[i] -= h;
        g[i] = ((*this)(up) - (*this)(down)) / (2.0 * h);
      } else {
        g[i] = ((*this)(up) - fx) / h;
      }
    }
    return g;
  }

  long evaluations() const { return evaluations_; }

private:
  const ModelParams& p_;
  WeeklyPlan plan_;
  const ObjectiveSpec& spec_;
  double dt_;
  long evaluations_ = 0;
};

constexpr double kMinStep = 1e-12;
constexpr double kMaxStep = 1e6;

StartSummary ascend(const ModelParams& p, const WeeklyPlan& plan, const ObjectiveSpec& spec,
                    const Constraint& c, const WeekValues& start, const OptimizerOptions& opt) {
  Objective f(p, plan, spec, opt.dt);
  StartSummary out;
  out.initial = start;

  WeekValues x = project(start, c);
  double fx = f(x);
  out.trace.push_back(fx);
  WeekValues g = f.gradient(x, fx, opt.fd_step);
  double step = 1.0;
  out.stop_reason = "iteration-limit";

  for (long it = 0; it < opt.max_iterations; ++it) {
    const WeekValues pg = minus(project(axpy(x, 1.0, g), c), x);
    if (std::sqrt(dot(pg, pg)) < opt.pg_tol) {
      out.converged = true;
      out.stop_reason = "projected-gradient";
      break;
    }

    // Backtracking along the projection arc.
    WeekValues y{};
    double fy = 0.0;
    bool accepted = false;
    for (double t = std::clamp(step, kMinStep, kMaxStep); t >= kMinStep; t *= 0.5) {
      y = project(axpy(x, t, g), c);
      const WeekValues d = minus(y, x);
      if (dot(d, d) == 0.0) break;
      fy = f(y);
      if (fy >= fx + opt.armijo * dot(g, d)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      out.stop_reason = "line-search";
      break;
    }

    const WeekValues gy = f.gradient(y, fy, opt.fd_step);
    const WeekValues s = minus(y, x);
    const double sy = dot(s, minus(gy, g));
    // Barzilai-Borwein step for the next trial; sy < 0 under local concavity.
    step = sy < 0 ? dot(s, s) / -sy : kMaxStep;

    const double df = fy - fx;
    x = y;
    fx = fy;
    g = gy;
    ++out.iterations;
    out.trace.push_back(fx);
    if (std::abs(df) < opt.df_tol) {
      out.converged = true;
      out.stop_reason = "objective-change";
      break;
    }
  }

  out.doses = x;
  out.f_value = fx;
  out.evaluations = f.evaluations();
  return out;
}

}  // namespace

OptResult optimize(const ModelParams& p, const WeeklyPlan& plan_template,
                   const ObjectiveSpec& spec, const Constraint& c, std::uint64_t seed, int starts,
                   const OptimizerOptions& options) {
  validate(p);
  validate(plan_template);
  validate(spec);
  validate(c);
  if (starts < 1) fail(ErrorKind::InvalidArgument, "at least one start is required");

  const auto inits = random_starts(seed, starts);
  std::vector<StartSummary> history(inits.size());
  if (options.parallel && inits.size() > 1) {
    std::vector<std::future<StartSummary>> jobs;
    jobs.reserve(inits.size());
    for (const auto& x0 : inits)
      jobs.push_back(std::async(std::launch::async, [&, x0] {
        return ascend(p, plan_template, spec, c, x0, options);
      }));
    for (std::size_t i = 0; i < jobs.size(); ++i) history[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < inits.size(); ++i)
      history[i] = ascend(p, plan_template, spec, c, inits[i], options);
  }

  OptResult r;
  r.seed = seed;
  r.starts = starts;
  for (std::size_t i = 0; i < history.size(); ++i) {
    r.evaluations += history[i].evaluations;
    if (i == 0 || history[i].f_value > history[static_cast<std::size_t>(r.best_start)].f_value)
      r.best_start = static_cast<int>(i);
  }
  const auto& best = history[static_cast<std::size_t>(r.best_start)];
  r.doses = best.doses;
  r.f_value = best.f_value;
  r.converged = best.converged;
  r.history = std::move(history);
  return r;
}

}  // namespace doseopt
