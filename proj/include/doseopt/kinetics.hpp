#pragma once

#include "doseopt/params.hpp"
#include "doseopt/schedule.hpp"

#include <cstddef>
#include <vector>

namespace doseopt {

/// Instantaneous model state.
struct State {
  double c = 0.0;      // plasma concentration, ug/mL
  double c_mem = 0.0;  // memory concentration, ug/mL
  double f = 0.0;      // idealized effect
  double e_b = 0.0;    // baseline effect

  bool operator==(const State&) const = default;
};

/// Drug-naive state (0, 0, 0, e0).
inline State rest_state(const ModelParams& p) { return {0.0, 0.0, 0.0, p.e0}; }

struct Trajectory {
  std::vector<double> times;  // minutes, strictly increasing
  std::vector<State> states;
  std::vector<double> effects;

  std::size_t size() const { return times.size(); }
};

/// Time derivative of the state under dose rate `dose_rate` (ug/min).
State derivatives(const ModelParams& p, const State& s, double dose_rate);

/// Observed effect E = e_b + f / (1 + c_mem / c_half).
double effect(const ModelParams& p, const State& s);

/// One forward-Euler step. `dt = 0` returns `s` unchanged; `dt` at or above
/// the stability bound is rejected.
State euler_step(const ModelParams& p, const State& s, double dose_rate, double dt);

/// Fixed-step forward-Euler integration over [0, t_end]. Every schedule
/// breakpoint and `t_end` must lie on the step grid. Records every
/// `record_stride`-th step plus t = 0 and t = t_end.
Trajectory integrate(const ModelParams& p, const State& s0, const DoseSchedule& schedule,
                     double dt, double t_end, std::size_t record_stride = 1);

/// Classical fourth-order Runge-Kutta on the same grid, recording every step.
/// Used as a convergence reference in tests.
Trajectory integrate_reference(const ModelParams& p, const State& s0,
                               const DoseSchedule& schedule, double dt, double t_end);

namespace detail {

/// Dose rate for each step of the grid, derived from a grid-aligned
/// schedule. Steps not covered by a segment have rate 0.
class StepRates {
public:
  StepRates(const DoseSchedule& schedule, double dt);

  /// Forward-only lookup; `step` must not decrease between calls.
  class Cursor {
  public:
    explicit Cursor(const StepRates& rates) : rates_(&rates) {}
    double operator()(std::size_t step) {
      const auto& runs = rates_->runs_;
      while (next_ < runs.size() && runs[next_].end <= step) ++next_;
      return next_ < runs.size() && runs[next_].begin <= step ? runs[next_].rate : 0.0;
    }

  private:
    const StepRates* rates_;
    std::size_t next_ = 0;
  };

  Cursor cursor() const { return Cursor(*this); }

private:
  struct Run {
    std::size_t begin;
    std::size_t end;
    double rate;
  };
  std::vector<Run> runs_;
};

/// Validates dt/t_end/breakpoints and returns the step count.
std::size_t check_grid(const ModelParams& p, const DoseSchedule& schedule, double dt,
                       double t_end);

inline State euler_advance(const ModelParams& p, const State& s, double rate, double dt) {
  return {
      s.c + dt * (p.k1 * (p.k7 * rate - s.c)),
      s.c_mem + dt * (p.k5 * (s.c - s.c_mem)),
      s.f + dt * (p.k2 * (p.k6 * s.c - s.f)),
      s.e_b + dt * (p.k3 * (p.e0 - p.k4 * s.c_mem - s.e_b)),
  };
}

bool is_finite(const State& s);

/// Runs `steps` Euler steps from `s0`, calling `visit(i, state)` after step i
/// (i = 1..steps). Returns the final state.
template <class Visitor>
State run_euler(const ModelParams& p, State s, const StepRates& rates, double dt,
                std::size_t steps, Visitor&& visit) {
  auto rate = rates.cursor();
  for (std::size_t i = 0; i < steps; ++i) {
    s = euler_advance(p, s, rate(i), dt);
    visit(i + 1, s);
  }
  return s;
}

}  // namespace detail

}  // namespace doseopt
