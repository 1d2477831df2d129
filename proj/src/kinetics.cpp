#include "doseopt/kinetics.hpp"

#include "doseopt/error.hpp"

#include <cmath>
#include <string>

namespace doseopt {

namespace detail {

bool is_finite(const State& s) {
  return std::isfinite(s.c) && std::isfinite(s.c_mem) && std::isfinite(s.f) &&
         std::isfinite(s.e_b);
}

StepRates::StepRates(const DoseSchedule& schedule, double dt) {
  runs_.reserve(schedule.segments().size());
  for (const auto& s : schedule.segments()) {
    const auto begin = static_cast<std::size_t>(std::llround(s.start / dt));
    const auto end = static_cast<std::size_t>(std::llround(s.end / dt));
    if (end > begin && s.rate != 0.0) runs_.push_back({begin, end, s.rate});
  }
}

std::size_t check_grid(const ModelParams& p, const DoseSchedule& schedule, double dt,
                       double t_end) {
  if (!(dt > 0) || !std::isfinite(dt)) fail(ErrorKind::InvalidArgument, "dt must be positive and finite");
  if (!(dt < stability_bound(p)))
    fail(ErrorKind::InvalidArgument, "dt = " + std::to_string(dt) +
                                         " violates the stability bound 2/max(k1,k2,k3,k5) = " +
                                         std::to_string(stability_bound(p)));
  if (!(t_end >= 0) || !std::isfinite(t_end))
    fail(ErrorKind::InvalidArgument, "t_end must be finite and >= 0");
  if (!on_grid(t_end, dt)) fail(ErrorKind::InvalidArgument, "t_end is not a multiple of dt");
  for (const auto& s : schedule.segments()) {
    if (!on_grid(s.start, dt) || !on_grid(s.end, dt))
      fail(ErrorKind::InvalidArgument, "schedule breakpoint [" + std::to_string(s.start) + ", " +
                                           std::to_string(s.end) + ") is not on the dt grid");
  }
  return static_cast<std::size_t>(std::llround(t_end / dt));
}

}  // namespace detail

namespace {

void require_finite(const ModelParams& p, const State& s, double dose_rate) {
  validate(p);
  if (!detail::is_finite(s)) fail(ErrorKind::Numeric, "state is not finite");
  if (!std::isfinite(dose_rate)) fail(ErrorKind::Numeric, "dose rate is not finite");
}

State rk4_advance(const ModelParams& p, const State& s, double rate, double dt) {
  auto axpy = [](const State& a, double h, const State& d) {
    return State{a.c + h * d.c, a.c_mem + h * d.c_mem, a.f + h * d.f, a.e_b + h * d.e_b};
  };
  const State k1 = derivatives(p, s, rate);
  const State k2 = derivatives(p, axpy(s, 0.5 * dt, k1), rate);
  const State k3 = derivatives(p, axpy(s, 0.5 * dt, k2), rate);
  const State k4 = derivatives(p, axpy(s, dt, k3), rate);
  return {
      s.c + dt / 6.0 * (k1.c + 2 * k2.c + 2 * k3.c + k4.c),
      s.c_mem + dt / 6.0 * (k1.c_mem + 2 * k2.c_mem + 2 * k3.c_mem + k4.c_mem),
      s.f + dt / 6.0 * (k1.f + 2 * k2.f + 2 * k3.f + k4.f),
      s.e_b + dt / 6.0 * (k1.e_b + 2 * k2.e_b + 2 * k3.e_b + k4.e_b),
  };
}

void record(Trajectory& t, const ModelParams& p, double time, const State& s) {
  if (!detail::is_finite(s))
    fail(ErrorKind::Numeric, "integration produced a non-finite state at t = " + std::to_string(time));
  t.times.push_back(time);
  t.states.push_back(s);
  t.effects.push_back(effect(p, s));
}

}  // namespace

State derivatives(const ModelParams& p, const State& s, double dose_rate) {
  return {
      p.k1 * (p.k7 * dose_rate - s.c),
      p.k5 * (s.c - s.c_mem),
      p.k2 * (p.k6 * s.c - s.f),
      p.k3 * (p.e0 - p.k4 * s.c_mem - s.e_b),
  };
}

double effect(const ModelParams& p, const State& s) {
  if (!p.c_half) return s.e_b + s.f;
  return s.e_b + s.f / (1.0 + s.c_mem / *p.c_half);
}

State euler_step(const ModelParams& p, const State& s, double dose_rate, double dt) {
  require_finite(p, s, dose_rate);
  if (dose_rate < 0) fail(ErrorKind::InvalidArgument, "dose rate must be >= 0");
  if (!(dt >= 0) || !std::isfinite(dt)) fail(ErrorKind::InvalidArgument, "dt must be >= 0");
  if (dt == 0) return s;
  if (!(dt < stability_bound(p)))
    fail(ErrorKind::InvalidArgument, "dt violates the stability bound 2/max(k1,k2,k3,k5)");
  return detail::euler_advance(p, s, dose_rate, dt);
}

Trajectory integrate(const ModelParams& p, const State& s0, const DoseSchedule& schedule,
                     double dt, double t_end, std::size_t record_stride) {
  require_finite(p, s0, 0.0);
  if (record_stride == 0) fail(ErrorKind::InvalidArgument, "record stride must be >= 1");
  const std::size_t steps = detail::check_grid(p, schedule, dt, t_end);
  const detail::StepRates rates(schedule, dt);

  Trajectory traj;
  const std::size_t expected = steps / record_stride + 2;
  traj.times.reserve(expected);
  traj.states.reserve(expected);
  traj.effects.reserve(expected);
  record(traj, p, 0.0, s0);
  detail::run_euler(p, s0, rates, dt, steps, [&](std::size_t i, const State& s) {
    if (i % record_stride == 0 || i == steps) record(traj, p, static_cast<double>(i) * dt, s);
  });
  return traj;
}

Trajectory integrate_reference(const ModelParams& p, const State& s0,
                               const DoseSchedule& schedule, double dt, double t_end) {
  require_finite(p, s0, 0.0);
  const std::size_t steps = detail::check_grid(p, schedule, dt, t_end);
  const detail::StepRates rates(schedule, dt);
  auto rate = rates.cursor();

  Trajectory traj;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  traj.effects.reserve(steps + 1);
  record(traj, p, 0.0, s0);
  State s = s0;
  for (std::size_t i = 0; i < steps; ++i) {
    s = rk4_advance(p, s, rate(i), dt);
    record(traj, p, static_cast<double>(i + 1) * dt, s);
  }
  return traj;
}

}  // namespace doseopt
