#include "doseopt/schedule.hpp"

#include "doseopt/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace doseopt {

DoseSchedule::DoseSchedule(std::vector<DoseSegment> segments, double horizon)
    : segments_(std::move(segments)), horizon_(horizon) {
  if (!std::isfinite(horizon_) || horizon_ < 0)
    fail(ErrorKind::InvalidArgument, "schedule horizon must be finite and >= 0");
  std::sort(segments_.begin(), segments_.end(),
            [](const DoseSegment& a, const DoseSegment& b) { return a.start < b.start; });
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& s = segments_[i];
    if (!std::isfinite(s.start) || !std::isfinite(s.end) || !std::isfinite(s.rate))
      fail(ErrorKind::InvalidArgument, "schedule segment " + std::to_string(i) + " is not finite");
    if (s.start < 0 || s.end <= s.start || s.end > horizon_)
      fail(ErrorKind::InvalidArgument,
           "schedule segment " + std::to_string(i) + " must satisfy 0 <= start < end <= horizon");
    if (s.rate < 0)
      fail(ErrorKind::InvalidArgument, "schedule segment " + std::to_string(i) + " has negative rate");
    if (i > 0 && s.start < segments_[i - 1].end)
      fail(ErrorKind::InvalidArgument, "schedule segments overlap at t = " + std::to_string(s.start));
  }
}

double DoseSchedule::total_mass() const {
  double m = 0.0;
  for (const auto& s : segments_) m += s.mass();
  return m;
}

double DoseSchedule::rate_at(double t) const {
  auto it = std::upper_bound(segments_.begin(), segments_.end(), t,
                             [](double v, const DoseSegment& s) { return v < s.start; });
  if (it == segments_.begin()) return 0.0;
  --it;
  return t < it->end ? it->rate : 0.0;
}

DoseSchedule DoseSchedule::operator+(const DoseSchedule& other) const {
  std::vector<double> cuts{0.0};
  for (const auto* sched : {this, &other})
    for (const auto& s : sched->segments_) {
      cuts.push_back(s.start);
      cuts.push_back(s.end);
    }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<DoseSegment> out;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = 0.5 * (cuts[i] + cuts[i + 1]);
    const double rate = rate_at(mid) + other.rate_at(mid);
    if (rate <= 0) continue;
    if (!out.empty() && out.back().end == cuts[i] && out.back().rate == rate)
      out.back().end = cuts[i + 1];
    else
      out.push_back({cuts[i], cuts[i + 1], rate});
  }
  return DoseSchedule(std::move(out), std::max(horizon_, other.horizon_));
}

bool on_grid(double t, double dt) {
  const double n = t / dt;
  return std::abs(n - std::round(n)) <= 1e-9 * std::max(1.0, std::abs(n));
}

DoseSchedule snap_to_grid(const DoseSchedule& schedule, double dt) {
  if (!(dt > 0) || !std::isfinite(dt)) fail(ErrorKind::InvalidArgument, "dt must be positive");
  const double horizon = std::ceil(schedule.horizon() / dt - 1e-9) * dt;
  std::vector<DoseSegment> out;
  out.reserve(schedule.segments().size());
  for (const auto& s : schedule.segments()) {
    if (on_grid(s.start, dt) && on_grid(s.end, dt)) {
      out.push_back(s);
      continue;
    }
    double start = std::round(s.start / dt) * dt;
    double end = std::round(s.end / dt) * dt;
    if (end <= start) end = start + dt;
    out.push_back({start, end, s.mass() / (end - start)});
  }
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i].start < out[i - 1].end)
      fail(ErrorKind::InvalidArgument, "segments overlap after snapping to dt grid");
  const double end = std::max(horizon, out.empty() ? 0.0 : out.back().end);
  return DoseSchedule(std::move(out), end);
}

}  // namespace doseopt
