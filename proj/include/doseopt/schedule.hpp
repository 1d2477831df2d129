#pragma once

#include <vector>

namespace doseopt {

/// Constant-rate dosing interval [start, end) in minutes.
struct DoseSegment {
  double start = 0.0;
  double end = 0.0;
  double rate = 0.0;  // ug/min

  double mass() const { return rate * (end - start); }
  bool operator==(const DoseSegment&) const = default;
};

/// Piecewise-constant dose rate D(t) on [0, horizon]. Segments are sorted,
/// disjoint and nonnegative; the constructor enforces this.
class DoseSchedule {
public:
  DoseSchedule() = default;
  DoseSchedule(std::vector<DoseSegment> segments, double horizon);

  const std::vector<DoseSegment>& segments() const { return segments_; }
  double horizon() const { return horizon_; }

  double total_mass() const;
  double rate_at(double t) const;

  /// Pointwise sum of two schedules; the horizon is the larger of the two.
  DoseSchedule operator+(const DoseSchedule& other) const;

  bool operator==(const DoseSchedule&) const = default;

private:
  std::vector<DoseSegment> segments_;
  double horizon_ = 0.0;
};

/// True when `t` is an integer multiple of `dt` up to rounding noise.
bool on_grid(double t, double dt);

/// Moves every breakpoint to the nearest multiple of `dt`, rescaling each
/// rate so that segment masses are preserved. A segment that would collapse
/// is widened to one step. Overlaps created by snapping are rejected.
DoseSchedule snap_to_grid(const DoseSchedule& schedule, double dt);

}  // namespace doseopt
