#pragma once

#include "doseopt/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

namespace doseopt::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Up to `max_segments` disjoint grid-aligned segments inside [0, horizon).
inline DoseSchedule random_schedule(std::mt19937_64& rng, double dt, double horizon,
                                    int max_segments, double max_rate) {
  const auto steps = static_cast<long>(std::llround(horizon / dt));
  std::uniform_int_distribution<long> pick(0, steps);
  std::uniform_int_distribution<int> count(0, max_segments);
  std::set<long> cuts;
  const int n = count(rng);
  while (static_cast<int>(cuts.size()) < 2 * n) cuts.insert(pick(rng));
  std::vector<long> c(cuts.begin(), cuts.end());
  std::vector<DoseSegment> segs;
  for (std::size_t i = 0; i + 1 < c.size(); i += 2)
    segs.push_back({static_cast<double>(c[i]) * dt, static_cast<double>(c[i + 1]) * dt,
                    uniform(rng, 0.0, max_rate)});
  return DoseSchedule(std::move(segs), static_cast<double>(steps) * dt);
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace doseopt::testing
