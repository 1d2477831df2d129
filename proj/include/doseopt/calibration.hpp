#pragma once

#include "doseopt/kinetics.hpp"
#include "doseopt/schedule.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace doseopt {

enum class Channel { Concentration, Effect };

struct ObservedSeries {
  Channel channel = Channel::Effect;
  std::vector<std::pair<double, double>> points;  // (minute, value)
};

std::string_view channel_name(Channel c);

/// Validates ordering and finiteness.
void validate(const ObservedSeries& s);

/// Reads a CSV file: a `# channel: concentration|effect` line, the header
/// `t_min,value`, then one row per observation.
ObservedSeries load_series(const std::string& path);
ObservedSeries parse_series(std::string_view text, const std::string& source = "<input>");

/// Sum over series of RMSE(simulated, observed) / range(observed). The model
/// is integrated from rest with forward Euler and linearly interpolated at
/// the observation times.
double loss(const ModelParams& p, const DoseSchedule& schedule,
            const std::vector<ObservedSeries>& observed, double dt);

/// Loss for each candidate value of one parameter field, in input order.
std::vector<std::pair<double, double>> sweep(const ModelParams& base, std::string_view field,
                                             const std::vector<double>& values,
                                             const DoseSchedule& schedule,
                                             const std::vector<ObservedSeries>& observed,
                                             double dt);

}  // namespace doseopt
