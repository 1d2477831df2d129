#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace doseopt {

/// Model constants with every rate expressed per minute.
///
/// `c_half` is the acute-tolerance half concentration; an empty optional
/// means the acute mechanism is disabled (the divisor in the effect formula
/// is exactly 1). Setting `k4 = 0` disables long-term tolerance.
struct ModelParams {
  double e0 = 0.0;   // effect baseline
  double k1 = 0.0;   // concentration decay rate, 1/min
  double k2 = 0.0;   // effect convergence rate, 1/min
  double k3 = 0.0;   // baseline convergence rate, 1/min
  double k4 = 0.0;   // tolerance strength, mL/ug
  double k5 = 0.0;   // memory rate, 1/min
  double k6 = 0.0;   // concentration-to-effect gain, mL/ug
  double k7 = 0.0;   // dose-to-concentration gain, min/mL
  std::optional<double> c_half;  // ug/mL, nullopt = infinite

  bool acute_tolerance_enabled() const { return c_half.has_value(); }

  bool operator==(const ModelParams&) const = default;
};

enum class TimeUnit { PerMinute, PerDay };

inline constexpr double kMinutesPerDay = 1440.0;

/// Parses a unit tag such as "per_min", "1/min", "per_day" or "1/day".
std::optional<TimeUnit> parse_time_unit(std::string_view tag);

/// Converts the published (mixed-unit) parameter row into per-minute rates.
/// `unit_tags` maps a rate field name (k1, k2, k3, k5) to its unit tag;
/// fields absent from the map are taken as per-minute. Unknown tags and tags
/// attached to non-rate fields are rejected with the field named.
ModelParams normalize_params(const ModelParams& raw,
                             const std::map<std::string, std::string>& unit_tags);

/// Throws doseopt::Error if a field is non-finite or out of range.
void validate(const ModelParams& p);

/// Largest admissible forward-Euler step, 2 / max(k1, k2, k3, k5).
/// Infinite when every rate is zero.
double stability_bound(const ModelParams& p);

ModelParams caffeine_params();
ModelParams nicotine_params();

/// Built-in parameter set by name ("caffeine", "nicotine").
std::optional<ModelParams> builtin_params(std::string_view name);
std::vector<std::string> builtin_param_names();

/// Field access by name, used by parameter sweeps. "c_half" reads as
/// +infinity when disabled and an infinite value disables it.
const std::vector<std::string>& param_field_names();
double get_field(const ModelParams& p, std::string_view field);
ModelParams with_field(const ModelParams& p, std::string_view field, double value);

}  // namespace doseopt
