#include "doseopt/params.hpp"

#include "doseopt/error.hpp"

#include <algorithm>
#include <cmath>

namespace doseopt {

namespace {

bool is_rate_field(std::string_view f) {
  return f == "k1" || f == "k2" || f == "k3" || f == "k5";
}

double* rate_slot(ModelParams& p, std::string_view f) {
  if (f == "k1") return &p.k1;
  if (f == "k2") return &p.k2;
  if (f == "k3") return &p.k3;
  if (f == "k5") return &p.k5;
  return nullptr;
}

}  // namespace

std::optional<TimeUnit> parse_time_unit(std::string_view tag) {
  if (tag == "per_min" || tag == "1/min" || tag == "min") return TimeUnit::PerMinute;
  if (tag == "per_day" || tag == "1/day" || tag == "day") return TimeUnit::PerDay;
  return std::nullopt;
}

ModelParams normalize_params(const ModelParams& raw,
                             const std::map<std::string, std::string>& unit_tags) {
  ModelParams p = raw;
  for (const auto& [field, tag] : unit_tags) {
    const auto unit = parse_time_unit(tag);
    if (!unit) fail(ErrorKind::InvalidArgument, "unknown unit tag '" + tag + "' for field " + field);
    if (!is_rate_field(field)) {
      // Only the per-minute tag is meaningful on a non-rate field.
      if (*unit == TimeUnit::PerMinute && param_field_names().end() !=
          std::find(param_field_names().begin(), param_field_names().end(), field))
        continue;
      fail(ErrorKind::InvalidArgument, "unit tag '" + tag + "' not applicable to field " + field);
    }
    if (*unit == TimeUnit::PerDay) *rate_slot(p, field) /= kMinutesPerDay;
  }
  return p;
}

void validate(const ModelParams& p) {
  auto require = [](bool ok, const char* what) {
    if (!ok) fail(ErrorKind::InvalidArgument, std::string("invalid parameter: ") + what);
  };
  require(std::isfinite(p.e0), "e0 must be finite");
  require(std::isfinite(p.k1) && p.k1 >= 0, "k1 must be finite and >= 0");
  require(std::isfinite(p.k2) && p.k2 >= 0, "k2 must be finite and >= 0");
  require(std::isfinite(p.k3) && p.k3 >= 0, "k3 must be finite and >= 0");
  require(std::isfinite(p.k4), "k4 must be finite");
  require(std::isfinite(p.k5) && p.k5 >= 0, "k5 must be finite and >= 0");
  require(std::isfinite(p.k6), "k6 must be finite");
  require(std::isfinite(p.k7) && p.k7 >= 0, "k7 must be finite and >= 0");
  if (p.c_half) require(std::isfinite(*p.c_half) && *p.c_half > 0, "c_half must be > 0");
}

double stability_bound(const ModelParams& p) {
  const double k = std::max({p.k1, p.k2, p.k3, p.k5});
  return k > 0 ? 2.0 / k : std::numeric_limits<double>::infinity();
}

ModelParams caffeine_params() {
  ModelParams raw;
  raw.e0 = 0.0;
  raw.k1 = 0.002;
  raw.k2 = 0.1;
  raw.k3 = 0.5;
  raw.k4 = 0.3;
  raw.k5 = 0.5;
  raw.k6 = 0.4;
  raw.k7 = 0.0125;
  raw.c_half = std::nullopt;
  return normalize_params(raw, {{"k3", "per_day"}, {"k5", "per_day"}});
}

ModelParams nicotine_params() {
  ModelParams raw;
  raw.e0 = 60.0;
  raw.k1 = 0.014;
  raw.k2 = 0.08;
  raw.k3 = 0.0;
  raw.k4 = 0.0;
  raw.k5 = 20.0;
  raw.k6 = 1.8e3;
  raw.k7 = 0.0175;
  raw.c_half = 0.005;
  return normalize_params(raw, {{"k3", "per_day"}, {"k5", "per_day"}});
}

std::optional<ModelParams> builtin_params(std::string_view name) {
  if (name == "caffeine") return caffeine_params();
  if (name == "nicotine") return nicotine_params();
  return std::nullopt;
}

std::vector<std::string> builtin_param_names() { return {"caffeine", "nicotine"}; }

const std::vector<std::string>& param_field_names() {
  static const std::vector<std::string> names{"e0", "k1", "k2", "k3", "k4",
                                              "k5", "k6", "k7", "c_half"};
  return names;
}

double get_field(const ModelParams& p, std::string_view field) {
  if (field == "e0") return p.e0;
  if (field == "k1") return p.k1;
  if (field == "k2") return p.k2;
  if (field == "k3") return p.k3;
  if (field == "k4") return p.k4;
  if (field == "k5") return p.k5;
  if (field == "k6") return p.k6;
  if (field == "k7") return p.k7;
  if (field == "c_half") return p.c_half.value_or(std::numeric_limits<double>::infinity());
  fail(ErrorKind::InvalidArgument, "unknown parameter field '" + std::string(field) + "'");
}

ModelParams with_field(const ModelParams& p, std::string_view field, double value) {
  ModelParams q = p;
  if (field == "e0") q.e0 = value;
  else if (field == "k1") q.k1 = value;
  else if (field == "k2") q.k2 = value;
  else if (field == "k3") q.k3 = value;
  else if (field == "k4") q.k4 = value;
  else if (field == "k5") q.k5 = value;
  else if (field == "k6") q.k6 = value;
  else if (field == "k7") q.k7 = value;
  else if (field == "c_half") {
    if (std::isinf(value) && value > 0) q.c_half.reset();
    else q.c_half = value;
  } else {
    fail(ErrorKind::InvalidArgument, "unknown parameter field '" + std::string(field) + "'");
  }
  return q;
}

}  // namespace doseopt
