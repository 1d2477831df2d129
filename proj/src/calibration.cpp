#include "doseopt/calibration.hpp"

#include "doseopt/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace doseopt {

std::string_view channel_name(Channel c) {
  return c == Channel::Concentration ? "concentration" : "effect";
}

void validate(const ObservedSeries& s) {
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    const auto [t, v] = s.points[i];
    if (!std::isfinite(t) || !std::isfinite(v))
      fail(ErrorKind::InvalidArgument, "observation " + std::to_string(i) + " is not finite");
    if (i > 0 && !(t > s.points[i - 1].first))
      fail(ErrorKind::InvalidArgument,
           "observation times must be strictly increasing (point " + std::to_string(i) + ")");
  }
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<double> parse_number(std::string_view cell) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
  return v;
}

}  // namespace

ObservedSeries parse_series(std::string_view text, const std::string& source) {
  auto where = [&](std::size_t line) { return source + ":" + std::to_string(line) + ": "; };
  if (trim(text).empty()) fail(ErrorKind::Parse, source + ": empty observation file");

  ObservedSeries series;
  std::optional<Channel> channel;
  bool header_seen = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '#') {
      auto body = trim(line.substr(1));
      if (body.rfind("channel", 0) != 0) continue;
      body = trim(body.substr(7));
      if (!body.empty() && (body.front() == ':' || body.front() == '=')) body = trim(body.substr(1));
      if (body == "concentration") channel = Channel::Concentration;
      else if (body == "effect") channel = Channel::Effect;
      else fail(ErrorKind::Parse, where(line_no) + "unknown channel '" + std::string(body) + "'");
      continue;
    }

    if (!header_seen) {
      if (line != "t_min,value")
        fail(ErrorKind::Parse, where(line_no) + "expected header 't_min,value'");
      header_seen = true;
      continue;
    }

    const auto comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos)
      fail(ErrorKind::Parse, where(line_no) + "expected two cells");
    const auto t = parse_number(line.substr(0, comma));
    const auto v = parse_number(line.substr(comma + 1));
    if (!t || !v) fail(ErrorKind::Parse, where(line_no) + "non-numeric cell");
    if (!std::isfinite(*t) || !std::isfinite(*v))
      fail(ErrorKind::Parse, where(line_no) + "non-finite value");
    if (!series.points.empty() && !(*t > series.points.back().first))
      fail(ErrorKind::Parse, where(line_no) + "times must be strictly increasing");
    series.points.emplace_back(*t, *v);
  }

  if (!channel) fail(ErrorKind::Parse, source + ": missing '# channel: concentration|effect' line");
  if (!header_seen) fail(ErrorKind::Parse, source + ": missing header 't_min,value'");
  if (series.points.empty()) fail(ErrorKind::Parse, source + ": no observations");
  series.channel = *channel;
  return series;
}

ObservedSeries load_series(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open observation file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_series(buf.str(), path);
}

double loss(const ModelParams& p, const DoseSchedule& schedule,
            const std::vector<ObservedSeries>& observed, double dt) {
  if (!(dt > 0)) fail(ErrorKind::InvalidArgument, "dt must be positive");
  const double horizon = schedule.horizon();
  for (const auto& s : observed) {
    validate(s);
    if (s.points.empty()) fail(ErrorKind::InvalidArgument, "observation series is empty");
    if (s.points.front().first < 0 || s.points.back().first > horizon)
      fail(ErrorKind::InvalidArgument, "observation time outside the schedule horizon [0, " +
                                           std::to_string(horizon) + "]");
  }
  if (observed.empty()) return 0.0;

  const double t_end = std::ceil(horizon / dt - 1e-9) * dt;
  const auto traj = integrate(p, rest_state(p), schedule, dt, t_end);

  auto simulated = [&](Channel ch, std::size_t i) {
    return ch == Channel::Concentration ? traj.states[i].c : traj.effects[i];
  };

  double total = 0.0;
  for (const auto& s : observed) {
    double sq = 0.0;
    double lo = s.points.front().second;
    double hi = lo;
    for (const auto& [t, v] : s.points) {
      double model = simulated(s.channel, 0);
      if (traj.size() > 1) {
        const double pos = t / dt;
        auto i = std::min(static_cast<std::size_t>(std::floor(pos)), traj.size() - 2);
        const double w = std::clamp(pos - static_cast<double>(i), 0.0, 1.0);
        model = (1.0 - w) * simulated(s.channel, i) + w * simulated(s.channel, i + 1);
      }
      sq += (model - v) * (model - v);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double rmse = std::sqrt(sq / static_cast<double>(s.points.size()));
    const double range = hi > lo ? hi - lo : 1.0;
    total += rmse / range;
  }
  return total;
}

std::vector<std::pair<double, double>> sweep(const ModelParams& base, std::string_view field,
                                             const std::vector<double>& values,
                                             const DoseSchedule& schedule,
                                             const std::vector<ObservedSeries>& observed,
                                             double dt) {
  (void)get_field(base, field);
  std::vector<std::pair<double, double>> out;
  out.reserve(values.size());
  for (double v : values) {
    const auto p = with_field(base, field, v);
    validate(p);
    out.emplace_back(v, loss(p, schedule, observed, dt));
  }
  return out;
}

}  // namespace doseopt
