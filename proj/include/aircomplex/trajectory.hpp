#pragma once

// Trajectory logs: CSV ingestion, uniform-grid resampling and the distance
// primitives the interdependency graph is built from.

#include <aircomplex/error.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <unordered_set>
#include <utility>
#include <vector>

namespace aircomplex {

inline constexpr double kEarthRadiusNm = 3440.065;
inline constexpr std::string_view kLogHeader = "time_s,callsign,lat_deg,lon_deg,alt_ft";

struct AircraftState {
  std::string callsign;
  double time = 0.0;      // seconds from scenario start
  double latitude = 0.0;  // degrees
  double longitude = 0.0; // degrees
  double altitude = 0.0;  // feet

  friend bool operator==(const AircraftState&, const AircraftState&) = default;
};

enum class LogFormat { csv };

/// Time-ordered aircraft states. `dt` is zero until the log is resampled.
struct TrajectoryLog {
  std::vector<AircraftState> states; // sorted by (time, callsign)
  double dt = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;

  bool empty() const noexcept { return states.empty(); }

  std::vector<std::string> callsigns() const {
    std::set<std::string> names;
    for (const auto& s : states) names.insert(s.callsign);
    return {names.begin(), names.end()};
  }

  std::size_t aircraft_count() const { return callsigns().size(); }

  /// Contiguous block of states sharing one time stamp.
  struct TimeSlice {
    double time;
    std::span<const AircraftState> states;
  };

  std::vector<TimeSlice> slices() const {
    std::vector<TimeSlice> out;
    std::size_t begin = 0;
    while (begin < states.size()) {
      std::size_t end = begin + 1;
      while (end < states.size() && states[end].time == states[begin].time) ++end;
      out.push_back({states[begin].time,
                     std::span<const AircraftState>(states).subspan(begin, end - begin)});
      begin = end;
    }
    return out;
  }

  friend bool operator==(const TrajectoryLog&, const TrajectoryLog&) = default;
};

namespace detail {

inline bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t extra = 0;
    if (c < 0x80) {
      extra = 0;
    } else if ((c & 0xE0) == 0xC0 && c >= 0xC2) {
      extra = 1;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
    } else if ((c & 0xF8) == 0xF0 && c <= 0xF4) {
      extra = 3;
    } else {
      return false;
    }
    if (i + extra >= s.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) return false;
    }
    i += extra + 1;
  }
  return true;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline bool parse_double(std::string_view field, double& out) {
  field = trim(field);
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last && std::isfinite(out);
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(pos));
      break;
    }
    out.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return out;
}

constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

// Grid membership and sample matching tolerance, in seconds.
inline constexpr double kTimeEps = 1e-9;

} // namespace detail

/// Parses a trajectory log. Any bad row rejects the whole file.
inline TrajectoryLog parse_log(std::string_view bytes, LogFormat format = LogFormat::csv) {
  (void)format; // csv is the only format
  if (bytes.starts_with("\xEF\xBB\xBF")) bytes.remove_prefix(3);
  if (detail::trim(bytes).empty()) throw EmptyLog("log is empty");

  TrajectoryLog log;
  std::set<std::pair<std::string, double>> seen;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos <= bytes.size()) {
    auto nl = bytes.find('\n', pos);
    if (nl == std::string_view::npos) nl = bytes.size();
    const auto raw = bytes.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!detail::valid_utf8(raw)) throw MalformedRow(line_no, "invalid UTF-8");
    const auto line = detail::trim(raw);
    if (!header_seen) {
      if (line != kLogHeader)
        throw MalformedRow(line_no, "expected header '" + std::string(kLogHeader) + "'");
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;

    const auto fields = detail::split_fields(line);
    if (fields.size() != 5)
      throw MalformedRow(line_no, "expected 5 fields, got " + std::to_string(fields.size()));
    AircraftState s;
    s.callsign = std::string(detail::trim(fields[1]));
    if (s.callsign.empty()) throw MalformedRow(line_no, "empty callsign");
    if (!detail::parse_double(fields[0], s.time)) throw MalformedRow(line_no, "bad time_s");
    if (!detail::parse_double(fields[2], s.latitude)) throw MalformedRow(line_no, "bad lat_deg");
    if (!detail::parse_double(fields[3], s.longitude)) throw MalformedRow(line_no, "bad lon_deg");
    if (!detail::parse_double(fields[4], s.altitude)) throw MalformedRow(line_no, "bad alt_ft");
    if (s.time < 0) throw MalformedRow(line_no, "negative time");
    if (s.latitude < -90 || s.latitude > 90) throw MalformedRow(line_no, "latitude out of range");
    if (s.longitude < -180 || s.longitude > 180) throw MalformedRow(line_no, "longitude out of range");
    if (s.altitude < 0) throw MalformedRow(line_no, "negative altitude");
    if (!seen.emplace(s.callsign, s.time).second)
      throw MalformedRow(line_no, "duplicate row for " + s.callsign);
    log.states.push_back(std::move(s));
  }
  if (!header_seen) throw EmptyLog("log has no header");
  if (log.states.empty()) throw EmptyLog("log has no data rows");

  std::stable_sort(log.states.begin(), log.states.end(), [](const auto& a, const auto& b) {
    return a.time != b.time ? a.time < b.time : a.callsign < b.callsign;
  });
  log.t_start = log.states.front().time;
  log.t_end = log.states.back().time;
  return log;
}

/// Copy of `log` without the listed aircraft. Time bounds follow the
/// remaining rows; an empty result keeps the original bounds.
inline TrajectoryLog exclude_aircraft(const TrajectoryLog& log, std::span<const std::string> excluded) {
  const std::unordered_set<std::string> drop(excluded.begin(), excluded.end());
  TrajectoryLog out;
  out.dt = log.dt;
  for (const auto& s : log.states)
    if (!drop.contains(s.callsign)) out.states.push_back(s);
  if (out.states.empty()) {
    out.t_start = log.t_start;
    out.t_end = log.t_end;
  } else {
    out.t_start = out.states.front().time;
    out.t_end = out.states.back().time;
  }
  return out;
}

/// Number of grid points t_start + k*dt that do not pass t_end.
inline std::size_t grid_size(double t_start, double t_end, double dt) {
  if (t_end < t_start) return 0;
  return static_cast<std::size_t>(std::floor((t_end - t_start) / dt + detail::kTimeEps)) + 1;
}

/// Piecewise-linear resampling onto t_start + k*dt. No extrapolation past
/// an aircraft's first or last sample.
inline TrajectoryLog resample(const TrajectoryLog& log, double dt) {
  if (!(dt > 0)) throw InvalidParams("resampling step must be positive");
  TrajectoryLog out;
  out.dt = dt;
  out.t_start = log.t_start;
  if (log.states.empty()) {
    out.t_end = log.t_start;
    return out;
  }

  std::map<std::string, std::vector<const AircraftState*>> tracks;
  for (const auto& s : log.states) tracks[s.callsign].push_back(&s);

  const std::size_t n_grid = grid_size(log.t_start, log.t_end, dt);
  out.t_end = log.t_start + static_cast<double>(n_grid - 1) * dt;

  for (const auto& [callsign, track] : tracks) {
    // Tracks are already time-sorted because the log is.
    const double first = track.front()->time;
    const double last = track.back()->time;
    const auto k_begin = static_cast<std::size_t>(
        std::max(0.0, std::ceil((first - log.t_start) / dt - detail::kTimeEps)));
    std::size_t seg = 0;
    for (std::size_t k = k_begin; k < n_grid; ++k) {
      const double t = log.t_start + static_cast<double>(k) * dt;
      if (t > last + detail::kTimeEps) break;
      while (seg + 1 < track.size() && track[seg + 1]->time <= t + detail::kTimeEps) ++seg;
      const AircraftState& a = *track[seg];
      AircraftState s{callsign, t, a.latitude, a.longitude, a.altitude};
      if (std::abs(a.time - t) > detail::kTimeEps && seg + 1 < track.size()) {
        const AircraftState& b = *track[seg + 1];
        const double f = (t - a.time) / (b.time - a.time);
        s.latitude = a.latitude + (b.latitude - a.latitude) * f;
        s.longitude = a.longitude + (b.longitude - a.longitude) * f;
        s.altitude = a.altitude + (b.altitude - a.altitude) * f;
      }
      out.states.push_back(std::move(s));
    }
  }
  std::stable_sort(out.states.begin(), out.states.end(), [](const auto& a, const auto& b) {
    return a.time != b.time ? a.time < b.time : a.callsign < b.callsign;
  });
  return out;
}

/// Great-circle distance in nautical miles (haversine, spherical earth).
inline double horizontal_distance(double lat1, double lon1, double lat2, double lon2) {
  const double phi1 = detail::deg2rad(lat1);
  const double phi2 = detail::deg2rad(lat2);
  const double dphi = detail::deg2rad(lat2 - lat1);
  const double dlambda = detail::deg2rad(lon2 - lon1);
  const double s1 = std::sin(dphi / 2);
  const double s2 = std::sin(dlambda / 2);
  const double h = std::min(1.0, s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2);
  return 2.0 * kEarthRadiusNm * std::asin(std::sqrt(h));
}

inline double horizontal_distance(const AircraftState& a, const AircraftState& b) {
  return horizontal_distance(a.latitude, a.longitude, b.latitude, b.longitude);
}

/// Altitude separation in feet.
inline double vertical_distance(const AircraftState& a, const AircraftState& b) {
  return std::abs(a.altitude - b.altitude);
}

} // namespace aircomplex
