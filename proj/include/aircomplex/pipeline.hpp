#pragma once

// End-to-end run: trajectory log -> graphs -> indicators -> contributions ->
// community tracking -> heatmap and summary, plus the JSON artifacts.

#include <aircomplex/analytics.hpp>
#include <aircomplex/community.hpp>
#include <aircomplex/contributions.hpp>
#include <aircomplex/graph.hpp>
#include <aircomplex/indicators.hpp>
#include <aircomplex/trajectory.hpp>

#include <json.hpp>

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace aircomplex {

struct RunRequest {
  RunParams params;
  std::vector<std::string> exclude;
  std::optional<IndicatorWeights> indicator_weights;

  /// Throws InvalidParams / InvalidWeights. `log` is used to check that
  /// excluded aircraft exist.
  void validate(const TrajectoryLog* log = nullptr) const {
    params.weights.validate();
    if (!(params.complexity_thresh_pct > 0.0 && params.complexity_thresh_pct <= 100.0))
      throw InvalidParams("complexity threshold must be in (0, 100]");
    if (!(params.dt_s > 0.0)) throw InvalidParams("dt must be positive");
    if (indicator_weights) indicator_weights->validate();
    if (log) {
      const auto names = log->callsigns();
      for (const auto& cs : exclude) {
        if (!std::binary_search(names.begin(), names.end(), cs))
          throw InvalidParams("excluded aircraft '" + cs + "' is not in the scenario");
      }
    }
  }
};

/// Separation tables on the resampled grid, one per grid time (empty steps
/// included). Independent of the weight parameters below the caps.
struct PreparedScenario {
  double dt = 0.0;
  std::vector<SeparationTable> steps;
  std::vector<std::vector<AircraftState>> states; // positions per step
};

inline PreparedScenario prepare_scenario(const TrajectoryLog& log, double dt,
                                         const std::vector<std::string>& exclude, double cap_h_nm,
                                         double cap_v_ft) {
  const auto grid = resample(exclude_aircraft(log, exclude), dt);
  PreparedScenario out;
  out.dt = dt;
  const auto n = grid_size(grid.t_start, grid.t_end, dt);
  const auto slices = grid.slices();
  std::size_t next = 0;
  out.steps.reserve(n);
  out.states.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = grid.t_start + static_cast<double>(k) * dt;
    std::span<const AircraftState> here;
    if (next < slices.size() && slices[next].time == t) here = slices[next++].states;
    out.steps.push_back(measure_separations(t, here, cap_h_nm, cap_v_ft));
    out.states.emplace_back(here.begin(), here.end());
  }
  return out;
}

struct AnalyzedFrame {
  GraphSnapshot graph;
  IndicatorFrame indicators;
  ContributionFrame contributions;
};

inline std::vector<AnalyzedFrame> analyze_frames(const PreparedScenario& scenario, const WeightParams& weights,
                                                 const std::optional<IndicatorWeights>& indicator_weights) {
  std::vector<AnalyzedFrame> frames;
  frames.reserve(scenario.steps.size());
  for (const auto& table : scenario.steps) {
    AnalyzedFrame f;
    f.graph = build_snapshot(table, weights);
    f.indicators = compute_frame(f.graph);
    f.contributions = combined_contribution(f.indicators, indicator_weights);
    frames.push_back(std::move(f));
  }
  return frames;
}

/// Tracker over analyzed frames at one complexity threshold.
inline std::vector<CommunityRecord> track(const std::vector<AnalyzedFrame>& frames, double thresh_pct) {
  TrackerState state(thresh_pct);
  for (const auto& f : frames)
    state = step(std::move(state), f.graph.time(), complex_communities(f.graph, f.contributions, thresh_pct));
  return finish(std::move(state));
}

struct RunOutput {
  RunRequest request;
  std::vector<AnalyzedFrame> frames;
  std::vector<std::vector<AircraftState>> positions;
  std::vector<CommunityRecord> archive;
  HeatmapSeries heatmap;
  RunSummary summary;
};

inline RunOutput run_analysis(const TrajectoryLog& log, const RunRequest& request) {
  request.validate(&log);
  const auto& p = request.params;
  auto prepared = prepare_scenario(log, p.dt_s, request.exclude, p.weights.thresh_h_nm, p.weights.thresh_v_ft);
  RunOutput out;
  out.request = request;
  out.frames = analyze_frames(prepared, p.weights, request.indicator_weights);
  out.positions = std::move(prepared.states);
  out.archive = track(out.frames, p.complexity_thresh_pct);
  std::vector<ContributionFrame> contributions;
  contributions.reserve(out.frames.size());
  for (const auto& f : out.frames) contributions.push_back(f.contributions);
  out.heatmap = build_heatmap(out.archive, contributions);
  out.summary = build_summary(out.archive, p);
  return out;
}

// ---------------------------------------------------------------------------
// JSON artifacts

inline nlohmann::ordered_json frame_json(const AnalyzedFrame& f, std::span<const AircraftState> positions,
                                         std::span<const CommunityRecord> archive) {
  using nlohmann::ordered_json;
  const auto& ind = f.indicators;
  const auto& cf = f.contributions;
  const double t = f.graph.time();

  std::vector<std::optional<std::uint64_t>> community(f.graph.size());
  for (const auto& rec : archive) {
    if (rec.appearance > t || (rec.disappearance && *rec.disappearance < t)) continue;
    for (const auto& cs : rec.members_at(t))
      if (auto v = f.graph.find(cs)) community[*v] = rec.label;
  }

  ordered_json aircraft = ordered_json::array();
  for (std::size_t i = 0; i < f.graph.size(); ++i) {
    ordered_json a;
    a["callsign"] = f.graph.callsigns()[i];
    if (i < positions.size()) {
      a["lat"] = positions[i].latitude;
      a["lon"] = positions[i].longitude;
      a["alt_ft"] = positions[i].altitude;
    }
    a["strength"] = ind.strength[i];
    a["cc"] = ind.cc[i];
    a["nnd"] = ind.nnd[i];
    a["max_w"] = ind.max_incident_weight[i];
    a["combined_pct"] = cf.combined[i];
    ordered_json per = ordered_json::object();
    for (auto k : kContributingIndicators) {
      const auto fr = cf.fractions(k);
      per[std::string(to_string(k))] = fr.empty() ? ordered_json(nullptr) : ordered_json(fr[i]);
    }
    a["per_indicator"] = std::move(per);
    a["community"] = community[i] ? ordered_json(*community[i]) : ordered_json(nullptr);
    aircraft.push_back(std::move(a));
  }

  ordered_json edges = ordered_json::array();
  for (const auto& e : f.graph.edges()) {
    const bool internal = community[e.a] && community[e.a] == community[e.b];
    edges.push_back({{"a", f.graph.callsigns()[e.a]},
                     {"b", f.graph.callsigns()[e.b]},
                     {"w", e.weight},
                     {"complex", internal}});
  }

  ordered_json active = ordered_json::array();
  for (auto k : kContributingIndicators)
    if (cf.is_active(k)) active.push_back(to_string(k));

  ordered_json j;
  j["time"] = t;
  j["edge_density"] = ind.edge_density;
  j["edge_density_defined"] = ind.edge_density_defined;
  j["active_indicators"] = std::move(active);
  j["aircraft"] = std::move(aircraft);
  j["edges"] = std::move(edges);
  return j;
}

inline nlohmann::ordered_json frames_json(const RunOutput& run) {
  nlohmann::ordered_json frames = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < run.frames.size(); ++i) {
    std::span<const AircraftState> pos;
    if (i < run.positions.size()) pos = run.positions[i];
    frames.push_back(frame_json(run.frames[i], pos, run.archive));
  }
  return {{"dt_s", run.request.params.dt_s}, {"frames", std::move(frames)}};
}

inline nlohmann::ordered_json record_json(const CommunityRecord& rec) {
  using nlohmann::ordered_json;
  ordered_json members = ordered_json::array();
  for (const auto& e : rec.membership) {
    members.push_back({{"callsign", e.callsign},
                       {"joined_s", e.joined_at},
                       {"left_s", e.left_at ? ordered_json(*e.left_at) : ordered_json(nullptr)}});
  }
  ordered_json series = ordered_json::array();
  for (const auto& [t, pct] : rec.contribution_series) series.push_back({t, pct});
  ordered_json j;
  j["label"] = rec.label;
  j["name"] = rec.name();
  j["appearance_s"] = rec.appearance;
  j["disappearance_s"] = rec.disappearance ? ordered_json(*rec.disappearance) : ordered_json(nullptr);
  j["members"] = std::move(members);
  j["contribution_pct"] = std::move(series);
  return j;
}

inline nlohmann::ordered_json communities_json(std::span<const CommunityRecord> archive) {
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const auto& rec : archive) list.push_back(record_json(rec));
  return {{"communities", std::move(list)}};
}

inline nlohmann::ordered_json heatmap_json(const HeatmapSeries& h) {
  using nlohmann::ordered_json;
  ordered_json rows = ordered_json::array();
  for (const auto& row : h.rows) {
    ordered_json values = ordered_json::array();
    for (const auto& v : row.values) values.push_back(v ? ordered_json(*v) : ordered_json(nullptr));
    rows.push_back({{"label", row.label},
                    {"name", "Community " + std::to_string(row.label)},
                    {"values", std::move(values)}});
  }
  ordered_json active = ordered_json::array();
  for (bool a : h.active) active.push_back(a);
  return {{"times", h.times}, {"rows", std::move(rows)}, {"pool", h.pool}, {"active", std::move(active)}};
}

inline nlohmann::ordered_json request_json(const RunRequest& r) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["params"] = params_json(r.params);
  auto exclude = r.exclude;
  std::sort(exclude.begin(), exclude.end());
  exclude.erase(std::unique(exclude.begin(), exclude.end()), exclude.end());
  j["exclude"] = exclude;
  if (r.indicator_weights) {
    j["indicator_weights"] = {{"strength", r.indicator_weights->strength},
                              {"cc", r.indicator_weights->cc},
                              {"nnd", r.indicator_weights->nnd}};
  } else {
    j["indicator_weights"] = nullptr;
  }
  return j;
}

/// Parses a request body. Missing fields take their defaults.
inline RunRequest request_from_json(const nlohmann::json& j) {
  RunRequest r;
  const auto num = [](const nlohmann::json& obj, const char* key, double fallback) {
    if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
    if (!obj.at(key).is_number()) throw InvalidParams(std::string("field '") + key + "' must be a number");
    return obj.at(key).get<double>();
  };
  const nlohmann::json& p = j.contains("params") ? j.at("params") : j;
  auto& w = r.params.weights;
  w.safety_h_nm = num(p, "H_nm", w.safety_h_nm);
  w.safety_v_ft = num(p, "V_ft", w.safety_v_ft);
  w.thresh_h_nm = num(p, "thresh_h_nm", w.thresh_h_nm);
  w.thresh_v_ft = num(p, "thresh_v_ft", w.thresh_v_ft);
  w.min_h_nm = num(p, "min_h_nm", w.min_h_nm);
  w.min_v_ft = num(p, "min_v_ft", w.min_v_ft);
  r.params.complexity_thresh_pct = num(p, "complexity_thresh_pct", r.params.complexity_thresh_pct);
  r.params.dt_s = num(p, "dt_s", r.params.dt_s);
  if (j.contains("exclude") && !j.at("exclude").is_null()) {
    if (!j.at("exclude").is_array()) throw InvalidParams("'exclude' must be an array of callsigns");
    for (const auto& cs : j.at("exclude")) {
      if (!cs.is_string()) throw InvalidParams("'exclude' must be an array of callsigns");
      r.exclude.push_back(cs.get<std::string>());
    }
    std::sort(r.exclude.begin(), r.exclude.end());
    r.exclude.erase(std::unique(r.exclude.begin(), r.exclude.end()), r.exclude.end());
  }
  if (j.contains("indicator_weights") && !j.at("indicator_weights").is_null()) {
    const auto& iw = j.at("indicator_weights");
    IndicatorWeights weights;
    weights.strength = num(iw, "strength", 0.0);
    weights.cc = num(iw, "cc", 0.0);
    weights.nnd = num(iw, "nnd", 0.0);
    r.indicator_weights = weights;
  }
  return r;
}

} // namespace aircomplex
