#pragma once

// Per-run outputs: community heatmap with the Pool row and the summary
// statistics file.

#include <aircomplex/community.hpp>
#include <aircomplex/contributions.hpp>
#include <aircomplex/graph.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace aircomplex {

inline constexpr int kSummarySchemaVersion = 1;

struct RunParams {
  WeightParams weights;
  double complexity_thresh_pct = 60.0;
  double dt_s = 10.0;

  friend bool operator==(const RunParams&, const RunParams&) = default;
};

struct HeatmapSeries {
  struct Row {
    std::uint64_t label;
    std::vector<std::optional<double>> values; // aligned with times; empty = not complex
  };
  std::vector<double> times;
  std::vector<Row> rows;
  std::vector<double> pool;
  std::vector<bool> active; // false = no complexity at that step
};

/// One row per label over its lifetime plus the Pool, which holds whatever
/// complexity is not inside a complex community.
inline HeatmapSeries build_heatmap(std::span<const CommunityRecord> archive,
                                   std::span<const ContributionFrame> frames) {
  HeatmapSeries h;
  std::map<double, std::size_t> slot;
  for (const auto& f : frames) {
    slot.emplace(f.time, h.times.size());
    h.times.push_back(f.time);
    h.active.push_back(f.has_activity());
  }
  std::vector<double> complex_sum(h.times.size(), 0.0);
  for (const auto& rec : archive) {
    HeatmapSeries::Row row{rec.label, std::vector<std::optional<double>>(h.times.size())};
    for (const auto& [t, pct] : rec.contribution_series) {
      const auto it = slot.find(t);
      if (it == slot.end()) continue;
      row.values[it->second] = pct;
      complex_sum[it->second] += pct;
    }
    h.rows.push_back(std::move(row));
  }
  h.pool.resize(h.times.size());
  for (std::size_t i = 0; i < h.times.size(); ++i) h.pool[i] = h.active[i] ? 100.0 - complex_sum[i] : 0.0;
  return h;
}

struct SummaryStats {
  double mean = 0.0;
  double std = 0.0; // population
  double min = 0.0;
  double max = 0.0;

  friend bool operator==(const SummaryStats&, const SummaryStats&) = default;
};

inline std::optional<SummaryStats> summarize(std::span<const double> xs) {
  if (xs.empty()) return std::nullopt;
  SummaryStats s;
  s.min = *std::min_element(xs.begin(), xs.end());
  s.max = *std::max_element(xs.begin(), xs.end());
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(xs.size()));
  return s;
}

struct RunSummary {
  RunParams params;
  std::size_t community_count = 0;
  std::optional<SummaryStats> size;       // distinct members per record
  std::optional<SummaryStats> duration_s; // disappearance - appearance + dt
  std::optional<SummaryStats> percentage; // pooled over every (record, step) sample

  friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

inline double record_duration(const CommunityRecord& rec, double dt) {
  return rec.disappearance.value_or(rec.appearance) - rec.appearance + dt;
}

inline RunSummary build_summary(std::span<const CommunityRecord> archive, const RunParams& params) {
  RunSummary s;
  s.params = params;
  s.community_count = archive.size();
  std::vector<double> sizes;
  std::vector<double> durations;
  std::vector<double> pcts;
  for (const auto& rec : archive) {
    sizes.push_back(static_cast<double>(rec.all_members().size()));
    durations.push_back(record_duration(rec, params.dt_s));
    for (const auto& sample : rec.contribution_series) pcts.push_back(sample.second);
  }
  s.size = summarize(sizes);
  s.duration_s = summarize(durations);
  s.percentage = summarize(pcts);
  return s;
}

inline nlohmann::ordered_json params_json(const RunParams& p) {
  return {{"H_nm", p.weights.safety_h_nm},         {"V_ft", p.weights.safety_v_ft},
          {"thresh_h_nm", p.weights.thresh_h_nm},  {"thresh_v_ft", p.weights.thresh_v_ft},
          {"min_h_nm", p.weights.min_h_nm},        {"min_v_ft", p.weights.min_v_ft},
          {"complexity_thresh_pct", p.complexity_thresh_pct}, {"dt_s", p.dt_s}};
}

inline RunParams params_from_json(const nlohmann::json& j) {
  RunParams p;
  p.weights.safety_h_nm = j.at("H_nm").get<double>();
  p.weights.safety_v_ft = j.at("V_ft").get<double>();
  p.weights.thresh_h_nm = j.at("thresh_h_nm").get<double>();
  p.weights.thresh_v_ft = j.at("thresh_v_ft").get<double>();
  p.weights.min_h_nm = j.at("min_h_nm").get<double>();
  p.weights.min_v_ft = j.at("min_v_ft").get<double>();
  p.complexity_thresh_pct = j.at("complexity_thresh_pct").get<double>();
  p.dt_s = j.at("dt_s").get<double>();
  return p;
}

namespace detail {
inline nlohmann::ordered_json stats_json(const std::optional<SummaryStats>& s) {
  if (!s) return nullptr;
  return {{"mean", s->mean}, {"std", s->std}, {"min", s->min}, {"max", s->max}};
}

inline std::optional<SummaryStats> stats_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return SummaryStats{j.at("mean").get<double>(), j.at("std").get<double>(), j.at("min").get<double>(),
                      j.at("max").get<double>()};
}
} // namespace detail

inline nlohmann::ordered_json summary_json(const RunSummary& s) {
  nlohmann::ordered_json communities;
  communities["count"] = s.community_count;
  communities["size"] = detail::stats_json(s.size);
  communities["duration_s"] = detail::stats_json(s.duration_s);
  communities["percentage"] = detail::stats_json(s.percentage);
  nlohmann::ordered_json j;
  j["schema_version"] = kSummarySchemaVersion;
  j["params"] = params_json(s.params);
  j["communities"] = std::move(communities);
  return j;
}

inline RunSummary summary_from_json(const nlohmann::json& j) {
  RunSummary s;
  s.params = params_from_json(j.at("params"));
  const auto& c = j.at("communities");
  s.community_count = c.at("count").get<std::size_t>();
  s.size = detail::stats_from_json(c.at("size"));
  s.duration_s = detail::stats_from_json(c.at("duration_s"));
  s.percentage = detail::stats_from_json(c.at("percentage"));
  return s;
}

/// Downloadable summary file: UTF-8 JSON, deterministic for equal inputs.
inline std::string export_summary_file(const RunSummary& s) {
  return summary_json(s).dump(2) + "\n";
}

} // namespace aircomplex
