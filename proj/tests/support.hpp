// Test-only helpers: graph builders, brute-force oracles and synthetic
// traffic. Nothing here calls into the library's algorithms, so the oracles
// stay independent of the code they check.
#pragma once

#include <aircomplex/aircomplex.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace testsupport {

using aircomplex::GraphSnapshot;
using aircomplex::VertexId;

using WeightMatrix = std::vector<std::vector<double>>;

/// Zero-padded names keep lexical order equal to numeric order.
inline std::string vertex_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "v%02zu", i);
  return buf;
}

inline GraphSnapshot graph_from_matrix(const WeightMatrix& w, double time = 0.0,
                                       std::vector<std::string> names = {}) {
  const auto n = w.size();
  if (names.empty())
    for (std::size_t i = 0; i < n; ++i) names.push_back(vertex_name(i));
  std::vector<aircomplex::Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (w[i][j] > 0.0) edges.push_back({static_cast<VertexId>(i), static_cast<VertexId>(j), w[i][j]});
  return GraphSnapshot(time, std::make_shared<const std::vector<std::string>>(std::move(names)), std::move(edges));
}

/// Graph over callsigns given as (a, b, weight) triples plus isolated names.
inline GraphSnapshot graph_from_edges(std::vector<std::string> names,
                                      const std::vector<std::tuple<std::string, std::string, double>>& edges,
                                      double time = 0.0) {
  std::sort(names.begin(), names.end());
  const auto idx = [&](const std::string& s) {
    return static_cast<VertexId>(std::lower_bound(names.begin(), names.end(), s) - names.begin());
  };
  std::vector<aircomplex::Edge> out;
  for (const auto& [a, b, w] : edges) out.push_back({idx(a), idx(b), w});
  return GraphSnapshot(time, std::make_shared<const std::vector<std::string>>(std::move(names)), std::move(out));
}

inline WeightMatrix random_matrix(std::mt19937_64& rng, std::size_t n, double density, bool unit_weights = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  WeightMatrix w(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (u(rng) >= density) continue;
      const double x = unit_weights ? 1.0 : 0.01 + 0.99 * u(rng);
      w[i][j] = w[j][i] = x;
    }
  }
  return w;
}

// ---- indicator oracles, straight from the definitions ----------------------

inline double oracle_strength(const WeightMatrix& w, std::size_t i) {
  return std::accumulate(w[i].begin(), w[i].end(), 0.0);
}

inline std::size_t oracle_degree(const WeightMatrix& w, std::size_t i) {
  return static_cast<std::size_t>(std::count_if(w[i].begin(), w[i].end(), [](double x) { return x > 0.0; }));
}

/// Ordered pairs (j, k) of distinct neighbours closing a triangle with i,
/// each contributing w_ij + w_jk.
inline double oracle_cc(const WeightMatrix& w, std::size_t i) {
  const auto n = w.size();
  const auto deg = oracle_degree(w, i);
  if (deg <= 1) return 0.0;
  double num = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      if (j == i || k == i || j == k) continue;
      if (w[i][j] > 0 && w[i][k] > 0 && w[j][k] > 0) num += w[i][j] + w[j][k];
    }
  }
  return num / (2.0 * oracle_strength(w, i) * static_cast<double>(deg - 1));
}

inline double oracle_nnd(const WeightMatrix& w, std::size_t i) {
  const double s = oracle_strength(w, i);
  if (s == 0.0) return 0.0;
  double num = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) num += w[i][j] * static_cast<double>(oracle_degree(w, j));
  return num / s;
}

// ---- the two-step walkthrough -----------------------------------------------
// t1: {1,2,3,4} and {5,6,7} are connected, 8 is alone.
// t2: 5 has joined 1..4, while 6, 7 and 8 are isolated.

inline const std::vector<std::string>& walkthrough_names() {
  static const std::vector<std::string> names{"1", "2", "3", "4", "5", "6", "7", "8"};
  return names;
}

inline GraphSnapshot walkthrough_t1(double t) {
  return graph_from_edges(walkthrough_names(),
                          {{"1", "2", 0.8}, {"2", "3", 0.6}, {"3", "4", 0.7}, {"1", "3", 0.5},
                           {"5", "6", 0.5}, {"6", "7", 0.5}, {"5", "7", 0.4}},
                          t);
}

inline GraphSnapshot walkthrough_t2(double t) {
  return graph_from_edges(walkthrough_names(),
                          {{"1", "2", 0.8}, {"2", "3", 0.6}, {"3", "4", 0.7}, {"1", "3", 0.5}, {"4", "5", 0.6}},
                          t);
}

// ---- connectivity oracle ---------------------------------------------------

/// Components of size >= 2 via Warshall transitive closure, as sorted sets
/// of vertex indices, sorted.
inline std::vector<std::vector<std::size_t>> oracle_components(const WeightMatrix& w) {
  const auto n = w.size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t i = 0; i < n; ++i) {
    reach[i][i] = true;
    for (std::size_t j = 0; j < n; ++j)
      if (w[i][j] > 0.0) reach[i][j] = true;
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (reach[k][j]) reach[i][j] = true;
  std::set<std::vector<std::size_t>> comps;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> c;
    for (std::size_t j = 0; j < n; ++j)
      if (reach[i][j]) c.push_back(j);
    if (c.size() >= 2) comps.insert(c);
  }
  return {comps.begin(), comps.end()};
}

/// Library components translated back to index sets, sorted, for comparison
/// with oracle_components.
inline std::vector<std::vector<std::size_t>> library_components(const GraphSnapshot& g) {
  std::vector<std::vector<std::size_t>> out;
  for (const auto& comp : aircomplex::connected_components(g)) {
    std::vector<std::size_t> c;
    for (const auto& cs : comp) c.push_back(*g.find(cs));
    std::sort(c.begin(), c.end());
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---- statistics ------------------------------------------------------------

inline std::vector<double> average_ranks(const std::vector<double>& x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = rank;
    i = j + 1;
  }
  return r;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(average_ranks(x), average_ranks(y));
}

/// Welford's streaming mean / population variance.
struct StreamingStats {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  double min = 0.0;
  double max = 0.0;

  void push(double x) {
    if (n == 0) min = max = x;
    min = std::min(min, x);
    max = std::max(max, x);
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  double std() const { return n ? std::sqrt(m2 / static_cast<double>(n)) : 0.0; }
};

// ---- traffic ---------------------------------------------------------------

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::filesystem::path scenario_path(const std::string& name) {
  return std::filesystem::path(AIRCOMPLEX_SCENARIO_DIR) / name;
}

inline aircomplex::TrajectoryLog load_scenario(const std::string& name) {
  return aircomplex::parse_log(read_text(scenario_path(name)));
}

/// Straight-line traffic through a ~200 NM square sector: `aircraft` flights
/// with random entry times, headings, speeds and flight levels, logged every
/// `step` seconds over `duration` seconds.
inline std::string synthetic_traffic_csv(std::uint64_t seed, std::size_t aircraft, double duration, double step) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double lat0 = 40.0;
  const double lon0 = -3.0;
  const double nm_per_deg_lon = 60.0 * std::cos(lat0 * M_PI / 180.0);
  std::ostringstream os;
  os << "time_s,callsign,lat_deg,lon_deg,alt_ft\n";
  os.precision(10);
  struct Row {
    double t;
    std::string cs;
    double lat, lon, alt;
  };
  std::vector<Row> rows;
  for (std::size_t a = 0; a < aircraft; ++a) {
    char cs[16];
    std::snprintf(cs, sizeof cs, "FLT%03zu", a);
    const double heading = u(rng) * 2.0 * M_PI;
    const double speed = (380.0 + 120.0 * u(rng)) / 3600.0;
    const double alt = 1000.0 * std::floor(30.0 + 8.0 * u(rng));
    const double x0 = -100.0 + 200.0 * u(rng);
    const double y0 = -100.0 + 200.0 * u(rng);
    const double t_in = std::floor(u(rng) * duration / 2.0 / step) * step;
    const double t_out = std::min(duration, t_in + std::floor((duration / 2.0 + u(rng) * duration) / step) * step);
    for (double t = t_in; t <= t_out + 1e-9; t += step) {
      const double s = speed * (t - t_in);
      const double x = x0 + std::sin(heading) * s;
      const double y = y0 + std::cos(heading) * s;
      rows.push_back({t, cs, lat0 + y / 60.0, lon0 + x / nm_per_deg_lon, alt});
    }
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return std::tie(a.t, a.cs) < std::tie(b.t, b.cs); });
  for (const auto& r : rows) os << r.t << ',' << r.cs << ',' << r.lat << ',' << r.lon << ',' << r.alt << '\n';
  return os.str();
}

} // namespace testsupport
