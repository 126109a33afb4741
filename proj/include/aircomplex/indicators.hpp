#pragma once

// Edge density, strength, clustering coefficient and nearest-neighbour
// degree of a graph snapshot.

#include <aircomplex/graph.hpp>

#include <algorithm>
#include <string>
#include <vector>

namespace aircomplex {

/// Indicator values at one time step. Per-aircraft vectors are aligned with
/// `callsigns()`. Sector totals are sums over aircraft.
struct IndicatorFrame {
  double time = 0.0;
  double edge_density = 0.0;
  bool edge_density_defined = false; // false when fewer than two aircraft
  GraphSnapshot::Names names;
  std::vector<double> strength;
  std::vector<double> cc;
  std::vector<double> nnd;
  std::vector<double> max_incident_weight;
  double strength_total = 0.0;
  double cc_total = 0.0;
  double nnd_total = 0.0;

  const std::vector<std::string>& callsigns() const { return *names; }
  std::size_t size() const { return names ? names->size() : 0; }

  // Average-over-aircraft view, used for plotting only.
  double strength_average() const { return size() ? strength_total / size() : 0.0; }
  double cc_average() const { return size() ? cc_total / size() : 0.0; }
  double nnd_average() const { return size() ? nnd_total / size() : 0.0; }
};

/// Total edge weight over |V|(|V|-1)/2. Throws TooFewVertices for |V| < 2.
inline double edge_density(const GraphSnapshot& g) {
  const auto n = g.size();
  if (n < 2) throw TooFewVertices("edge density needs at least two aircraft");
  double total = 0.0;
  for (const auto& e : g.edges()) total += e.weight;
  return total / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

inline double strength(const GraphSnapshot& g, VertexId i) {
  double s = 0.0;
  for (const auto& nb : g.neighbors(i)) s += nb.weight;
  return s;
}

inline double strength(const GraphSnapshot& g, const std::string& callsign) {
  return strength(g, g.index_of(callsign));
}

namespace detail {

// Sum over ordered neighbour pairs (j, k) of i that close a triangle of
// (w_ij + w_jk). `mark` is scratch of size |V| holding 0 everywhere.
inline double triangle_weight_sum(const GraphSnapshot& g, VertexId i, std::vector<char>& mark) {
  const auto nb_i = g.neighbors(i);
  for (const auto& nb : nb_i) mark[nb.vertex] = 1;
  double sum = 0.0;
  for (const auto& j : nb_i) {
    for (const auto& k : g.neighbors(j.vertex)) {
      if (k.vertex != i && mark[k.vertex]) sum += j.weight + k.weight;
    }
  }
  for (const auto& nb : nb_i) mark[nb.vertex] = 0;
  return sum;
}

inline double clustering_coefficient(const GraphSnapshot& g, VertexId i, std::vector<char>& mark) {
  const auto deg = g.degree(i);
  if (deg <= 1) return 0.0;
  const double s = strength(g, i);
  if (s <= 0.0) return 0.0;
  return triangle_weight_sum(g, i, mark) / (2.0 * s * static_cast<double>(deg - 1));
}

} // namespace detail

/// Weighted clustering coefficient. Triangles are enumerated over ordered
/// neighbour pairs (j, k), each contributing w_ij + w_jk. Zero when
/// deg(i) <= 1.
inline double clustering_coefficient(const GraphSnapshot& g, VertexId i) {
  std::vector<char> mark(g.size(), 0);
  return detail::clustering_coefficient(g, i, mark);
}

inline double clustering_coefficient(const GraphSnapshot& g, const std::string& callsign) {
  return clustering_coefficient(g, g.index_of(callsign));
}

/// Strength-weighted mean degree of the neighbours of i; zero when s(i) = 0.
inline double nearest_neighbor_degree(const GraphSnapshot& g, VertexId i) {
  double num = 0.0;
  double s = 0.0;
  for (const auto& nb : g.neighbors(i)) {
    num += nb.weight * static_cast<double>(g.degree(nb.vertex));
    s += nb.weight;
  }
  return s > 0.0 ? num / s : 0.0;
}

inline double nearest_neighbor_degree(const GraphSnapshot& g, const std::string& callsign) {
  return nearest_neighbor_degree(g, g.index_of(callsign));
}

inline IndicatorFrame compute_frame(const GraphSnapshot& g) {
  const auto n = g.size();
  IndicatorFrame f;
  f.time = g.time();
  f.names = g.shared_callsigns();
  f.strength.assign(n, 0.0);
  f.cc.assign(n, 0.0);
  f.nnd.assign(n, 0.0);
  f.max_incident_weight.assign(n, 0.0);
  if (n >= 2) {
    f.edge_density = edge_density(g);
    f.edge_density_defined = true;
  }

  std::vector<char> mark(n, 0);
  for (VertexId i = 0; i < n; ++i) {
    double s = 0.0;
    double num = 0.0;
    double w_max = 0.0;
    for (const auto& nb : g.neighbors(i)) {
      s += nb.weight;
      num += nb.weight * static_cast<double>(g.degree(nb.vertex));
      w_max = std::max(w_max, nb.weight);
    }
    f.strength[i] = s;
    f.nnd[i] = s > 0.0 ? num / s : 0.0;
    f.max_incident_weight[i] = w_max;
    f.cc[i] = detail::clustering_coefficient(g, i, mark);
  }
  for (std::size_t i = 0; i < n; ++i) {
    f.strength_total += f.strength[i];
    f.cc_total += f.cc[i];
    f.nnd_total += f.nnd[i];
  }
  return f;
}

} // namespace aircomplex
