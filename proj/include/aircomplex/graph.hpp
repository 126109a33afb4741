#pragma once

// Weighted, undirected interdependency graph for a single time step.

#include <aircomplex/error.hpp>
#include <aircomplex/trajectory.hpp>

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace aircomplex {

/// Distances that shape the pairwise weight. Horizontal values are in
/// nautical miles, vertical values in feet.
struct WeightParams {
  double safety_h_nm = 5.0;   // H: weight is 1 at or inside this distance
  double safety_v_ft = 1000.0; // V
  double thresh_h_nm = 33.0;  // weight is 0 at or beyond this distance
  double thresh_v_ft = 3000.0;
  double min_h_nm = 5.0;      // denominator anchor of the linear ramp
  double min_v_ft = 1000.0;

  /// Throws InvalidParams unless 0 < H <= min_h < thresh_h (same vertically).
  void validate() const {
    if (!(safety_h_nm > 0 && safety_h_nm <= min_h_nm && min_h_nm < thresh_h_nm))
      throw InvalidParams("horizontal distances must satisfy 0 < H <= min_h < thresh_h");
    if (!(safety_v_ft > 0 && safety_v_ft <= min_v_ft && min_v_ft < thresh_v_ft))
      throw InvalidParams("vertical distances must satisfy 0 < V <= min_v < thresh_v");
  }

  friend bool operator==(const WeightParams&, const WeightParams&) = default;
};

namespace detail {
inline double ramp_weight(double d, double safety, double thresh, double min) {
  if (d <= safety) return 1.0;
  if (d >= thresh) return 0.0;
  return std::clamp((thresh - d) / (thresh - min), 0.0, 1.0);
}
} // namespace detail

inline double horizontal_weight(double dh_nm, const WeightParams& p) {
  return detail::ramp_weight(dh_nm, p.safety_h_nm, p.thresh_h_nm, p.min_h_nm);
}

inline double vertical_weight(double dv_ft, const WeightParams& p) {
  return detail::ramp_weight(dv_ft, p.safety_v_ft, p.thresh_v_ft, p.min_v_ft);
}

/// Average of the two weights when both are positive, otherwise 0.
inline double pair_weight(double wh, double wv) {
  return (wh > 0.0 && wv > 0.0) ? (wh + wv) / 2.0 : 0.0;
}

using VertexId = std::uint32_t;

struct Edge {
  VertexId a; // a < b
  VertexId b;
  double weight;
};

struct Neighbor {
  VertexId vertex;
  double weight;
};

/// Immutable graph G(t). Vertices are the sorted callsigns present at `time`;
/// only positive-weight edges are stored.
class GraphSnapshot {
public:
  using Names = std::shared_ptr<const std::vector<std::string>>;

  GraphSnapshot() : names_(std::make_shared<const std::vector<std::string>>()) {}

  /// `names` must be sorted and unique; edges may come in any order.
  GraphSnapshot(double time, Names names, std::vector<Edge> edges)
      : time_(time), names_(std::move(names)), edges_(std::move(edges)) {
    const auto n = names_->size();
    for (auto& e : edges_)
      if (e.a > e.b) std::swap(e.a, e.b);
    std::sort(edges_.begin(), edges_.end(),
              [](const Edge& x, const Edge& y) { return x.a != y.a ? x.a < y.a : x.b < y.b; });

    offsets_.assign(n + 1, 0);
    for (const auto& e : edges_) {
      ++offsets_[e.a + 1];
      ++offsets_[e.b + 1];
    }
    for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
    adjacency_.resize(offsets_[n]);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const auto& e : edges_) {
      adjacency_[fill[e.a]++] = {e.b, e.weight};
      adjacency_[fill[e.b]++] = {e.a, e.weight};
    }
  }

  double time() const noexcept { return time_; }
  std::size_t size() const noexcept { return names_->size(); }
  const std::vector<std::string>& callsigns() const noexcept { return *names_; }
  const Names& shared_callsigns() const noexcept { return names_; }
  std::span<const Edge> edges() const noexcept { return edges_; }

  std::optional<VertexId> find(const std::string& callsign) const {
    const auto it = std::lower_bound(names_->begin(), names_->end(), callsign);
    if (it == names_->end() || *it != callsign) return std::nullopt;
    return static_cast<VertexId>(it - names_->begin());
  }

  VertexId index_of(const std::string& callsign) const {
    if (auto v = find(callsign)) return *v;
    throw UnknownVertex("unknown aircraft '" + callsign + "'");
  }

  std::span<const Neighbor> neighbors(VertexId v) const {
    return std::span<const Neighbor>(adjacency_).subspan(offsets_[v], offsets_[v + 1] - offsets_[v]);
  }

  std::size_t degree(VertexId v) const { return offsets_[v + 1] - offsets_[v]; }

  /// Weight of {u, v}, 0 when absent.
  double weight(VertexId u, VertexId v) const {
    const auto nb = neighbors(u);
    const auto it = std::lower_bound(nb.begin(), nb.end(), v,
                                     [](const Neighbor& n, VertexId x) { return n.vertex < x; });
    return (it != nb.end() && it->vertex == v) ? it->weight : 0.0;
  }

  double weight(const std::string& a, const std::string& b) const {
    return weight(index_of(a), index_of(b));
  }

private:
  double time_ = 0.0;
  Names names_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> adjacency_; // sorted by neighbor id within a vertex (edges_ order)
};

/// Number of positive-weight edges incident to `callsign`.
inline std::size_t degree(const GraphSnapshot& g, const std::string& callsign) {
  return g.degree(g.index_of(callsign));
}

/// Pairwise separations at one time step, reusable across weight parameters.
struct PairSeparation {
  VertexId a;
  VertexId b;
  double dh_nm;
  double dv_ft;
};

struct SeparationTable {
  double time = 0.0;
  GraphSnapshot::Names names;
  std::vector<PairSeparation> pairs; // only pairs that could ever carry weight
};

/// Separations for all aircraft in `states` (which share one time stamp).
/// Pairs at or beyond the given caps are dropped since no parameter set
/// below those caps can connect them.
inline SeparationTable measure_separations(double time, std::span<const AircraftState> states,
                                           double cap_h_nm, double cap_v_ft) {
  std::vector<const AircraftState*> sorted;
  sorted.reserve(states.size());
  for (const auto& s : states) sorted.push_back(&s);
  std::sort(sorted.begin(), sorted.end(),
            [](const auto* x, const auto* y) { return x->callsign < y->callsign; });

  auto names = std::make_shared<std::vector<std::string>>();
  names->reserve(sorted.size());
  for (const auto* s : sorted) names->push_back(s->callsign);

  SeparationTable table{time, std::move(names), {}};
  for (VertexId i = 0; i < sorted.size(); ++i) {
    for (VertexId j = i + 1; j < sorted.size(); ++j) {
      const double dv = vertical_distance(*sorted[i], *sorted[j]);
      if (dv >= cap_v_ft) continue;
      const double dh = horizontal_distance(*sorted[i], *sorted[j]);
      if (dh >= cap_h_nm) continue;
      table.pairs.push_back({i, j, dh, dv});
    }
  }
  return table;
}

inline GraphSnapshot build_snapshot(const SeparationTable& table, const WeightParams& p) {
  std::vector<Edge> edges;
  for (const auto& pair : table.pairs) {
    const double w = pair_weight(horizontal_weight(pair.dh_nm, p), vertical_weight(pair.dv_ft, p));
    if (w > 0.0) edges.push_back({pair.a, pair.b, w});
  }
  return GraphSnapshot(table.time, table.names, std::move(edges));
}

/// G(t) for a set of states sharing one time stamp. Every aircraft is a
/// vertex, including isolated ones.
inline GraphSnapshot build_snapshot(std::span<const AircraftState> states, const WeightParams& p) {
  const double time = states.empty() ? 0.0 : states.front().time;
  return build_snapshot(measure_separations(time, states, p.thresh_h_nm, p.thresh_v_ft), p);
}

} // namespace aircomplex
