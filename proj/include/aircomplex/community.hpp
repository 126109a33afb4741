#pragma once

// Complex community detection (connected components above a contribution
// threshold) and label tracking across time steps by Jaccard similarity.

#include <aircomplex/contributions.hpp>
#include <aircomplex/graph.hpp>
#include <aircomplex/union_find.hpp>

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace aircomplex {

/// Sorted, duplicate-free set of callsigns.
using MemberSet = std::vector<std::string>;

/// All connected components as vertex-id sets, singletons included. Each
/// component is sorted; components are ordered by their smallest vertex.
inline std::vector<std::vector<VertexId>> component_partition(const GraphSnapshot& g) {
  const auto n = g.size();
  UnionFind uf(n);
  for (const auto& e : g.edges()) uf.unite(e.a, e.b);
  std::vector<std::int64_t> slot(n, -1);
  std::vector<std::vector<VertexId>> out;
  for (VertexId v = 0; v < n; ++v) {
    const auto root = uf.find(v);
    if (slot[root] < 0) {
      slot[root] = static_cast<std::int64_t>(out.size());
      out.emplace_back();
    }
    out[static_cast<std::size_t>(slot[root])].push_back(v);
  }
  return out;
}

/// Connected components with at least two aircraft.
inline std::vector<MemberSet> connected_components(const GraphSnapshot& g) {
  std::vector<MemberSet> out;
  for (const auto& comp : component_partition(g)) {
    if (comp.size() < 2) continue;
    MemberSet m;
    m.reserve(comp.size());
    for (auto v : comp) m.push_back(g.callsigns()[v]);
    out.push_back(std::move(m));
  }
  return out;
}

// Absorbs summation rounding so a component holding all of the complexity
// passes a 100 % threshold.
inline constexpr double kComplexityEps = 1e-9;

inline bool is_complex(double contribution_pct, double thresh_pct) {
  return contribution_pct >= thresh_pct - kComplexityEps;
}

inline bool is_complex(std::span<const std::string> members, const ContributionFrame& cf, double thresh_pct) {
  return is_complex(community_contribution(cf, members), thresh_pct);
}

/// |a ∩ b| / |a ∪ b| for sorted sets; 0 when both are empty.
template <typename T>
double jaccard(std::span<const T> a, std::span<const T> b) {
  std::size_t common = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  const auto uni = a.size() + b.size() - common;
  return uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
}

inline double jaccard(const MemberSet& a, const MemberSet& b) {
  return jaccard<std::string>(a, b);
}

struct ComplexSet {
  MemberSet members;
  double contribution_pct = 0.0;
};

/// Components of `g` that pass the complexity threshold.
inline std::vector<ComplexSet> complex_communities(const GraphSnapshot& g, const ContributionFrame& cf,
                                                   double thresh_pct) {
  std::vector<ComplexSet> out;
  if (!cf.has_activity()) return out;
  for (const auto& comp : component_partition(g)) {
    if (comp.size() < 2) continue;
    const double pct = community_contribution(cf, comp);
    if (!is_complex(pct, thresh_pct)) continue;
    ComplexSet s;
    s.contribution_pct = pct;
    for (auto v : comp) s.members.push_back(g.callsigns()[v]);
    out.push_back(std::move(s));
  }
  return out;
}

struct MembershipEvent {
  std::string callsign;
  double joined_at = 0.0;
  /// First step at which the aircraft was no longer a member. Empty when it
  /// stayed until the record's disappearance.
  std::optional<double> left_at;

  friend bool operator==(const MembershipEvent&, const MembershipEvent&) = default;
};

struct CommunityRecord {
  std::uint64_t label = 0;
  double appearance = 0.0;
  std::optional<double> disappearance; // last step at which the label was present
  std::vector<MembershipEvent> membership;
  std::vector<std::pair<double, double>> contribution_series; // (time, pct)

  std::string name() const { return "Community " + std::to_string(label); }
  bool closed() const { return disappearance.has_value(); }

  MemberSet members_at(double t) const {
    MemberSet out;
    for (const auto& e : membership) {
      if (e.joined_at > t) continue;
      const bool present = e.left_at ? t < *e.left_at : (!disappearance || t <= *disappearance);
      if (present) out.push_back(e.callsign);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  /// Every aircraft that was ever a member.
  MemberSet all_members() const {
    MemberSet out;
    for (const auto& e : membership) out.push_back(e.callsign);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  friend bool operator==(const CommunityRecord&, const CommunityRecord&) = default;
};

struct TrackerState {
  struct Live {
    std::uint64_t label;
    MemberSet members;
  };

  std::vector<Live> live;               // complex communities of the previous step
  std::vector<CommunityRecord> records; // every label so far; records[label - 1]
  double threshold_pct = 60.0;
  std::uint64_t next_label = 1;
  std::optional<double> last_time;

  explicit TrackerState(double threshold = 60.0) : threshold_pct(threshold) {}

  const CommunityRecord& record(std::uint64_t label) const { return records.at(label - 1); }

  /// Records whose lifetime is closed.
  std::vector<CommunityRecord> archive() const {
    std::vector<CommunityRecord> out;
    for (const auto& r : records)
      if (r.closed()) out.push_back(r);
    return out;
  }
};

namespace detail {

inline void apply_membership_diff(CommunityRecord& rec, const MemberSet& before, const MemberSet& after,
                                  double t) {
  MemberSet joined;
  MemberSet left;
  std::set_difference(after.begin(), after.end(), before.begin(), before.end(), std::back_inserter(joined));
  std::set_difference(before.begin(), before.end(), after.begin(), after.end(), std::back_inserter(left));
  for (const auto& cs : left) {
    for (auto it = rec.membership.rbegin(); it != rec.membership.rend(); ++it) {
      if (it->callsign == cs && !it->left_at) {
        it->left_at = t;
        break;
      }
    }
  }
  for (auto& cs : joined) rec.membership.push_back({std::move(cs), t, std::nullopt});
}

} // namespace detail

/// Advances the tracker to time `t` given this step's complex communities.
///
/// Each set inherits the label of the previous-step complex community with
/// the highest non-zero Jaccard similarity (ties go to the older label).
/// Sets are served in descending order of that best similarity; a set whose
/// best label was already taken gets a fresh label. Previous labels left
/// unmatched are closed at the previous step.
inline TrackerState step(TrackerState state, double t, std::vector<ComplexSet> complex_sets) {
  std::sort(complex_sets.begin(), complex_sets.end(),
            [](const ComplexSet& a, const ComplexSet& b) { return a.members < b.members; });

  struct Candidate {
    std::size_t set;
    std::optional<std::size_t> live; // index into state.live
    double similarity = 0.0;
  };
  std::vector<Candidate> order;
  order.reserve(complex_sets.size());
  for (std::size_t s = 0; s < complex_sets.size(); ++s) {
    Candidate c{s, std::nullopt, 0.0};
    for (std::size_t l = 0; l < state.live.size(); ++l) {
      const double j = jaccard(complex_sets[s].members, state.live[l].members);
      if (j <= 0.0) continue;
      bool better = !c.live || j > c.similarity;
      if (c.live && j == c.similarity) {
        const auto& cur = state.record(state.live[*c.live].label);
        const auto& cand = state.record(state.live[l].label);
        better = cand.appearance != cur.appearance ? cand.appearance < cur.appearance
                                                   : cand.label < cur.label;
      }
      if (better) {
        c.live = l;
        c.similarity = j;
      }
    }
    order.push_back(c);
  }
  std::stable_sort(order.begin(), order.end(),
                   [](const Candidate& a, const Candidate& b) { return a.similarity > b.similarity; });

  std::vector<bool> taken(state.live.size(), false);
  std::vector<TrackerState::Live> next_live;
  next_live.reserve(complex_sets.size());
  for (const auto& c : order) {
    auto& set = complex_sets[c.set];
    if (c.live && !taken[*c.live]) {
      taken[*c.live] = true;
      const auto& prev = state.live[*c.live];
      auto& rec = state.records[prev.label - 1];
      detail::apply_membership_diff(rec, prev.members, set.members, t);
      rec.contribution_series.emplace_back(t, set.contribution_pct);
      next_live.push_back({prev.label, std::move(set.members)});
    } else {
      CommunityRecord rec;
      rec.label = state.next_label++;
      rec.appearance = t;
      for (const auto& cs : set.members) rec.membership.push_back({cs, t, std::nullopt});
      rec.contribution_series.emplace_back(t, set.contribution_pct);
      state.records.push_back(std::move(rec));
      next_live.push_back({state.records.back().label, std::move(set.members)});
    }
  }
  for (std::size_t l = 0; l < state.live.size(); ++l) {
    if (!taken[l]) state.records[state.live[l].label - 1].disappearance = state.last_time;
  }
  std::sort(next_live.begin(), next_live.end(),
            [](const auto& a, const auto& b) { return a.label < b.label; });
  state.live = std::move(next_live);
  state.last_time = t;
  return state;
}

/// Closes every live label at the last processed step and returns all
/// records ordered by label.
inline std::vector<CommunityRecord> finish(TrackerState state) {
  for (const auto& l : state.live) state.records[l.label - 1].disappearance = state.last_time;
  state.live.clear();
  return std::move(state.records);
}

/// Runs detection and tracking over time-ordered frames.
inline std::vector<CommunityRecord> run_tracker(std::span<const GraphSnapshot> graphs,
                                                std::span<const ContributionFrame> contributions,
                                                double thresh_pct) {
  TrackerState state(thresh_pct);
  const auto n = std::min(graphs.size(), contributions.size());
  for (std::size_t i = 0; i < n; ++i) {
    state = step(std::move(state), graphs[i].time(),
                 complex_communities(graphs[i], contributions[i], thresh_pct));
  }
  return finish(std::move(state));
}

} // namespace aircomplex
