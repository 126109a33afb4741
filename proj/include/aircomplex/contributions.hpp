#pragma once

// Relative contribution of each aircraft to sector complexity.

#include <aircomplex/indicators.hpp>

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aircomplex {

enum class Indicator : std::size_t { strength = 0, cc = 1, nnd = 2 };

inline constexpr std::array<Indicator, 3> kContributingIndicators{
    Indicator::strength, Indicator::cc, Indicator::nnd};

constexpr std::string_view to_string(Indicator ind) {
  switch (ind) {
  case Indicator::strength: return "strength";
  case Indicator::cc: return "cc";
  case Indicator::nnd: return "nnd";
  }
  return "?";
}

/// Optional weighting of the per-indicator contributions.
struct IndicatorWeights {
  double strength = 1.0;
  double cc = 1.0;
  double nnd = 1.0;

  double operator[](Indicator ind) const {
    switch (ind) {
    case Indicator::strength: return strength;
    case Indicator::cc: return cc;
    case Indicator::nnd: return nnd;
    }
    return 0.0;
  }

  void validate() const {
    for (auto ind : kContributingIndicators) {
      if (!((*this)[ind] >= 0.0)) throw InvalidWeights("indicator weights must be non-negative");
    }
    if (strength + cc + nnd <= 0.0) throw InvalidWeights("indicator weights must not all be zero");
  }

  friend bool operator==(const IndicatorWeights&, const IndicatorWeights&) = default;
};

// An indicator counts as a source of complexity when its sector total
// exceeds this.
inline constexpr double kActiveIndicatorEps = 1e-12;

inline std::span<const double> indicator_values(const IndicatorFrame& f, Indicator ind) {
  switch (ind) {
  case Indicator::strength: return f.strength;
  case Indicator::cc: return f.cc;
  case Indicator::nnd: return f.nnd;
  }
  return {};
}

inline double indicator_total(const IndicatorFrame& f, Indicator ind) {
  switch (ind) {
  case Indicator::strength: return f.strength_total;
  case Indicator::cc: return f.cc_total;
  case Indicator::nnd: return f.nnd_total;
  }
  return 0.0;
}

/// Fractions I(i)/I_total aligned with the frame's callsigns; empty when
/// the indicator is inactive.
inline std::vector<double> indicator_contribution(const IndicatorFrame& f, Indicator ind) {
  const double total = indicator_total(f, ind);
  if (!(total > kActiveIndicatorEps)) return {};
  const auto values = indicator_values(f, ind);
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] / total;
  return out;
}

struct ContributionFrame {
  double time = 0.0;
  GraphSnapshot::Names names;
  std::array<std::vector<double>, 3> per_indicator; // fractions; empty when inactive
  std::array<bool, 3> active{};
  std::vector<double> combined; // percentages
  std::optional<IndicatorWeights> weights;

  const std::vector<std::string>& callsigns() const { return *names; }
  bool is_active(Indicator ind) const { return active[static_cast<std::size_t>(ind)]; }
  std::span<const double> fractions(Indicator ind) const {
    return per_indicator[static_cast<std::size_t>(ind)];
  }
  /// False when no indicator is a source of complexity ("no complexity").
  bool has_activity() const { return active[0] || active[1] || active[2]; }

  double combined_of(const std::string& callsign) const {
    const auto& n = *names;
    const auto it = std::lower_bound(n.begin(), n.end(), callsign);
    if (it == n.end() || *it != callsign) throw UnknownVertex("unknown aircraft '" + callsign + "'");
    return combined[static_cast<std::size_t>(it - n.begin())];
  }
};

/// Combined percentage contribution per aircraft: mean (or weighted mean)
/// of the per-indicator fractions over the active indicators, times 100.
inline ContributionFrame combined_contribution(const IndicatorFrame& f,
                                               std::optional<IndicatorWeights> weights = std::nullopt) {
  if (weights) weights->validate();
  ContributionFrame cf;
  cf.time = f.time;
  cf.names = f.names;
  cf.weights = weights;
  const auto n = f.size();
  cf.combined.assign(n, 0.0);

  double weight_sum = 0.0;
  std::size_t active_count = 0;
  std::optional<double> first_weight;
  bool uniform = true;
  for (auto ind : kContributingIndicators) {
    const auto k = static_cast<std::size_t>(ind);
    cf.per_indicator[k] = indicator_contribution(f, ind);
    cf.active[k] = !cf.per_indicator[k].empty();
    if (cf.active[k]) {
      ++active_count;
      const double w = weights ? (*weights)[ind] : 1.0;
      weight_sum += w;
      if (first_weight && *first_weight != w) uniform = false;
      first_weight = w;
    }
  }
  if (active_count == 0) return cf;

  // Equal weights on the active set reduce to the plain mean; weights that
  // vanish on every active indicator fall back to it as well.
  const bool use_weights = weights && weight_sum > 0.0 && !uniform;
  if (!use_weights) weight_sum = static_cast<double>(active_count);
  for (auto ind : kContributingIndicators) {
    const auto k = static_cast<std::size_t>(ind);
    if (!cf.active[k]) continue;
    const double w = (use_weights ? (*weights)[ind] : 1.0) / weight_sum;
    for (std::size_t i = 0; i < n; ++i) cf.combined[i] += w * cf.per_indicator[k][i];
  }
  for (auto& c : cf.combined) c *= 100.0;
  return cf;
}

/// Sum of combined contributions over a set of vertex ids.
inline double community_contribution(const ContributionFrame& cf, std::span<const VertexId> members) {
  double sum = 0.0;
  for (auto v : members) sum += cf.combined[v];
  return sum;
}

/// Sum of combined contributions over a set of callsigns. Throws
/// UnknownVertex for a callsign absent from the frame.
inline double community_contribution(const ContributionFrame& cf, std::span<const std::string> members) {
  double sum = 0.0;
  for (const auto& m : members) sum += cf.combined_of(m);
  return sum;
}

} // namespace aircomplex
