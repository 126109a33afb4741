#pragma once

// Variance-based (Sobol') sensitivity of the community outputs with respect
// to the run parameters, using Saltelli's cross-sampling scheme.

#include <aircomplex/error.hpp>
#include <aircomplex/pipeline.hpp>
#include <aircomplex/sobol_sequence.hpp>

#include <json.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace aircomplex {

enum class SweepParameter { thresh_h_nm, complexity_pct, thresh_v_ft };

constexpr std::string_view to_string(SweepParameter p) {
  switch (p) {
  case SweepParameter::thresh_h_nm: return "thresh_h";
  case SweepParameter::complexity_pct: return "complexity";
  case SweepParameter::thresh_v_ft: return "thresh_v";
  }
  return "?";
}

inline SweepParameter sweep_parameter_from_string(std::string_view name) {
  if (name == "thresh_h" || name == "max_h") return SweepParameter::thresh_h_nm;
  if (name == "complexity") return SweepParameter::complexity_pct;
  if (name == "thresh_v" || name == "max_v") return SweepParameter::thresh_v_ft;
  throw InvalidBounds("unknown sweep parameter '" + std::string(name) + "'");
}

struct ParameterBounds {
  SweepParameter parameter;
  double lo;
  double hi;
};

enum class SweepOutput : std::size_t { count = 0, median_size = 1, median_duration = 2 };

inline constexpr std::array<SweepOutput, 3> kSweepOutputs{SweepOutput::count, SweepOutput::median_size,
                                                          SweepOutput::median_duration};

constexpr std::string_view to_string(SweepOutput o) {
  switch (o) {
  case SweepOutput::count: return "count";
  case SweepOutput::median_size: return "median_size";
  case SweepOutput::median_duration: return "median_duration";
  }
  return "?";
}

struct SweepConfig {
  RunRequest fixed; // everything not swept
  std::vector<ParameterBounds> bounds{{SweepParameter::thresh_h_nm, 15.0, 75.0},
                                      {SweepParameter::complexity_pct, 40.0, 100.0}};
  std::size_t base_samples = 1024;
  std::vector<SweepOutput> outputs{kSweepOutputs.begin(), kSweepOutputs.end()};
  unsigned threads = 0; // 0 = hardware concurrency

  std::size_t dimension() const { return bounds.size(); }

  /// Throws InvalidBounds.
  void validate() const {
    if (bounds.empty()) throw InvalidBounds("no parameters to sweep");
    if (2 * bounds.size() > SobolSequence::kMaxDimension) throw InvalidBounds("too many swept parameters");
    if (base_samples < 2 || !std::has_single_bit(base_samples))
      throw InvalidBounds("base sample count must be a power of two >= 2");
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      const auto& b = bounds[i];
      for (std::size_t j = 0; j < i; ++j)
        if (bounds[j].parameter == b.parameter) throw InvalidBounds("parameter swept twice");
      if (!(b.lo < b.hi)) throw InvalidBounds(std::string(to_string(b.parameter)) + ": lo must be < hi");
      const auto& w = fixed.params.weights;
      switch (b.parameter) {
      case SweepParameter::thresh_h_nm:
        if (!(b.lo > w.min_h_nm)) throw InvalidBounds("thresh_h lower bound must exceed min_h");
        break;
      case SweepParameter::thresh_v_ft:
        if (!(b.lo > w.min_v_ft)) throw InvalidBounds("thresh_v lower bound must exceed min_v");
        break;
      case SweepParameter::complexity_pct:
        if (!(b.lo > 0.0 && b.hi <= 100.0)) throw InvalidBounds("complexity bounds must lie in (0, 100]");
        break;
      }
    }
  }
};

/// Row-major matrix of parameter vectors.
struct SampleMatrix {
  std::size_t columns = 0;
  std::vector<double> values;

  std::size_t rows() const { return columns ? values.size() / columns : 0; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values).subspan(r * columns, columns);
  }
};

/// Saltelli cross-sampling over [0,1)^k from a 2k-dimensional Sobol'
/// sequence: per base point, the rows are A, A_B^(1..k), B_A^(1..k), B,
/// giving N(2k+2) rows.
inline SampleMatrix saltelli_unit_sample(std::size_t k, std::size_t n_base) {
  SobolSequence seq(2 * k);
  SampleMatrix m;
  m.columns = k;
  m.values.reserve(n_base * (2 * k + 2) * k);
  std::vector<double> base(2 * k);
  for (std::size_t i = 0; i < n_base; ++i) {
    seq.next(base.data());
    const auto a = std::span<const double>(base).first(k);
    const auto b = std::span<const double>(base).subspan(k, k);
    m.values.insert(m.values.end(), a.begin(), a.end());
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t c = 0; c < k; ++c) m.values.push_back(c == j ? b[c] : a[c]);
    }
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t c = 0; c < k; ++c) m.values.push_back(c == j ? a[c] : b[c]);
    }
    m.values.insert(m.values.end(), b.begin(), b.end());
  }
  return m;
}

inline SampleMatrix saltelli_sample(const SweepConfig& cfg) {
  cfg.validate();
  auto m = saltelli_unit_sample(cfg.dimension(), cfg.base_samples);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.columns; ++c) {
      auto& x = m.values[r * m.columns + c];
      x = cfg.bounds[c].lo + x * (cfg.bounds[c].hi - cfg.bounds[c].lo);
    }
  }
  return m;
}

inline RunParams apply_row(const SweepConfig& cfg, std::span<const double> row) {
  RunParams p = cfg.fixed.params;
  for (std::size_t c = 0; c < cfg.bounds.size(); ++c) {
    switch (cfg.bounds[c].parameter) {
    case SweepParameter::thresh_h_nm: p.weights.thresh_h_nm = row[c]; break;
    case SweepParameter::thresh_v_ft: p.weights.thresh_v_ft = row[c]; break;
    case SweepParameter::complexity_pct: p.complexity_thresh_pct = row[c]; break;
    }
  }
  return p;
}

struct SweepOutputs {
  std::vector<std::array<double, 3>> values; // per row: count, median size, median duration
  std::size_t empty_rows = 0;                 // rows whose archive was empty

  double empty_fraction() const {
    return values.empty() ? 0.0 : static_cast<double>(empty_rows) / static_cast<double>(values.size());
  }
};

inline double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const auto n = xs.size();
  return n % 2 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
}

/// Count, median size and median duration of the archive; medians of an
/// empty archive are 0.
inline std::array<double, 3> archive_outputs(std::span<const CommunityRecord> archive, double dt) {
  std::vector<double> sizes;
  std::vector<double> durations;
  for (const auto& rec : archive) {
    sizes.push_back(static_cast<double>(rec.all_members().size()));
    durations.push_back(record_duration(rec, dt));
  }
  return {static_cast<double>(archive.size()), median(std::move(sizes)), median(std::move(durations))};
}

/// Runs the full pipeline for every row. Rows sharing the same weight
/// parameters reuse one set of analyzed frames; results do not depend on
/// evaluation order or thread count.
inline SweepOutputs evaluate_samples(const SampleMatrix& rows, const SweepConfig& cfg, const TrajectoryLog& log) {
  SweepOutputs out;
  out.values.assign(rows.rows(), {0.0, 0.0, 0.0});
  if (rows.rows() == 0) return out;

  std::vector<RunParams> params(rows.rows());
  double cap_h = cfg.fixed.params.weights.thresh_h_nm;
  double cap_v = cfg.fixed.params.weights.thresh_v_ft;
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    params[r] = apply_row(cfg, rows.row(r));
    cap_h = std::max(cap_h, params[r].weights.thresh_h_nm);
    cap_v = std::max(cap_v, params[r].weights.thresh_v_ft);
  }
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    RunRequest req = cfg.fixed;
    req.params = params[r];
    try {
      req.validate(&log);
    } catch (const Error& e) {
      throw SweepRowFailed(r, e.what());
    }
  }

  const auto prepared = prepare_scenario(log, cfg.fixed.params.dt_s, cfg.fixed.exclude, cap_h, cap_v);

  // Group rows by weight parameters.
  std::map<std::pair<double, double>, std::vector<std::size_t>> groups;
  for (std::size_t r = 0; r < rows.rows(); ++r)
    groups[{params[r].weights.thresh_h_nm, params[r].weights.thresh_v_ft}].push_back(r);
  std::vector<const std::vector<std::size_t>*> work;
  work.reserve(groups.size());
  for (const auto& [key, members] : groups) work.push_back(&members);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    while (true) {
      const auto g = next.fetch_add(1);
      if (g >= work.size()) return;
      const auto& members = *work[g];
      try {
        const auto frames =
            analyze_frames(prepared, params[members.front()].weights, cfg.fixed.indicator_weights);
        for (auto r : members) {
          try {
            const auto archive = track(frames, params[r].complexity_thresh_pct);
            out.values[r] = archive_outputs(archive, cfg.fixed.params.dt_s);
          } catch (const std::exception& e) {
            throw SweepRowFailed(r, e.what());
          }
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(work.size());
        return;
      }
    }
  };

  unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, work.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (const auto& v : out.values)
    if (v[0] == 0.0) ++out.empty_rows;
  return out;
}

struct SobolIndices {
  bool degenerate = false; // output variance ~ 0; indices not defined
  std::vector<double> first;                // S1 per parameter
  std::vector<double> total;                // ST per parameter
  std::vector<std::vector<double>> second;  // S2[i][j] for i < j, NaN elsewhere
};

/// Sobol' indices from outputs laid out as by saltelli_unit_sample.
/// S1: Saltelli (2010); ST: Jansen; S2 from the B_A / A_B cross blocks.
inline SobolIndices sobol_indices(std::span<const double> y, std::size_t k, std::size_t n_base) {
  const std::size_t stride = 2 * k + 2;
  if (y.size() != n_base * stride) throw InvalidParams("output length does not match the sample layout");
  SobolIndices res;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  res.first.assign(k, nan);
  res.total.assign(k, nan);
  res.second.assign(k, std::vector<double>(k, nan));

  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  const auto at = [&](std::size_t i, std::size_t offset) { return y[i * stride + offset] - mean; };
  const auto A = [&](std::size_t i) { return at(i, 0); };
  const auto B = [&](std::size_t i) { return at(i, stride - 1); };
  const auto AB = [&](std::size_t i, std::size_t j) { return at(i, 1 + j); };
  const auto BA = [&](std::size_t i, std::size_t j) { return at(i, 1 + k + j); };

  double m_ab = 0.0;
  for (std::size_t i = 0; i < n_base; ++i) m_ab += A(i) + B(i);
  m_ab /= static_cast<double>(2 * n_base);
  double var = 0.0;
  for (std::size_t i = 0; i < n_base; ++i) {
    var += (A(i) - m_ab) * (A(i) - m_ab) + (B(i) - m_ab) * (B(i) - m_ab);
  }
  var /= static_cast<double>(2 * n_base);
  if (!(var > 1e-12 * std::max(1.0, mean * mean))) {
    res.degenerate = true;
    return res;
  }

  const auto n = static_cast<double>(n_base);
  for (std::size_t j = 0; j < k; ++j) {
    double s1 = 0.0;
    double st = 0.0;
    for (std::size_t i = 0; i < n_base; ++i) {
      s1 += B(i) * (AB(i, j) - A(i));
      st += (A(i) - AB(i, j)) * (A(i) - AB(i, j));
    }
    res.first[j] = s1 / n / var;
    res.total[j] = 0.5 * st / n / var;
  }
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t l = j + 1; l < k; ++l) {
      double v = 0.0;
      for (std::size_t i = 0; i < n_base; ++i) v += BA(i, j) * AB(i, l) - A(i) * B(i);
      res.second[j][l] = v / n / var - res.first[j] - res.first[l];
    }
  }
  return res;
}

struct SobolResult {
  std::vector<SweepParameter> parameters;
  std::vector<SweepOutput> outputs;
  std::vector<SobolIndices> indices; // aligned with outputs
  std::size_t n_base = 0;
  std::size_t n_total = 0;
  double empty_fraction = 0.0;

  /// Throws DegenerateVariance when the requested output had ~zero variance.
  const SobolIndices& for_output(SweepOutput o) const {
    for (std::size_t i = 0; i < outputs.size(); ++i) {
      if (outputs[i] != o) continue;
      if (indices[i].degenerate)
        throw DegenerateVariance(std::string(to_string(o)) + " has near-zero variance over the sweep");
      return indices[i];
    }
    throw InvalidParams(std::string(to_string(o)) + " was not requested");
  }
};

inline SobolResult sobol_indices(const SweepOutputs& outputs, const SweepConfig& cfg) {
  SobolResult res;
  for (const auto& b : cfg.bounds) res.parameters.push_back(b.parameter);
  res.outputs = cfg.outputs;
  res.n_base = cfg.base_samples;
  res.n_total = outputs.values.size();
  res.empty_fraction = outputs.empty_fraction();
  std::vector<double> y(outputs.values.size());
  for (auto o : cfg.outputs) {
    for (std::size_t r = 0; r < y.size(); ++r) y[r] = outputs.values[r][static_cast<std::size_t>(o)];
    res.indices.push_back(sobol_indices(y, cfg.dimension(), cfg.base_samples));
  }
  return res;
}

inline nlohmann::ordered_json sobol_json(const SobolResult& res) {
  using nlohmann::ordered_json;
  const auto finite_or_null = [](double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); };
  ordered_json outputs = ordered_json::object();
  for (std::size_t o = 0; o < res.outputs.size(); ++o) {
    const auto& idx = res.indices[o];
    ordered_json s1 = ordered_json::object();
    ordered_json st = ordered_json::object();
    ordered_json s2 = ordered_json::object();
    for (std::size_t j = 0; j < res.parameters.size(); ++j) {
      const std::string name(to_string(res.parameters[j]));
      s1[name] = finite_or_null(idx.first[j]);
      st[name] = finite_or_null(idx.total[j]);
      for (std::size_t l = j + 1; l < res.parameters.size(); ++l)
        s2[name + "," + std::string(to_string(res.parameters[l]))] = finite_or_null(idx.second[j][l]);
    }
    outputs[std::string(to_string(res.outputs[o]))] = {
        {"S1", std::move(s1)}, {"S2", std::move(s2)}, {"ST", std::move(st)}, {"degenerate", idx.degenerate}};
  }
  ordered_json params = ordered_json::array();
  for (auto p : res.parameters) params.push_back(to_string(p));
  return {{"parameters", std::move(params)},
          {"outputs", std::move(outputs)},
          {"n_base", res.n_base},
          {"n_total", res.n_total},
          {"empty_fraction", res.empty_fraction}};
}

/// Per-row CSV for scatter plots: swept parameters then the three outputs.
inline std::string samples_csv(const SampleMatrix& rows, const SweepOutputs& outputs, const SweepConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  for (const auto& b : cfg.bounds) os << to_string(b.parameter) << ',';
  os << "count,median_size,median_duration\n";
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    for (double x : rows.row(r)) os << x << ',';
    const auto& v = outputs.values[r];
    os << v[0] << ',' << v[1] << ',' << v[2] << '\n';
  }
  return os.str();
}

} // namespace aircomplex
