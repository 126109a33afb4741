#include "support.hpp"

#include <boost/random/sobol.hpp>
#include <gtest/gtest.h>

using namespace aircomplex;

namespace {

SobolIndices indices_of(std::size_t n, double (*f)(std::span<const double>)) {
  const auto m = saltelli_unit_sample(2, n);
  std::vector<double> y(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) y[r] = f(m.row(r));
  return sobol_indices(y, 2, n);
}

double additive(std::span<const double> x) { return x[0] + 2.0 * x[1]; }
double first_only(std::span<const double> x) { return x[0]; }
double constant(std::span<const double>) { return 3.0; }

SweepConfig small_config(std::size_t n) {
  SweepConfig cfg;
  cfg.base_samples = n;
  return cfg;
}

} // namespace

TEST(SobolSequence, MatchesBoostAfterTheOrigin) {
  // Boost starts at the second point of the sequence; ours starts at 0.
  for (std::size_t dim : {1u, 2u, 4u, 7u, 16u}) {
    SobolSequence ours(dim);
    boost::random::sobol ref(dim);
    EXPECT_EQ(ours.next(), std::vector<double>(dim, 0.0));
    for (int i = 0; i < 4096; ++i) {
      const auto p = ours.next();
      for (std::size_t d = 0; d < dim; ++d) {
        const double b = static_cast<double>(ref()) / 18446744073709551616.0;
        ASSERT_EQ(p[d], b) << "dim " << dim << " point " << i << " coord " << d;
      }
    }
  }
}

TEST(SobolSequence, RejectsBadDimension) {
  EXPECT_THROW(SobolSequence(0), InvalidParams);
  EXPECT_THROW(SobolSequence(17), InvalidParams);
}

TEST(SaltelliSample, RowCountAndBounds) {
  auto cfg = small_config(8);
  const auto m = saltelli_sample(cfg);
  EXPECT_EQ(m.rows(), 48u);
  EXPECT_EQ(m.columns, 2u);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    EXPECT_GE(row[0], 15.0);
    EXPECT_LT(row[0], 75.0);
    EXPECT_GE(row[1], 40.0);
    EXPECT_LT(row[1], 100.0);
  }
  cfg.base_samples = 1024;
  EXPECT_EQ(saltelli_sample(cfg).rows(), 6144u);
}

TEST(SaltelliSample, CrossBlocksMixColumns) {
  const std::size_t k = 3;
  const auto m = saltelli_unit_sample(k, 16);
  const std::size_t stride = 2 * k + 2;
  for (std::size_t i = 0; i < 16; ++i) {
    const auto a = m.row(i * stride);
    const auto b = m.row(i * stride + stride - 1);
    for (std::size_t j = 0; j < k; ++j) {
      const auto ab = m.row(i * stride + 1 + j);
      const auto ba = m.row(i * stride + 1 + k + j);
      for (std::size_t c = 0; c < k; ++c) {
        EXPECT_EQ(ab[c], c == j ? b[c] : a[c]);
        EXPECT_EQ(ba[c], c == j ? a[c] : b[c]);
      }
    }
  }
}

TEST(SweepConfig, Validation) {
  auto cfg = small_config(1000);
  EXPECT_THROW(cfg.validate(), InvalidBounds);
  cfg = small_config(1);
  EXPECT_THROW(cfg.validate(), InvalidBounds);
  cfg = small_config(8);
  cfg.bounds[0] = {SweepParameter::thresh_h_nm, 50, 40};
  EXPECT_THROW(cfg.validate(), InvalidBounds);
  cfg = small_config(8);
  cfg.bounds[0] = {SweepParameter::thresh_h_nm, 4, 40};
  EXPECT_THROW(cfg.validate(), InvalidBounds);
  cfg = small_config(8);
  cfg.bounds[1] = {SweepParameter::complexity_pct, 40, 120};
  EXPECT_THROW(cfg.validate(), InvalidBounds);
  cfg = small_config(8);
  cfg.bounds.clear();
  EXPECT_THROW(cfg.validate(), InvalidBounds);
  EXPECT_THROW(sweep_parameter_from_string("speed"), InvalidBounds);
}

TEST(SobolIndices, AdditiveFunction) {
  const auto s = indices_of(1024, additive);
  ASSERT_FALSE(s.degenerate);
  EXPECT_NEAR(s.first[0], 0.2, 0.05);
  EXPECT_NEAR(s.first[1], 0.8, 0.05);
  EXPECT_LE(std::abs(s.second[0][1]), 0.05);
  EXPECT_LE(std::abs(s.total[0] - s.first[0]), 0.05);
  EXPECT_LE(std::abs(s.total[1] - s.first[1]), 0.05);
}

TEST(SobolIndices, SingleFactor) {
  const auto s = indices_of(1024, first_only);
  EXPECT_NEAR(s.first[0], 1.0, 0.05);
  EXPECT_NEAR(s.first[1], 0.0, 0.05);
  EXPECT_NEAR(s.total[1], 0.0, 0.05);
}

TEST(SobolIndices, InteractionShowsInSecondOrder) {
  // f = x1 * x2 on [0,1]^2: V = 7/144, V1 = V2 = 1/48, V12 = 1/144.
  const auto s = indices_of(1024, [](std::span<const double> x) { return x[0] * x[1]; });
  EXPECT_NEAR(s.first[0], 3.0 / 7.0, 0.05);
  EXPECT_NEAR(s.first[1], 3.0 / 7.0, 0.05);
  EXPECT_NEAR(s.second[0][1], 1.0 / 7.0, 0.05);
  EXPECT_NEAR(s.total[0], 4.0 / 7.0, 0.05);
}

TEST(SobolIndices, ConstantOutputIsDegenerate) {
  EXPECT_TRUE(indices_of(64, constant).degenerate);
  SobolResult res;
  res.outputs = {SweepOutput::count};
  res.indices = {indices_of(64, constant)};
  EXPECT_THROW(res.for_output(SweepOutput::count), DegenerateVariance);
}

TEST(SobolIndices, ErrorShrinksOverDoublings) {
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t n : {256u, 512u, 1024u, 2048u}) {
    const auto s = indices_of(n, additive);
    const double err = std::abs(s.first[0] - 0.2) + std::abs(s.first[1] - 0.8);
    EXPECT_LE(err, previous) << "N=" << n;
    previous = err;
  }
}

TEST(SobolIndices, RejectsMismatchedLength) {
  std::vector<double> y(10, 1.0);
  EXPECT_THROW(sobol_indices(y, 2, 8), InvalidParams);
}

TEST(EvaluateSamples, ZeroTrafficGivesZeros) {
  std::string csv = "time_s,callsign,lat_deg,lon_deg,alt_ft\n";
  for (int t = 0; t <= 100; t += 10) {
    csv += std::to_string(t) + ",A,40,-3,35000\n";
    csv += std::to_string(t) + ",B,45,3,35000\n";
  }
  const auto log = parse_log(csv);
  const auto cfg = small_config(16);
  const auto rows = saltelli_sample(cfg);
  const auto out = evaluate_samples(rows, cfg, log);
  ASSERT_EQ(out.values.size(), rows.rows());
  for (const auto& v : out.values) EXPECT_EQ(v, (std::array<double, 3>{0, 0, 0}));
  EXPECT_EQ(out.empty_fraction(), 1.0);
  const auto res = sobol_indices(out, cfg);
  for (const auto& idx : res.indices) EXPECT_TRUE(idx.degenerate);
  const auto j = sobol_json(res);
  EXPECT_TRUE(j["outputs"]["count"]["degenerate"].get<bool>());
  EXPECT_TRUE(j["outputs"]["count"]["S1"]["thresh_h"].is_null());
}

TEST(EvaluateSamples, IndependentOfBatchingAndThreads) {
  const auto log = testsupport::load_scenario("deconstruction.csv");
  auto cfg = small_config(32);
  cfg.threads = 1;
  const auto rows = saltelli_sample(cfg);
  const auto serial = evaluate_samples(rows, cfg, log);
  cfg.threads = 4;
  EXPECT_EQ(evaluate_samples(rows, cfg, log).values, serial.values);

  // Every row evaluated on its own, last row first.
  for (std::size_t r = rows.rows(); r-- > 0;) {
    SampleMatrix one{rows.columns, {rows.row(r).begin(), rows.row(r).end()}};
    ASSERT_EQ(evaluate_samples(one, cfg, log).values[0], serial.values[r]) << "row " << r;
  }
}

TEST(EvaluateSamples, MatchesTheFullPipelinePerRow) {
  const auto log = testsupport::load_scenario("pairwise_conflicts.csv");
  const auto cfg = small_config(8);
  const auto rows = saltelli_sample(cfg);
  const auto out = evaluate_samples(rows, cfg, log);
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    RunRequest req = cfg.fixed;
    req.params = apply_row(cfg, rows.row(r));
    const auto run = run_analysis(log, req);
    EXPECT_EQ(out.values[r], archive_outputs(run.archive, req.params.dt_s)) << "row " << r;
  }
}

TEST(EvaluateSamples, DuplicateRowsAgree) {
  const auto log = testsupport::load_scenario("deconstruction.csv");
  const auto cfg = small_config(8);
  SampleMatrix m{2, {33.0, 60.0, 33.0, 60.0, 50.0, 70.0, 33.0, 60.0}};
  const auto out = evaluate_samples(m, cfg, log);
  EXPECT_EQ(out.values[0], out.values[1]);
  EXPECT_EQ(out.values[0], out.values[3]);
  EXPECT_EQ(out.values[0][0], 1.0);
}

TEST(EvaluateSamples, BadRowIsReported) {
  const auto log = testsupport::load_scenario("deconstruction.csv");
  const auto cfg = small_config(8);
  SampleMatrix m{2, {33.0, 60.0, 3.0, 60.0}};
  try {
    evaluate_samples(m, cfg, log);
    FAIL() << "expected SweepRowFailed";
  } catch (const SweepRowFailed& e) {
    EXPECT_EQ(e.row(), 1u);
  }
}

TEST(ArchiveOutputs, MediansAndEmpty) {
  EXPECT_EQ(archive_outputs({}, 10.0), (std::array<double, 3>{0, 0, 0}));
  std::vector<CommunityRecord> archive(3);
  const std::vector<std::vector<std::string>> members{{"a", "b"}, {"a", "b", "c"}, {"a", "b", "c", "d", "e"}};
  for (std::size_t i = 0; i < 3; ++i) {
    archive[i].label = i + 1;
    archive[i].appearance = 0;
    archive[i].disappearance = 10.0 * static_cast<double>(i * i);
    for (const auto& m : members[i]) archive[i].membership.push_back({m, 0, std::nullopt});
  }
  EXPECT_EQ(archive_outputs(archive, 10.0), (std::array<double, 3>{3, 3, 20}));
  EXPECT_EQ(median({4, 1, 3, 2}), 2.5);
}

TEST(SamplesCsv, HeaderAndRows) {
  const auto log = testsupport::load_scenario("pairwise_conflicts.csv");
  const auto cfg = small_config(4);
  const auto rows = saltelli_sample(cfg);
  const auto out = evaluate_samples(rows, cfg, log);
  const auto csv = samples_csv(rows, out, cfg);
  EXPECT_TRUE(csv.starts_with("thresh_h,complexity,count,median_size,median_duration\n"));
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), rows.rows() + 1);
  const auto j = sobol_json(sobol_indices(out, cfg));
  EXPECT_EQ(j["n_base"], 4);
  EXPECT_EQ(j["n_total"], 24);
  EXPECT_EQ(j["parameters"], nlohmann::json::array({"thresh_h", "complexity"}));
}
