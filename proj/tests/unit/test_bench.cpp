#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "robustfit/bench.hpp"
#include "robustfit/error.hpp"
#include "robustfit/synthgen.hpp"

using namespace robustfit;
using namespace robustfit::bench;

namespace {

NamedDataset make_dataset(const std::string& id, Problem p, std::uint64_t seed) {
  synth::SynthConfig cfg;
  cfg.problem = p;
  cfg.n_inliers = 60;
  cfg.n_outliers = 40;
  cfg.noise_sigma = 1.0;
  cfg.seed = seed;
  return {id, synth::generate(cfg).data};
}

BenchConfig small_config() {
  BenchConfig cfg;
  cfg.methods = {LoMethod::none, LoMethod::dpcp};
  cfg.sigmas = {0.002, 0.004, 0.008};
  cfg.trials = 10;
  cfg.master_seed = 17;
  cfg.base.t_max = 300;
  return cfg;
}

BenchRecord record(const std::string& ds, LoMethod m, double sigma, double err, double wall) {
  BenchRecord r;
  r.dataset = ds;
  r.method = m;
  r.sigma = sigma;
  r.error_px = err;
  r.wall_ms = wall;
  return r;
}

}  // namespace

TEST(RunBench, CardinalityAndOrder) {
  const std::vector<NamedDataset> data{make_dataset("h0", Problem::homography, 1)};
  const auto rows = run_bench(data, small_config());
  ASSERT_EQ(rows.size(), 60u);
  std::set<std::tuple<int, double, std::size_t>> keys;
  for (const auto& r : rows) {
    keys.insert({static_cast<int>(r.method), r.sigma, r.trial});
    EXPECT_EQ(r.seed, derive_seed(17, r.trial));
    EXPECT_FALSE(std::isnan(r.error_px));
  }
  EXPECT_EQ(keys.size(), 60u);
  EXPECT_EQ(rows[0].method, LoMethod::none);
  EXPECT_EQ(rows[10].method, LoMethod::dpcp);
  EXPECT_EQ(rows[20].sigma, 0.004);
  EXPECT_EQ(rows[7].trial, 7u);
}

TEST(RunBench, SameDigestAcrossMethods) {
  const std::vector<NamedDataset> data{make_dataset("h0", Problem::homography, 2)};
  auto cfg = small_config();
  cfg.methods = {LoMethod::none, LoMethod::dlt, LoMethod::huber, LoMethod::dpcp};
  cfg.sigmas = {0.004};
  cfg.trials = 4;
  const auto rows = run_bench(data, cfg);
  for (std::size_t t = 0; t < 4; ++t) {
    for (std::size_t m = 1; m < 4; ++m) {
      EXPECT_EQ(rows[m * 4 + t].sample_digest, rows[t].sample_digest);
    }
  }
  EXPECT_NE(rows[0].sample_digest, rows[1].sample_digest);
}

TEST(RunBench, ParallelMatchesSequential) {
  const std::vector<NamedDataset> data{make_dataset("h0", Problem::homography, 3),
                                       make_dataset("f0", Problem::fundamental, 4)};
  auto cfg = small_config();
  cfg.trials = 3;
  const auto seq = run_bench(data, cfg);
  cfg.threads = 4;
  const auto par = run_bench(data, cfg);
  ASSERT_EQ(seq.size(), par.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    EXPECT_EQ(seq[i].dataset, par[i].dataset);
    EXPECT_EQ(seq[i].method, par[i].method);
    EXPECT_EQ(seq[i].sigma, par[i].sigma);
    EXPECT_EQ(seq[i].trial, par[i].trial);
    EXPECT_EQ(seq[i].seed, par[i].seed);
    EXPECT_EQ(seq[i].error_px, par[i].error_px);
    EXPECT_EQ(seq[i].inliers, par[i].inliers);
    EXPECT_EQ(seq[i].iterations, par[i].iterations);
    EXPECT_EQ(seq[i].lo_count, par[i].lo_count);
    EXPECT_EQ(seq[i].sample_digest, par[i].sample_digest);
  }
}

TEST(RunBench, HuberSweepGivesOneRow) {
  const std::vector<NamedDataset> data{make_dataset("h0", Problem::homography, 5)};
  auto cfg = small_config();
  cfg.methods = {LoMethod::huber};
  cfg.sigmas = {0.004};
  cfg.trials = 2;
  cfg.huber_sweep = true;
  const auto rows = run_bench(data, cfg);
  ASSERT_EQ(rows.size(), 2u);

  double expected = 0.0;
  for (double c : kHuberSweep) {
    auto single = cfg;
    single.huber_sweep = false;
    single.base.huber_c = c;
    expected += run_single(data[0], LoMethod::huber, 0.004, 0, single).error_px;
  }
  EXPECT_NEAR(rows[0].error_px, expected / 3.0, 1e-12);
}

TEST(RunBench, RejectsEmptyLists) {
  const std::vector<NamedDataset> data{make_dataset("h0", Problem::homography, 6)};
  auto cfg = small_config();
  cfg.methods.clear();
  EXPECT_THROW(run_bench(data, cfg), InvalidInput);
  cfg = small_config();
  cfg.sigmas.clear();
  EXPECT_THROW(run_bench(data, cfg), InvalidInput);
  cfg = small_config();
  cfg.sigmas = {-0.1};
  EXPECT_THROW(run_bench(data, cfg), InvalidInput);
  EXPECT_THROW(run_bench({}, small_config()), InvalidInput);
}

TEST(BenchCsv, RoundTrip) {
  const std::vector<NamedDataset> data{make_dataset("h0", Problem::homography, 7)};
  auto cfg = small_config();
  cfg.trials = 2;
  auto rows = run_bench(data, cfg);
  rows[1].error_px = std::nan("");
  std::ostringstream first;
  write_csv(first, rows);
  EXPECT_EQ(first.str().substr(0, first.str().find('\n')), kCsvHeader);
  std::istringstream in(first.str());
  const auto parsed = parse_csv(in);
  ASSERT_EQ(parsed.size(), rows.size());
  EXPECT_TRUE(std::isnan(parsed[1].error_px));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(parsed[i].seed, rows[i].seed);
    EXPECT_EQ(parsed[i].sigma, rows[i].sigma);
    EXPECT_EQ(parsed[i].inliers, rows[i].inliers);
  }
  std::ostringstream second;
  write_csv(second, parsed);
  EXPECT_EQ(first.str(), second.str());
}

TEST(BenchCsv, Rejects) {
  std::istringstream bad_header("dataset,method\n");
  EXPECT_THROW(parse_csv(bad_header), ParseError);
  std::istringstream short_row(std::string(kCsvHeader) + "\nh,dpcp,0.1,0,1,0.5,3,4\n");
  try {
    parse_csv(short_row);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  std::istringstream bad_method(std::string(kCsvHeader) + "\nh,ransac,0.1,0,1,0.5,3,4,1,2\n");
  EXPECT_THROW(parse_csv(bad_method), ParseError);
  std::ostringstream out;
  EXPECT_THROW(write_csv(out, {record("a,b", LoMethod::dlt, 1, 1, 1)}), InvalidInput);
}

TEST(Quantile, Type7) {
  const std::vector<double> v{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(quantile_sorted(v, 0.75), 3.25);
  EXPECT_DOUBLE_EQ(quantile_sorted({5.0}, 0.25), 5.0);
}

TEST(Summarize, MatchesIndependentRecomputation) {
  Rng rng(8);
  std::vector<BenchRecord> rows;
  for (const char* ds : {"a", "b", "c"}) {
    for (LoMethod m : {LoMethod::dlt, LoMethod::dpcp}) {
      for (double s : {0.5, 1.0}) {
        const int n = ds[0] == 'a' ? 3 : 7;
        for (int t = 0; t < n; ++t) {
          rows.push_back(record(ds, m, s, rng.uniform(0, 5), rng.uniform(1, 2)));
        }
      }
    }
  }
  rows[0].error_px = std::nan("");
  const auto summary = summarize(rows);
  ASSERT_EQ(summary.size(), 4u);
  for (const SummaryRow& s : summary) {
    std::map<std::string, std::pair<double, int>> per;
    std::vector<double> errs;
    double wall = 0.0;
    std::size_t runs = 0;
    std::size_t fails = 0;
    for (const auto& r : rows) {
      if (r.method != s.method || r.sigma != s.sigma) continue;
      ++runs;
      wall += r.wall_ms;
      if (std::isnan(r.error_px)) {
        ++fails;
        continue;
      }
      per[r.dataset].first += r.error_px;
      per[r.dataset].second += 1;
      errs.push_back(r.error_px);
    }
    double mean = 0.0;
    for (const auto& [k, v] : per) mean += v.first / v.second;
    mean /= static_cast<double>(per.size());
    std::sort(errs.begin(), errs.end());
    const double n = static_cast<double>(errs.size());
    const auto q = [&](double p) {
      const double h = (n - 1) * p;
      const auto i = static_cast<std::size_t>(h);
      return i + 1 < errs.size() ? errs[i] + (h - i) * (errs[i + 1] - errs[i]) : errs[i];
    };
    EXPECT_EQ(s.runs, runs);
    EXPECT_EQ(s.failures, fails);
    EXPECT_NEAR(s.mean, mean, 1e-12);
    EXPECT_NEAR(s.median, q(0.5), 1e-12);
    EXPECT_NEAR(s.iqr, q(0.75) - q(0.25), 1e-12);
    EXPECT_NEAR(s.mean_wall_ms, wall / runs, 1e-12);
  }
  EXPECT_EQ(summary[0].failures, 1u);
}

TEST(Select, WithinOnePercentFastest) {
  std::vector<SummaryRow> summary(4);
  const double means[] = {1.000, 1.005, 1.02, 1.009};
  const double walls[] = {5.0, 3.0, 1.0, 3.0};
  const double sigmas[] = {1, 2, 4, 8};
  for (int i = 0; i < 4; ++i) {
    summary[i].method = LoMethod::dpcp;
    summary[i].sigma = sigmas[i];
    summary[i].mean = means[i];
    summary[i].mean_wall_ms = walls[i];
  }
  const auto sel = select_thresholds(summary);
  ASSERT_EQ(sel.size(), 1u);
  EXPECT_EQ(sel[0].sigma, 2.0);
  EXPECT_EQ(sel[0].error, 1.005);
}

TEST(ValidationError, MeanOverLabeledInliers) {
  Dataset d;
  d.problem = Problem::homography;
  d.correspondences = {{{0, 0}, {1, 0}, Label::inlier},
                       {{0, 0}, {0, 3}, Label::inlier},
                       {{0, 0}, {100, 0}, Label::outlier}};
  const ModelMatrix id(Mat3::Identity(), ModelKind::homography);
  EXPECT_DOUBLE_EQ(validation_error(id, d), 2.0);
  d.correspondences.pop_back();
  d.correspondences[0].label = Label::outlier;
  d.correspondences[1].label = Label::outlier;
  EXPECT_TRUE(std::isnan(validation_error(id, d)));
}
