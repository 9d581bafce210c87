// One PASS/FAIL line per criterion. Exit status is nonzero if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "robustfit/bench.hpp"
#include "robustfit/correspondence_io.hpp"
#include "robustfit/error.hpp"
#include "robustfit/numerics.hpp"
#include "robustfit/ransac.hpp"
#include "robustfit/robust_subspace.hpp"
#include "robustfit/solvers.hpp"
#include "robustfit/synthgen.hpp"
#include "test_support.hpp"

using namespace robustfit;
using testsupport::line_angle;
using testsupport::random_matrix;
using testsupport::random_unit;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

// Pinned tolerances and budgets.
constexpr double kSevenPointAngle = 1e-6;
constexpr double kSevenPointDet = 1e-9;
constexpr double kFourPointAngle = 1e-7;
constexpr double kDpcpAngle = 0.1 * kDeg;
constexpr int kDpcpMinSuccesses = 99;
constexpr double kMonotoneSlack = 1e-12;
constexpr double kPlanarGap = 1e-6;
constexpr double kPlanarAngle = 1.0 * kDeg;
constexpr int kPlanarSeeds = 100;
constexpr int kPlanarMinSuccesses = 99;
constexpr double kOrderingMargin = 0.20;
constexpr double kSummaryTol = 1e-12;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

bool run(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool in_time = s < budget_s;
  const bool pass = o.pass && in_time;
  std::printf("criterion %d %s: %s (%s; %.3f s, budget %.0f s%s)\n", id, name,
              pass ? "PASS" : "FAIL", o.detail.c_str(), s, budget_s,
              in_time ? "" : ", over budget");
  std::fflush(stdout);
  return pass;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

synth::SynthDataset synth_data(Problem p, std::size_t in, std::size_t out, double noise,
                               std::uint64_t seed, bool planar = false) {
  synth::SynthConfig cfg;
  cfg.problem = p;
  cfg.n_inliers = in;
  cfg.n_outliers = out;
  cfg.noise_sigma = noise;
  cfg.seed = seed;
  cfg.degenerate_planar = planar;
  return synth::generate(cfg);
}

std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

Eigen::MatrixXd first_columns(const TwoViewProblem& prob) {
  Eigen::MatrixXd y(9, static_cast<Eigen::Index>(prob.size()));
  for (std::size_t i = 0; i < prob.size(); ++i) {
    y.col(static_cast<Eigen::Index>(i)) = prob.embeddings()[i].col(0);
  }
  return y;
}

bool monotone(const subspace::IrlsResult& r) {
  for (std::size_t k = 1; k < r.objective.size(); ++k) {
    if (r.objective[k] > r.objective[k - 1] + kMonotoneSlack) return false;
  }
  return true;
}

bool history_monotone(const RunReport& r) {
  return std::is_sorted(r.best_score_history.begin(), r.best_score_history.end());
}

Outcome criterion1() {
  const std::size_t a = required_iterations(0.95, 0.5, 7);
  const std::size_t b = required_iterations(0.95, 0.5, 4);
  const auto t0 = Clock::now();
  for (int i = 0; i < 1000; ++i) (void)required_iterations(0.95, 0.5, 7);
  const double per_call_ms =
      std::chrono::duration<double, std::milli>(Clock::now() - t0).count() / 1000.0;
  return {a == 382 && b == 47 && per_call_ms < 1.0,
          fmt("T(0.95,0.5,7)=%zu T(0.95,0.5,4)=%zu, %.2e ms/call", a, b, per_call_ms)};
}

Outcome criterion2() {
  int f_ok = 0, f_tried = 0, f_degenerate = 0;
  double f_worst = 0.0, det_worst = 0.0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto ds = synth_data(Problem::fundamental, 7, 0, 0.0, 1000 + s);
    const TwoViewProblem prob(ds.data.correspondences, Problem::fundamental);
    const auto idx = iota(7);
    std::vector<ModelMatrix> cands;
    try {
      cands = prob.minimal_solve(idx);
    } catch (const DegenerateSample&) {
      ++f_degenerate;
      continue;
    }
    ++f_tried;
    double best = 10.0;
    double det = 0.0;
    for (const auto& c : cands) {
      const double a = line_angle(c.vec(), ds.truth.vec());
      if (a < best) {
        best = a;
        det = std::abs(c.matrix().determinant());
      }
    }
    f_worst = std::max(f_worst, best);
    det_worst = std::max(det_worst, det);
    if (best <= kSevenPointAngle && det <= kSevenPointDet) ++f_ok;
  }
  int h_ok = 0, h_tried = 0, h_degenerate = 0;
  double h_worst = 0.0;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const auto ds = synth_data(Problem::homography, 4, 0, 0.0, 2000 + s);
    const TwoViewProblem prob(ds.data.correspondences, Problem::homography);
    std::vector<ModelMatrix> cands;
    try {
      cands = prob.minimal_solve(iota(4));
    } catch (const DegenerateSample&) {
      ++h_degenerate;
      continue;
    }
    ++h_tried;
    const double a = line_angle(cands.at(0).vec(), ds.truth.vec());
    h_worst = std::max(h_worst, a);
    if (a <= kFourPointAngle) ++h_ok;
  }
  const bool pass = f_ok == f_tried && h_ok == h_tried && f_tried >= 990 && h_tried >= 990;
  return {pass, fmt("7pt %d/%d (degenerate %d, worst %.2e rad, |det| %.2e); "
                    "4pt %d/%d (degenerate %d, worst %.2e rad)",
                    f_ok, f_tried, f_degenerate, f_worst, det_worst, h_ok, h_tried,
                    h_degenerate, h_worst)};
}

Outcome criterion3() {
  int ok = 0;
  double worst = 0.0;
  int max_iter = 0;
  subspace::IrlsConfig cfg;
  cfg.tau_max = 100;
  for (std::uint64_t s = 0; s < 100; ++s) {
    Rng rng(3000 + s);
    const Eigen::VectorXd b = random_unit(rng, 9);
    Eigen::MatrixXd y(9, 1000);
    for (int i = 0; i < 500; ++i) {
      Eigen::VectorXd v = random_unit(rng, 9);
      v -= v.dot(b) * b;
      y.col(i) = v.normalized();
    }
    for (int i = 500; i < 1000; ++i) y.col(i) = random_unit(rng, 9);
    const auto r = subspace::dpcp_irls(y, cfg);
    const double a = line_angle(r.normal(), b);
    worst = std::max(worst, a);
    max_iter = std::max(max_iter, r.iterations);
    if (a <= kDpcpAngle && r.iterations <= 100) ++ok;
  }
  return {ok >= kDpcpMinSuccesses,
          fmt("%d/100 seeds within 0.1 deg, worst %.3e deg, max %d iterations", ok,
              worst / kDeg, max_iter)};
}

Outcome criterion4() {
  int bad[4] = {0, 0, 0, 0};
  for (std::uint64_t s = 0; s < 1000; ++s) {
    Rng rng(4000 + s);
    const int n = 20 + static_cast<int>(rng.index(200));
    Eigen::MatrixXd y = random_matrix(rng, 9, n);
    if (s % 2 == 0) {
      // Half the inputs carry a planted hyperplane.
      const Eigen::VectorXd b = random_unit(rng, 9);
      for (int i = 0; i < n / 2; ++i) y.col(i) -= y.col(i).dot(b) * b;
    }
    y.colwise().normalize();
    std::vector<Eigen::MatrixXd> blocks;
    for (int i = 0; i + 1 < n; i += 2) blocks.push_back(y.middleCols(i, 2));
    const auto grouped = subspace::BlockMatrix::from_blocks(blocks);
    bad[0] += monotone(subspace::dpcp_irls(y)) ? 0 : 1;
    bad[1] += monotone(subspace::dpcp_irls_group(grouped)) ? 0 : 1;
    bad[2] += monotone(subspace::dpcp_irls_basis(y, 3)) ? 0 : 1;
    bad[3] += monotone(subspace::huber_irls(grouped, 0.1)) ? 0 : 1;
  }
  const bool pass = bad[0] + bad[1] + bad[2] + bad[3] == 0;
  return {pass, fmt("violations dpcp %d, group %d, basis %d, huber %d over 1000 inputs",
                    bad[0], bad[1], bad[2], bad[3])};
}

Outcome criterion5() {
  double worst_gap = 0.0;
  double worst_angle = 0.0;
  int gap_ok = 0, angle_ok = 0;
  const int seeds = kPlanarSeeds;
  for (std::uint64_t s = 0; s < seeds; ++s) {
    const auto ds = synth_data(Problem::fundamental, 120, 80, 0.0, 5000 + s, true);
    const TwoViewProblem prob(ds.data.correspondences, Problem::fundamental);
    const Eigen::MatrixXd y = first_columns(prob);
    std::vector<Eigen::Index> in;
    for (std::size_t i = 0; i < prob.size(); ++i) {
      if (ds.data.correspondences[i].label == Label::inlier) in.push_back(Eigen::Index(i));
    }
    Eigen::MatrixXd yin(9, static_cast<Eigen::Index>(in.size()));
    for (std::size_t k = 0; k < in.size(); ++k) yin.col(Eigen::Index(k)) = y.col(in[k]);
    const Eigen::VectorXd sv = numerics::singular_values(yin.transpose());
    const double gap = sv[6] / sv[0];
    worst_gap = std::max(worst_gap, gap);
    if (gap <= kPlanarGap && sv[5] > kPlanarGap * sv[0]) ++gap_ok;
    const Eigen::MatrixXd truth = numerics::least_right_singular_vectors(yin.transpose(), 3);
    const auto r = subspace::dpcp_irls_basis(y.colwise().normalized(), 3);
    const double a = testsupport::max_principal_angle(r.basis, truth);
    worst_angle = std::max(worst_angle, a);
    if (a <= kPlanarAngle) ++angle_ok;
  }
  return {gap_ok == seeds && angle_ok >= kPlanarMinSuccesses,
          fmt("rank gap %d/%d (worst s7/s1 %.2e), basis %d/%d within 1 deg (worst %.3e deg)",
              gap_ok, seeds, worst_gap, angle_ok, seeds, worst_angle / kDeg)};
}

struct OrderingStats {
  double mean[3] = {0, 0, 0};  // none, dlt, dpcp
  int failures = 0;
  bool histories_monotone = true;
};

OrderingStats paired_run(Problem p, std::size_t in, std::size_t out, int seeds,
                         std::uint64_t base) {
  const LoMethod methods[3] = {LoMethod::none, LoMethod::dlt, LoMethod::dpcp};
  OrderingStats st;
  for (int s = 0; s < seeds; ++s) {
    const auto ds = synth_data(p, in, out, 1.0, base + static_cast<std::uint64_t>(s));
    for (int m = 0; m < 3; ++m) {
      RansacConfig cfg;
      cfg.epsilon = 3.0;
      cfg.lo_method = methods[m];
      cfg.seed = derive_seed(base, static_cast<std::uint64_t>(s));
      try {
        const RunReport r = run_ransac(ds.data, cfg);
        st.histories_monotone = st.histories_monotone && history_monotone(r);
        st.mean[m] += bench::validation_error(r.best->model, ds.data);
      } catch (const EstimationFailed&) {
        ++st.failures;
        st.mean[m] += std::nan("");
      }
    }
  }
  for (double& v : st.mean) v /= seeds;
  return st;
}

bool ordering_stats_monotone = true;

Outcome criterion6() {
  const OrderingStats h = paired_run(Problem::homography, 100, 100, 100, 6000);
  const OrderingStats f = paired_run(Problem::fundamental, 120, 80, 100, 7000);
  ordering_stats_monotone = h.histories_monotone && f.histories_monotone;
  const double margin = 1.0 - h.mean[2] / h.mean[0];
  const bool h_ok = h.mean[2] <= h.mean[1] && h.mean[1] <= h.mean[0] && margin >= kOrderingMargin;
  const bool f_ok = f.mean[2] <= f.mean[1] && f.mean[1] <= f.mean[0];
  return {h_ok && f_ok && h.failures == 0 && f.failures == 0,
          fmt("H none %.4f dlt %.4f dpcp %.4f px (dpcp %.1f%% below none); "
              "F none %.4f dlt %.4f dpcp %.4f px; failures %d/%d",
              h.mean[0], h.mean[1], h.mean[2], 100.0 * margin, f.mean[0], f.mean[1],
              f.mean[2], h.failures, f.failures)};
}

std::string bench_text(const std::vector<bench::NamedDataset>& data, unsigned threads) {
  bench::BenchConfig cfg;
  cfg.methods = {LoMethod::none, LoMethod::dlt, LoMethod::huber, LoMethod::dpcp};
  cfg.sigmas = {0.003, 0.006};
  cfg.trials = 5;
  cfg.master_seed = 99;
  cfg.threads = threads;
  auto rows = bench::run_bench(data, cfg);
  for (auto& r : rows) r.wall_ms = 0.0;
  std::ostringstream out;
  bench::write_csv(out, rows);
  bench::write_digest_csv(out, rows);
  return out.str();
}

Outcome criterion7() {
  bool history_ok = ordering_stats_monotone;
  int runs = 0;
  for (std::uint64_t s = 0; s < 30; ++s) {
    for (Problem p : {Problem::homography, Problem::fundamental}) {
      const auto ds = synth_data(p, 80, 80, 1.0, 8000 + s);
      for (LoMethod m : {LoMethod::none, LoMethod::dlt, LoMethod::huber, LoMethod::dpcp}) {
        RansacConfig cfg;
        cfg.sigma = 0.004;
        cfg.lo_method = m;
        cfg.seed = s;
        try {
          history_ok = history_ok && history_monotone(run_ransac(ds.data, cfg));
        } catch (const EstimationFailed&) {
        }
        ++runs;
      }
    }
  }
  const std::vector<bench::NamedDataset> data{
      {"h", synth_data(Problem::homography, 60, 40, 1.0, 8100).data},
      {"f", synth_data(Problem::fundamental, 70, 30, 1.0, 8101).data}};
  const std::string seq = bench_text(data, 1);
  const std::string seq2 = bench_text(data, 1);
  const std::string par = bench_text(data, 4);
  const bool same = seq == seq2 && seq == par;
  return {history_ok && same,
          fmt("score histories %s over %d runs plus criterion 6 runs; "
              "sequential/sequential/parallel bench output %s (%zu bytes)",
              history_ok ? "non-decreasing" : "DECREASE FOUND", runs,
              same ? "identical" : "DIFFERENT", seq.size())};
}

Outcome criterion8() {
  const int seeds = 100;
  const double diag = ImageSize{}.diagonal();
  const double base = 3.0 / diag;
  const double mult[4] = {1, 2, 4, 8};
  const LoMethod methods[2] = {LoMethod::dlt, LoMethod::dpcp};
  double curve[2][4] = {};
  int failures = 0;
  for (int s = 0; s < seeds; ++s) {
    const auto ds = synth_data(Problem::homography, 100, 100, 1.0,
                               9000 + static_cast<std::uint64_t>(s));
    for (int m = 0; m < 2; ++m) {
      for (int k = 0; k < 4; ++k) {
        RansacConfig cfg;
        cfg.sigma = base * mult[k];
        cfg.lo_method = methods[m];
        cfg.seed = derive_seed(9000, static_cast<std::uint64_t>(s));
        try {
          const RunReport r = run_ransac(ds.data, cfg);
          curve[m][k] += bench::validation_error(r.best->model, ds.data) / seeds;
        } catch (const EstimationFailed&) {
          ++failures;
        }
      }
    }
  }
  double ratio[2];
  for (int m = 0; m < 2; ++m) {
    ratio[m] = *std::max_element(curve[m], curve[m] + 4) / *std::min_element(curve[m], curve[m] + 4);
  }
  return {failures == 0 && ratio[1] <= ratio[0],
          fmt("dlt curve %.3f %.3f %.3f %.3f (ratio %.3f); dpcp curve %.3f %.3f %.3f %.3f "
              "(ratio %.3f); failures %d",
              curve[0][0], curve[0][1], curve[0][2], curve[0][3], ratio[0], curve[1][0],
              curve[1][1], curve[1][2], curve[1][3], ratio[1], failures)};
}

Outcome criterion9() {
  bool files_ok = true;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto p = s % 2 == 0 ? Problem::homography : Problem::fundamental;
    const Dataset d = synth_data(p, 100, 50, 1.0, 10000 + s).data;
    std::ostringstream a;
    io::write_correspondences(a, d);
    std::istringstream ia(a.str());
    const Dataset d2 = io::parse_correspondences(ia);
    std::ostringstream b;
    io::write_correspondences(b, d2);
    std::istringstream ib(b.str());
    const Dataset d3 = io::parse_correspondences(ib);
    files_ok = files_ok && a.str() == b.str() && d2.size() == d.size();
    for (std::size_t i = 0; i < d2.size(); ++i) {
      const auto& u = d2.correspondences[i];
      const auto& v = d3.correspondences[i];
      files_ok = files_ok && u.x1 == v.x1 && u.x2 == v.x2 && u.label == v.label &&
                 (u.x1 - d.correspondences[i].x1).norm() <= 1e-8 * 640.0;
    }
  }

  Rng rng(10100);
  std::vector<bench::BenchRecord> rows;
  for (const char* id : {"a", "b", "c", "d"}) {
    for (LoMethod m : {LoMethod::none, LoMethod::dpcp}) {
      for (double sg : {0.001, 0.002, 0.004}) {
        for (std::size_t t = 0; t < 10; ++t) {
          bench::BenchRecord r;
          r.dataset = id;
          r.method = m;
          r.sigma = sg;
          r.trial = t;
          r.seed = rng.next_u64();
          r.error_px = rng.uniform01() < 0.05 ? std::nan("") : std::exp(rng.normal());
          r.inliers = rng.index(500);
          r.iterations = rng.index(10000);
          r.lo_count = rng.index(20);
          r.wall_ms = rng.uniform(0.1, 100.0);
          rows.push_back(r);
        }
      }
    }
  }
  std::ostringstream c1;
  bench::write_csv(c1, rows);
  std::istringstream ic(c1.str());
  const auto parsed = bench::parse_csv(ic);
  std::ostringstream c2;
  bench::write_csv(c2, parsed);
  bool csv_ok = c1.str() == c2.str() && parsed.size() == rows.size();
  std::istringstream ic2(c2.str());
  const auto parsed2 = bench::parse_csv(ic2);
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    const auto& u = parsed[i];
    const auto& v = parsed2[i];
    csv_ok = csv_ok && u.seed == v.seed && u.sigma == v.sigma &&
             (u.error_px == v.error_px || (std::isnan(u.error_px) && std::isnan(v.error_px))) &&
             u.wall_ms == v.wall_ms && u.inliers == v.inliers;
  }

  // Independent recomputation: plain sort, direct index arithmetic.
  double worst = 0.0;
  const auto summary = bench::summarize(parsed);
  for (const auto& s : summary) {
    std::vector<double> e;
    for (const auto& r : parsed) {
      if (r.method == s.method && r.sigma == s.sigma && !std::isnan(r.error_px)) {
        e.push_back(r.error_px);
      }
    }
    std::sort(e.begin(), e.end());
    auto q = [&](double p) {
      const double h = p * static_cast<double>(e.size() - 1);
      const double lo = std::floor(h);
      const double hi = std::ceil(h);
      return e[std::size_t(lo)] + (h - lo) * (e[std::size_t(hi)] - e[std::size_t(lo)]);
    };
    worst = std::max(worst, std::abs(s.median - q(0.5)));
    worst = std::max(worst, std::abs(s.iqr - (q(0.75) - q(0.25))));
  }
  const bool sum_ok = worst <= kSummaryTol && summary.size() == 6;
  return {files_ok && csv_ok && sum_ok,
          fmt("correspondence files %s, bench CSV %s, summary max deviation %.2e",
              files_ok ? "exact" : "MISMATCH", csv_ok ? "exact" : "MISMATCH", worst)};
}

}  // namespace

int main() {
  int failed = 0;
  failed += !run(1, "iteration count", 1.0, criterion1);
  failed += !run(2, "minimal solvers", 10.0, criterion2);
  failed += !run(3, "dpcp exact recovery", 30.0, criterion3);
  failed += !run(4, "irls monotonicity", 60.0, criterion4);
  failed += !run(5, "planar nullspace", 10.0, criterion5);
  failed += !run(6, "lo ordering", 300.0, criterion6);
  failed += !run(7, "score monotonicity and determinism", 60.0, criterion7);
  failed += !run(8, "threshold sensitivity", 600.0, criterion8);
  failed += !run(9, "round-trips and summaries", 10.0, criterion9);
  std::printf("%d of 9 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
