// robustfit command-line tool: synth, estimate, bench, select.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "robustfit/bench.hpp"
#include "robustfit/correspondence_io.hpp"
#include "robustfit/error.hpp"
#include "robustfit/ransac.hpp"
#include "robustfit/synthgen.hpp"

namespace {

using nlohmann::json;
using namespace robustfit;

enum Exit { kOk = 0, kFailure = 1, kUsage = 2, kParse = 3, kEstimation = 4 };

class UsageError : public Error {
 public:
  using Error::Error;
};

json row_major(const ModelMatrix& m) {
  json out = json::array();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) out.push_back(m.matrix()(i, j));
  }
  return out;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct SynthArgs {
  std::string problem = "homography";
  std::size_t inliers = 100;
  std::size_t outliers = 0;
  double noise = 0.0;
  double width = 640.0;
  double height = 480.0;
  std::uint64_t seed = 0;
  bool planar = false;
  std::string out = "-";
};

int cmd_synth(const SynthArgs& a) {
  synth::SynthConfig cfg;
  cfg.problem = problem_from_string(a.problem);
  cfg.n_inliers = a.inliers;
  cfg.n_outliers = a.outliers;
  cfg.noise_sigma = a.noise;
  cfg.image_size = {a.width, a.height};
  cfg.seed = a.seed;
  cfg.degenerate_planar = a.planar;
  const synth::SynthDataset ds = synth::generate(cfg);

  if (a.out == "-") {
    io::write_correspondences(std::cout, ds.data);
  } else {
    io::write_correspondences(std::filesystem::path(a.out), ds.data);
  }
  json truth = {{"problem", to_string(cfg.problem)},
                {"model", row_major(ds.truth)},
                {"inliers", ds.data.count(Label::inlier)},
                {"outliers", ds.data.count(Label::outlier)},
                {"attempts", ds.meta.attempts}};
  if (cfg.problem == Problem::homography) {
    truth["condition_number"] = ds.meta.condition_number;
    truth["condition_limit"] = ds.meta.condition_limit;
  } else {
    truth["baseline_ratio"] = ds.meta.baseline_ratio;
    truth["min_baseline_ratio"] = ds.meta.min_baseline_ratio;
  }
  std::cerr << truth.dump() << '\n';
  return kOk;
}

struct RunArgs {
  std::optional<double> sigma;
  std::optional<double> epsilon;
  std::string lo = "dpcp";
  double confidence = 0.95;
  std::size_t tmax = 10000;
  std::uint64_t seed = 0;
  double huber_c = 0.01;
  int lo_kmax = 20;
  bool symmetric = false;
  bool dpcp_all = false;

  RansacConfig config() const {
    RansacConfig cfg;
    cfg.sigma = sigma;
    cfg.epsilon = epsilon;
    cfg.lo_method = lo_method_from_string(lo);
    cfg.confidence = confidence;
    cfg.t_max = tmax;
    cfg.seed = seed;
    cfg.huber_c = huber_c;
    cfg.lo_k_max = lo_kmax;
    cfg.dpcp_on_all_data = dpcp_all;
    return cfg;
  }
};

struct EstimateArgs {
  std::string input;
  std::string problem;
  RunArgs run;
};

int cmd_estimate(const EstimateArgs& a) {
  const Dataset data = io::parse_correspondences(std::filesystem::path(a.input));
  if (!a.problem.empty() && problem_from_string(a.problem) != data.problem) {
    throw UsageError("--problem " + a.problem + " does not match the file header (" +
                     std::string(to_string(data.problem)) + ")");
  }
  const RansacConfig cfg = a.run.config();
  try {
    const RunReport report = run_ransac(data, cfg);
    json out = {{"problem", to_string(data.problem)},
                {"lo_method", to_string(cfg.lo_method)},
                {"model", row_major(report.best->model)},
                {"score", report.best->score},
                {"inlier_count", report.best->inlier_count},
                {"iterations", report.iterations_used},
                {"lo_invocations", report.lo_invocations},
                {"epsilon", report.epsilon},
                {"wall_ms", report.wall_ms}};
    if (data.has_labels) {
      out["error_on_validation"] =
          number_or_null(bench::validation_error(report.best->model, data, a.run.symmetric));
    }
    std::cout << out.dump(2) << '\n';
    return kOk;
  } catch (const EstimationFailed& e) {
    const RunReport& r = e.report();
    json out = {{"error", "estimation-failed"},
                {"message", e.what()},
                {"iterations", r.iterations_used},
                {"epsilon", r.epsilon},
                {"wall_ms", r.wall_ms}};
    std::cout << out.dump(2) << '\n';
    return kEstimation;
  }
}

struct BenchArgs {
  std::vector<std::string> inputs;
  std::vector<double> sigmas;
  std::vector<std::string> methods;
  std::size_t trials = 10;
  std::string out = "-";
  std::string digest_out;
  std::string summary_out;
  unsigned threads = 1;
  bool huber_sweep = false;
  RunArgs run;
};

json summary_json(const std::vector<bench::SummaryRow>& rows) {
  json out = json::array();
  for (const auto& s : rows) {
    out.push_back({{"method", to_string(s.method)},
                   {"sigma", s.sigma},
                   {"runs", s.runs},
                   {"failures", s.failures},
                   {"mean", number_or_null(s.mean)},
                   {"median", number_or_null(s.median)},
                   {"q1", number_or_null(s.q1)},
                   {"q3", number_or_null(s.q3)},
                   {"iqr", number_or_null(s.iqr)},
                   {"mean_wall_ms", s.mean_wall_ms}});
  }
  return out;
}

int cmd_bench(const BenchArgs& a) {
  if (a.sigmas.empty() || a.methods.empty()) throw UsageError("empty --sigmas or --methods list");
  bench::BenchConfig cfg;
  for (const auto& m : a.methods) cfg.methods.push_back(lo_method_from_string(m));
  cfg.sigmas = a.sigmas;
  cfg.trials = a.trials;
  cfg.master_seed = a.run.seed;
  cfg.huber_sweep = a.huber_sweep;
  cfg.symmetric_transfer = a.run.symmetric;
  cfg.threads = a.threads;
  RunArgs base = a.run;
  base.sigma = a.sigmas.front();
  base.epsilon.reset();
  cfg.base = base.config();

  std::vector<bench::NamedDataset> datasets;
  for (const auto& path : a.inputs) {
    datasets.push_back({std::filesystem::path(path).stem().string(),
                        io::parse_correspondences(std::filesystem::path(path))});
  }
  const auto rows = bench::run_bench(datasets, cfg);

  if (a.out == "-") {
    bench::write_csv(std::cout, rows);
  } else {
    std::ofstream f(a.out);
    if (!f) throw Error("cannot write '" + a.out + "'");
    bench::write_csv(f, rows);
  }
  if (!a.digest_out.empty()) {
    std::ofstream f(a.digest_out);
    if (!f) throw Error("cannot write '" + a.digest_out + "'");
    bench::write_digest_csv(f, rows);
  }
  const json summary = summary_json(bench::summarize(rows));
  if (!a.summary_out.empty()) {
    std::ofstream f(a.summary_out);
    if (!f) throw Error("cannot write '" + a.summary_out + "'");
    f << summary.dump(2) << '\n';
  }
  (a.out == "-" ? std::cerr : std::cout) << summary.dump(2) << '\n';
  return kOk;
}

int cmd_select(const std::string& input) {
  std::ifstream f(input);
  if (!f) throw UsageError("cannot open '" + input + "'");
  const auto summary = bench::summarize(bench::parse_csv(f));
  json out = json::object();
  for (const auto& s : bench::select_thresholds(summary)) {
    out[std::string(to_string(s.method))] = {
        {"sigma", s.sigma}, {"error", s.error}, {"wall_ms", s.wall_ms}};
  }
  std::cout << out.dump(2) << '\n';
  return kOk;
}

void add_run_options(CLI::App* cmd, RunArgs& r, bool threshold) {
  if (threshold) {
    auto* s = cmd->add_option("--sigma", r.sigma, "Threshold as a multiple of the image diagonal");
    auto* e = cmd->add_option("--epsilon", r.epsilon, "Threshold in pixels");
    s->excludes(e);
    e->excludes(s);
  }
  cmd->add_option("--lo", r.lo, "Local optimization: none, dlt, huber, dpcp")
      ->check(CLI::IsMember({"none", "dlt", "huber", "dpcp"}));
  cmd->add_option("--confidence", r.confidence, "RANSAC confidence p")->capture_default_str();
  cmd->add_option("--tmax", r.tmax, "Iteration cap")->capture_default_str();
  cmd->add_option("--seed", r.seed, "RNG seed")->capture_default_str();
  cmd->add_option("--huber-c", r.huber_c, "Huber parameter")->capture_default_str();
  cmd->add_option("--lo-kmax", r.lo_kmax, "Inner LO rounds")->capture_default_str();
  cmd->add_flag("--symmetric-transfer", r.symmetric,
                "Validate homographies with symmetric transfer error");
  cmd->add_flag("--dpcp-all-data", r.dpcp_all)->group("");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust two-view model estimation"};
  app.require_subcommand(1);

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Write a synthetic correspondence file");
  synth->add_option("--problem", synth_args.problem)
      ->check(CLI::IsMember({"homography", "fundamental"}))
      ->capture_default_str();
  synth->add_option("--inliers", synth_args.inliers)->capture_default_str();
  synth->add_option("--outliers", synth_args.outliers)->capture_default_str();
  synth->add_option("--noise", synth_args.noise, "Gaussian noise sigma, pixels")
      ->capture_default_str();
  synth->add_option("--width", synth_args.width)->capture_default_str();
  synth->add_option("--height", synth_args.height)->capture_default_str();
  synth->add_option("--seed", synth_args.seed)->capture_default_str();
  synth->add_flag("--degenerate-planar", synth_args.planar, "Coplanar scene (fundamental)");
  synth->add_option("--out,-o", synth_args.out, "Output file, - for stdout")
      ->capture_default_str();

  EstimateArgs est_args;
  auto* estimate = app.add_subcommand("estimate", "Estimate a model from a correspondence file");
  estimate->add_option("--input,-i", est_args.input)->required()->check(CLI::ExistingFile);
  estimate->add_option("--problem", est_args.problem)
      ->check(CLI::IsMember({"homography", "fundamental"}));
  add_run_options(estimate, est_args.run, true);

  BenchArgs bench_args;
  auto* benchcmd = app.add_subcommand("bench", "Sweep methods and thresholds over seeded trials");
  benchcmd->add_option("--input,-i", bench_args.inputs, "Correspondence files")
      ->required()
      ->check(CLI::ExistingFile);
  benchcmd->add_option("--sigmas", bench_args.sigmas)->required()->delimiter(',');
  benchcmd->add_option("--methods", bench_args.methods)->required()->delimiter(',');
  benchcmd->add_option("--trials", bench_args.trials)->capture_default_str();
  benchcmd->add_option("--out,-o", bench_args.out, "CSV output, - for stdout")
      ->capture_default_str();
  benchcmd->add_option("--digest-out", bench_args.digest_out, "Per-run sample digests (CSV)");
  benchcmd->add_option("--summary-out", bench_args.summary_out, "Summary JSON");
  benchcmd->add_option("--threads", bench_args.threads, "Worker threads, 0 for all cores")
      ->capture_default_str();
  benchcmd->add_flag("--huber-sweep", bench_args.huber_sweep,
                     "Average Huber over c in {0.1, 0.01, 0.001}");
  add_run_options(benchcmd, bench_args.run, false);

  std::string select_input;
  auto* select = app.add_subcommand("select", "Pick the threshold per method from a bench CSV");
  select->add_option("--input,-i", select_input)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*synth) return cmd_synth(synth_args);
    if (*estimate) {
      if (!est_args.run.sigma && !est_args.run.epsilon) {
        throw UsageError("one of --sigma or --epsilon is required");
      }
      return cmd_estimate(est_args);
    }
    if (*benchcmd) {
      for (const auto& m : bench_args.methods) lo_method_from_string(m);
      return cmd_bench(bench_args);
    }
    if (*select) return cmd_select(select_input);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
