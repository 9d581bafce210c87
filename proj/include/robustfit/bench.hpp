#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "robustfit/dataset.hpp"
#include "robustfit/ransac.hpp"

namespace robustfit::bench {

inline constexpr const char* kCsvHeader =
    "dataset,method,sigma,trial,seed,error_px,inliers,iterations,lo_count,wall_ms";

struct BenchRecord {
  std::string dataset;
  LoMethod method = LoMethod::none;
  double sigma = 0.0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  /// Mean validation error; NaN when the run failed or the data has no labels.
  double error_px = 0.0;
  std::size_t inliers = 0;
  std::size_t iterations = 0;
  std::size_t lo_count = 0;
  double wall_ms = 0.0;
  std::uint64_t sample_digest = 0;
};

struct NamedDataset {
  std::string id;
  Dataset data;
};

struct BenchConfig {
  std::vector<LoMethod> methods;
  std::vector<double> sigmas;
  std::size_t trials = 10;
  std::uint64_t master_seed = 0;
  /// Huber rows average the runs for c in kHuberSweep instead of using
  /// `base.huber_c`.
  bool huber_sweep = false;
  bool symmetric_transfer = false;
  unsigned threads = 1;
  /// Threshold fields are overwritten per sigma; seed per trial.
  RansacConfig base;

  void validate() const;
};

inline constexpr double kHuberSweep[] = {0.1, 0.01, 0.001};

/// Mean residual of the labeled inliers under `model`: Sampson distance for
/// fundamental data, transfer error (optionally symmetric) for homographies.
/// NaN when no correspondence is labeled inlier.
double validation_error(const ModelMatrix& model, const Dataset& data,
                        bool symmetric_transfer = false);

/// One run of one method on one dataset.
BenchRecord run_single(const NamedDataset& ds, LoMethod method, double sigma, std::size_t trial,
                       const BenchConfig& cfg);

/// Rows ordered dataset, sigma, method, trial (input order). Trial t uses
/// seed derive_seed(master_seed, t) for every dataset, method and sigma.
std::vector<BenchRecord> run_bench(const std::vector<NamedDataset>& datasets,
                                   const BenchConfig& cfg);

void write_csv(std::ostream& out, const std::vector<BenchRecord>& rows);
std::vector<BenchRecord> parse_csv(std::istream& in);
void write_digest_csv(std::ostream& out, const std::vector<BenchRecord>& rows);

/// Type-7 sample quantile of sorted data.
double quantile_sorted(const std::vector<double>& sorted, double q);

struct SummaryRow {
  LoMethod method = LoMethod::none;
  double sigma = 0.0;
  std::size_t runs = 0;
  std::size_t failures = 0;
  /// Mean over datasets of each dataset's mean error across trials.
  double mean = 0.0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr = 0.0;
  double mean_wall_ms = 0.0;
};

/// One row per (method, sigma), sorted by method then sigma. Failed runs
/// (NaN error) are counted and excluded from the statistics.
std::vector<SummaryRow> summarize(const std::vector<BenchRecord>& rows);

struct Selection {
  LoMethod method = LoMethod::none;
  double sigma = 0.0;
  double error = 0.0;
  double wall_ms = 0.0;
};

/// Per method: among sigmas whose mean error is within 1% of that method's
/// minimum, the one with the smallest mean wall time (smaller sigma on ties).
std::vector<Selection> select_thresholds(const std::vector<SummaryRow>& summary);

}  // namespace robustfit::bench
