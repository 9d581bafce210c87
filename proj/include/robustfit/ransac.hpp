#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "robustfit/dataset.hpp"
#include "robustfit/error.hpp"
#include "robustfit/geometry.hpp"
#include "robustfit/random.hpp"
#include "robustfit/robust_subspace.hpp"

namespace robustfit {

enum class LoMethod { none, dlt, huber, dpcp };

std::string_view to_string(LoMethod m);
LoMethod lo_method_from_string(std::string_view name);

struct RansacConfig {
  /// Inlier threshold in pixels. Exactly one of `epsilon` / `sigma` is set;
  /// `sigma` is a multiplier of the image diagonal.
  std::optional<double> epsilon;
  std::optional<double> sigma;
  double confidence = 0.95;
  std::size_t t_max = 10000;
  LoMethod lo_method = LoMethod::dpcp;
  int lo_k_max = 20;
  double huber_c = 0.01;
  std::uint64_t seed = 0;
  subspace::IrlsConfig irls;
  /// Experimental: feed every correspondence, not only the classified
  /// inliers, to the DPCP refit.
  bool dpcp_on_all_data = false;

  void validate() const;
  double resolve_epsilon(const ImageSize& size) const;
};

struct ScoredModel {
  ModelMatrix model;
  double score = 0.0;
  std::vector<std::uint8_t> inlier_mask;
  std::size_t inlier_count = 0;
};

struct RunReport {
  std::optional<ScoredModel> best;
  std::size_t iterations_used = 0;
  std::size_t lo_invocations = 0;
  double wall_ms = 0.0;
  double epsilon = 0.0;
  /// FNV-1a digest of the first kDigestSamples minimal samples of the run's
  /// sampling stream; equal digests mean equal sampling sequences.
  std::uint64_t sample_digest = 0;
  /// Best score after each so-far-the-best event, in order.
  std::vector<double> best_score_history;
};

inline constexpr std::size_t kDigestSamples = 16;

class EstimationFailed : public Error {
 public:
  EstimationFailed(const std::string& what, RunReport report)
      : Error(what), report_(std::move(report)) {}

  const RunReport& report() const { return report_; }

 private:
  RunReport report_;
};

struct MinimalSample {
  std::vector<std::size_t> indices;
};

/// Ns distinct indices, uniform over all Ns-subsets of [0, n) (Floyd's
/// algorithm); consumes exactly Ns RNG draws.
MinimalSample draw_minimal_sample(Rng& rng, std::size_t n, std::size_t ns);

/// ceil(log(1 - p) / log(1 - w^Ns)) for inlier ratio w, clamped to
/// [1, t_max]. A zero ratio yields t_max.
std::size_t required_iterations(double confidence, double inlier_ratio, std::size_t ns,
                                std::size_t t_max = std::numeric_limits<std::size_t>::max());

/// sum_i max(0, 1 - r_i^2 / eps^2); infinite residuals add nothing.
double truncated_quadratic_score(std::span<const double> residuals, double epsilon);

/// mask_i = (r_i <= eps).
std::vector<std::uint8_t> classify_inliers(std::span<const double> residuals, double epsilon);

/// Correspondences prepared for estimation: both views Hartley-normalized,
/// unit embeddings computed once. Minimal solves and refits run in the
/// normalized frames; every model handed out is in pixel frames.
class TwoViewProblem {
 public:
  TwoViewProblem(std::span<const Correspondence> data, Problem problem);

  Problem problem() const { return problem_; }
  ModelKind kind() const { return model_kind(problem_); }
  std::size_t size() const { return data_.size(); }
  std::size_t sample_size() const;
  std::span<const Correspondence> data() const { return data_; }
  std::span<const EmbeddingBlock> embeddings() const { return blocks_; }
  const NormalizationTransform& transform1() const { return t1_; }
  const NormalizationTransform& transform2() const { return t2_; }

  /// Throws DegenerateSample for degenerate samples.
  std::vector<ModelMatrix> minimal_solve(std::span<const std::size_t> indices) const;

  void residuals(const ModelMatrix& model, std::vector<double>& out) const;

  /// Non-minimal fit on the blocks in `indices`. Returns nullopt when the set
  /// is too small or the fit breaks down.
  std::optional<ModelMatrix> refit(std::span<const std::size_t> indices, LoMethod method,
                                   const RansacConfig& cfg) const;

 private:
  ModelMatrix to_pixels(const Vec9& normalized) const;

  std::span<const Correspondence> data_;
  Problem problem_;
  NormalizationTransform t1_;
  NormalizationTransform t2_;
  std::vector<Vec3> n1_;
  std::vector<Vec3> n2_;
  std::vector<EmbeddingBlock> blocks_;
};

struct LoResult {
  ModelMatrix model;
  double score = 0.0;
  int rounds = 0;
};

/// Classify, refit, rescore; stop at the first non-improving round or after
/// cfg.lo_k_max rounds. Never returns a score below `score`.
LoResult local_optimize(const TwoViewProblem& problem, const ModelMatrix& model, double score,
                        double epsilon, const RansacConfig& cfg);

/// Locally optimized RANSAC. Deterministic given (data, cfg). Throws
/// EstimationFailed, carrying the partial report, when no sample yields a model.
RunReport run_ransac(const Dataset& data, const RansacConfig& cfg);
RunReport run_ransac(std::span<const Correspondence> data, const ImageSize& size,
                     Problem problem, const RansacConfig& cfg);

}  // namespace robustfit
