#include "robustfit/ransac.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "robustfit/solvers.hpp"

namespace robustfit {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv_fold(std::uint64_t h, std::uint64_t value) {
  for (int b = 0; b < 8; ++b) {
    h ^= (value >> (8 * b)) & 0xffULL;
    h *= kFnvPrime;
  }
  return h;
}

std::uint64_t fold_sample(std::uint64_t h, const MinimalSample& s) {
  for (std::size_t i : s.indices) h = fnv_fold(h, i);
  return fnv_fold(h, ~0ULL);
}

std::vector<Vec2> view(std::span<const Correspondence> data, bool first) {
  std::vector<Vec2> pts;
  pts.reserve(data.size());
  for (const auto& c : data) pts.push_back(first ? c.x1 : c.x2);
  return pts;
}

}  // namespace

std::string_view to_string(LoMethod m) {
  switch (m) {
    case LoMethod::none: return "none";
    case LoMethod::dlt: return "dlt";
    case LoMethod::huber: return "huber";
    case LoMethod::dpcp: return "dpcp";
  }
  return "none";
}

LoMethod lo_method_from_string(std::string_view name) {
  if (name == "none") return LoMethod::none;
  if (name == "dlt") return LoMethod::dlt;
  if (name == "huber") return LoMethod::huber;
  if (name == "dpcp") return LoMethod::dpcp;
  throw InvalidInput("unknown LO method '" + std::string(name) + "'");
}

void RansacConfig::validate() const {
  if (epsilon.has_value() == sigma.has_value()) {
    throw InvalidInput("RansacConfig: set exactly one of epsilon and sigma");
  }
  if (epsilon && !(*epsilon > 0.0)) throw InvalidInput("RansacConfig: epsilon must be > 0");
  if (sigma && !(*sigma > 0.0)) throw InvalidInput("RansacConfig: sigma must be > 0");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw InvalidInput("RansacConfig: confidence must lie in (0, 1)");
  }
  if (t_max < 1) throw InvalidInput("RansacConfig: t_max must be >= 1");
  if (lo_k_max < 1) throw InvalidInput("RansacConfig: lo_k_max must be >= 1");
  if (lo_method == LoMethod::huber && !(huber_c > 0.0)) {
    throw InvalidInput("RansacConfig: huber_c must be > 0");
  }
  irls.validate();
}

double RansacConfig::resolve_epsilon(const ImageSize& size) const {
  if (epsilon) return *epsilon;
  if (sigma) return *sigma * size.diagonal();
  throw InvalidInput("RansacConfig: no threshold given");
}

MinimalSample draw_minimal_sample(Rng& rng, std::size_t n, std::size_t ns) {
  if (ns > n) throw InvalidInput("draw_minimal_sample: sample larger than population");
  MinimalSample s;
  s.indices.reserve(ns);
  for (std::size_t j = n - ns; j < n; ++j) {
    const std::size_t t = rng.index(j + 1);
    if (std::find(s.indices.begin(), s.indices.end(), t) == s.indices.end()) {
      s.indices.push_back(t);
    } else {
      s.indices.push_back(j);
    }
  }
  return s;
}

std::size_t required_iterations(double confidence, double inlier_ratio, std::size_t ns,
                                std::size_t t_max) {
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw InvalidInput("required_iterations: confidence must lie in (0, 1)");
  }
  if (!(inlier_ratio >= 0.0 && inlier_ratio <= 1.0)) {
    throw InvalidInput("required_iterations: inlier ratio must lie in [0, 1]");
  }
  if (ns < 1) throw InvalidInput("required_iterations: sample size must be >= 1");
  if (inlier_ratio >= 1.0) return std::min<std::size_t>(1, t_max);
  const double all_inlier = std::pow(inlier_ratio, static_cast<double>(ns));
  const double denom = std::log1p(-all_inlier);
  if (!(all_inlier > 0.0) || denom == 0.0) return t_max;
  const double t = std::ceil(std::log(1.0 - confidence) / denom);
  if (!(t < static_cast<double>(t_max))) return t_max;
  return std::max<std::size_t>(1, static_cast<std::size_t>(t));
}

double truncated_quadratic_score(std::span<const double> residuals, double epsilon) {
  const double inv = 1.0 / (epsilon * epsilon);
  double score = 0.0;
  for (double r : residuals) {
    if (r < epsilon) score += 1.0 - r * r * inv;
  }
  return score;
}

std::vector<std::uint8_t> classify_inliers(std::span<const double> residuals, double epsilon) {
  std::vector<std::uint8_t> mask(residuals.size());
  for (std::size_t i = 0; i < residuals.size(); ++i) mask[i] = residuals[i] <= epsilon ? 1 : 0;
  return mask;
}

TwoViewProblem::TwoViewProblem(std::span<const Correspondence> data, Problem problem)
    : data_(data), problem_(problem) {
  const std::vector<Vec2> p1 = view(data, true);
  const std::vector<Vec2> p2 = view(data, false);
  NormalizedPoints norm1 = hartley_normalize(p1);
  NormalizedPoints norm2 = hartley_normalize(p2);
  t1_ = norm1.transform;
  t2_ = norm2.transform;
  n1_ = std::move(norm1.points);
  n2_ = std::move(norm2.points);
  blocks_.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    blocks_.push_back(problem == Problem::fundamental ? epipolar_embedding(n1_[i], n2_[i])
                                                      : homographic_embedding(n1_[i], n2_[i]));
  }
}

std::size_t TwoViewProblem::sample_size() const {
  return problem_ == Problem::fundamental ? solvers::kFundamentalSampleSize
                                          : solvers::kHomographySampleSize;
}

ModelMatrix TwoViewProblem::to_pixels(const Vec9& normalized) const {
  ModelMatrix m = ModelMatrix::from_vec(normalized, kind());
  if (problem_ == Problem::fundamental) m = solvers::rank2_project(m);
  return denormalize_model(t1_, t2_, m);
}

std::vector<ModelMatrix> TwoViewProblem::minimal_solve(std::span<const std::size_t> indices) const {
  std::vector<Vec3> a;
  std::vector<Vec3> b;
  for (std::size_t i : indices) {
    a.push_back(n1_[i]);
    b.push_back(n2_[i]);
  }
  std::vector<ModelMatrix> out;
  if (problem_ == Problem::fundamental) {
    for (const ModelMatrix& f : solvers::fundamental_7pt(a, b)) {
      out.push_back(denormalize_model(t1_, t2_, f));
    }
  } else {
    out.push_back(denormalize_model(t1_, t2_, solvers::homography_4pt(a, b)));
  }
  return out;
}

void TwoViewProblem::residuals(const ModelMatrix& model, std::vector<double>& out) const {
  out.resize(data_.size());
  for (std::size_t i = 0; i < data_.size(); ++i) out[i] = residual(model, data_[i]);
}

std::optional<ModelMatrix> TwoViewProblem::refit(std::span<const std::size_t> indices,
                                                 LoMethod method,
                                                 const RansacConfig& cfg) const {
  std::vector<EmbeddingBlock> selected;
  selected.reserve(indices.size());
  Eigen::Index rows = 0;
  for (std::size_t i : indices) {
    selected.push_back(blocks_[i]);
    rows += blocks_[i].cols();
  }
  if (rows < 8) return std::nullopt;
  try {
    Vec9 v;
    switch (method) {
      case LoMethod::none:
        return std::nullopt;
      case LoMethod::dlt:
        v = solvers::dlt_refit(selected);
        break;
      case LoMethod::huber:
        v = subspace::huber_irls(subspace::BlockMatrix::from_blocks(selected), cfg.huber_c, cfg.irls)
                .normal();
        break;
      case LoMethod::dpcp:
        v = subspace::dpcp_irls_group(subspace::BlockMatrix::from_blocks(selected), cfg.irls)
                .normal();
        break;
    }
    return to_pixels(v);
  } catch (const Error&) {
    return std::nullopt;
  }
}

LoResult local_optimize(const TwoViewProblem& problem, const ModelMatrix& model, double score,
                        double epsilon, const RansacConfig& cfg) {
  if (cfg.lo_method == LoMethod::none) {
    throw InvalidInput("local_optimize: lo_method is none");
  }
  LoResult best{model, score, 0};
  ModelMatrix current = model;
  std::vector<double> res;
  std::vector<std::size_t> chosen;
  for (int k = 0; k < cfg.lo_k_max; ++k) {
    problem.residuals(current, res);
    chosen.clear();
    const bool all = cfg.dpcp_on_all_data && cfg.lo_method == LoMethod::dpcp;
    for (std::size_t i = 0; i < res.size(); ++i) {
      if (all || res[i] <= epsilon) chosen.push_back(i);
    }
    const std::optional<ModelMatrix> fitted = problem.refit(chosen, cfg.lo_method, cfg);
    if (!fitted) break;
    problem.residuals(*fitted, res);
    const double r = truncated_quadratic_score(res, epsilon);
    ++best.rounds;
    if (r <= best.score) break;
    best.model = *fitted;
    best.score = r;
    current = *fitted;
  }
  return best;
}

RunReport run_ransac(std::span<const Correspondence> data, const ImageSize& size,
                     Problem problem, const RansacConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const double eps = cfg.resolve_epsilon(size);
  const TwoViewProblem prob(data, problem);
  const std::size_t n = prob.size();
  const std::size_t ns = prob.sample_size();
  if (n < ns) throw InsufficientData("run_ransac: fewer correspondences than a minimal sample");

  Rng rng(cfg.seed);
  RunReport report;
  report.epsilon = eps;
  std::uint64_t digest = kFnvOffset;
  std::size_t digested = 0;

  std::optional<ModelMatrix> best_model;
  double best_score = -std::numeric_limits<double>::infinity();
  std::size_t budget = cfg.t_max;
  std::size_t k = 0;
  std::vector<double> res;

  while (k < budget && k < cfg.t_max) {
    const MinimalSample sample = draw_minimal_sample(rng, n, ns);
    if (digested < kDigestSamples) {
      digest = fold_sample(digest, sample);
      ++digested;
    }
    ++k;
    std::vector<ModelMatrix> candidates;
    try {
      candidates = prob.minimal_solve(sample.indices);
    } catch (const DegenerateSample&) {
      continue;
    }
    for (const ModelMatrix& cand : candidates) {
      prob.residuals(cand, res);
      const double r = truncated_quadratic_score(res, eps);
      if (!(r > best_score)) continue;
      ModelMatrix model = cand;
      double sc = r;
      if (cfg.lo_method != LoMethod::none) {
        LoResult lo = local_optimize(prob, cand, r, eps, cfg);
        ++report.lo_invocations;
        if (lo.rounds > 0 && lo.score > r) prob.residuals(lo.model, res);
        model = lo.model;
        sc = lo.score;
      }
      best_model = model;
      best_score = sc;
      report.best_score_history.push_back(sc);
      std::size_t count = 0;
      for (double x : res) count += x <= eps ? 1 : 0;
      budget = required_iterations(cfg.confidence,
                                   static_cast<double>(count) / static_cast<double>(n), ns,
                                   cfg.t_max);
    }
  }
  // Complete the digest from the same stream so it does not depend on when
  // the run stopped.
  while (digested < kDigestSamples) {
    digest = fold_sample(digest, draw_minimal_sample(rng, n, ns));
    ++digested;
  }
  report.sample_digest = digest;
  report.iterations_used = k;

  auto finish = [&] {
    report.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  };
  if (!best_model) {
    finish();
    throw EstimationFailed("run_ransac: no non-degenerate minimal sample found", report);
  }
  prob.residuals(*best_model, res);
  ScoredModel scored{*best_model, best_score, classify_inliers(res, eps), 0};
  scored.inlier_count = static_cast<std::size_t>(
      std::count(scored.inlier_mask.begin(), scored.inlier_mask.end(), std::uint8_t{1}));
  report.best = std::move(scored);
  finish();
  return report;
}

RunReport run_ransac(const Dataset& data, const RansacConfig& cfg) {
  return run_ransac(data.correspondences, data.image_size, data.problem, cfg);
}

}  // namespace robustfit
