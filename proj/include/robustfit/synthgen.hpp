#pragma once

#include <cstddef>
#include <cstdint>

#include "robustfit/dataset.hpp"
#include "robustfit/geometry.hpp"

namespace robustfit::synth {

struct SynthConfig {
  Problem problem = Problem::homography;
  std::size_t n_inliers = 100;
  std::size_t n_outliers = 0;
  double noise_sigma = 0.0;
  ImageSize image_size;
  std::uint64_t seed = 0;
  /// Fundamental only: every scene point on one plane.
  bool degenerate_planar = false;
  int max_attempts = 200;

  void validate() const;
};

/// Guards applied while drawing the scene, plus what was drawn.
struct SynthMetadata {
  double condition_limit = 1e3;
  /// Image corners must map into [-g W, (1 + g) W] x [-g H, (1 + g) H].
  double guard_margin = 1.5;
  double min_baseline_ratio = 0.1;
  /// Homography: 2-norm condition number of H in image-normalized coordinates.
  double condition_number = 0.0;
  /// Fundamental: |t| over the mean scene depth.
  double baseline_ratio = 0.0;
  int attempts = 0;
};

struct SynthDataset {
  Dataset data;
  ModelMatrix truth;
  SynthMetadata meta;
};

/// Plane-induced homography; inliers have x1 uniform in the image and
/// x2 = dehom(H x1) inside the image plus noise on x2. Outliers are independent
/// uniform pairs. Output is shuffled. Throws GenerationFailed when no draw
/// passes the guards within cfg.max_attempts.
SynthDataset synth_homography(const SynthConfig& cfg);

/// Two pinhole cameras viewing points in a depth box (or on one tilted plane);
/// F = K^-T [t]x R K^-1. Noise is added to both views.
SynthDataset synth_fundamental(const SynthConfig& cfg);

SynthDataset generate(const SynthConfig& cfg);

}  // namespace robustfit::synth
