#include "robustfit/synthgen.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <utility>

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "robustfit/error.hpp"
#include "robustfit/random.hpp"
#include "robustfit/solvers.hpp"

namespace robustfit::synth {

namespace {

constexpr int kPointTries = 1000;

Mat3 intrinsics(Rng& rng, const ImageSize& size) {
  const double f = rng.uniform(0.8, 1.2) * size.width;
  Mat3 k;
  k << f, 0.0, 0.5 * size.width,
       0.0, f, 0.5 * size.height,
       0.0, 0.0, 1.0;
  return k;
}

Vec3 random_direction(Rng& rng) {
  for (;;) {
    Vec3 v(rng.normal(), rng.normal(), rng.normal());
    const double n = v.norm();
    if (n > 1e-6) return v / n;
  }
}

Mat3 random_rotation(Rng& rng, double max_angle) {
  const Vec3 axis = random_direction(rng);
  return Eigen::AngleAxisd(rng.uniform(-max_angle, max_angle), axis).toRotationMatrix();
}

Vec2 uniform_pixel(Rng& rng, const ImageSize& size) {
  const double x = rng.uniform(0.0, size.width);
  const double y = rng.uniform(0.0, size.height);
  return {x, y};
}

bool inside(const Vec2& p, const ImageSize& size) {
  return p.x() >= 0.0 && p.x() <= size.width && p.y() >= 0.0 && p.y() <= size.height;
}

Mat3 skew(const Vec3& t) {
  Mat3 s;
  s << 0.0, -t.z(), t.y(),
       t.z(), 0.0, -t.x(),
       -t.y(), t.x(), 0.0;
  return s;
}

void add_outliers(Rng& rng, const SynthConfig& cfg, std::vector<Correspondence>& out) {
  for (std::size_t i = 0; i < cfg.n_outliers; ++i) {
    Correspondence c;
    c.x1 = uniform_pixel(rng, cfg.image_size);
    c.x2 = uniform_pixel(rng, cfg.image_size);
    c.label = Label::outlier;
    out.push_back(c);
  }
}

void shuffle(Rng& rng, std::vector<Correspondence>& v) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = rng.index(i);
    std::swap(v[i - 1], v[j]);
  }
}

Vec2 jitter(Rng& rng, double sigma) {
  const double dx = rng.normal();
  const double dy = rng.normal();
  return {sigma * dx, sigma * dy};
}

SynthDataset finish(Rng& rng, const SynthConfig& cfg, std::vector<Correspondence> pts,
                    ModelMatrix truth, SynthMetadata meta) {
  add_outliers(rng, cfg, pts);
  shuffle(rng, pts);
  Dataset data;
  data.problem = cfg.problem;
  data.image_size = cfg.image_size;
  data.correspondences = std::move(pts);
  data.has_labels = true;
  return SynthDataset{std::move(data), std::move(truth), meta};
}

}  // namespace

void SynthConfig::validate() const {
  const std::size_t ns = problem == Problem::fundamental ? solvers::kFundamentalSampleSize
                                                         : solvers::kHomographySampleSize;
  if (n_inliers < ns) {
    throw InvalidInput("SynthConfig: n_inliers must be at least " + std::to_string(ns));
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw InvalidInput("SynthConfig: noise_sigma must be finite and >= 0");
  }
  if (!(image_size.width > 0.0 && image_size.height > 0.0)) {
    throw InvalidInput("SynthConfig: image size must be positive");
  }
  if (degenerate_planar && problem != Problem::fundamental) {
    throw InvalidInput("SynthConfig: degenerate_planar applies to fundamental scenes only");
  }
  if (max_attempts < 1) throw InvalidInput("SynthConfig: max_attempts must be >= 1");
}

SynthDataset synth_homography(const SynthConfig& cfg) {
  cfg.validate();
  if (cfg.problem != Problem::homography) throw InvalidInput("synth_homography: wrong problem");
  Rng rng(cfg.seed);
  SynthMetadata meta;
  const double w = cfg.image_size.width;
  const double h = cfg.image_size.height;
  Mat3 norm;
  norm << 2.0 / w, 0.0, -1.0,
          0.0, 2.0 / h, -1.0,
          0.0, 0.0, 1.0;

  for (int attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
    meta.attempts = attempt;
    const Mat3 k = intrinsics(rng, cfg.image_size);
    const Mat3 r = random_rotation(rng, 0.2);
    const Vec3 n = random_rotation(rng, 0.5) * Vec3::UnitZ();
    const double d = rng.uniform(3.0, 6.0);
    const Vec3 t = random_direction(rng) * rng.uniform(0.1, 1.0);
    const Mat3 hm = k * (r + t * n.transpose() / d) * k.inverse();

    bool ok = true;
    const double g = meta.guard_margin;
    for (const Vec2& corner : {Vec2(0, 0), Vec2(w, 0), Vec2(0, h), Vec2(w, h)}) {
      const Vec3 y = hm * corner.homogeneous();
      if (!(y.z() > 0.0)) {
        ok = false;
        break;
      }
      const Vec2 p = y.hnormalized();
      if (p.x() < -g * w || p.x() > (1 + g) * w || p.y() < -g * h || p.y() > (1 + g) * h) ok = false;
    }
    if (!ok) continue;

    const Eigen::Vector3d sv = Eigen::JacobiSVD<Mat3>(norm * hm * norm.inverse()).singularValues();
    meta.condition_number = sv(0) / sv(2);
    if (!(meta.condition_number <= meta.condition_limit)) continue;

    std::vector<Correspondence> pts;
    pts.reserve(cfg.n_inliers + cfg.n_outliers);
    for (std::size_t i = 0; i < cfg.n_inliers && ok; ++i) {
      bool placed = false;
      for (int tries = 0; tries < kPointTries && !placed; ++tries) {
        const Vec2 x1 = uniform_pixel(rng, cfg.image_size);
        const Vec3 y = hm * x1.homogeneous();
        if (!(y.z() > 0.0)) continue;
        const Vec2 x2 = y.hnormalized();
        if (!inside(x2, cfg.image_size)) continue;
        pts.push_back(Correspondence{x1, x2, Label::inlier});
        placed = true;
      }
      ok = placed;
    }
    if (!ok) continue;
    if (cfg.noise_sigma > 0.0) {
      for (auto& c : pts) c.x2 += jitter(rng, cfg.noise_sigma);
    }
    return finish(rng, cfg, std::move(pts), ModelMatrix(hm, ModelKind::homography), meta);
  }
  throw GenerationFailed("synth_homography: no acceptable homography in " +
                         std::to_string(cfg.max_attempts) + " attempts");
}

SynthDataset synth_fundamental(const SynthConfig& cfg) {
  cfg.validate();
  if (cfg.problem != Problem::fundamental) throw InvalidInput("synth_fundamental: wrong problem");
  Rng rng(cfg.seed);
  SynthMetadata meta;

  for (int attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
    meta.attempts = attempt;
    const Mat3 k = intrinsics(rng, cfg.image_size);
    const Mat3 kinv = k.inverse();
    const Mat3 r = random_rotation(rng, 0.15);
    Vec3 dir = random_direction(rng);
    dir.z() *= 0.3;
    const Vec3 t = dir.normalized() * rng.uniform(0.8, 2.0);
    const Vec3 plane_n = random_rotation(rng, 0.6) * Vec3::UnitZ();
    const double plane_d = rng.uniform(4.0, 8.0);

    std::vector<Correspondence> pts;
    pts.reserve(cfg.n_inliers + cfg.n_outliers);
    double depth_sum = 0.0;
    bool ok = true;
    for (std::size_t i = 0; i < cfg.n_inliers && ok; ++i) {
      bool placed = false;
      for (int tries = 0; tries < kPointTries && !placed; ++tries) {
        const Vec2 x1 = uniform_pixel(rng, cfg.image_size);
        const Vec3 ray = kinv * x1.homogeneous();
        double depth = 0.0;
        if (cfg.degenerate_planar) {
          const double s = plane_n.dot(ray);
          if (!(s > 1e-6)) continue;
          depth = plane_d / s;
          if (depth > 20.0) continue;
        } else {
          depth = rng.uniform(4.0, 8.0);
        }
        const Vec3 x = depth * ray;
        const Vec3 x_cam2 = r * x + t;
        if (!(x_cam2.z() > 0.5)) continue;
        const Vec2 x2 = (k * x_cam2).hnormalized();
        if (!inside(x2, cfg.image_size)) continue;
        pts.push_back(Correspondence{x1, x2, Label::inlier});
        depth_sum += x.z();
        placed = true;
      }
      ok = placed;
    }
    if (!ok) continue;
    meta.baseline_ratio = t.norm() / (depth_sum / static_cast<double>(cfg.n_inliers));
    if (!(meta.baseline_ratio >= meta.min_baseline_ratio)) continue;

    const Mat3 f = kinv.transpose() * skew(t) * r * kinv;
    if (cfg.noise_sigma > 0.0) {
      for (auto& c : pts) {
        c.x1 += jitter(rng, cfg.noise_sigma);
        c.x2 += jitter(rng, cfg.noise_sigma);
      }
    }
    return finish(rng, cfg, std::move(pts),
                  solvers::rank2_project(ModelMatrix(f, ModelKind::fundamental)), meta);
  }
  throw GenerationFailed("synth_fundamental: no acceptable scene in " +
                         std::to_string(cfg.max_attempts) + " attempts");
}

SynthDataset generate(const SynthConfig& cfg) {
  return cfg.problem == Problem::fundamental ? synth_fundamental(cfg) : synth_homography(cfg);
}

}  // namespace robustfit::synth
