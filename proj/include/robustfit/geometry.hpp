#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace robustfit {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat3 = Eigen::Matrix3d;

/// Per-correspondence linear constraints on vec(M), one unit column each.
/// Epipolar blocks have one column, homographic blocks two.
using EmbeddingBlock = Eigen::Matrix<double, 9, Eigen::Dynamic, Eigen::ColMajor, 9, 2>;

enum class Label { unknown, inlier, outlier };

/// A matched point pair in pixel coordinates.
struct Correspondence {
  Vec2 x1 = Vec2::Zero();
  Vec2 x2 = Vec2::Zero();
  Label label = Label::unknown;
};

enum class ModelKind { fundamental, homography };

/// vec() stacks columns: vec(M)[i + 3 j] = M(i, j). With this layout
/// x2^T F x1 = (x1 (x) x2)^T vec(F).
Vec9 vec(const Mat3& m);
Mat3 unvec(const Vec9& v);

/// 3x3 model scaled to unit Frobenius norm with the largest-magnitude entry
/// non-negative, so equal models compare equal bit for bit.
class ModelMatrix {
 public:
  ModelMatrix(const Mat3& m, ModelKind kind);

  static ModelMatrix from_vec(const Vec9& v, ModelKind kind) {
    return ModelMatrix(unvec(v), kind);
  }

  const Mat3& matrix() const { return m_; }
  ModelKind kind() const { return kind_; }
  Vec9 vec() const { return robustfit::vec(m_); }

 private:
  Mat3 m_;
  ModelKind kind_;
};

/// Similarity taking a point set to zero centroid and mean distance sqrt(2).
struct NormalizationTransform {
  Mat3 t = Mat3::Identity();

  Vec3 apply(const Vec2& p) const { return t * p.homogeneous(); }
};

struct NormalizedPoints {
  NormalizationTransform transform;
  std::vector<Vec3> points;
};

NormalizedPoints hartley_normalize(std::span<const Vec2> points);

Vec2 dehomogenize(const Vec3& h);

/// x1 (x) x2 without scaling.
Vec9 epipolar_vector(const Vec3& x1, const Vec3& x2);

/// Rows 1 and 2 of x2 x (H x1) written as linear forms in vec(H).
Eigen::Matrix<double, 9, 2> homographic_vectors(const Vec3& x1, const Vec3& x2);

EmbeddingBlock epipolar_embedding(const Vec3& x1, const Vec3& x2);
EmbeddingBlock homographic_embedding(const Vec3& x1, const Vec3& x2);
EmbeddingBlock epipolar_embedding(const Correspondence& c);
EmbeddingBlock homographic_embedding(const Correspondence& c);

/// First-order geometric distance to the epipolar constraint, in the units of
/// the correspondence. +inf when both points sit on their epipoles.
double sampson_distance(const ModelMatrix& f, const Correspondence& c);

/// |dehom(H x1) - x2|; +inf when H x1 maps to the line at infinity.
double transfer_error(const ModelMatrix& h, const Correspondence& c);

/// Mean of forward (view 1 -> 2) and backward (2 -> 1) transfer error.
double symmetric_transfer_error(const ModelMatrix& h, const Correspondence& c);

/// Residual of `c` under `m` according to its kind: Sampson for fundamental,
/// one-directional transfer for homography.
double residual(const ModelMatrix& m, const Correspondence& c);

/// Maps a model fitted between normalized frames back to pixel frames:
/// F = T2^T Fn T1, H = T2^-1 Hn T1.
ModelMatrix denormalize_model(const NormalizationTransform& t1,
                              const NormalizationTransform& t2,
                              const ModelMatrix& normalized);

/// Angle in radians between two models' vec forms, sign-agnostic.
double model_angle(const Vec9& a, const Vec9& b);

}  // namespace robustfit
