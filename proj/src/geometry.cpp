#include "robustfit/geometry.hpp"

#include <cmath>
#include <limits>

#include <Eigen/LU>

#include "robustfit/error.hpp"
#include "robustfit/numerics.hpp"

namespace robustfit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec3 lift(const Vec2& p) { return p.homogeneous(); }

EmbeddingBlock unit_columns(const Eigen::Ref<const Eigen::Matrix<double, 9, Eigen::Dynamic>>& raw) {
  EmbeddingBlock block(9, raw.cols());
  for (Eigen::Index j = 0; j < raw.cols(); ++j) {
    const double n = raw.col(j).norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
      throw Error("embedding: zero or non-finite constraint vector");
    }
    block.col(j) = raw.col(j) / n;
  }
  return block;
}

}  // namespace

Vec9 vec(const Mat3& m) {
  Vec9 v;
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) v[i + 3 * j] = m(i, j);
  }
  return v;
}

Mat3 unvec(const Vec9& v) {
  Mat3 m;
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) m(i, j) = v[i + 3 * j];
  }
  return m;
}

ModelMatrix::ModelMatrix(const Mat3& m, ModelKind kind) : kind_(kind) {
  const double n = m.norm();
  if (!m.allFinite() || !(n > 0.0)) {
    throw InvalidInput("ModelMatrix: zero or non-finite matrix");
  }
  Vec9 v = robustfit::vec(m) / n;
  Eigen::VectorXd dyn = v;
  numerics::apply_sign_convention(dyn);
  m_ = unvec(dyn);
}

NormalizedPoints hartley_normalize(std::span<const Vec2> points) {
  if (points.size() < 2) {
    throw DegenerateInput("hartley_normalize: need at least two points");
  }
  Vec2 centroid = Vec2::Zero();
  for (const Vec2& p : points) {
    if (!p.allFinite()) throw InvalidInput("hartley_normalize: non-finite point");
    centroid += p;
  }
  centroid /= static_cast<double>(points.size());
  double mean_dist = 0.0;
  for (const Vec2& p : points) mean_dist += (p - centroid).norm();
  mean_dist /= static_cast<double>(points.size());
  if (!(mean_dist > 1e-12 * std::max(1.0, centroid.cwiseAbs().maxCoeff()))) {
    throw DegenerateInput("hartley_normalize: all points coincide");
  }

  const double s = std::sqrt(2.0) / mean_dist;
  NormalizedPoints out;
  out.transform.t << s, 0.0, -s * centroid.x(),
                     0.0, s, -s * centroid.y(),
                     0.0, 0.0, 1.0;
  out.points.reserve(points.size());
  for (const Vec2& p : points) out.points.push_back(out.transform.apply(p));
  return out;
}

Vec2 dehomogenize(const Vec3& h) { return h.hnormalized(); }

Vec9 epipolar_vector(const Vec3& x1, const Vec3& x2) {
  Vec9 e;
  for (int j = 0; j < 3; ++j) e.segment<3>(3 * j) = x1[j] * x2;
  return e;
}

Eigen::Matrix<double, 9, 2> homographic_vectors(const Vec3& x1, const Vec3& x2) {
  // (H x1)_i has coefficient x1_j at vec index i + 3 j.
  // Row 1 of x2 x (H x1): v (H x1)_3 - w (H x1)_2.
  // Row 2:                w (H x1)_1 - u (H x1)_3.
  const double u = x2[0];
  const double v = x2[1];
  const double w = x2[2];
  Eigen::Matrix<double, 9, 2> psi = Eigen::Matrix<double, 9, 2>::Zero();
  for (int j = 0; j < 3; ++j) {
    psi(2 + 3 * j, 0) = v * x1[j];
    psi(1 + 3 * j, 0) = -w * x1[j];
    psi(0 + 3 * j, 1) = w * x1[j];
    psi(2 + 3 * j, 1) = -u * x1[j];
  }
  return psi;
}

EmbeddingBlock epipolar_embedding(const Vec3& x1, const Vec3& x2) {
  return unit_columns(epipolar_vector(x1, x2));
}

EmbeddingBlock homographic_embedding(const Vec3& x1, const Vec3& x2) {
  return unit_columns(homographic_vectors(x1, x2));
}

EmbeddingBlock epipolar_embedding(const Correspondence& c) {
  if (!c.x1.allFinite() || !c.x2.allFinite()) {
    throw InvalidInput("epipolar_embedding: non-finite coordinates");
  }
  return epipolar_embedding(lift(c.x1), lift(c.x2));
}

EmbeddingBlock homographic_embedding(const Correspondence& c) {
  if (!c.x1.allFinite() || !c.x2.allFinite()) {
    throw InvalidInput("homographic_embedding: non-finite coordinates");
  }
  return homographic_embedding(lift(c.x1), lift(c.x2));
}

double sampson_distance(const ModelMatrix& f, const Correspondence& c) {
  if (f.kind() != ModelKind::fundamental) {
    throw InvalidInput("sampson_distance: model is not a fundamental matrix");
  }
  const Mat3& fm = f.matrix();
  const Vec3 x1 = lift(c.x1);
  const Vec3 x2 = lift(c.x2);
  const Vec3 fx1 = fm * x1;
  const Vec3 ftx2 = fm.transpose() * x2;
  const double num = x2.dot(fx1);
  const double den = std::sqrt(fx1[0] * fx1[0] + fx1[1] * fx1[1] +
                               ftx2[0] * ftx2[0] + ftx2[1] * ftx2[1]);
  if (!(den >= 1e-15)) return kInf;
  return std::abs(num) / den;
}

namespace {

double one_way_transfer(const Mat3& h, const Vec2& from, const Vec2& to) {
  const Vec3 y = h * lift(from);
  if (!(std::abs(y[2]) >= 1e-12 * y.norm())) return kInf;
  return (dehomogenize(y) - to).norm();
}

}  // namespace

double transfer_error(const ModelMatrix& h, const Correspondence& c) {
  if (h.kind() != ModelKind::homography) {
    throw InvalidInput("transfer_error: model is not a homography");
  }
  return one_way_transfer(h.matrix(), c.x1, c.x2);
}

double symmetric_transfer_error(const ModelMatrix& h, const Correspondence& c) {
  if (h.kind() != ModelKind::homography) {
    throw InvalidInput("symmetric_transfer_error: model is not a homography");
  }
  Eigen::FullPivLU<Mat3> lu(h.matrix());
  if (!lu.isInvertible()) return kInf;
  const double fwd = one_way_transfer(h.matrix(), c.x1, c.x2);
  const double bwd = one_way_transfer(lu.inverse(), c.x2, c.x1);
  return 0.5 * (fwd + bwd);
}

double residual(const ModelMatrix& m, const Correspondence& c) {
  return m.kind() == ModelKind::fundamental ? sampson_distance(m, c)
                                            : transfer_error(m, c);
}

ModelMatrix denormalize_model(const NormalizationTransform& t1,
                              const NormalizationTransform& t2,
                              const ModelMatrix& normalized) {
  const double d1 = t1.t.determinant();
  const double d2 = t2.t.determinant();
  if (!(std::abs(d1) > 1e-300) || !(std::abs(d2) > 1e-300) ||
      !std::isfinite(d1) || !std::isfinite(d2)) {
    throw InvalidInput("denormalize_model: singular normalization transform");
  }
  const Mat3& mn = normalized.matrix();
  if (normalized.kind() == ModelKind::fundamental) {
    return ModelMatrix(t2.t.transpose() * mn * t1.t, ModelKind::fundamental);
  }
  return ModelMatrix(t2.t.inverse() * mn * t1.t, ModelKind::homography);
}

double model_angle(const Vec9& a, const Vec9& b) {
  // acos loses precision near 1; use the chordal form.
  const Vec9 ua = a.normalized();
  const Vec9 ub = b.normalized();
  const double chord = std::min((ua - ub).norm(), (ua + ub).norm());
  return 2.0 * std::asin(std::min(1.0, 0.5 * chord));
}

}  // namespace robustfit
