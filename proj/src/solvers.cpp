#include "robustfit/solvers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "robustfit/error.hpp"
#include "robustfit/numerics.hpp"

namespace robustfit::solvers {

namespace {

bool collinear(const Vec3& a, const Vec3& b, const Vec3& c) {
  Mat3 m;
  m << a, b, c;
  const double scale = a.norm() * b.norm() * c.norm();
  return !(std::abs(m.determinant()) > 1e-9 * scale);
}

void check_sample(std::span<const Vec3> x1, std::span<const Vec3> x2, std::size_t n,
                  const char* who) {
  if (x1.size() != n || x2.size() != n) {
    throw InvalidInput(std::string(who) + ": wrong sample size");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!x1[i].allFinite() || !x2[i].allFinite()) {
      throw InvalidInput(std::string(who) + ": non-finite point");
    }
  }
}

}  // namespace

int nullspace_dimension(const Eigen::MatrixXd& a) {
  const Eigen::VectorXd sv = numerics::singular_values(a);
  const double top = sv.size() > 0 ? sv[0] : 0.0;
  int dim = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (!(sv[i] >= kRankGap * top) || top == 0.0) ++dim;
  }
  return dim;
}

std::vector<ModelMatrix> fundamental_7pt(std::span<const Vec3> x1, std::span<const Vec3> x2) {
  check_sample(x1, x2, kFundamentalSampleSize, "fundamental_7pt");
  Eigen::MatrixXd a(kFundamentalSampleSize, 9);
  for (std::size_t i = 0; i < kFundamentalSampleSize; ++i) {
    a.row(static_cast<Eigen::Index>(i)) = epipolar_embedding(x1[i], x2[i]).col(0).transpose();
  }
  if (nullspace_dimension(a) != 2) {
    throw DegenerateSample("fundamental_7pt: constraint nullspace is not 2-dimensional");
  }
  const Eigen::MatrixXd null = numerics::least_right_singular_vectors(a, 2);
  const Mat3 f1 = unvec(null.col(0));
  const Mat3 f2 = unvec(null.col(1));

  // det(a F1 + (1 - a) F2) is cubic in a; recover its coefficients from four
  // samples of the determinant.
  auto det_at = [&](double t) { return (t * f1 + (1.0 - t) * f2).determinant(); };
  const double d0 = det_at(0.0);
  const double d1 = det_at(1.0);
  const double dm1 = det_at(-1.0);
  const double d2 = det_at(2.0);
  const double c0 = d0;
  const double c2 = 0.5 * (d1 + dm1) - c0;
  const double odd = 0.5 * (d1 - dm1);  // c3 + c1
  const double c3 = (d2 - 4.0 * c2 - c0 - 2.0 * odd) / 6.0;
  const double c1 = odd - c3;
  if (c3 == 0.0 && c2 == 0.0 && c1 == 0.0 && c0 == 0.0) {
    throw DegenerateSample("fundamental_7pt: every matrix in the pencil is singular");
  }

  std::vector<ModelMatrix> out;
  for (double t : numerics::solve_cubic_real(c3, c2, c1, c0)) {
    const Mat3 f = t * f1 + (1.0 - t) * f2;
    if (!(f.norm() > 0.0)) continue;
    out.emplace_back(f, ModelKind::fundamental);
  }
  if (out.empty()) {
    throw DegenerateSample("fundamental_7pt: no real solution");
  }
  return out;
}

ModelMatrix homography_4pt(std::span<const Vec3> x1, std::span<const Vec3> x2) {
  check_sample(x1, x2, kHomographySampleSize, "homography_4pt");
  for (std::size_t skip = 0; skip < 4; ++skip) {
    std::array<std::size_t, 3> idx{};
    std::size_t k = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      if (i != skip) idx[k++] = i;
    }
    if (collinear(x1[idx[0]], x1[idx[1]], x1[idx[2]]) ||
        collinear(x2[idx[0]], x2[idx[1]], x2[idx[2]])) {
      throw DegenerateSample("homography_4pt: three collinear points");
    }
  }
  Eigen::MatrixXd a(8, 9);
  for (std::size_t i = 0; i < kHomographySampleSize; ++i) {
    const EmbeddingBlock b = homographic_embedding(x1[i], x2[i]);
    a.middleRows(static_cast<Eigen::Index>(2 * i), 2) = b.transpose();
  }
  if (nullspace_dimension(a) != 1) {
    throw DegenerateSample("homography_4pt: constraint nullspace is not 1-dimensional");
  }
  return ModelMatrix::from_vec(numerics::least_singular_vector(a), ModelKind::homography);
}

Vec9 dlt_refit(std::span<const EmbeddingBlock> blocks, std::span<const double> weights) {
  if (!weights.empty() && weights.size() != blocks.size()) {
    throw InvalidInput("dlt_refit: weights and blocks differ in length");
  }
  Eigen::Index rows = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw InvalidInput("dlt_refit: weights must be finite and non-negative");
    }
    if (w > 0.0) rows += blocks[i].cols();
  }
  if (rows < 8) {
    throw InsufficientData("dlt_refit: fewer than 8 constraint rows");
  }
  Eigen::MatrixXd a(rows, 9);
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (w == 0.0) continue;
    a.middleRows(r, blocks[i].cols()) = w * blocks[i].transpose();
    r += blocks[i].cols();
  }
  return numerics::least_singular_vector(a);
}

ModelMatrix rank2_project(const ModelMatrix& f) {
  if (f.kind() != ModelKind::fundamental) {
    throw InvalidInput("rank2_project: model is not a fundamental matrix");
  }
  Eigen::JacobiSVD<Mat3> svd(f.matrix(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Vector3d s = svd.singularValues();
  s[2] = 0.0;
  return ModelMatrix(svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose(),
                     ModelKind::fundamental);
}

}  // namespace robustfit::solvers
