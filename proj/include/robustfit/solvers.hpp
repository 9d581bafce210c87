#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "robustfit/geometry.hpp"

namespace robustfit::solvers {

inline constexpr std::size_t kFundamentalSampleSize = 7;
inline constexpr std::size_t kHomographySampleSize = 4;

/// Singular values below this fraction of the largest count as zero when
/// sizing a constraint nullspace.
inline constexpr double kRankGap = 1e-8;

/// Number of singular values of `a` (zero-padded to a.cols()) that fall
/// below kRankGap times the largest one.
int nullspace_dimension(const Eigen::MatrixXd& a);

/// Seven-point fundamental matrix solver on homogeneous points (normalized
/// frames). Returns every real root of det(a F1 + (1 - a) F2) = 0.
/// Throws DegenerateSample when the 7x9 system does not have a 2-d nullspace.
std::vector<ModelMatrix> fundamental_7pt(std::span<const Vec3> x1, std::span<const Vec3> x2);

/// Four-point homography. Throws DegenerateSample when three points are
/// collinear in either view or the 8x9 system is rank deficient.
ModelMatrix homography_4pt(std::span<const Vec3> x1, std::span<const Vec3> x2);

/// Least singular vector of the stacked constraint matrix. Block i is scaled
/// by weights[i] (all 1 when `weights` is empty); zero-weight blocks are
/// dropped before stacking. Throws InsufficientData under 8 rows.
Vec9 dlt_refit(std::span<const EmbeddingBlock> blocks, std::span<const double> weights = {});

/// Nearest rank-2 matrix in Frobenius norm.
ModelMatrix rank2_project(const ModelMatrix& f);

}  // namespace robustfit::solvers
