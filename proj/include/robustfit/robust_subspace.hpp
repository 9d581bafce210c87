#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "robustfit/geometry.hpp"

namespace robustfit::subspace {

struct IrlsConfig {
  int tau_max = 100;           ///< iteration cap
  double tol = 1e-5;           ///< stop once the objective drops by less than this
  double weight_floor = 1e-9;  ///< residual floor in the reweighting denominator

  void validate() const;
};

/// Columns of `columns` grouped into consecutive blocks; block i spans
/// columns [offsets[i], offsets[i + 1]).
struct BlockMatrix {
  Eigen::MatrixXd columns;
  std::vector<Eigen::Index> offsets{0};

  static BlockMatrix from_columns(const Eigen::MatrixXd& y);
  static BlockMatrix from_blocks(std::span<const EmbeddingBlock> blocks);
  static BlockMatrix from_blocks(std::span<const Eigen::MatrixXd> blocks);

  Eigen::Index dim() const { return columns.rows(); }
  std::size_t size() const { return offsets.size() - 1; }
  auto block(std::size_t i) const {
    return columns.middleCols(offsets[i], offsets[i + 1] - offsets[i]);
  }
};

struct IrlsResult {
  Eigen::MatrixXd basis;          ///< d x c, orthonormal columns
  std::vector<double> objective;  ///< objective[k] is evaluated at iterate k (0 = start)
  int iterations = 0;
  bool converged = false;

  Eigen::VectorXd normal() const { return basis.col(0); }
};

/// Residual of block i against the basis: ||U^T B_i||_F.
Eigen::VectorXd block_residuals(const BlockMatrix& blocks, const Eigen::MatrixXd& basis);

/// sum_i h(r_i) with h(r) = r^2 / (2 delta) + delta / 2 for r <= delta, r otherwise.
double smoothed_l1_objective(const BlockMatrix& blocks, const Eigen::MatrixXd& basis,
                             double delta);

/// sum_i rho(r_i) with rho(r) = r^2 / 2 for r <= c, c r - c^2 / 2 otherwise.
double huber_objective(const BlockMatrix& blocks, const Eigen::MatrixXd& basis, double c);

/// Hyperplane normal minimizing sum_i |b^T y_i| over unit b.
IrlsResult dpcp_irls(const Eigen::MatrixXd& y, const IrlsConfig& cfg = {});

/// Unit b minimizing sum_i ||B_i^T b||_2 for grouped constraints.
IrlsResult dpcp_irls_group(const BlockMatrix& blocks, const IrlsConfig& cfg = {});

/// Orthonormal d x codim basis minimizing sum_i ||B^T y_i||_2, updated jointly.
IrlsResult dpcp_irls_basis(const Eigen::MatrixXd& y, int codim = 3, const IrlsConfig& cfg = {});

/// Same iteration with Huber weights min(1, c / r_i).
IrlsResult huber_irls(const BlockMatrix& blocks, double c_huber, const IrlsConfig& cfg = {});
IrlsResult huber_irls(const Eigen::MatrixXd& y, double c_huber, const IrlsConfig& cfg = {});

/// w_i = ||B^T y_i||_2.
Eigen::VectorXd nullspace_weights(const Eigen::MatrixXd& basis, const Eigen::MatrixXd& y);

/// Top-k eigenvectors (descending) of sum_i w_i^2 y_i y_i^T.
Eigen::MatrixXd weighted_principal_subspace(const Eigen::MatrixXd& y, const Eigen::VectorXd& w,
                                            int k = 5);

}  // namespace robustfit::subspace
