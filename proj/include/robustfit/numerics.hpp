#pragma once

#include <vector>

#include <Eigen/Core>

namespace robustfit::numerics {

/// Eigen-decomposition of a small symmetric matrix. Eigenvalues ascend and
/// column j of `vectors` belongs to `values[j]`.
struct SymmetricEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

/// Flips `v` so its largest-magnitude entry is non-negative (lowest index wins
/// ties). Every vector or basis column the library returns passes through this.
void apply_sign_convention(Eigen::Ref<Eigen::VectorXd> v);
void apply_sign_convention_columns(Eigen::Ref<Eigen::MatrixXd> m);

/// Cyclic Jacobi decomposition for dim <= 27. Throws InvalidInput when `s` is
/// not square, not symmetric to 1e-12 * max|s|, or has non-finite entries.
SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& s);

/// Eigenvectors of the k smallest eigenvalues, ascending.
Eigen::MatrixXd least_eigvecs(const Eigen::MatrixXd& s, int k);

/// Eigenvectors of the k largest eigenvalues, descending.
Eigen::MatrixXd greatest_eigvecs(const Eigen::MatrixXd& s, int k);

/// Unit v minimizing |A v|. Computed by SVD of A rather than via A^T A so
/// that exact nullspaces are resolved to working precision.
Eigen::VectorXd least_singular_vector(const Eigen::MatrixXd& a);

/// The k right singular vectors of least singular value, ascending. When A
/// has fewer rows than columns the implicit zero singular values count.
Eigen::MatrixXd least_right_singular_vectors(const Eigen::MatrixXd& a, int k);

/// All `a.cols()` singular values, descending, zero-padded when rows < cols.
Eigen::VectorXd singular_values(const Eigen::MatrixXd& a);

/// Real roots of c3 x^3 + c2 x^2 + c1 x + c0, ascending, repeated roots
/// collapsed. Falls back to the quadratic / linear formula when c3 == 0.
std::vector<double> solve_cubic_real(double c3, double c2, double c1, double c0);

}  // namespace robustfit::numerics
