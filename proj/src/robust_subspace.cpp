#include "robustfit/robust_subspace.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "robustfit/error.hpp"
#include "robustfit/numerics.hpp"

namespace robustfit::subspace {

namespace {

using WeightFn = std::function<double(double)>;
using ObjectiveFn = std::function<double(const BlockMatrix&, const Eigen::MatrixXd&)>;

void check_finite(const BlockMatrix& blocks) {
  if (!blocks.columns.allFinite()) throw InvalidInput("IRLS: non-finite data");
}

// Majorize-minimize loop shared by every solver: with per-block weights from
// the current residuals, the next basis spans the least eigenvectors of the
// weighted scatter matrix.
IrlsResult run_irls(const BlockMatrix& blocks, int codim, const IrlsConfig& cfg,
                    const WeightFn& weight, const ObjectiveFn& objective) {
  IrlsResult out;
  out.basis = numerics::least_right_singular_vectors(blocks.columns.transpose(), codim);
  out.objective.push_back(objective(blocks, out.basis));

  Eigen::VectorXd col_weights(blocks.columns.cols());
  for (int it = 1; it <= cfg.tau_max; ++it) {
    const Eigen::VectorXd r = block_residuals(blocks, out.basis);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      const double w = weight(r[static_cast<Eigen::Index>(i)]);
      for (Eigen::Index j = blocks.offsets[i]; j < blocks.offsets[i + 1]; ++j) col_weights[j] = w;
    }
    const Eigen::MatrixXd scatter =
        blocks.columns * col_weights.asDiagonal() * blocks.columns.transpose();
    const Eigen::MatrixXd sym = 0.5 * (scatter + scatter.transpose());
    out.basis = numerics::least_eigvecs(sym, codim);
    out.iterations = it;
    const double prev = out.objective.back();
    out.objective.push_back(objective(blocks, out.basis));
    if (prev - out.objective.back() < cfg.tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

void require_columns(const BlockMatrix& blocks, Eigen::Index needed, const char* who) {
  if (blocks.columns.cols() < needed || blocks.size() == 0) {
    throw InsufficientData(std::string(who) + ": not enough data for the ambient dimension");
  }
}

}  // namespace

void IrlsConfig::validate() const {
  if (tau_max < 1) throw InvalidInput("IrlsConfig: tau_max must be >= 1");
  if (!(tol > 0.0)) throw InvalidInput("IrlsConfig: tol must be > 0");
  if (!(weight_floor > 0.0)) throw InvalidInput("IrlsConfig: weight_floor must be > 0");
}

BlockMatrix BlockMatrix::from_columns(const Eigen::MatrixXd& y) {
  BlockMatrix out;
  out.columns = y;
  out.offsets.resize(static_cast<std::size_t>(y.cols()) + 1);
  for (Eigen::Index i = 0; i <= y.cols(); ++i) out.offsets[static_cast<std::size_t>(i)] = i;
  return out;
}

BlockMatrix BlockMatrix::from_blocks(std::span<const EmbeddingBlock> blocks) {
  BlockMatrix out;
  Eigen::Index total = 0;
  for (const auto& b : blocks) total += b.cols();
  out.columns.resize(9, total);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    out.columns.middleCols(at, b.cols()) = b;
    at += b.cols();
    out.offsets.push_back(at);
  }
  return out;
}

BlockMatrix BlockMatrix::from_blocks(std::span<const Eigen::MatrixXd> blocks) {
  BlockMatrix out;
  if (blocks.empty()) return out;
  const Eigen::Index d = blocks.front().rows();
  Eigen::Index total = 0;
  for (const auto& b : blocks) {
    if (b.rows() != d) throw InvalidInput("BlockMatrix: blocks differ in dimension");
    total += b.cols();
  }
  out.columns.resize(d, total);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    out.columns.middleCols(at, b.cols()) = b;
    at += b.cols();
    out.offsets.push_back(at);
  }
  return out;
}

Eigen::VectorXd block_residuals(const BlockMatrix& blocks, const Eigen::MatrixXd& basis) {
  const Eigen::MatrixXd proj = basis.transpose() * blocks.columns;
  Eigen::VectorXd r(static_cast<Eigen::Index>(blocks.size()));
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    r[static_cast<Eigen::Index>(i)] =
        proj.middleCols(blocks.offsets[i], blocks.offsets[i + 1] - blocks.offsets[i]).norm();
  }
  return r;
}

double smoothed_l1_objective(const BlockMatrix& blocks, const Eigen::MatrixXd& basis,
                             double delta) {
  const Eigen::VectorXd r = block_residuals(blocks, basis);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    sum += r[i] <= delta ? r[i] * r[i] / (2.0 * delta) + 0.5 * delta : r[i];
  }
  return sum;
}

double huber_objective(const BlockMatrix& blocks, const Eigen::MatrixXd& basis, double c) {
  const Eigen::VectorXd r = block_residuals(blocks, basis);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    sum += r[i] <= c ? 0.5 * r[i] * r[i] : c * r[i] - 0.5 * c * c;
  }
  return sum;
}

IrlsResult dpcp_irls_group(const BlockMatrix& blocks, const IrlsConfig& cfg) {
  cfg.validate();
  check_finite(blocks);
  require_columns(blocks, blocks.dim() - 1, "dpcp_irls");
  const double floor = cfg.weight_floor;
  return run_irls(
      blocks, 1, cfg, [floor](double r) { return 1.0 / std::max(r, floor); },
      [floor](const BlockMatrix& b, const Eigen::MatrixXd& u) {
        return smoothed_l1_objective(b, u, floor);
      });
}

IrlsResult dpcp_irls(const Eigen::MatrixXd& y, const IrlsConfig& cfg) {
  return dpcp_irls_group(BlockMatrix::from_columns(y), cfg);
}

IrlsResult dpcp_irls_basis(const Eigen::MatrixXd& y, int codim, const IrlsConfig& cfg) {
  cfg.validate();
  if (codim < 1 || codim >= y.rows()) {
    throw InvalidInput("dpcp_irls_basis: codimension out of range");
  }
  const BlockMatrix blocks = BlockMatrix::from_columns(y);
  check_finite(blocks);
  require_columns(blocks, y.rows() - codim, "dpcp_irls_basis");
  const double floor = cfg.weight_floor;
  return run_irls(
      blocks, codim, cfg, [floor](double r) { return 1.0 / std::max(r, floor); },
      [floor](const BlockMatrix& b, const Eigen::MatrixXd& u) {
        return smoothed_l1_objective(b, u, floor);
      });
}

IrlsResult huber_irls(const BlockMatrix& blocks, double c_huber, const IrlsConfig& cfg) {
  cfg.validate();
  if (!(c_huber > 0.0)) throw InvalidInput("huber_irls: c_huber must be > 0");
  check_finite(blocks);
  require_columns(blocks, blocks.dim() - 1, "huber_irls");
  return run_irls(
      blocks, 1, cfg, [c_huber](double r) { return r <= c_huber ? 1.0 : c_huber / r; },
      [c_huber](const BlockMatrix& b, const Eigen::MatrixXd& u) {
        return huber_objective(b, u, c_huber);
      });
}

IrlsResult huber_irls(const Eigen::MatrixXd& y, double c_huber, const IrlsConfig& cfg) {
  return huber_irls(BlockMatrix::from_columns(y), c_huber, cfg);
}

Eigen::VectorXd nullspace_weights(const Eigen::MatrixXd& basis, const Eigen::MatrixXd& y) {
  if (basis.rows() != y.rows()) {
    throw InvalidInput("nullspace_weights: dimension mismatch");
  }
  return (basis.transpose() * y).colwise().norm().transpose();
}

Eigen::MatrixXd weighted_principal_subspace(const Eigen::MatrixXd& y, const Eigen::VectorXd& w,
                                            int k) {
  if (w.size() != y.cols()) {
    throw InvalidInput("weighted_principal_subspace: one weight per column required");
  }
  if (y.cols() < k) {
    throw InsufficientData("weighted_principal_subspace: fewer columns than k");
  }
  if (k < 1 || k > y.rows()) {
    throw InvalidInput("weighted_principal_subspace: k out of range");
  }
  const Eigen::MatrixXd scaled = y * w.asDiagonal();
  const Eigen::MatrixXd scatter = scaled * scaled.transpose();
  return numerics::greatest_eigvecs(0.5 * (scatter + scatter.transpose()), k);
}

}  // namespace robustfit::subspace
