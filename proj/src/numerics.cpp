#include "robustfit/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <numbers>

#include <Eigen/SVD>

#include "robustfit/error.hpp"

namespace robustfit::numerics {

namespace {

constexpr int kMaxJacobiSweeps = 64;

void validate_symmetric(const Eigen::MatrixXd& s) {
  if (s.rows() == 0 || s.rows() != s.cols()) {
    throw InvalidInput("symmetric_eigen: matrix must be square and non-empty");
  }
  if (!s.allFinite()) {
    throw InvalidInput("symmetric_eigen: non-finite entry");
  }
  const double scale = s.cwiseAbs().maxCoeff();
  const double asym = (s - s.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    throw InvalidInput("symmetric_eigen: matrix is not symmetric");
  }
}

void validate_matrix(const Eigen::MatrixXd& a) {
  if (a.rows() == 0 || a.cols() == 0) {
    throw InvalidInput("empty matrix");
  }
  if (!a.allFinite()) {
    throw InvalidInput("non-finite matrix entry");
  }
}

double eval_cubic(double c3, double c2, double c1, double c0, double x) {
  return ((c3 * x + c2) * x + c1) * x + c0;
}

double polish_root(double c3, double c2, double c1, double c0, double x) {
  double fx = eval_cubic(c3, c2, c1, c0, x);
  for (int it = 0; it < 8 && fx != 0.0; ++it) {
    const double d = (3.0 * c3 * x + 2.0 * c2) * x + c1;
    if (d == 0.0 || !std::isfinite(d)) break;
    const double next = x - fx / d;
    const double fnext = eval_cubic(c3, c2, c1, c0, next);
    if (!(std::abs(fnext) < std::abs(fx))) break;
    x = next;
    fx = fnext;
  }
  return x;
}

std::vector<double> collapse_roots(std::vector<double> roots) {
  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  for (double r : roots) {
    if (!std::isfinite(r)) continue;
    if (!out.empty() &&
        std::abs(r - out.back()) <= 1e-6 * std::max(1.0, std::abs(r))) {
      continue;
    }
    out.push_back(r);
  }
  return out;
}

std::vector<double> solve_quadratic(double a, double b, double c) {
  if (a == 0.0) {
    if (b == 0.0) return {};
    return {-c / b};
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) {
    // Tangent roots can land on the wrong side of zero by rounding.
    if (disc > -1e-12 * (b * b + std::abs(4.0 * a * c))) return {-b / (2.0 * a)};
    return {};
  }
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (b + std::copysign(sq, b));
  if (q == 0.0) return {0.0};
  return collapse_roots({q / a, c / q});
}

}  // namespace

void apply_sign_convention(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > best_abs) {
      best_abs = std::abs(v[i]);
      best = i;
    }
  }
  if (v.size() > 0 && v[best] < 0.0) v = -v;
}

void apply_sign_convention_columns(Eigen::Ref<Eigen::MatrixXd> m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    Eigen::VectorXd col = m.col(j);
    apply_sign_convention(col);
    m.col(j) = col;
  }
}

SymmetricEigen symmetric_eigen(const Eigen::MatrixXd& s) {
  validate_symmetric(s);
  const Eigen::Index n = s.rows();
  Eigen::MatrixXd a = 0.5 * (s + s.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);

  for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    const double total = a.squaredNorm();
    if (off == 0.0 || off <= 1e-34 * total) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = std::copysign(1.0, theta) /
              (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return a(i, i) < a(j, j);
  });

  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    out.values[j] = a(order[static_cast<size_t>(j)], order[static_cast<size_t>(j)]);
    out.vectors.col(j) = v.col(order[static_cast<size_t>(j)]);
  }
  apply_sign_convention_columns(out.vectors);
  return out;
}

Eigen::MatrixXd least_eigvecs(const Eigen::MatrixXd& s, int k) {
  if (k < 1 || k > s.rows()) {
    throw InvalidInput("least_eigvecs: k out of range");
  }
  return symmetric_eigen(s).vectors.leftCols(k);
}

Eigen::MatrixXd greatest_eigvecs(const Eigen::MatrixXd& s, int k) {
  if (k < 1 || k > s.rows()) {
    throw InvalidInput("greatest_eigvecs: k out of range");
  }
  const SymmetricEigen eig = symmetric_eigen(s);
  return eig.vectors.rightCols(k).rowwise().reverse();
}

Eigen::MatrixXd least_right_singular_vectors(const Eigen::MatrixXd& a, int k) {
  validate_matrix(a);
  const Eigen::Index d = a.cols();
  if (k < 1 || k > d) {
    throw InvalidInput("least_right_singular_vectors: k out of range");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  // Eigen orders singular values descending; the trailing columns of V
  // (including any implicit zeros when rows < cols) span the least directions.
  Eigen::MatrixXd out(d, k);
  for (int j = 0; j < k; ++j) out.col(j) = svd.matrixV().col(d - 1 - j);
  apply_sign_convention_columns(out);
  return out;
}

Eigen::VectorXd least_singular_vector(const Eigen::MatrixXd& a) {
  if (a.cols() < 2) {
    throw InvalidInput("least_singular_vector: need at least 2 columns");
  }
  return least_right_singular_vectors(a, 1).col(0);
}

Eigen::VectorXd singular_values(const Eigen::MatrixXd& a) {
  validate_matrix(a);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(a.cols());
  out.head(svd.singularValues().size()) = svd.singularValues();
  return out;
}

std::vector<double> solve_cubic_real(double c3, double c2, double c1, double c0) {
  if (!std::isfinite(c3) || !std::isfinite(c2) || !std::isfinite(c1) ||
      !std::isfinite(c0)) {
    throw InvalidInput("solve_cubic_real: non-finite coefficient");
  }
  if (c3 == 0.0 && c2 == 0.0 && c1 == 0.0 && c0 == 0.0) {
    throw InvalidInput("solve_cubic_real: all coefficients are zero");
  }
  if (c3 == 0.0) {
    std::vector<double> roots = solve_quadratic(c2, c1, c0);
    for (double& r : roots) r = polish_root(0.0, c2, c1, c0, r);
    return collapse_roots(std::move(roots));
  }

  const double a = c2 / c3;
  const double b = c1 / c3;
  const double c = c0 / c3;
  const double shift = a / 3.0;
  // Depressed form t^3 + p t + q with x = t - a/3.
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double half_q = 0.5 * q;
  const double third_p = p / 3.0;
  const double disc = half_q * half_q + third_p * third_p * third_p;
  const double disc_scale = half_q * half_q + std::abs(third_p * third_p * third_p);

  std::vector<double> candidates;
  if (p == 0.0 && q == 0.0) {
    candidates.push_back(-shift);
  } else {
    if (disc >= -1e-12 * disc_scale) {
      const double sq = std::sqrt(std::max(disc, 0.0));
      const double big = -std::copysign(std::cbrt(std::abs(half_q) + sq), q);
      const double small = big != 0.0 ? -third_p / big : 0.0;
      candidates.push_back(big + small - shift);
      if (std::abs(disc) <= 1e-10 * disc_scale) {
        // Near a repeated root: the tangent pair is -(big)/2 in the limit.
        candidates.push_back(-0.5 * (big + small) - shift);
      }
    }
    if (disc <= 1e-12 * disc_scale && p < 0.0) {
      const double r = 2.0 * std::sqrt(-third_p);
      const double arg = std::clamp(3.0 * q / (2.0 * p) * std::sqrt(-3.0 / p), -1.0, 1.0);
      const double phi = std::acos(arg) / 3.0;
      for (int k = 0; k < 3; ++k) {
        candidates.push_back(r * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0) - shift);
      }
    }
  }

  const double cmax = std::max({std::abs(c3), std::abs(c2), std::abs(c1), std::abs(c0)});
  std::vector<double> roots;
  for (double x : candidates) {
    x = polish_root(c3, c2, c1, c0, x);
    const double bound =
        1e-9 * std::max(1.0, std::abs(x) * std::abs(x) * std::abs(x) * cmax);
    if (std::abs(eval_cubic(c3, c2, c1, c0, x)) <= bound) roots.push_back(x);
  }
  if (roots.empty() && !candidates.empty()) {
    // Keep the best-effort candidate rather than report no root of a cubic.
    double best = polish_root(c3, c2, c1, c0, candidates.front());
    for (double x : candidates) {
      x = polish_root(c3, c2, c1, c0, x);
      if (std::abs(eval_cubic(c3, c2, c1, c0, x)) <
          std::abs(eval_cubic(c3, c2, c1, c0, best))) {
        best = x;
      }
    }
    roots.push_back(best);
  }
  return collapse_roots(std::move(roots));
}

}  // namespace robustfit::numerics
