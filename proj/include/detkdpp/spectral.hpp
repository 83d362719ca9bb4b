#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "kernel.hpp"

namespace detkdpp {

// Eigenpairs of a symmetric matrix, eigenvalues non-increasing, eigenvectors
// as orthonormal columns with the largest-magnitude entry of each positive.
struct EigenSystem {
  Vector values;
  Matrix vectors;
  std::string source;

  Index size() const { return values.size(); }
};

namespace detail {

// Flips v so its largest-magnitude entry (first one on ties) is positive.
inline void fix_sign(Eigen::Ref<Vector> v) {
  Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v(arg) < 0.0) v = -v;
}

}  // namespace detail

// Eigenvalues in (-1e-10, 0) are clamped to zero. Ordering is a stable sort on
// (-lambda, solver index), so ties keep the solver's order.
inline EigenSystem sym_eig(const Matrix& a, std::string source = "matrix") {
  if (a.rows() != a.cols()) throw Error(ErrorCode::InvalidInput, "sym_eig needs a square matrix");
  const Index n = a.rows();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure,
                "symmetric QR did not converge within " + std::to_string(30 * n) + " iterations on " + source);
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  const Vector& lam = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) { return lam(x) > lam(y); });

  EigenSystem es;
  es.source = std::move(source);
  es.values.resize(n);
  es.vectors.resize(n, n);
  for (Index j = 0; j < n; ++j) {
    const Index src = order[static_cast<std::size_t>(j)];
    double v = lam(src);
    if (v < 0.0 && v > -1e-10) v = 0.0;
    es.values(j) = v;
    es.vectors.col(j) = solver.eigenvectors().col(src);
    detail::fix_sign(es.vectors.col(j));
  }
  return es;
}

inline EigenSystem sym_eig(const KernelMatrix& k) { return sym_eig(k.values(), to_string(k.kind()) + " kernel"); }

enum class ProjectorKind { Sharp, Ridge };

// Marginal kernel driving greedy selection: either the rank-k projector onto
// the top eigenvectors, or the ridge-smoothed K (K + n gamma I)^-1.
struct ProjectorKernel {
  Matrix matrix;
  ProjectorKind kind = ProjectorKind::Sharp;
  Index rank = 0;      // sharp only
  double gamma = 0.0;  // ridge only
  // Sharp only: the cut lambda_k - lambda_{k+1} is below 1e-10 * lambda_1, so
  // the top-k eigenspace is not unique.
  bool degenerate_cut = false;

  Index size() const { return matrix.rows(); }
};

inline ProjectorKernel sharp_projector(const EigenSystem& es, Index k) {
  const Index n = es.size();
  if (k > n) {
    throw Error(ErrorCode::RankTooLarge, "rank " + std::to_string(k) + " exceeds matrix size " + std::to_string(n));
  }
  if (k < 1) throw Error(ErrorCode::InvalidInput, "projector rank must be at least 1");
  ProjectorKernel p;
  p.kind = ProjectorKind::Sharp;
  p.rank = k;
  const auto top = es.vectors.leftCols(k);
  p.matrix = top * top.transpose();
  if (k < n) {
    const double gap = es.values(k - 1) - es.values(k);
    p.degenerate_cut = gap < 1e-10 * std::abs(es.values(0));
  }
  return p;
}

// P = V diag(lambda / (lambda + n gamma)) V^T, n = es.size().
// The kernel must be strictly positive definite.
inline ProjectorKernel ridge_projector(const EigenSystem& es, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorCode::InvalidInput, "gamma must be positive, got " + std::to_string(gamma));
  }
  const Index n = es.size();
  const double lambda_min = es.values(n - 1);
  if (!(lambda_min > 0.0)) {
    throw Error(ErrorCode::SingularKernel,
                "ridge projector needs K > 0, smallest eigenvalue is " + std::to_string(lambda_min));
  }
  const double ngamma = static_cast<double>(n) * gamma;
  const Vector filter = es.values.array() / (es.values.array() + ngamma);
  ProjectorKernel p;
  p.kind = ProjectorKind::Ridge;
  p.gamma = gamma;
  p.matrix = es.vectors * filter.asDiagonal() * es.vectors.transpose();
  p.matrix = (0.5 * (p.matrix + p.matrix.transpose())).eval();
  return p;
}

// Rank-k or ridge leverage scores: the diagonal of the projector.
inline Vector leverage_scores(const ProjectorKernel& p) { return p.matrix.diagonal(); }

inline double max_norm(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

// Largest singular value by power iteration on A^T A from the normalized
// all-ones vector. Stops when the relative change of the Rayleigh quotient
// drops below 1e-10; gives up after 10 000 iterations.
inline double operator_norm(const Matrix& a) {
  constexpr int max_iterations = 10000;
  constexpr double tolerance = 1e-10;
  if (a.size() == 0 || max_norm(a) == 0.0) return 0.0;
  if (!a.allFinite()) throw Error(ErrorCode::InvalidInput, "operator_norm of non-finite matrix");

  Vector x = Vector::Ones(a.cols()).normalized();
  Vector ax = a * x;
  if (ax.norm() <= 1e-300) {
    // all-ones is in the null space; restart from a fixed non-symmetric probe
    for (Index i = 0; i < x.size(); ++i) x(i) = 1.0 + static_cast<double>(i % 7) / 7.0 + 1.0 / static_cast<double>(i + 2);
    x.normalize();
    ax = a * x;
  }
  double rq = ax.squaredNorm();
  for (int it = 0; it < max_iterations; ++it) {
    Vector y = a.transpose() * ax;
    const double ny = y.norm();
    if (ny == 0.0) return std::sqrt(rq);
    x = y / ny;
    ax = a * x;
    const double next = ax.squaredNorm();
    if (std::abs(next - rq) <= tolerance * next) return std::sqrt(next);
    rq = next;
  }
  throw Error(ErrorCode::ConvergenceFailure,
              "power iteration did not converge after " + std::to_string(max_iterations) + " iterations");
}

// Kernel PCA coordinates: row i, column j holds sqrt(lambda_j) * V_ij for the
// top-d eigenpairs of the double-centered Gram matrix (or of K itself when
// center is false).
inline Matrix kpca_project(const KernelMatrix& k, Index d, bool center = true) {
  const Index n = k.size();
  if (d > n) throw Error(ErrorCode::RankTooLarge, "KPCA dimension " + std::to_string(d) + " exceeds n = " + std::to_string(n));
  if (d < 1) throw Error(ErrorCode::InvalidInput, "KPCA dimension must be at least 1");
  Matrix g = k.values();
  if (center) {
    const Vector row_mean = g.rowwise().mean();
    const double grand = row_mean.mean();
    g.colwise() -= row_mean;
    g.rowwise() -= row_mean.transpose();
    g.array() += grand;
  }
  const EigenSystem es = sym_eig(g, "centered gram");
  // eigenvalues at round-off level relative to the largest are numerical zeros
  const double floor = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * std::abs(es.values(0));
  Matrix coords(n, d);
  for (Index j = 0; j < d; ++j) {
    const double lam = es.values(j) > floor ? es.values(j) : 0.0;
    coords.col(j) = std::sqrt(lam) * es.vectors.col(j);
  }
  return coords;
}

}  // namespace detkdpp
