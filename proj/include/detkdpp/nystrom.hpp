#pragma once

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <string>

#include "landmarks.hpp"
#include "spectral.hpp"

namespace detkdpp {

inline constexpr double kDefaultNystromEpsilon = 1e-12;

namespace detail {

inline void check_landmarks(Index n, const LandmarkSet& c) {
  if (c.empty()) throw Error(ErrorCode::InvalidInput, "landmark set is empty");
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (Index i : c.indices) {
    if (i < 0 || i >= n) throw Error(ErrorCode::InvalidInput, "landmark index " + std::to_string(i) + " out of range");
    if (seen[static_cast<std::size_t>(i)]) {
      throw Error(ErrorCode::InvalidInput, "duplicate landmark index " + std::to_string(i));
    }
    seen[static_cast<std::size_t>(i)] = true;
  }
}

inline Matrix principal_submatrix(const Matrix& k, const std::vector<Index>& idx) {
  const auto c = static_cast<Index>(idx.size());
  Matrix out(c, c);
  for (Index j = 0; j < c; ++j)
    for (Index i = 0; i < c; ++i) out(i, j) = k(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  return out;
}

}  // namespace detail

// Factorized K_hat = K_C (K_CC + eps I)^-1 K_C^T. Nothing n x n is stored
// until materialize() is called.
class NystromApprox {
 public:
  NystromApprox(const KernelMatrix& k, LandmarkSet landmarks, double epsilon = kDefaultNystromEpsilon)
      : landmarks_(std::move(landmarks)), epsilon_(epsilon) {
    if (!(epsilon >= 0.0)) throw Error(ErrorCode::InvalidInput, "epsilon must be nonnegative");
    detail::check_landmarks(k.size(), landmarks_);
    const auto c = static_cast<Index>(landmarks_.size());
    cols_.resize(k.size(), c);
    for (Index j = 0; j < c; ++j) cols_.col(j) = k.values().col(landmarks_.indices[static_cast<std::size_t>(j)]);
    Matrix block = detail::principal_submatrix(k.values(), landmarks_.indices);
    block.diagonal().array() += epsilon_;
    factor_.compute(block);
    const Vector d = factor_.vectorD().cwiseAbs();
    if (factor_.info() != Eigen::Success || !(d.minCoeff() > 1e-13 * std::max(d.maxCoeff(), 1e-300))) {
      if (epsilon_ == 0.0) {
        throw Error(ErrorCode::SingularBlock, "landmark block is numerically singular (|D| min " +
                                                  std::to_string(d.minCoeff()) + ")");
      }
    }
  }

  const LandmarkSet& landmarks() const { return landmarks_; }
  double epsilon() const { return epsilon_; }
  Index size() const { return cols_.rows(); }
  // K_C, the n x |C| block of selected columns.
  const Matrix& columns() const { return cols_; }

  Vector apply(const Vector& x) const { return cols_ * factor_.solve(cols_.transpose() * x); }

  Matrix materialize() const {
    const Matrix w = factor_.solve(cols_.transpose());
    Matrix out = cols_ * w;
    return 0.5 * (out + out.transpose());
  }

 private:
  LandmarkSet landmarks_;
  double epsilon_;
  Matrix cols_;
  Eigen::LDLT<Matrix> factor_;
};

inline NystromApprox nystrom_approximate(const KernelMatrix& k, const LandmarkSet& c,
                                         double epsilon = kDefaultNystromEpsilon) {
  return NystromApprox(k, c, epsilon);
}

// log det K_CC as the sum of log singular values of K_CC. Returns -inf when
// any singular value is below 1e-300.
inline double log_det_diversity(const KernelMatrix& k, const LandmarkSet& c) {
  detail::check_landmarks(k.size(), c);
  const Matrix block = detail::principal_submatrix(k.values(), c.indices);
  const Vector sv = Eigen::JacobiSVD<Matrix>(block).singularValues();
  double sum = 0.0;
  for (Index i = 0; i < sv.size(); ++i) {
    if (!(sv(i) >= 1e-300)) return -std::numeric_limits<double>::infinity();
    sum += std::log(sv(i));
  }
  return sum;
}

// ||K||_2 and ||K||_max; trial-independent, so cached per dataset.
struct ReferenceNorms {
  double op = 0.0;
  double max = 0.0;
};

inline ReferenceNorms reference_norms(const KernelMatrix& k) { return {operator_norm(k.values()), max_norm(k.values())}; }

struct QualityReport {
  double rel_op_err = 0.0;
  double rel_max_err = 0.0;
  double log_det = 0.0;
  Index k = 0;
  std::string method;
};

inline QualityReport quality(const KernelMatrix& k, const NystromApprox& approx, const ReferenceNorms& norms) {
  if (approx.size() != k.size()) throw Error(ErrorCode::InvalidInput, "approximation and kernel sizes differ");
  const Matrix residual = k.values() - approx.materialize();
  QualityReport r;
  r.rel_op_err = norms.op > 0.0 ? operator_norm(residual) / norms.op : 0.0;
  r.rel_max_err = norms.max > 0.0 ? max_norm(residual) / norms.max : 0.0;
  r.log_det = log_det_diversity(k, approx.landmarks());
  r.k = static_cast<Index>(approx.landmarks().size());
  r.method = method_label(approx.landmarks());
  return r;
}

inline QualityReport quality(const KernelMatrix& k, const NystromApprox& approx) {
  return quality(k, approx, reference_norms(k));
}

}  // namespace detkdpp
