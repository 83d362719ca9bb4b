#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"

namespace detkdpp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// n points in d dimensions, one point per row. Always non-empty and finite.
class DataMatrix {
 public:
  explicit DataMatrix(Matrix values) : values_(std::move(values)) {
    if (values_.rows() < 1 || values_.cols() < 1) {
      throw Error(ErrorCode::EmptyData, "data matrix needs at least one row and one column");
    }
    if (!values_.allFinite()) {
      throw Error(ErrorCode::InvalidInput, "data matrix contains non-finite entries");
    }
  }

  Index rows() const { return values_.rows(); }
  Index cols() const { return values_.cols(); }
  const Matrix& values() const { return values_; }
  auto row(Index i) const { return values_.row(i); }

 private:
  Matrix values_;
};

enum class KernelKind { Gaussian, HistogramIntersection, Precomputed };

inline std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::Gaussian: return "gaussian";
    case KernelKind::HistogramIntersection: return "hik";
    case KernelKind::Precomputed: return "precomputed";
  }
  return "unknown";
}

// Dense symmetric Gram matrix. Construction symmetrizes (K + K^T) / 2 and
// rejects non-square or non-finite input; positive semidefiniteness is the
// caller's responsibility and is checked by the test suites.
class KernelMatrix {
 public:
  KernelMatrix(Matrix values, KernelKind kind, double sigma = 0.0)
      : values_(std::move(values)), kind_(kind), sigma_(sigma) {
    if (values_.rows() != values_.cols() || values_.rows() < 1) {
      throw Error(ErrorCode::InvalidInput, "kernel matrix must be square and non-empty");
    }
    if (!values_.allFinite()) {
      throw Error(ErrorCode::InvalidInput, "kernel matrix contains non-finite entries");
    }
    values_ = (0.5 * (values_ + values_.transpose())).eval();
  }

  Index size() const { return values_.rows(); }
  const Matrix& values() const { return values_; }
  double operator()(Index i, Index j) const { return values_(i, j); }
  KernelKind kind() const { return kind_; }
  // Bandwidth for Gaussian kernels, 0 otherwise.
  double sigma() const { return sigma_; }

 private:
  Matrix values_;
  KernelKind kind_;
  double sigma_;
};

// Column-wise z-scores with the sample (n - 1) standard deviation.
// Zero-variance columns come back as all zeros.
inline DataMatrix standardize(const DataMatrix& data) {
  const Index n = data.rows();
  if (n < 2) {
    throw Error(ErrorCode::EmptyData, "standardize needs at least two rows, got " + std::to_string(n));
  }
  Matrix out(n, data.cols());
  for (Index c = 0; c < data.cols(); ++c) {
    const auto col = data.values().col(c);
    const double mean = col.mean();
    const Vector centered = col.array() - mean;
    const double sd = std::sqrt(centered.squaredNorm() / static_cast<double>(n - 1));
    if (sd == 0.0 || !std::isfinite(sd)) {
      out.col(c).setZero();
    } else {
      out.col(c) = centered / sd;
    }
  }
  return DataMatrix(std::move(out));
}

// K_ij = exp(-|x_i - x_j|^2 / (2 sigma^2)).
inline KernelMatrix gaussian_kernel(const DataMatrix& data, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::InvalidBandwidth, "sigma must be positive and finite, got " + std::to_string(sigma));
  }
  const Index n = data.rows();
  const double scale = -1.0 / (2.0 * sigma * sigma);
  Matrix k(n, n);
  for (Index j = 0; j < n; ++j) {
    k(j, j) = 1.0;
    for (Index i = j + 1; i < n; ++i) {
      const double d2 = (data.row(i) - data.row(j)).squaredNorm();
      k(i, j) = std::exp(scale * d2);
      k(j, i) = k(i, j);
    }
  }
  return KernelMatrix(std::move(k), KernelKind::Gaussian, sigma);
}

// Scales every row to unit sum; all-zero rows are left untouched.
inline DataMatrix l1_normalize_rows(const DataMatrix& hist) {
  Matrix out = hist.values();
  for (Index i = 0; i < out.rows(); ++i) {
    const double s = out.row(i).cwiseAbs().sum();
    if (s > 0.0) out.row(i) /= s;
  }
  return DataMatrix(std::move(out));
}

// K_ij = sum_b min(H_ib, H_jb).
inline KernelMatrix histogram_intersection_kernel(const DataMatrix& hist) {
  if ((hist.values().array() < 0.0).any()) {
    throw Error(ErrorCode::NegativeHistogram, "histogram entries must be nonnegative");
  }
  const Index n = hist.rows();
  Matrix k(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = j; i < n; ++i) {
      k(i, j) = hist.row(i).cwiseMin(hist.row(j)).sum();
      k(j, i) = k(i, j);
    }
  }
  return KernelMatrix(std::move(k), KernelKind::HistogramIntersection);
}

// Wraps a user-supplied Gram matrix. Symmetry is checked to 1e-12 relative to
// the largest entry; PSD is not checked here.
inline KernelMatrix precomputed_kernel(const Matrix& values) {
  if (values.rows() != values.cols()) {
    throw Error(ErrorCode::InvalidInput, "precomputed kernel is " + std::to_string(values.rows()) + "x" +
                                             std::to_string(values.cols()) + ", expected square");
  }
  if (!values.allFinite()) {
    throw Error(ErrorCode::InvalidInput, "precomputed kernel contains non-finite entries");
  }
  const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
  const double asym = (values - values.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    throw Error(ErrorCode::InvalidInput, "precomputed kernel is not symmetric (max asymmetry " +
                                             std::to_string(asym) + ")");
  }
  return KernelMatrix(values, KernelKind::Precomputed);
}

}  // namespace detkdpp
