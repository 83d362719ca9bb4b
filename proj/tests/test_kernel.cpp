#include <gtest/gtest.h>

#include <random>

#include "detkdpp/kernel.hpp"
#include "detkdpp/spectral.hpp"
#include "oracles.hpp"

using namespace detkdpp;

namespace {

double min_eigenvalue(const Matrix& k) { return Eigen::SelfAdjointEigenSolver<Matrix>(k).eigenvalues().minCoeff(); }

}  // namespace

TEST(Standardize, TwoPointColumnIsSymmetric) {
  Matrix x(2, 1);
  x << 1.0, 3.0;
  const auto z = standardize(DataMatrix(x)).values();
  // deviations are -1, +1 and the sample sd is sqrt(2)
  EXPECT_NEAR(z(0, 0), -1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(z(1, 0), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(Standardize, ConstantColumnBecomesZero) {
  Matrix x(3, 2);
  x << 5, 1, 5, 2, 5, 4;
  const auto z = standardize(DataMatrix(x)).values();
  EXPECT_EQ(z.col(0), Vector::Zero(3));
}

TEST(Standardize, RandomMomentsAreUnit) {
  std::mt19937_64 gen(7);
  const Matrix x = oracle::random_matrix(10, 3, gen) * 4.0 + Matrix::Constant(10, 3, 2.5);
  const auto z = standardize(DataMatrix(x)).values();
  for (Index c = 0; c < 3; ++c) {
    const double mean = z.col(c).mean();
    const double sd = std::sqrt((z.col(c).array() - mean).square().sum() / 9.0);
    EXPECT_LT(std::abs(mean), 1e-12);
    EXPECT_LT(std::abs(sd - 1.0), 1e-12);
  }
}

TEST(Standardize, SingleRowIsRejected) {
  try {
    standardize(DataMatrix(Matrix::Ones(1, 3)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyData);
  }
}

TEST(GaussianKernel, DirectValues) {
  Matrix x(2, 2);
  x << 0, 0, 2, 0;
  const auto k = gaussian_kernel(DataMatrix(x), 2.0);
  EXPECT_DOUBLE_EQ(k(0, 0), 1.0);
  EXPECT_NEAR(k(0, 1), 0.6065306597126334, 1e-15);
  EXPECT_EQ(k.kind(), KernelKind::Gaussian);
  EXPECT_EQ(k.sigma(), 2.0);
}

TEST(GaussianKernel, MatchesDoubleLoop) {
  std::mt19937_64 gen(11);
  const Matrix x = oracle::random_matrix(3, 4, gen);
  const auto k = gaussian_kernel(DataMatrix(x), 1.3);
  EXPECT_LT((k.values() - oracle::gaussian_gram(x, 1.3)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(GaussianKernel, RejectsBadBandwidth) {
  for (double s : {0.0, -1.0}) {
    try {
      gaussian_kernel(DataMatrix(Matrix::Ones(2, 2)), s);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidBandwidth);
    }
  }
}

TEST(GaussianKernel, PermutationInvariant) {
  std::mt19937_64 gen(3);
  const Matrix x = oracle::random_matrix(9, 2, gen);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(9);
  perm.setIdentity();
  std::shuffle(perm.indices().data(), perm.indices().data() + 9, gen);
  const Matrix k = gaussian_kernel(DataMatrix(x), 0.8).values();
  const Matrix kp = gaussian_kernel(DataMatrix(perm * x), 0.8).values();
  EXPECT_LT((perm * k * perm.transpose() - kp).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(HistogramIntersection, Basics) {
  Matrix h(3, 3);
  h << 1, 2, 3, 1, 2, 3, 0, 0, 0;
  const auto k = histogram_intersection_kernel(DataMatrix(h));
  EXPECT_DOUBLE_EQ(k(0, 1), 6.0);
  EXPECT_DOUBLE_EQ(k(0, 2), 0.0);

  Matrix d(2, 2);
  d << 1, 0, 0, 1;
  EXPECT_DOUBLE_EQ(histogram_intersection_kernel(DataMatrix(d))(0, 1), 0.0);
}

TEST(HistogramIntersection, MatchesBruteForceAndIsPsd) {
  std::mt19937_64 gen(5);
  const Matrix h = oracle::random_matrix(4, 6, gen).cwiseAbs();
  const auto k = histogram_intersection_kernel(DataMatrix(h));
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j) {
      double s = 0.0;
      for (Index b = 0; b < 6; ++b) s += std::min(h(i, b), h(j, b));
      EXPECT_NEAR(k(i, j), s, 1e-14);
    }
  EXPECT_GE(min_eigenvalue(k.values()), -1e-8 * operator_norm(k.values()));
}

TEST(HistogramIntersection, RejectsNegative) {
  Matrix h(2, 2);
  h << 1, -0.5, 0, 1;
  try {
    histogram_intersection_kernel(DataMatrix(h));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NegativeHistogram);
  }
}

TEST(HistogramIntersection, L1Normalization) {
  Matrix h(2, 3);
  h << 1, 1, 2, 0, 0, 0;
  const auto n = l1_normalize_rows(DataMatrix(h)).values();
  EXPECT_DOUBLE_EQ(n.row(0).sum(), 1.0);
  EXPECT_EQ(n.row(1).sum(), 0.0);
}

TEST(KernelProperties, RandomKernelsArePsdAndBounded) {
  std::mt19937_64 gen(2024);
  std::uniform_int_distribution<int> size(2, 12);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = size(gen);
    const Index d = size(gen) % 5 + 1;
    const Matrix x = oracle::random_matrix(n, d, gen);
    const auto g = gaussian_kernel(DataMatrix(x), 0.5 + trial * 0.05);
    EXPECT_EQ(g.values(), g.values().transpose());
    EXPECT_GT(g.values().minCoeff(), 0.0);
    EXPECT_LE(g.values().maxCoeff(), 1.0);
    EXPECT_GE(min_eigenvalue(g.values()), -1e-8 * operator_norm(g.values()));

    const Matrix hist = x.cwiseAbs();
    const auto h = histogram_intersection_kernel(DataMatrix(hist));
    const Vector mass = hist.rowwise().sum();
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        EXPECT_GE(h(i, j), 0.0);
        EXPECT_LE(h(i, j), std::min(mass(i), mass(j)) + 1e-12);
      }
    EXPECT_GE(min_eigenvalue(h.values()), -1e-8 * operator_norm(h.values()));
  }
}

TEST(PrecomputedKernel, ValidatesSymmetry) {
  Matrix k(2, 2);
  k << 1, 0.5, 0.4, 1;
  EXPECT_THROW(precomputed_kernel(k), Error);
  k(1, 0) = 0.5;
  EXPECT_EQ(precomputed_kernel(k).kind(), KernelKind::Precomputed);
  EXPECT_THROW(precomputed_kernel(Matrix::Ones(2, 3)), Error);
}

TEST(KernelMatrix, SymmetrizesOnConstruction) {
  Matrix k(2, 2);
  k << 1, 0.5 + 1e-16, 0.5, 1;
  const KernelMatrix km(k, KernelKind::Precomputed);
  EXPECT_EQ(km(0, 1), km(1, 0));
}
