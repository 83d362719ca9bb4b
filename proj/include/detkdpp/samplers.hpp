#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "greedy.hpp"
#include "landmarks.hpp"
#include "random.hpp"
#include "spectral.hpp"

namespace detkdpp {

// k distinct indices drawn uniformly by a seeded partial Fisher-Yates shuffle.
inline LandmarkSet uniform_sample(Index n, Index k, std::uint64_t seed) {
  if (k > n) throw Error(ErrorCode::RankTooLarge, "k = " + std::to_string(k) + " exceeds n = " + std::to_string(n));
  if (k < 0) throw Error(ErrorCode::InvalidInput, "k must be nonnegative");
  Rng rng(seed);
  std::vector<Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  for (Index i = 0; i < k; ++i) {
    const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  LandmarkSet out;
  out.method = Method::Uniform;
  out.seed = seed;
  out.indices.assign(perm.begin(), perm.begin() + k);
  return out;
}

namespace detail {

// Second phase shared by DPP and k-DPP: sample one point per column of the
// orthonormal basis v (n x m), shrinking the basis after every draw.
//
// After drawing i, the column with the largest |v_i| is used to eliminate
// coordinate i from every other column; it is then dropped and the rest are
// re-orthonormalized with two passes of modified Gram-Schmidt.
inline std::vector<Index> sample_from_basis(Matrix v, Rng& rng) {
  std::vector<Index> picked;
  const Index n = v.rows();
  while (v.cols() > 0) {
    const Vector weight = v.rowwise().squaredNorm();
    const double total = weight.sum();
    if (!(total > 1e-12)) {
      throw Error(ErrorCode::NumericalBreakdown,
                  "basis lost its mass with " + std::to_string(v.cols()) + " columns left");
    }
    // Normalize by the realized total rather than the column count.
    const double target = rng.uniform() * total;
    double acc = 0.0;
    Index chosen = -1;
    for (Index i = 0; i < n; ++i) {
      if (weight(i) <= 0.0) continue;
      chosen = i;
      acc += weight(i);
      if (target < acc) break;
    }
    picked.push_back(chosen);

    Index pivot = 0;
    v.row(chosen).cwiseAbs().maxCoeff(&pivot);
    const Vector pivot_col = v.col(pivot);
    const double pivot_entry = pivot_col(chosen);
    const Index m = v.cols();
    Matrix rest(n, m - 1);
    for (Index c = 0, out = 0; c < m; ++c) {
      if (c == pivot) continue;
      rest.col(out) = v.col(c) - (v(chosen, c) / pivot_entry) * pivot_col;
      rest(chosen, out) = 0.0;
      ++out;
    }
    for (int pass = 0; pass < 2; ++pass) {
      for (Index c = 0; c < rest.cols(); ++c) {
        for (Index prev = 0; prev < c; ++prev) {
          rest.col(c) -= rest.col(prev).dot(rest.col(c)) * rest.col(prev);
        }
        const double norm = rest.col(c).norm();
        if (!(norm > 1e-12)) {
          throw Error(ErrorCode::NumericalBreakdown, "re-orthonormalization lost rank");
        }
        rest.col(c) /= norm;
      }
    }
    v = std::move(rest);
  }
  return picked;
}

inline double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace detail

// Eigenvalues at or below this are treated as exactly zero by the samplers.
inline constexpr double kPositiveEigenvalue = 1e-10;

// Exact L-ensemble DPP sample: keep eigenvector i with probability
// lambda_i / (lambda_i + 1), then sample one point per kept eigenvector.
inline LandmarkSet sample_dpp(const EigenSystem& es, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Index> kept;
  for (Index i = 0; i < es.size(); ++i) {
    const double lam = std::max(0.0, es.values(i));
    if (rng.uniform() < lam / (lam + 1.0)) kept.push_back(i);
  }
  Matrix basis(es.vectors.rows(), static_cast<Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) basis.col(static_cast<Index>(c)) = es.vectors.col(kept[c]);
  LandmarkSet out;
  out.method = Method::Dpp;
  out.seed = seed;
  out.indices = detail::sample_from_basis(std::move(basis), rng);
  return out;
}

inline LandmarkSet sample_dpp(const KernelMatrix& l, std::uint64_t seed) { return sample_dpp(sym_eig(l), seed); }

// DPP conditioned on |Y| = k. Eigenvectors are chosen with the elementary
// symmetric polynomial backward recursion, evaluated in the log domain so
// large spectra do not overflow.
inline LandmarkSet sample_kdpp(const EigenSystem& es, Index k, std::uint64_t seed) {
  const Index m = es.size();
  const Index positive = (es.values.array() > kPositiveEigenvalue).count();
  if (k > positive) {
    throw Error(ErrorCode::RankTooLarge, "k = " + std::to_string(k) + " but only " + std::to_string(positive) +
                                             " eigenvalues exceed " + std::to_string(kPositiveEigenvalue));
  }
  if (k < 0) throw Error(ErrorCode::InvalidInput, "k must be nonnegative");
  constexpr double neg_inf = -std::numeric_limits<double>::infinity();
  Vector log_lam(m);
  for (Index i = 0; i < m; ++i) {
    log_lam(i) = es.values(i) > kPositiveEigenvalue ? std::log(es.values(i)) : neg_inf;
  }
  // log_e(j, t) = log e_j(lambda_1, ..., lambda_t)
  Matrix log_e = Matrix::Constant(k + 1, m + 1, neg_inf);
  log_e.row(0).setZero();
  for (Index j = 1; j <= k; ++j) {
    for (Index t = 1; t <= m; ++t) {
      log_e(j, t) = detail::log_add_exp(log_e(j, t - 1), log_lam(t - 1) + log_e(j - 1, t - 1));
    }
  }

  Rng rng(seed);
  std::vector<Index> kept;
  Index remaining = k;
  for (Index t = m; t >= 1 && remaining > 0; --t) {
    if (log_lam(t - 1) == neg_inf) continue;
    const double prob = std::exp(log_lam(t - 1) + log_e(remaining - 1, t - 1) - log_e(remaining, t));
    if (rng.uniform() < prob) {
      kept.push_back(t - 1);
      --remaining;
    }
  }
  if (remaining != 0) {
    throw Error(ErrorCode::NumericalBreakdown, "eigenvector selection ended with " + std::to_string(remaining) + " missing");
  }
  Matrix basis(es.vectors.rows(), k);
  for (Index c = 0; c < k; ++c) basis.col(c) = es.vectors.col(kept[static_cast<std::size_t>(c)]);
  LandmarkSet out;
  out.method = Method::Kdpp;
  out.seed = seed;
  out.indices = detail::sample_from_basis(std::move(basis), rng);
  return out;
}

inline LandmarkSet sample_kdpp(const KernelMatrix& l, Index k, std::uint64_t seed) {
  return sample_kdpp(sym_eig(l), k, seed);
}

}  // namespace detkdpp
