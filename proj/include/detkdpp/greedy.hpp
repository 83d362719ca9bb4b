#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "landmarks.hpp"
#include "spectral.hpp"

namespace detkdpp {

// Residual scores below this value mean the projector has no rank left.
inline constexpr double kDegenerateScore = 1e-10;

// Incremental greedy engine shared by the deterministic k-DPP and DAS.
//
// Keeps p(j) = P_jj - P_Cj^T P_CC^-1 P_Cj for the selected set C. The factor
// rows_ holds, for every point j, the coordinates of P_Cj in the basis of the
// Cholesky factor L of P_CC (row j of P_{:,C} L^-T), so adding a landmark s
// appends one column:
//
//   e_j = (P_js - <rows_j, rows_s>) / sqrt(p(s)),   p(j) -= e_j^2.
//
// Each step costs O(n |C|) and P_CC is never refactorized.
class GreedyState {
 public:
  explicit GreedyState(const ProjectorKernel& projector)
      : p_(&projector.matrix),
        base_(projector.matrix.diagonal()),
        residual_(base_),
        rows_(projector.size(), 0) {}

  Index size() const { return base_.size(); }
  const Vector& base_scores() const { return base_; }
  const Vector& scores() const { return residual_; }
  const std::vector<Index>& selected() const { return selected_; }

  // Index of the largest residual, lowest index on ties.
  Index argmax() const {
    Index best = 0;
    for (Index j = 1; j < residual_.size(); ++j) {
      if (residual_(j) > residual_(best)) best = j;
    }
    return best;
  }

  // Adds argmax p to the selection and returns its score, or returns nothing
  // when every residual is below kDegenerateScore.
  std::optional<double> step() {
    const Index s = argmax();
    const double pivot = residual_(s);
    if (!(pivot >= kDegenerateScore)) return std::nullopt;
    const double d = std::sqrt(pivot);
    const Index t = rows_.cols();
    rows_.conservativeResize(Eigen::NoChange, t + 1);
    const Matrix& p = *p_;
    if (t == 0) {
      rows_.col(0) = p.col(s) / d;
    } else {
      rows_.col(t) = (p.col(s) - rows_.leftCols(t) * rows_.row(s).head(t).transpose()) / d;
    }
    residual_ -= rows_.col(t).cwiseAbs2();
    // selected points have zero residual; pin them so round-off cannot drift
    selected_.push_back(s);
    for (Index c : selected_) residual_(c) = 0.0;
    return pivot;
  }

 private:
  const Matrix* p_;
  Vector base_;
  Vector residual_;
  Matrix rows_;
  std::vector<Index> selected_;
};

// Greedy maximization of the residual projector diagonal. Returns fewer than
// k indices, with degenerate set, when the projector rank runs out first.
inline LandmarkSet greedy_select(const ProjectorKernel& projector, Index k) {
  if (k > projector.size()) {
    throw Error(ErrorCode::RankTooLarge,
                "k = " + std::to_string(k) + " exceeds n = " + std::to_string(projector.size()));
  }
  LandmarkSet out;
  out.method = projector.kind == ProjectorKind::Sharp ? Method::GreedySharp : Method::Das;
  if (projector.kind == ProjectorKind::Ridge) out.gamma = projector.gamma;
  GreedyState state(projector);
  for (Index i = 0; i < k; ++i) {
    auto score = state.step();
    if (!score) {
      out.degenerate = true;
      break;
    }
    out.selection_scores.push_back(*score);
  }
  out.indices = state.selected();
  return out;
}

// Deterministic k-DPP: greedy selection on the rank-k projector of K.
inline LandmarkSet greedy_kdpp(const EigenSystem& es, Index k) { return greedy_select(sharp_projector(es, k), k); }
inline LandmarkSet greedy_kdpp(const KernelMatrix& kernel, Index k) { return greedy_kdpp(sym_eig(kernel), k); }

// Deterministic adaptive sampling: greedy selection on K (K + n gamma I)^-1.
inline LandmarkSet das_select(const EigenSystem& es, Index k, double gamma) {
  if (k > es.size()) {
    throw Error(ErrorCode::RankTooLarge, "k = " + std::to_string(k) + " exceeds n = " + std::to_string(es.size()));
  }
  return greedy_select(ridge_projector(es, gamma), k);
}
inline LandmarkSet das_select(const KernelMatrix& kernel, Index k, double gamma) {
  return das_select(sym_eig(kernel), k, gamma);
}

}  // namespace detkdpp
