#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <vector>

#include "tetra/dense_window.hpp"
#include "tetra/local_op.hpp"

namespace tetra {

// Two-sided operator-norm bracket: `lower` is the largest singular value of a
// window compression (a certified underestimate, nondecreasing in depth) and
// `upper` is a Schur-test bound from exact column/row l1 sums.
struct NormEstimate {
  double lower = 0.0;
  double upper = 0.0;
  bool converged = false;
  int depthUsed = 0;
};

namespace detail {

// Largest singular value of the compression of op to the standard windows of
// the given depth. Small windows go through a dense SVD; larger ones through
// power iteration on the (very sparse) compressed matrix, which computes the
// same value without materializing a dense block.
inline double windowSigmaMax(const LocalOp& op, int depth) {
  const std::vector<BasisIndex> rows = windowIndices(op.codomain(), depth);
  const std::vector<BasisIndex> cols = windowIndices(op.domain(), depth);
  if (rows.empty() || cols.empty()) return 0.0;
  const std::size_t denseLimit = 1500;
  if (rows.size() <= denseLimit && cols.size() <= denseLimit) {
    DenseWindow w = denseOnWindows(op, rows, cols);
    if (w.matrix.cwiseAbs().maxCoeff() == 0.0) return 0.0;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(w.matrix);
    return svd.singularValues()(0);
  }
  std::map<BasisIndex, int> rowPos;
  for (std::size_t r = 0; r < rows.size(); ++r) rowPos.emplace(rows[r], static_cast<int>(r));
  std::vector<Eigen::Triplet<Scalar>> trips;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    FinVec column = op.column(cols[c]);
    for (const auto& [idx, v] : column.entries()) {
      auto it = rowPos.find(idx);
      if (it != rowPos.end()) trips.emplace_back(it->second, static_cast<int>(c), v);
    }
  }
  Eigen::SparseMatrix<Scalar> m(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  m.setFromTriplets(trips.begin(), trips.end());
  if (m.nonZeros() == 0) return 0.0;
  // Power iteration on M* M with a fixed pseudo-random start for determinism.
  Eigen::VectorXcd v(m.cols());
  std::uint64_t state = 0x9e3779b97f4a7c15ull;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    const double re = static_cast<double>((state >> 11) & 0xffffffull) / double(1 << 24) - 0.5;
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    const double im = static_cast<double>((state >> 11) & 0xffffffull) / double(1 << 24) - 0.5;
    v(k) = Scalar(re, im);
  }
  v.normalize();
  double sigma = 0.0;
  for (int iter = 0; iter < 600; ++iter) {
    Eigen::VectorXcd w = m * v;
    Eigen::VectorXcd u = m.adjoint() * w;
    const double lenSq = w.squaredNorm();
    const double next = std::sqrt(lenSq);  // ||M v|| with unit v
    if (u.norm() == 0.0) return next;
    v = u.normalized();
    if (std::abs(next - sigma) <= 1e-13 * std::max(1.0, next) && iter > 4) {
      sigma = next;
      break;
    }
    sigma = next;
  }
  return sigma;
}

// Schur-test upper bound sqrt(colSup * rowSup) where colSup/rowSup are the
// suprema of exact l1 column/row sums, scanned over a window deep enough to
// see the operator's band-periodic structure.
inline double schurUpperBound(const LocalOp& op, int scanDepth) {
  double colSup = 0.0;
  for (const BasisIndex& i : windowIndices(op.domain(), scanDepth)) {
    double s = 0.0;
    for (const auto& [idx, v] : op.column(i).entries()) s += std::abs(v);
    colSup = std::max(colSup, s);
  }
  double rowSup = 0.0;
  for (const BasisIndex& j : windowIndices(op.codomain(), scanDepth)) {
    double s = 0.0;
    for (const auto& [idx, v] : op.adjointColumn(j).entries()) s += std::abs(v);
    rowSup = std::max(rowSup, s);
  }
  return std::sqrt(colSup * rowSup);
}

}  // namespace detail

// Depth-doubling norm bracket: compress at depths 4, 8, 16, ... until the
// lower bound stops moving (relative change below tol) or maxDepth is hit.
inline NormEstimate operatorNormEstimate(const LocalOp& op, double tol = 1e-9,
                                         int maxDepth = 256) {
  require(tol > 0.0, "operatorNormEstimate: tol must be positive");
  require(maxDepth >= 1, "operatorNormEstimate: maxDepth must be >= 1");
  NormEstimate est;
  double prev = -1.0;
  int depth = std::min(4, maxDepth);
  while (true) {
    const double sigma = detail::windowSigmaMax(op, depth);
    est.lower = std::max(est.lower, sigma);  // monotone by nesting; guard roundoff
    est.depthUsed = depth;
    if (prev >= 0.0 && std::abs(est.lower - prev) <= tol * std::max(1.0, est.lower)) {
      est.converged = true;
      break;
    }
    prev = est.lower;
    if (depth >= maxDepth) break;
    depth = std::min(2 * depth, maxDepth);
  }
  const int scanDepth = std::min(std::max(est.depthUsed, 4), 16);
  est.upper = std::max(est.lower, detail::schurUpperBound(op, scanDepth));
  return est;
}

}  // namespace tetra
