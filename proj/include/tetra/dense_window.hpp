#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <vector>

#include "tetra/local_op.hpp"
#include "tetra/space.hpp"

namespace tetra {

// Dense compression of an operator to finite row/column windows, with the
// index lists kept alongside the matrix so entries stay addressable.
struct DenseWindow {
  std::vector<BasisIndex> rows;
  std::vector<BasisIndex> cols;
  Eigen::MatrixXcd matrix;
};

inline DenseWindow denseOnWindows(const LocalOp& op, std::vector<BasisIndex> rows,
                                  std::vector<BasisIndex> cols) {
  DenseWindow out;
  out.rows = std::move(rows);
  out.cols = std::move(cols);
  std::map<BasisIndex, int> rowPos;
  for (std::size_t r = 0; r < out.rows.size(); ++r) {
    rowPos.emplace(out.rows[r], static_cast<int>(r));
  }
  out.matrix = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(out.rows.size()),
                                      static_cast<Eigen::Index>(out.cols.size()));
  for (std::size_t c = 0; c < out.cols.size(); ++c) {
    FinVec column = op.column(out.cols[c]);
    for (const auto& [idx, v] : column.entries()) {
      auto it = rowPos.find(idx);
      if (it != rowPos.end()) out.matrix(it->second, static_cast<Eigen::Index>(c)) = v;
    }
  }
  return out;
}

// Compression to the standard window of the given depth on both sides, with
// rows/cols in lexicographic path order.
inline DenseWindow truncateDense(const LocalOp& op, int depth) {
  return denseOnWindows(op, windowIndices(op.codomain(), depth), windowIndices(op.domain(), depth));
}

// Hermitian square root with eigenvalue clamping: eigenvalues in
// [-clampTol, 0) are treated as roundoff and clamped to zero; anything more
// negative is rejected as not positive semidefinite.
inline DenseWindow psdSqrtDense(const DenseWindow& m, double clampTol) {
  require(m.matrix.rows() == m.matrix.cols(), "psdSqrtDense: matrix must be square");
  if (m.matrix.rows() == 0) return m;
  const double scale = std::max(1.0, m.matrix.cwiseAbs().maxCoeff());
  const double hermDev = (m.matrix - m.matrix.adjoint()).cwiseAbs().maxCoeff();
  require(hermDev <= clampTol * scale, "psdSqrtDense: matrix is not Hermitian within tolerance");
  Eigen::MatrixXcd herm = 0.5 * (m.matrix + m.matrix.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(herm);
  require(eig.info() == Eigen::Success, "psdSqrtDense: eigendecomposition failed");
  Eigen::VectorXd lambda = eig.eigenvalues();
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    require(lambda(k) >= -clampTol * scale,
            "psdSqrtDense: matrix is not positive semidefinite within tolerance");
    lambda(k) = std::sqrt(std::max(0.0, lambda(k)));
  }
  DenseWindow out;
  out.rows = m.rows;
  out.cols = m.cols;
  out.matrix = eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().adjoint();
  return out;
}

// Window-supported operator from a dense block: columns inside the window are
// read from the matrix, all other columns are zero. The lift is exact for the
// stored data and is how dense solves come back into the lazy algebra.
inline LocalOp liftFromWindow(const DenseWindow& w, SpaceSpec domain, SpaceSpec codomain) {
  auto rowPos = std::make_shared<std::map<BasisIndex, int>>();
  auto colPos = std::make_shared<std::map<BasisIndex, int>>();
  for (std::size_t r = 0; r < w.rows.size(); ++r) {
    require(isValidIndex(codomain, w.rows[r]), "liftFromWindow: row index invalid for codomain");
    rowPos->emplace(w.rows[r], static_cast<int>(r));
  }
  for (std::size_t c = 0; c < w.cols.size(); ++c) {
    require(isValidIndex(domain, w.cols[c]), "liftFromWindow: column index invalid for domain");
    colPos->emplace(w.cols[c], static_cast<int>(c));
  }
  auto rowList = std::make_shared<const std::vector<BasisIndex>>(w.rows);
  auto colList = std::make_shared<const std::vector<BasisIndex>>(w.cols);
  auto matrix = std::make_shared<const Eigen::MatrixXcd>(w.matrix);
  int band = 0;
  for (const auto& idx : w.rows) {
    for (const Step& s : idx.path) {
      if (s.kind == Step::Kind::Copy) band = std::max(band, s.value + 1);
    }
  }
  for (const auto& idx : w.cols) {
    for (const Step& s : idx.path) {
      if (s.kind == Step::Kind::Copy) band = std::max(band, s.value + 1);
    }
  }
  SpaceSpec dom = domain, cod = codomain;
  auto col = [rowList, colPos, matrix, cod](const BasisIndex& i) {
    FinVec out(cod);
    auto it = colPos->find(i);
    if (it == colPos->end()) return out;
    const Eigen::Index c = it->second;
    for (Eigen::Index r = 0; r < matrix->rows(); ++r) {
      out.add((*rowList)[static_cast<std::size_t>(r)], (*matrix)(r, c));
    }
    return out;
  };
  auto adj = [colList, rowPos, matrix, dom](const BasisIndex& j) {
    FinVec out(dom);
    auto it = rowPos->find(j);
    if (it == rowPos->end()) return out;
    const Eigen::Index r = it->second;
    for (Eigen::Index c = 0; c < matrix->cols(); ++c) {
      out.add((*colList)[static_cast<std::size_t>(c)], std::conj((*matrix)(r, c)));
    }
    return out;
  };
  return LocalOp(domain, codomain, band, std::move(col), std::move(adj));
}

}  // namespace tetra
