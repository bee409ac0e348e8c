#pragma once

// Shared helpers for the test suite: dense reference operators on finite
// blocks, seeded random matrices, and window read-back. All randomness is
// seeded explicitly by each test so runs are reproducible.

#include <Eigen/Dense>
#include <random>
#include <utility>

#include "tetra/dense_window.hpp"
#include "tetra/local_op.hpp"

namespace testsupport {

// A dense matrix acting between finite blocks, wrapped as exact column maps.
inline tetra::LocalOp matOp(const Eigen::MatrixXcd& m) {
  using namespace tetra;
  SpaceSpec dom = SpaceSpec::finite(static_cast<int>(m.cols()));
  SpaceSpec cod = SpaceSpec::finite(static_cast<int>(m.rows()));
  Eigen::MatrixXcd mm = m;
  SpaceSpec codCopy = cod, domCopy = dom;
  auto col = [mm, codCopy](const BasisIndex& i) {
    FinVec out(codCopy);
    const int c = i.front().value;
    for (Eigen::Index r = 0; r < mm.rows(); ++r) {
      out.add(index({coord(static_cast<int>(r))}), mm(r, c));
    }
    return out;
  };
  auto adj = [mm, domCopy](const BasisIndex& j) {
    FinVec out(domCopy);
    const int r = j.front().value;
    for (Eigen::Index c = 0; c < mm.cols(); ++c) {
      out.add(index({coord(static_cast<int>(c))}), std::conj(mm(r, c)));
    }
    return out;
  };
  return LocalOp(dom, cod, 1, std::move(col), std::move(adj));
}

// Entrywise dense read-back of an operator between finite blocks, through
// column evaluation only.
inline Eigen::MatrixXcd entriesOf(const tetra::LocalOp& op) {
  using namespace tetra;
  const int rows = op.codomain().finiteDim();
  const int cols = op.domain().finiteDim();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rows, cols);
  for (int c = 0; c < cols; ++c) {
    FinVec column = op.column(index({coord(c)}));
    for (const auto& [idx, v] : column.entries()) out(idx.front().value, c) = v;
  }
  return out;
}

inline Eigen::MatrixXcd randomMatrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = tetra::Scalar(g(rng), g(rng));
  }
  return m;
}

// Haar-ish random unitary: QR of a complex Gaussian matrix with the phases of
// R's diagonal absorbed into Q.
inline Eigen::MatrixXcd randomUnitary(std::mt19937_64& rng, int n) {
  Eigen::MatrixXcd g = randomMatrix(rng, n, n);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < n; ++k) {
    const tetra::Scalar d = r(k, k);
    q.col(k) *= std::abs(d) > 0.0 ? d / std::abs(d) : tetra::Scalar{1.0, 0.0};
  }
  return q;
}

inline Eigen::MatrixXcd denseAt(const tetra::LocalOp& op, int depth) {
  return tetra::truncateDense(op, depth).matrix;
}

}  // namespace testsupport
