#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <vector>

#include "tetra/dense_window.hpp"
#include "tetra/local_op.hpp"
#include "tetra/operator_norm.hpp"

namespace tetra {

// Trigonometric operator polynomial phi(z) = sum_n Phi_n z^n with finitely
// many nonzero coefficients, each an operator on the coefficient space.
class OperatorSymbol {
 public:
  OperatorSymbol(SpaceSpec coeffSpace, std::map<int, LocalOp> coeffs)
      : coeffSpace_(std::move(coeffSpace)), coeffs_(std::move(coeffs)) {
    for (const auto& [n, op] : coeffs_) {
      require(op.domain() == coeffSpace_ && op.codomain() == coeffSpace_,
              "OperatorSymbol: coefficient does not act on the coefficient space");
    }
  }

  const SpaceSpec& coeffSpace() const { return coeffSpace_; }
  const std::map<int, LocalOp>& coeffs() const { return coeffs_; }

  LocalOp coefficient(int n) const {
    auto it = coeffs_.find(n);
    return it == coeffs_.end() ? zeroOp(coeffSpace_, coeffSpace_) : it->second;
  }

  int minDegree() const { return coeffs_.empty() ? 0 : coeffs_.begin()->first; }
  int maxDegree() const { return coeffs_.empty() ? 0 : coeffs_.rbegin()->first; }

  // phi(z) as a single operator on the coefficient space.
  LocalOp evalAt(Scalar z) const {
    LocalOp acc = zeroOp(coeffSpace_, coeffSpace_);
    for (const auto& [n, op] : coeffs_) {
      acc = combineOp(Scalar{1.0, 0.0}, acc, std::pow(z, n), op);
    }
    return acc;
  }

 private:
  SpaceSpec coeffSpace_;
  std::map<int, LocalOp> coeffs_;
};

// Shift by k on a sequence space: e(copy n) -> e(copy n+k); the adjoint kills
// the first k copies.
inline LocalOp shiftOp(const SpaceSpec& inner, int k) {
  require(k >= 0, "shiftOp: shift amount must be >= 0");
  SpaceSpec space = SpaceSpec::sequenceOf(inner);
  SpaceSpec s = space;
  auto col = [s, k](const BasisIndex& i) {
    const int n = i.front().value;
    BasisIndex shifted = i.tail().prepended(copy(n + k));
    return FinVec::basis(s, shifted);
  };
  auto adj = [s, k](const BasisIndex& j) {
    const int n = j.front().value;
    if (n < k) return FinVec(s);
    BasisIndex shifted = j.tail().prepended(copy(n - k));
    return FinVec::basis(s, shifted);
  };
  return LocalOp(space, space, k + 1, std::move(col), std::move(adj));
}

// Block Toeplitz operator on the sequence space over the coefficient space:
// block (i, j) equals Phi_{i-j}.
inline LocalOp toeplitzFromSymbol(const OperatorSymbol& sym) {
  SpaceSpec space = SpaceSpec::sequenceOf(sym.coeffSpace());
  auto coeffs = std::make_shared<const std::map<int, LocalOp>>(sym.coeffs());
  int band = 1;
  for (const auto& [n, op] : *coeffs) band = std::max(band, std::abs(n) + op.band() + 1);
  SpaceSpec s = space;
  auto col = [s, coeffs](const BasisIndex& i) {
    const int j = i.front().value;
    const BasisIndex rest = i.tail();
    FinVec out(s);
    for (const auto& [n, op] : *coeffs) {
      if (j + n < 0) continue;
      FinVec piece = op.column(rest);
      for (const auto& [idx, v] : piece.entries()) out.add(idx.prepended(copy(j + n)), v);
    }
    return out;
  };
  auto adj = [s, coeffs](const BasisIndex& jIdx) {
    const int i = jIdx.front().value;
    const BasisIndex rest = jIdx.tail();
    FinVec out(s);
    for (const auto& [n, op] : *coeffs) {
      if (i - n < 0) continue;
      FinVec piece = op.adjointColumn(rest);
      for (const auto& [idx, v] : piece.entries()) out.add(idx.prepended(copy(i - n)), v);
    }
    return out;
  };
  return LocalOp(space, space, band, std::move(col), std::move(adj));
}

struct SupNormBracket {
  double lower = 0.0;
  double upper = 0.0;
};

// Bracket for sup_{|z|=1} ||phi(z)||: grid maximum of converged compression
// norms, plus a Lipschitz slack sum_n |n|*||Phi_n||*(pi/gridSize) covering
// the gaps between grid points.
inline SupNormBracket symbolSupNorm(const OperatorSymbol& sym, int gridSize = 1024,
                                    double normTol = 1e-10, int normMaxDepth = 64) {
  require(gridSize >= 1, "symbolSupNorm: gridSize must be >= 1");
  SupNormBracket out;
  for (int k = 0; k < gridSize; ++k) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / gridSize;
    const Scalar z = std::polar(1.0, theta);
    NormEstimate est = operatorNormEstimate(sym.evalAt(z), normTol, normMaxDepth);
    out.lower = std::max(out.lower, est.lower);
  }
  double slack = 0.0;
  for (const auto& [n, op] : sym.coeffs()) {
    if (n == 0) continue;
    slack += std::abs(n) * operatorNormEstimate(op, normTol, normMaxDepth).upper;
  }
  out.upper = out.lower + slack * std::numbers::pi / gridSize;
  return out;
}

// Necessary block pattern for commuting with the double shift on a window:
// blocks repeat two steps down the diagonal, and the first two block rows
// vanish to the right of the first two block columns.
inline bool tz2CommutantPatternCheck(const LocalOp& op, int depth, double tol = 1e-12) {
  require(op.domain() == op.codomain(), "tz2CommutantPatternCheck: operator must be square");
  require(op.domain().kind() == SpaceSpec::Kind::Sequence,
          "tz2CommutantPatternCheck: operator must act on a sequence space");
  require(depth >= 3, "tz2CommutantPatternCheck: depth must be >= 3 to see the pattern");
  const std::vector<BasisIndex> innerWin = windowIndices(op.domain().inner(), depth);
  DenseWindow w = truncateDense(op, depth);
  std::map<BasisIndex, int> pos;
  for (std::size_t r = 0; r < w.rows.size(); ++r) pos.emplace(w.rows[r], static_cast<int>(r));
  auto entry = [&](int bi, const BasisIndex& r, int bj, const BasisIndex& c) {
    auto ri = pos.find(r.prepended(copy(bi)));
    auto ci = pos.find(c.prepended(copy(bj)));
    require(ri != pos.end() && ci != pos.end(), "tz2CommutantPatternCheck: window lookup failed");
    return w.matrix(ri->second, ci->second);
  };
  for (int bi = 0; bi < depth; ++bi) {
    for (int bj = 2; bj < depth; ++bj) {
      for (const BasisIndex& r : innerWin) {
        for (const BasisIndex& c : innerWin) {
          const Scalar v = entry(bi, r, bj, c);
          if (bi < 2) {
            if (std::abs(v) > tol) return false;
          } else {
            if (std::abs(v - entry(bi - 2, r, bj - 2, c)) > tol) return false;
          }
        }
      }
    }
  }
  return true;
}

// True iff every strictly negative coefficient is the zero operator on the
// probe window.
inline bool analyticSymbolCheck(const OperatorSymbol& sym, int windowDepth = 6,
                                double tol = 1e-12) {
  const std::vector<BasisIndex> win = windowIndices(sym.coeffSpace(), windowDepth);
  for (const auto& [n, op] : sym.coeffs()) {
    if (n >= 0) continue;
    if (maxColumnNorm(op, win) > tol) return false;
  }
  return true;
}

struct SymbolExtraction {
  std::optional<OperatorSymbol> symbol;
  double toeplitzDeviation = 0.0;  // worst |block(i,j) - Phi_{i-j}| over the window
};

// Reads symbol coefficients off a dense window of an operator on a sequence
// space: Phi_n from block column 0 (n >= 0) and Phi_{-n} from block row 0,
// then cross-checks the constant-along-diagonals block structure everywhere.
inline SymbolExtraction extractSymbol(const LocalOp& op, int depth) {
  require(op.domain() == op.codomain(), "extractSymbol: operator must be square");
  require(op.domain().kind() == SpaceSpec::Kind::Sequence,
          "extractSymbol: operator must act on a sequence space");
  require(depth >= 2, "extractSymbol: depth must be >= 2");
  const SpaceSpec inner = op.domain().inner();
  const std::vector<BasisIndex> innerWin = windowIndices(inner, depth);
  DenseWindow w = truncateDense(op, depth);
  std::map<BasisIndex, int> pos;
  for (std::size_t r = 0; r < w.rows.size(); ++r) pos.emplace(w.rows[r], static_cast<int>(r));
  auto entry = [&](int bi, const BasisIndex& r, int bj, const BasisIndex& c) {
    auto ri = pos.find(r.prepended(copy(bi)));
    auto ci = pos.find(c.prepended(copy(bj)));
    require(ri != pos.end() && ci != pos.end(), "extractSymbol: window lookup failed");
    return w.matrix(ri->second, ci->second);
  };
  // Dense coefficient blocks Phi_n, n in (-depth, depth).
  std::map<int, LocalOp> coeffs;
  std::map<int, DenseWindow> blocks;
  for (int n = -(depth - 1); n <= depth - 1; ++n) {
    DenseWindow blk;
    blk.rows = innerWin;
    blk.cols = innerWin;
    blk.matrix = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(innerWin.size()),
                                        static_cast<Eigen::Index>(innerWin.size()));
    const int bi = n >= 0 ? n : 0;
    const int bj = n >= 0 ? 0 : -n;
    for (std::size_t r = 0; r < innerWin.size(); ++r) {
      for (std::size_t c = 0; c < innerWin.size(); ++c) {
        blk.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            entry(bi, innerWin[r], bj, innerWin[c]);
      }
    }
    if (blk.matrix.cwiseAbs().maxCoeff() > 0.0) {
      coeffs.emplace(n, liftFromWindow(blk, inner, inner));
    }
    blocks.emplace(n, std::move(blk));
  }
  double dev = 0.0;
  for (int bi = 0; bi < depth; ++bi) {
    for (int bj = 0; bj < depth; ++bj) {
      const DenseWindow& blk = blocks.at(bi - bj);
      for (std::size_t r = 0; r < innerWin.size(); ++r) {
        for (std::size_t c = 0; c < innerWin.size(); ++c) {
          const Scalar expected =
              blk.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
          dev = std::max(dev, std::abs(entry(bi, innerWin[r], bj, innerWin[c]) - expected));
        }
      }
    }
  }
  SymbolExtraction out;
  out.symbol.emplace(inner, std::move(coeffs));
  out.toeplitzDeviation = dev;
  return out;
}

}  // namespace tetra
