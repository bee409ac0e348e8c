#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "tetra/fin_vec.hpp"
#include "tetra/scalar.hpp"
#include "tetra/space.hpp"

namespace tetra {

// Lazy exact operator between graded spaces. An operator is a pair of column
// maps: column(i) = T e_i and adjointColumn(j) = T* e_j, each finitely
// supported and computed on demand. Algebraic combinations stay exact because
// they are evaluated as finite sums of exact columns; no truncation happens
// until a dense window is explicitly requested. The band field is an advisory
// bound on how far (in Copy grading) an entry can couple an input index.
class LocalOp {
 public:
  using ColumnFn = std::function<FinVec(const BasisIndex&)>;

  LocalOp(SpaceSpec domain, SpaceSpec codomain, int band, ColumnFn column, ColumnFn adjointColumn)
      : domain_(std::move(domain)),
        codomain_(std::move(codomain)),
        band_(band),
        column_(std::move(column)),
        adjointColumn_(std::move(adjointColumn)) {}

  const SpaceSpec& domain() const { return domain_; }
  const SpaceSpec& codomain() const { return codomain_; }
  int band() const { return band_; }

  FinVec column(const BasisIndex& i) const {
    require(isValidIndex(domain_, i), "LocalOp::column: index invalid for domain " + domain_.str());
    return column_(i);
  }

  FinVec adjointColumn(const BasisIndex& j) const {
    require(isValidIndex(codomain_, j),
            "LocalOp::adjointColumn: index invalid for codomain " + codomain_.str());
    return adjointColumn_(j);
  }

 private:
  SpaceSpec domain_;
  SpaceSpec codomain_;
  int band_;
  ColumnFn column_;
  ColumnFn adjointColumn_;
};

inline LocalOp zeroOp(SpaceSpec domain, SpaceSpec codomain) {
  SpaceSpec cod = codomain;
  SpaceSpec dom = domain;
  return LocalOp(
      domain, codomain, 0, [cod](const BasisIndex&) { return FinVec(cod); },
      [dom](const BasisIndex&) { return FinVec(dom); });
}

inline LocalOp identityOp(SpaceSpec space) {
  SpaceSpec s = space;
  auto col = [s](const BasisIndex& i) { return FinVec::basis(s, i); };
  return LocalOp(space, space, 0, col, col);
}

// T v as an exact finite sum of columns.
inline FinVec applyOp(const LocalOp& op, const FinVec& v) {
  require(v.space() == op.domain(), "applyOp: vector space does not match operator domain");
  FinVec out(op.codomain());
  for (const auto& [idx, c] : v.entries()) out.addScaled(op.column(idx), c);
  return out;
}

inline LocalOp adjointOp(const LocalOp& op) {
  auto col = [op](const BasisIndex& j) { return op.adjointColumn(j); };
  auto adj = [op](const BasisIndex& i) { return op.column(i); };
  return LocalOp(op.codomain(), op.domain(), op.band(), std::move(col), std::move(adj));
}

// s ∘ t (apply t first).
inline LocalOp composeOp(const LocalOp& s, const LocalOp& t) {
  require(t.codomain() == s.domain(), "composeOp: inner spaces do not match");
  auto col = [s, t](const BasisIndex& i) { return applyOp(s, t.column(i)); };
  auto adj = [s, t](const BasisIndex& j) {
    // (s t)* e_j = t*(s* e_j)
    FinVec mid = s.adjointColumn(j);
    FinVec out(t.domain());
    for (const auto& [idx, c] : mid.entries()) out.addScaled(t.adjointColumn(idx), c);
    return out;
  };
  return LocalOp(t.domain(), s.codomain(), s.band() + t.band(), std::move(col), std::move(adj));
}

// a·s + b·t on matching spaces.
inline LocalOp combineOp(Scalar a, const LocalOp& s, Scalar b, const LocalOp& t) {
  require(s.domain() == t.domain() && s.codomain() == t.codomain(),
          "combineOp: operands live on different spaces");
  auto col = [a, s, b, t](const BasisIndex& i) {
    FinVec out(s.codomain());
    out.addScaled(s.column(i), a);
    out.addScaled(t.column(i), b);
    return out;
  };
  Scalar ac = std::conj(a), bc = std::conj(b);
  auto adj = [ac, s, bc, t](const BasisIndex& j) {
    FinVec out(s.domain());
    out.addScaled(s.adjointColumn(j), ac);
    out.addScaled(t.adjointColumn(j), bc);
    return out;
  };
  return LocalOp(s.domain(), s.codomain(), std::max(s.band(), t.band()), std::move(col),
                 std::move(adj));
}

inline LocalOp scaleOp(Scalar a, const LocalOp& s) {
  return combineOp(a, s, Scalar{}, zeroOp(s.domain(), s.codomain()));
}

inline LocalOp commutatorOp(const LocalOp& s, const LocalOp& t) {
  return combineOp(Scalar{1.0, 0.0}, composeOp(s, t), Scalar{-1.0, 0.0}, composeOp(t, s));
}

// Block matrix of operators. Row/column spaces become orthogonal sums (with a
// leading SumPart step); absent blocks are zero. blocks[i][j] maps
// colSpaces[j] -> rowSpaces[i].
inline LocalOp blockOp(const std::vector<SpaceSpec>& rowSpaces,
                       const std::vector<SpaceSpec>& colSpaces,
                       const std::vector<std::vector<std::optional<LocalOp>>>& blocks) {
  require(rowSpaces.size() >= 2 && colSpaces.size() >= 2,
          "blockOp: needs at least a 2x2 block layout");
  require(blocks.size() == rowSpaces.size(), "blockOp: row count mismatch");
  int band = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    require(blocks[i].size() == colSpaces.size(), "blockOp: column count mismatch");
    for (std::size_t j = 0; j < blocks[i].size(); ++j) {
      if (!blocks[i][j]) continue;
      require(blocks[i][j]->domain() == colSpaces[j] && blocks[i][j]->codomain() == rowSpaces[i],
              "blockOp: block (" + std::to_string(i) + "," + std::to_string(j) +
                  ") has mismatched spaces");
      band = std::max(band, blocks[i][j]->band());
    }
  }
  SpaceSpec domain = SpaceSpec::sum(colSpaces);
  SpaceSpec codomain = SpaceSpec::sum(rowSpaces);
  auto shared = std::make_shared<const std::vector<std::vector<std::optional<LocalOp>>>>(blocks);
  SpaceSpec cod = codomain, dom = domain;
  auto col = [shared, cod](const BasisIndex& i) {
    const int j = i.front().value;
    const BasisIndex rest = i.tail();
    FinVec out(cod);
    for (std::size_t r = 0; r < shared->size(); ++r) {
      const auto& blk = (*shared)[r][j];
      if (!blk) continue;
      FinVec piece = blk->column(rest);
      for (const auto& [idx, c] : piece.entries()) {
        out.add(idx.prepended(part(static_cast<int>(r))), c);
      }
    }
    return out;
  };
  auto adj = [shared, dom](const BasisIndex& j) {
    const int r = j.front().value;
    const BasisIndex rest = j.tail();
    FinVec out(dom);
    for (std::size_t c = 0; c < (*shared)[r].size(); ++c) {
      const auto& blk = (*shared)[r][c];
      if (!blk) continue;
      FinVec piece = blk->adjointColumn(rest);
      for (const auto& [idx, v] : piece.entries()) {
        out.add(idx.prepended(part(static_cast<int>(c))), v);
      }
    }
    return out;
  };
  return LocalOp(domain, codomain, band, std::move(col), std::move(adj));
}

// Column operator into a sequence space: places op_k(v) at Copy(position_k).
// Used for the first-column pieces of dilation matrices.
inline LocalOp seqColumnOp(const SpaceSpec& domain, const SpaceSpec& seqInner,
                           const std::vector<std::pair<int, LocalOp>>& pieces) {
  SpaceSpec codomain = SpaceSpec::sequenceOf(seqInner);
  int band = 0;
  for (const auto& [pos, op] : pieces) {
    require(pos >= 0, "seqColumnOp: copy position must be >= 0");
    require(op.domain() == domain && op.codomain() == seqInner,
            "seqColumnOp: piece spaces do not match");
    band = std::max(band, pos + op.band() + 1);
  }
  auto shared = std::make_shared<const std::vector<std::pair<int, LocalOp>>>(pieces);
  SpaceSpec cod = codomain, dom = domain;
  auto col = [shared, cod](const BasisIndex& i) {
    FinVec out(cod);
    for (const auto& [pos, op] : *shared) {
      FinVec piece = op.column(i);
      for (const auto& [idx, c] : piece.entries()) out.add(idx.prepended(copy(pos)), c);
    }
    return out;
  };
  auto adj = [shared, dom](const BasisIndex& j) {
    const int n = j.front().value;
    const BasisIndex rest = j.tail();
    FinVec out(dom);
    for (const auto& [pos, op] : *shared) {
      if (pos != n) continue;
      out.addScaled(op.adjointColumn(rest), Scalar{1.0, 0.0});
    }
    return out;
  };
  return LocalOp(domain, codomain, band, std::move(col), std::move(adj));
}

inline LocalOp operator*(const LocalOp& s, const LocalOp& t) { return composeOp(s, t); }
inline LocalOp operator+(const LocalOp& s, const LocalOp& t) {
  return combineOp(Scalar{1.0, 0.0}, s, Scalar{1.0, 0.0}, t);
}
inline LocalOp operator-(const LocalOp& s, const LocalOp& t) {
  return combineOp(Scalar{1.0, 0.0}, s, Scalar{-1.0, 0.0}, t);
}
inline LocalOp operator*(Scalar a, const LocalOp& s) { return scaleOp(a, s); }

struct WindowComparison {
  bool equal = false;
  double maxDeviation = 0.0;
};

// Columnwise comparison over a window: max_i ||(s - t) e_i||_2. Columns are
// exact, so support outside the window still contributes to the deviation.
inline WindowComparison windowEquality(const LocalOp& s, const LocalOp& t,
                                       std::span<const BasisIndex> window, double tol) {
  require(s.domain() == t.domain() && s.codomain() == t.codomain(),
          "windowEquality: operands live on different spaces");
  double worst = 0.0;
  for (const BasisIndex& i : window) {
    FinVec diff = s.column(i);
    diff.addScaled(t.column(i), Scalar{-1.0, 0.0});
    worst = std::max(worst, diff.norm());
  }
  return WindowComparison{worst <= tol, worst};
}

// max_i ||op e_i||_2 over the window; deviation of an operator from zero.
inline double maxColumnNorm(const LocalOp& op, std::span<const BasisIndex> window) {
  double worst = 0.0;
  for (const BasisIndex& i : window) worst = std::max(worst, op.column(i).norm());
  return worst;
}

}  // namespace tetra
