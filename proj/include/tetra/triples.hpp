#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "tetra/dense_window.hpp"
#include "tetra/local_op.hpp"
#include "tetra/operator_norm.hpp"

namespace tetra {

// Commuting triple (A, B, P) of contractions on a common space; the data
// format for everything dilation-related. Construct through
// makeCommutingTriple when admission checking is wanted.
struct OperatorTriple {
  SpaceSpec space;
  LocalOp a;
  LocalOp b;
  LocalOp p;
};

inline OperatorTriple makeCommutingTriple(SpaceSpec space, LocalOp a, LocalOp b, LocalOp p,
                                          int windowDepth = 8, double tol = 1e-12) {
  for (const LocalOp* op : {&a, &b, &p}) {
    require(op->domain() == space && op->codomain() == space,
            "makeCommutingTriple: operator does not act on the declared space");
  }
  const std::vector<BasisIndex> win = windowIndices(space, windowDepth);
  const std::pair<const LocalOp*, const LocalOp*> pairs[] = {{&a, &b}, {&a, &p}, {&b, &p}};
  for (const auto& [s, t] : pairs) {
    WindowComparison cmp = windowEquality(composeOp(*s, *t), composeOp(*t, *s), win, tol);
    require(cmp.equal, "makeCommutingTriple: operators do not commute on the window (deviation " +
                           std::to_string(cmp.maxDeviation) + ")");
  }
  return OperatorTriple{std::move(space), std::move(a), std::move(b), std::move(p)};
}

// Defect data of a contraction P: dp is the positive square root of I - P*P,
// defectProjector projects onto its range. When I - P*P is idempotent on the
// probe window the exact lazy operator is kept (dp is then itself the
// projector); otherwise both come from a dense window eigendecomposition.
struct DefectData {
  LocalOp dp;
  LocalOp defectProjector;
  bool isProjection = false;
  int depth = 0;
};

inline DefectData defectOperator(const LocalOp& p, int depth, double clampTol = 1e-10) {
  require(p.domain() == p.codomain(), "defectOperator: P must be a square operator");
  require(depth >= 1, "defectOperator: depth must be >= 1");
  const SpaceSpec space = p.domain();
  NormEstimate ne = operatorNormEstimate(p, 1e-8, std::min(std::max(depth, 8), 64));
  require(ne.lower <= 1.0 + clampTol,
          "defectOperator: P is not a contraction (norm lower bound " + std::to_string(ne.lower) +
              ")");
  LocalOp q = combineOp(Scalar{1.0, 0.0}, identityOp(space), Scalar{-1.0, 0.0},
                        composeOp(adjointOp(p), p));
  const std::vector<BasisIndex> win = windowIndices(space, depth);
  WindowComparison idem = windowEquality(composeOp(q, q), q, win, 1e-12);
  if (idem.equal) {
    return DefectData{q, q, true, depth};
  }
  DenseWindow qw = denseOnWindows(q, win, win);
  DenseWindow root = psdSqrtDense(qw, clampTol);  // rejects non-contractions on the window
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (qw.matrix + qw.matrix.adjoint()));
  require(eig.info() == Eigen::Success, "defectOperator: eigendecomposition failed");
  Eigen::VectorXd indicator = eig.eigenvalues();
  for (Eigen::Index k = 0; k < indicator.size(); ++k) {
    indicator(k) = indicator(k) > clampTol ? 1.0 : 0.0;
  }
  DenseWindow proj;
  proj.rows = qw.rows;
  proj.cols = qw.cols;
  proj.matrix = eig.eigenvectors() * indicator.asDiagonal() * eig.eigenvectors().adjoint();
  return DefectData{liftFromWindow(root, space, space), liftFromWindow(proj, space, space), false,
                    depth};
}

// Fundamental pair (F1, F2) for a triple: the solutions of
// A - B*P = D F1 D and B - A*P = D F2 D over the defect, with the residual
// window deviations of those two equations.
struct FundamentalPair {
  LocalOp f1;
  LocalOp f2;
  double residual1 = 0.0;
  double residual2 = 0.0;
};

namespace detail {

inline Eigen::MatrixXcd pseudoInverseHermitian(const Eigen::MatrixXcd& m, double cutoff) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (m + m.adjoint()));
  require(eig.info() == Eigen::Success, "pseudoInverseHermitian: eigendecomposition failed");
  Eigen::VectorXd lambda = eig.eigenvalues();
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    lambda(k) = std::abs(lambda(k)) > cutoff ? 1.0 / lambda(k) : 0.0;
  }
  return eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().adjoint();
}

}  // namespace detail

inline FundamentalPair solveFundamental(const OperatorTriple& t, const DefectData& d, int depth) {
  require(depth >= 1, "solveFundamental: depth must be >= 1");
  LocalOp rhs1 = combineOp(Scalar{1.0, 0.0}, t.a, Scalar{-1.0, 0.0},
                           composeOp(adjointOp(t.b), t.p));
  LocalOp rhs2 = combineOp(Scalar{1.0, 0.0}, t.b, Scalar{-1.0, 0.0},
                           composeOp(adjointOp(t.a), t.p));
  const std::vector<BasisIndex> win = windowIndices(t.space, depth);
  std::optional<LocalOp> f1, f2;
  if (d.isProjection) {
    // D is an exact projection: the compression D R D solves D X D = R
    // whenever R is supported on the defect, and is the natural candidate
    // otherwise; the residual reports any unsupported remainder.
    f1 = composeOp(d.dp, composeOp(rhs1, d.dp));
    f2 = composeOp(d.dp, composeOp(rhs2, d.dp));
  } else {
    DenseWindow dw = denseOnWindows(d.dp, win, win);
    Eigen::MatrixXcd pinv = detail::pseudoInverseHermitian(dw.matrix, 1e-10);
    DenseWindow r1 = denseOnWindows(rhs1, win, win);
    DenseWindow r2 = denseOnWindows(rhs2, win, win);
    DenseWindow x1{win, win, pinv * r1.matrix * pinv};
    DenseWindow x2{win, win, pinv * r2.matrix * pinv};
    f1 = liftFromWindow(x1, t.space, t.space);
    f2 = liftFromWindow(x2, t.space, t.space);
  }
  auto residual = [&](const LocalOp& rhs, const LocalOp& f) {
    LocalOp recon = composeOp(d.dp, composeOp(f, d.dp));
    return windowEquality(rhs, recon, win, 0.0).maxDeviation;
  };
  return FundamentalPair{*f1, *f2, residual(rhs1, *f1), residual(rhs2, *f2)};
}

struct RelationsReport {
  double deviation1 = 0.0;  // D A - (F1 D + F2* D P)
  double deviation2 = 0.0;  // D B - (F2 D + F1* D P)
  bool pass = false;
};

// The two intertwining relations every fundamental pair must satisfy:
// D A = F1 D + F2* D P and D B = F2 D + F1* D P, checked columnwise.
inline RelationsReport fundamentalRelationsCheck(const OperatorTriple& t, const DefectData& d,
                                                 const FundamentalPair& fp, int windowDepth,
                                                 double tol = 1e-12) {
  const std::vector<BasisIndex> win = windowIndices(t.space, windowDepth);
  LocalOp dpP = composeOp(d.dp, t.p);
  LocalOp lhs1 = composeOp(d.dp, t.a);
  LocalOp rhs1 = combineOp(Scalar{1.0, 0.0}, composeOp(fp.f1, d.dp), Scalar{1.0, 0.0},
                           composeOp(adjointOp(fp.f2), dpP));
  LocalOp lhs2 = composeOp(d.dp, t.b);
  LocalOp rhs2 = combineOp(Scalar{1.0, 0.0}, composeOp(fp.f2, d.dp), Scalar{1.0, 0.0},
                           composeOp(adjointOp(fp.f1), dpP));
  RelationsReport out;
  out.deviation1 = windowEquality(lhs1, rhs1, win, tol).maxDeviation;
  out.deviation2 = windowEquality(lhs2, rhs2, win, tol).maxDeviation;
  out.pass = out.deviation1 <= tol && out.deviation2 <= tol;
  return out;
}

struct CommutatorBalance {
  double gapNorm = 0.0;  // dense window norm of [F1, F1*] - [F2, F2*]
};

inline CommutatorBalance commutatorBalance(const FundamentalPair& fp, int windowDepth) {
  LocalOp gap = combineOp(Scalar{1.0, 0.0}, commutatorOp(fp.f1, adjointOp(fp.f1)),
                          Scalar{-1.0, 0.0}, commutatorOp(fp.f2, adjointOp(fp.f2)));
  DenseWindow w = truncateDense(gap, windowDepth);
  if (w.matrix.size() == 0 || w.matrix.cwiseAbs().maxCoeff() == 0.0) {
    return CommutatorBalance{0.0};
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(w.matrix);
  return CommutatorBalance{svd.singularValues()(0)};
}

// Verdict of the defining conditions for a triple of this kind: the third
// operator is an isometry, the first two are contractions, the first equals
// the adjoint of the second composed with the third, and all three commute.
struct IsometryReport {
  double commutator12 = 0.0;
  double commutator13 = 0.0;
  double commutator23 = 0.0;
  double isometryDeviation = 0.0;  // V3* V3 - I
  double productDeviation = 0.0;   // V1 - V2* V3
  NormEstimate norm1;
  NormEstimate norm2;
  bool normBound1 = false;
  bool normBound2 = false;
  bool identitiesPass = false;
  bool pass = false;
};

inline IsometryReport tetrablockIsometryCheck(const OperatorTriple& t, int windowDepth,
                                              double tol = 1e-10, double identityTol = 1e-12,
                                              int normMaxDepth = 256) {
  const std::vector<BasisIndex> win = windowIndices(t.space, windowDepth);
  IsometryReport r;
  r.commutator12 = windowEquality(composeOp(t.a, t.b), composeOp(t.b, t.a), win, 0.0).maxDeviation;
  r.commutator13 = windowEquality(composeOp(t.a, t.p), composeOp(t.p, t.a), win, 0.0).maxDeviation;
  r.commutator23 = windowEquality(composeOp(t.b, t.p), composeOp(t.p, t.b), win, 0.0).maxDeviation;
  r.isometryDeviation =
      windowEquality(composeOp(adjointOp(t.p), t.p), identityOp(t.space), win, 0.0).maxDeviation;
  r.productDeviation =
      windowEquality(t.a, composeOp(adjointOp(t.b), t.p), win, 0.0).maxDeviation;
  r.norm1 = operatorNormEstimate(t.a, 1e-9, normMaxDepth);
  r.norm2 = operatorNormEstimate(t.b, 1e-9, normMaxDepth);
  r.normBound1 = r.norm1.upper <= 1.0 + tol;
  r.normBound2 = r.norm2.upper <= 1.0 + tol;
  r.identitiesPass = r.commutator12 <= identityTol && r.commutator13 <= identityTol &&
                     r.commutator23 <= identityTol && r.isometryDeviation <= identityTol &&
                     r.productDeviation <= identityTol;
  r.pass = r.identitiesPass && r.normBound1 && r.normBound2;
  return r;
}

// Dilation of a triple: three operators on a larger space together with the
// isometric embedding of the original space, against which compressions are
// tested. The embedded space must be co-invariant for all three operators.
struct DilationTriple {
  SpaceSpec bigSpace;
  LocalOp v1;
  LocalOp v2;
  LocalOp v3;
  LocalOp embed;
};

struct Monomial {
  int e1 = 0;
  int e2 = 0;
  int e3 = 0;
  int degree() const { return e1 + e2 + e3; }
};

struct CompressionReport {
  double maxMonomialDeviation = 0.0;
  double coinvarianceDeviation = 0.0;  // embed* V e_k over complement columns
  double embedIsometryDeviation = 0.0;
  std::vector<double> perMonomial;
  bool pass = false;
};

namespace detail {

inline LocalOp monomialOf(const LocalOp& x1, const LocalOp& x2, const LocalOp& x3,
                          const Monomial& m, const SpaceSpec& space) {
  LocalOp acc = identityOp(space);
  for (int k = 0; k < m.e1; ++k) acc = composeOp(acc, x1);
  for (int k = 0; k < m.e2; ++k) acc = composeOp(acc, x2);
  for (int k = 0; k < m.e3; ++k) acc = composeOp(acc, x3);
  return acc;
}

}  // namespace detail

// Compression identity P_H q(V1,V2,V3)|_H = q(A,B,P) for each monomial q,
// plus the degree-zero structural facts: embed is an isometry on the window
// and the embedded space is co-invariant (no column of any V feeds back from
// the complement into H).
inline CompressionReport dilationCompressionCheck(const OperatorTriple& t, const DilationTriple& d,
                                                  const std::vector<Monomial>& monomials,
                                                  int windowDepth, double tol = 1e-10) {
  require(d.embed.domain() == t.space && d.embed.codomain() == d.bigSpace,
          "dilationCompressionCheck: embedding has mismatched spaces");
  const std::vector<BasisIndex> win = windowIndices(t.space, windowDepth);
  const std::vector<BasisIndex> bigWin = windowIndices(d.bigSpace, windowDepth);
  LocalOp embedAdj = adjointOp(d.embed);
  CompressionReport r;
  r.embedIsometryDeviation =
      windowEquality(composeOp(embedAdj, d.embed), identityOp(t.space), win, 0.0).maxDeviation;
  for (const BasisIndex& k : bigWin) {
    if (!embedAdj.column(k).empty()) continue;  // k is an embedded H index
    for (const LocalOp* v : {&d.v1, &d.v2, &d.v3}) {
      FinVec leak = applyOp(embedAdj, v->column(k));
      r.coinvarianceDeviation = std::max(r.coinvarianceDeviation, leak.norm());
    }
  }
  r.perMonomial.reserve(monomials.size());
  for (const Monomial& m : monomials) {
    LocalOp qv = detail::monomialOf(d.v1, d.v2, d.v3, m, d.bigSpace);
    LocalOp compressed = composeOp(embedAdj, composeOp(qv, d.embed));
    LocalOp qa = detail::monomialOf(t.a, t.b, t.p, m, t.space);
    const double dev = windowEquality(compressed, qa, win, 0.0).maxDeviation;
    r.perMonomial.push_back(dev);
    r.maxMonomialDeviation = std::max(r.maxMonomialDeviation, dev);
  }
  r.pass = r.maxMonomialDeviation <= tol && r.coinvarianceDeviation <= tol &&
           r.embedIsometryDeviation <= tol;
  return r;
}

}  // namespace tetra
