#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "support.hpp"
#include "tetra/constructions.hpp"

using namespace tetra;
using testsupport::matOp;

namespace {

const Scalar kAlpha{0.6, 0.3};

std::vector<Monomial> monomialsUpTo(int maxDegree) {
  std::vector<Monomial> out;
  for (int e1 = 0; e1 <= maxDegree; ++e1) {
    for (int e2 = 0; e2 + e1 <= maxDegree; ++e2) {
      for (int e3 = 0; e3 + e2 + e1 <= maxDegree; ++e3) {
        out.push_back(Monomial{e1, e2, e3});
      }
    }
  }
  return out;
}

// Identity-on-everything defect data for finite test spaces with P = 0.
DefectData fullDefect(const SpaceSpec& h) {
  return DefectData{identityOp(h), identityOp(h), true, 2};
}

LocalOp upperNilpotent(Scalar weight) {
  Eigen::MatrixXcd n = Eigen::MatrixXcd::Zero(2, 2);
  n(0, 1) = weight;
  return matOp(n);
}

}  // namespace

TEST(Family, PairwiseProductsVanishExactly) {
  OperatorTriple t = palTriple({kAlpha, 4});
  std::vector<BasisIndex> win = windowIndices(t.space, 4);
  for (const auto& [s, u] : {std::pair{&t.a, &t.b}, {&t.a, &t.p}, {&t.b, &t.p},
                             {&t.b, &t.a}, {&t.p, &t.a}, {&t.p, &t.b}}) {
    EXPECT_EQ(maxColumnNorm(composeOp(*s, *u), win), 0.0);
  }
  EXPECT_EQ(maxColumnNorm(composeOp(t.a, t.a), win), 0.0);  // nilpotent block
}

TEST(Family, ThirdOperatorIsAPartialIsometryWithProjectionDefect) {
  OperatorTriple t = palTriple({kAlpha, 4});
  std::vector<BasisIndex> win = windowIndices(t.space, 4);
  // P is a partial isometry (P P* P = P), so I - P*P is already a projection.
  LocalOp pStarP = composeOp(adjointOp(t.p), t.p);
  EXPECT_EQ(windowEquality(composeOp(t.p, pStarP), t.p, win, 0.0).maxDeviation, 0.0);
  DefectData d = defectOperator(t.p, 4);
  EXPECT_TRUE(d.isProjection);
  // The defect is the identity on the last two summands and nothing else.
  for (const BasisIndex& i : win) {
    FinVec col = d.dp.column(i);
    if (i.front().value >= 2) {
      ASSERT_EQ(col.entries().size(), 1u);
      EXPECT_EQ(col.entries().begin()->first, i);
      EXPECT_EQ(col.entries().begin()->second, (Scalar{1.0, 0.0}));
    } else {
      EXPECT_TRUE(col.empty());
    }
  }
}

TEST(Family, ClosedFormFundamentalsSolveTheEquations) {
  OperatorTriple t = palTriple({kAlpha, 4});
  FundamentalPair fp = palFundamentals({kAlpha, 4});
  EXPECT_EQ(fp.residual1, 0.0);
  EXPECT_EQ(fp.residual2, 0.0);
  std::vector<BasisIndex> win = windowIndices(t.space, 4);
  EXPECT_EQ(maxColumnNorm(fp.f2, win), 0.0);

  DefectData d = defectOperator(t.p, 4);
  RelationsReport rel = fundamentalRelationsCheck(t, d, fp, 4);
  EXPECT_TRUE(rel.pass) << rel.deviation1 << " " << rel.deviation2;

  // The generic solver lands on the same pair.
  FundamentalPair solved = solveFundamental(t, d, 4);
  EXPECT_EQ(windowEquality(solved.f1, fp.f1, win, 0.0).maxDeviation, 0.0);
  EXPECT_EQ(windowEquality(solved.f2, fp.f2, win, 0.0).maxDeviation, 0.0);
}

TEST(Family, BalanceGapIsTheSquaredWeight) {
  FundamentalPair fp = palFundamentals({kAlpha, 4});
  EXPECT_NEAR(commutatorBalance(fp, 4).gapNorm, std::norm(kAlpha), 1e-12);
  FundamentalPair flat = palFundamentals({Scalar{}, 4});
  EXPECT_EQ(commutatorBalance(flat, 4).gapNorm, 0.0);
}

TEST(Family, AdmissionGates) {
  EXPECT_NO_THROW(palTriple({Scalar{1.0, 0.0}, 4}));
  EXPECT_THROW(palTriple({Scalar{1.0 + 1e-6, 0.0}, 4}), std::invalid_argument);
  EXPECT_THROW(palTriple({kAlpha, 1}), std::invalid_argument);
  EXPECT_THROW(palFundamentals({Scalar{1.5, 0.0}, 4}), std::invalid_argument);
  EXPECT_THROW(adjointDilation({Scalar{1.5, 0.0}}), std::invalid_argument);
}

TEST(Dilation, DirectRoutePassesAllStructureChecks) {
  OperatorTriple t = palTriple({kAlpha, 4});
  FundamentalPair fp = palFundamentals({kAlpha, 4});
  DilationTriple dil = directDilation(t, fp, 4);
  IsometryReport iso = tetrablockIsometryCheck(OperatorTriple{dil.bigSpace, dil.v1, dil.v2, dil.v3},
                                               4, 1e-10, 1e-12, 64);
  EXPECT_TRUE(iso.pass) << iso.isometryDeviation << " " << iso.productDeviation;
  EXPECT_NEAR(iso.norm1.lower, std::abs(kAlpha), 1e-9);
  EXPECT_NEAR(iso.norm2.upper, std::abs(kAlpha), 1e-9);
  CompressionReport comp = dilationCompressionCheck(t, dil, monomialsUpTo(3), 3, 1e-10);
  EXPECT_TRUE(comp.pass) << comp.maxMonomialDeviation;
}

TEST(Dilation, UnitModulusWeightStaysAdmissible) {
  const Scalar edge = std::polar(1.0, 0.9);
  OperatorTriple t = palTriple({edge, 4});
  FundamentalPair fp = palFundamentals({edge, 4});
  DilationTriple dil = directDilation(t, fp, 4);
  IsometryReport iso = tetrablockIsometryCheck(OperatorTriple{dil.bigSpace, dil.v1, dil.v2, dil.v3},
                                               4, 1e-10, 1e-12, 64);
  EXPECT_TRUE(iso.pass);
  EXPECT_NEAR(iso.norm1.upper, 1.0, 1e-9);
}

TEST(Dilation, RejectsUnsupportedFundamentalShapes) {
  OperatorTriple t = palTriple({kAlpha, 4});
  LocalOp id = identityOp(t.space);
  LocalOp zero = zeroOp(t.space, t.space);
  EXPECT_THROW(directDilation(t, FundamentalPair{zero, id, 0.0, 0.0}, 4),
               std::invalid_argument);  // second operator must vanish
  EXPECT_THROW(directDilation(t, FundamentalPair{id, zero, 0.0, 0.0}, 4),
               std::invalid_argument);  // first operator must square to zero
}

TEST(Dilation, WrongBandWeightBreaksTheProductRelation) {
  // Feeding the dilation a band built from a different weight leaves the
  // corners intact but breaks V1 = V2* V3 by exactly the weight difference.
  OperatorTriple t = palTriple({kAlpha, 4});
  const Scalar off = kAlpha + Scalar{1e-3, 0.0};
  FundamentalPair wrong = detail::palFundamentalsUnchecked(off, 4);
  DilationTriple dil = directDilation(t, wrong, 4);
  IsometryReport iso = tetrablockIsometryCheck(OperatorTriple{dil.bigSpace, dil.v1, dil.v2, dil.v3},
                                               4, 1e-10, 1e-12, 64);
  EXPECT_FALSE(iso.identitiesPass);
  EXPECT_NEAR(iso.productDeviation, 1e-3, 1e-9);
}

TEST(Adjoint, ClosedFormsMatchTheDefiningEquations) {
  const Scalar alpha = kAlpha;
  OperatorTriple t = palTriple({alpha, 4});
  AdjointDilationData ad = adjointDilation({alpha, 4});
  std::vector<BasisIndex> win = windowIndices(t.space, 4);

  // Defect of P*: I - P P* equals the assembled projection exactly.
  LocalOp ppAdj = composeOp(t.p, adjointOp(t.p));
  LocalOp defect = combineOp(Scalar{1.0, 0.0}, identityOp(t.space), Scalar{-1.0, 0.0}, ppAdj);
  EXPECT_EQ(windowEquality(defect, ad.dpStar, win, 0.0).maxDeviation, 0.0);
  EXPECT_EQ(windowEquality(composeOp(ad.dpStar, ad.dpStar), ad.dpStar, win, 0.0).maxDeviation,
            0.0);

  // A* - B P* = D* G1 D* and B* - A P* = 0 = D* G2 D*, entrywise.
  LocalOp rhs1 = adjointOp(t.a);  // B = 0
  LocalOp lhs1 = composeOp(ad.dpStar, composeOp(ad.g1, ad.dpStar));
  EXPECT_EQ(windowEquality(lhs1, rhs1, win, 0.0).maxDeviation, 0.0);
  LocalOp rhs2 = scaleOp(Scalar{-1.0, 0.0}, composeOp(t.a, adjointOp(t.p)));
  EXPECT_EQ(maxColumnNorm(rhs2, win), 0.0);
  EXPECT_EQ(maxColumnNorm(ad.g2, win), 0.0);
}

TEST(Adjoint, DilationDilatesTheAdjointTriple) {
  AdjointDilationData ad = adjointDilation({kAlpha, 4});
  OperatorTriple t = palTriple({kAlpha, 4});
  OperatorTriple star{t.space, adjointOp(t.a), adjointOp(t.b), adjointOp(t.p)};
  IsometryReport iso = tetrablockIsometryCheck(
      OperatorTriple{ad.dilation.bigSpace, ad.dilation.v1, ad.dilation.v2, ad.dilation.v3}, 4,
      1e-10, 1e-12, 64);
  EXPECT_TRUE(iso.pass) << iso.isometryDeviation << " " << iso.productDeviation;
  CompressionReport comp = dilationCompressionCheck(star, ad.dilation, monomialsUpTo(3), 3, 1e-10);
  EXPECT_TRUE(comp.pass) << comp.maxMonomialDeviation;
}

TEST(Routes, SymbolRouteMatchesTheDirectRouteEntrywise) {
  OperatorTriple t = palTriple({kAlpha, 4});
  FundamentalPair fp = palFundamentals({kAlpha, 4});
  DilationTriple direct = directDilation(t, fp, 4);
  DefectData d = defectOperator(t.p, 4);
  DilationTriple symbolic = toeplitzDilation(t, fp, adjointOp(fp.f1), d, 4);
  ASSERT_TRUE(direct.bigSpace == symbolic.bigSpace);
  std::vector<BasisIndex> bigWin = windowIndices(direct.bigSpace, 4);
  EXPECT_EQ(windowEquality(direct.v1, symbolic.v1, bigWin, 0.0).maxDeviation, 0.0);
  EXPECT_EQ(windowEquality(direct.v2, symbolic.v2, bigWin, 0.0).maxDeviation, 0.0);
  EXPECT_EQ(windowEquality(direct.v3, symbolic.v3, bigWin, 0.0).maxDeviation, 0.0);
  EXPECT_EQ(windowEquality(direct.embed, symbolic.embed, windowIndices(t.space, 4), 0.0)
                .maxDeviation,
            0.0);

  IsometryReport iso = tetrablockIsometryCheck(
      OperatorTriple{symbolic.bigSpace, symbolic.v1, symbolic.v2, symbolic.v3}, 4, 1e-10, 1e-12,
      64);
  EXPECT_TRUE(iso.pass);
}

TEST(XiConditions, AdjointSeedSatisfiesEverything) {
  OperatorTriple t = palTriple({kAlpha, 4});
  FundamentalPair fp = palFundamentals({kAlpha, 4});
  DefectData d = defectOperator(t.p, 4);
  XiConditionsReport r = xiConditions(fp, adjointOp(fp.f1), d, t.p, 4, 1e-12, 256);
  for (int k = 0; k < 5; ++k) {
    EXPECT_EQ(r.deviations[k], 0.0) << "condition " << (k + 1);
    EXPECT_TRUE(r.passes[k]);
  }
  EXPECT_TRUE(r.supNormPass);
  EXPECT_TRUE(r.allPass);
  EXPECT_NEAR(r.phi1SupNorm.lower, std::abs(kAlpha), 1e-8);
  EXPECT_GE(r.phi1SupNorm.upper, r.phi1SupNorm.lower);
}

TEST(XiConditions, ZeroCoefficientLeavesExactlyTheBalanceGap) {
  OperatorTriple t = palTriple({kAlpha, 4});
  FundamentalPair fp = palFundamentals({kAlpha, 4});
  DefectData d = defectOperator(t.p, 4);
  XiConditionsReport r = xiConditions(fp, zeroOp(t.space, t.space), d, t.p, 4, 1e-12, 256);
  EXPECT_EQ(r.deviations[0], 0.0);
  EXPECT_NEAR(r.deviations[1], std::norm(kAlpha), 1e-12);
  EXPECT_EQ(r.deviations[2], 0.0);
  EXPECT_EQ(r.deviations[3], 0.0);
  EXPECT_EQ(r.deviations[4], 0.0);
  EXPECT_FALSE(r.passes[1]);
  EXPECT_FALSE(r.allPass);
}

TEST(XiConditions, BalanceDeviationMatchesDenseOracle) {
  // Independent small-matrix check of the reported deviation: for F2 = Xi = 0
  // condition (2) reads -[F1, F1*], whose worst column norm is computed here
  // with plain dense arithmetic.
  std::mt19937_64 rng(51);
  Eigen::MatrixXcd m = testsupport::randomMatrix(rng, 2, 2);
  SpaceSpec h = SpaceSpec::finite(2);
  FundamentalPair fp{matOp(m), zeroOp(h, h), 0.0, 0.0};
  XiConditionsReport r =
      xiConditions(fp, zeroOp(h, h), fullDefect(h), zeroOp(h, h), 2, 1e-12, 64);
  Eigen::MatrixXcd comm = m * m.adjoint() - m.adjoint() * m;
  const double oracle = std::max(comm.col(0).norm(), comm.col(1).norm());
  EXPECT_NEAR(r.deviations[1], oracle, 1e-12);
}

TEST(XiConditions, SupNormGateIsIndependentOfTheIdentities) {
  // A balanced pair with weight 2: all five identities hold, but the symbol
  // has norm 2 and the contractivity gate must fail on its own.
  SpaceSpec h = SpaceSpec::finite(2);
  LocalOp n = upperNilpotent(Scalar{2.0, 0.0});
  LocalOp rotated = scaleOp(std::polar(1.0, 0.5), n);
  FundamentalPair fp{n, rotated, 0.0, 0.0};
  XiConditionsReport r =
      xiConditions(fp, zeroOp(h, h), fullDefect(h), zeroOp(h, h), 2, 1e-12, 64);
  for (int k = 0; k < 5; ++k) EXPECT_TRUE(r.passes[k]) << "condition " << (k + 1);
  EXPECT_FALSE(r.supNormPass);
  EXPECT_FALSE(r.allPass);
  EXPECT_NEAR(r.phi1SupNorm.lower, 2.0, 1e-6);
}

TEST(XiSearch, ZeroWeightAcceptsTheZeroSeed) {
  FundamentalPair fp = detail::palFundamentalsUnchecked(Scalar{}, 4);
  OperatorTriple t = palTriple({Scalar{}, 4});
  DefectData d = defectOperator(t.p, 4);
  XiSearchResult res = xiSearch(fp, d, t.p, 4);
  ASSERT_TRUE(res.candidate.has_value());
  EXPECT_EQ(res.note, "seed Xi = 0");
  EXPECT_LT(res.residual, 1e-8);
}

TEST(XiSearch, FamilyAcceptsTheAdjointSeed) {
  OperatorTriple t = palTriple({kAlpha, 4});
  FundamentalPair fp = palFundamentals({kAlpha, 4});
  DefectData d = defectOperator(t.p, 4);
  XiSearchResult res = xiSearch(fp, d, t.p, 4);
  ASSERT_TRUE(res.candidate.has_value());
  EXPECT_EQ(res.note, "seed Xi = F1*");
  EXPECT_LT(res.residual, 1e-8);
  XiConditionsReport check = xiConditions(fp, res.candidate->xi, d, t.p, 4, 1e-8, 256);
  EXPECT_TRUE(check.allPass);
}

TEST(XiSearch, MirrorFamilyAcceptsTheSecondOperatorSeed) {
  // Swap the roles of the two fundamental operators: now Xi = F2 is the
  // coefficient that balances condition (2).
  SpaceSpec h = SpaceSpec::finite(2);
  LocalOp n = upperNilpotent(Scalar{0.5, 0.0});
  FundamentalPair fp{zeroOp(h, h), n, 0.0, 0.0};
  XiSearchResult res = xiSearch(fp, fullDefect(h), zeroOp(h, h), 2);
  ASSERT_TRUE(res.candidate.has_value());
  EXPECT_EQ(res.note, "seed Xi = F2");
  EXPECT_LT(res.residual, 1e-8);
}

TEST(XiSearch, NonCommutingPairIsRejectedUpFront) {
  SpaceSpec h = SpaceSpec::finite(2);
  LocalOp up = upperNilpotent(Scalar{1.0, 0.0});
  FundamentalPair fp{up, adjointOp(up), 0.0, 0.0};
  XiSearchResult res = xiSearch(fp, fullDefect(h), zeroOp(h, h), 2);
  EXPECT_FALSE(res.candidate.has_value());
  EXPECT_EQ(res.note.rfind("no candidate: [F1, F2] != 0", 0), 0u) << res.note;
  EXPECT_GT(res.residual, 0.5);
}

TEST(XiSearch, ReportsHonestlyWhenNoSeedFits) {
  // F2 a scaled copy of F1: the pair commutes, but no closed-form seed
  // satisfies all five conditions at once. The search must either produce a
  // verified candidate or say that it found none.
  SpaceSpec h = SpaceSpec::finite(2);
  LocalOp n = upperNilpotent(Scalar{0.8, 0.0});
  FundamentalPair fp{n, scaleOp(Scalar{0.5, 0.0}, n), 0.0, 0.0};
  XiSearchResult res = xiSearch(fp, fullDefect(h), zeroOp(h, h), 2, 6);
  if (res.candidate.has_value()) {
    EXPECT_LT(res.residual, 1e-8);
    XiConditionsReport check =
        xiConditions(fp, res.candidate->xi, fullDefect(h), zeroOp(h, h), 2, 1e-8, 64);
    EXPECT_TRUE(check.allPass);
  } else {
    EXPECT_EQ(res.note, "no candidate within budget");
    EXPECT_TRUE(std::isfinite(res.residual));
    EXPECT_GE(res.iterations, 1);
    EXPECT_LE(res.iterations, 6);
  }
}

TEST(XiSearch, RejectsBadArguments) {
  SpaceSpec h = SpaceSpec::finite(2);
  FundamentalPair fp{zeroOp(h, h), zeroOp(h, h), 0.0, 0.0};
  EXPECT_THROW(xiSearch(fp, fullDefect(h), zeroOp(h, h), 0), std::invalid_argument);
  EXPECT_THROW(xiSearch(fp, fullDefect(h), zeroOp(h, h), 2, -1), std::invalid_argument);
}
