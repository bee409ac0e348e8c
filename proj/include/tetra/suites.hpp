#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "tetra/constructions.hpp"
#include "tetra/report.hpp"
#include "tetra/tetrablock.hpp"

namespace tetra::cli {

namespace detail {

inline std::vector<Monomial> monomialsUpToDegree(int maxDegree) {
  std::vector<Monomial> out;
  for (int e1 = 0; e1 <= maxDegree; ++e1) {
    for (int e2 = 0; e1 + e2 <= maxDegree; ++e2) {
      for (int e3 = 0; e1 + e2 + e3 <= maxDegree; ++e3) {
        out.push_back(Monomial{e1, e2, e3});
      }
    }
  }
  return out;
}

inline std::variant<double, std::pair<double, double>> bracketValue(const NormEstimate& n) {
  return std::pair<double, double>{n.lower, n.upper};
}

// Checks shared by both dilation suites: defining identities of the dilated
// triple, norm facts about its first two operators, and the compression of
// every low-degree monomial back onto the embedded space.
inline void appendDilationChecks(Report& rep, const OperatorTriple& t, const DilationTriple& dil,
                                 double expectedNorm, const RunConfig& cfg) {
  const double tol = cfg.tol();
  OperatorTriple big{dil.bigSpace, dil.v1, dil.v2, dil.v3};
  IsometryReport iso = tetrablockIsometryCheck(big, cfg.windowDepth, tol, tol, cfg.normDepthMax);

  const double worstCommutator =
      std::max({iso.commutator12, iso.commutator13, iso.commutator23});
  rep.checks.push_back(makeCheck("dilation-commuting",
                                 "[V1,V2] = [V1,V3] = [V2,V3] = 0 on the window",
                                 worstCommutator, tol));
  rep.checks.push_back(
      makeCheck("dilation-isometry", "V3* V3 = I", iso.isometryDeviation, tol));
  rep.checks.push_back(
      makeCheck("dilation-product", "V1 = V2* V3", iso.productDeviation, tol));

  auto normChecks = [&](const std::string& which, const NormEstimate& est) {
    const double valueDev =
        std::max(std::abs(est.lower - expectedNorm), std::abs(est.upper - expectedNorm));
    rep.checks.push_back(makeCheck("norm-" + which, "||" + which + "|| = |alpha|", valueDev, tol,
                                   bracketValue(est)));
    const double boundDev = std::max(0.0, est.lower - 1.0);
    rep.checks.push_back(makeCheck("norm-" + which + "-bound", "||" + which + "|| <= 1", boundDev,
                                   tol, bracketValue(est)));
  };
  normChecks("V1", iso.norm1);
  normChecks("V2", iso.norm2);

  CompressionReport comp =
      dilationCompressionCheck(t, dil, monomialsUpToDegree(3), cfg.windowDepth, tol);
  rep.checks.push_back(makeCheck("embed-isometry", "the embedding of the base space is isometric",
                                 comp.embedIsometryDeviation, tol));
  rep.checks.push_back(makeCheck("coinvariance",
                                 "no dilation column feeds the complement back into the base space",
                                 comp.coinvarianceDeviation, tol));
  rep.checks.push_back(makeCheck(
      "compression", "P_H q(V1,V2,V3)|_H = q(X1,X2,X3) for all monomials q of degree <= 3",
      comp.maxMonomialDeviation, tol,
      std::variant<double, std::pair<double, double>>{comp.maxMonomialDeviation}));
}

inline Report verifyPal(const RunConfig& cfg) {
  Report rep{cfg, {}};
  const double tol = cfg.tol();
  const double a = std::abs(cfg.alpha);
  OperatorTriple t = tetra::detail::palTripleUnchecked(cfg.alpha, cfg.windowDepth);
  const std::vector<BasisIndex> win = windowIndices(t.space, cfg.windowDepth);

  double productDev = 0.0;
  for (const LocalOp* s : {&t.a, &t.b, &t.p}) {
    for (const LocalOp* u : {&t.a, &t.b, &t.p}) {
      if (s == u) continue;
      productDev = std::max(productDev, maxColumnNorm(composeOp(*s, *u), win));
    }
  }
  rep.checks.push_back(makeCheck("products-vanish",
                                 "all pairwise products among X1, X2, X3 vanish", productDev, tol));

  NormEstimate pNorm = operatorNormEstimate(t.p, 1e-9, cfg.normDepthMax);
  rep.checks.push_back(makeCheck("contraction-X3", "||X3|| <= 1",
                                 std::max(0.0, pNorm.lower - 1.0), tol, bracketValue(pNorm)));

  LocalOp q = combineOp(Scalar{1.0, 0.0}, identityOp(t.space), Scalar{-1.0, 0.0},
                        composeOp(adjointOp(t.p), t.p));
  const double idemDev = windowEquality(composeOp(q, q), q, win, 0.0).maxDeviation;
  const double selfAdjDev = windowEquality(q, adjointOp(q), win, 0.0).maxDeviation;
  rep.checks.push_back(makeCheck("defect-projection", "I - X3* X3 is an orthogonal projection",
                                 std::max(idemDev, selfAdjDev), tol));
  rep.checks.push_back(makeCheck(
      "defect-closed-form", "I - X3* X3 equals the projection onto the last two summands",
      windowEquality(q, tetra::detail::palDefectProjection(), win, 0.0).maxDeviation, tol));

  FundamentalPair fp = tetra::detail::palFundamentalsUnchecked(cfg.alpha, cfg.windowDepth);
  rep.checks.push_back(
      makeCheck("fundamental-f1", "X1 - X2* X3 = D F1 D", fp.residual1, tol));
  rep.checks.push_back(
      makeCheck("fundamental-f2", "X2 - X1* X3 = D F2 D", fp.residual2, tol));

  DefectData d = defectOperator(t.p, cfg.windowDepth);
  FundamentalPair solved = solveFundamental(t, d, cfg.windowDepth);
  const double solverDev =
      std::max(windowEquality(solved.f1, fp.f1, win, 0.0).maxDeviation,
               windowEquality(solved.f2, fp.f2, win, 0.0).maxDeviation);
  rep.checks.push_back(makeCheck(
      "fundamental-solver", "the solved fundamental pair matches the closed form", solverDev, tol));

  RelationsReport rel = fundamentalRelationsCheck(t, d, fp, cfg.windowDepth, tol);
  rep.checks.push_back(makeCheck("fundamental-relations",
                                 "D X1 = F1 D + F2* D X3 and D X2 = F2 D + F1* D X3",
                                 std::max(rel.deviation1, rel.deviation2), tol));

  CommutatorBalance bal = commutatorBalance(fp, cfg.windowDepth);
  rep.checks.push_back(makeCheck("commutator-balance", "|| [F1,F1*] - [F2,F2*] || = |alpha|^2",
                                 std::abs(bal.gapNorm - a * a), tol,
                                 std::variant<double, std::pair<double, double>>{bal.gapNorm}));

  DilationTriple dil = directDilation(t, fp, cfg.windowDepth);
  appendDilationChecks(rep, t, dil, a, cfg);
  return rep;
}

inline Report verifyAdjoint(const RunConfig& cfg) {
  Report rep{cfg, {}};
  const double tol = cfg.tol();
  const double a = std::abs(cfg.alpha);
  SpaceSpec h = palSpace();
  LocalOp aOp = tetra::detail::palAOp(cfg.alpha);
  LocalOp bOp = tetra::detail::palBOp();
  LocalOp pOp = tetra::detail::palPOp();
  OperatorTriple t = makeCommutingTriple(h, adjointOp(aOp), adjointOp(bOp), adjointOp(pOp),
                                         cfg.windowDepth);
  const std::vector<BasisIndex> win = windowIndices(h, cfg.windowDepth);
  AdjointDilationData data = tetra::detail::adjointDilationUnchecked(cfg.alpha);

  LocalOp q = combineOp(Scalar{1.0, 0.0}, identityOp(h), Scalar{-1.0, 0.0},
                        composeOp(adjointOp(t.p), t.p));
  rep.checks.push_back(makeCheck(
      "defect-closed-form",
      "I - X3 X3* equals I on the first two summands and the first-copy projection on the third",
      windowEquality(q, data.dpStar, win, 0.0).maxDeviation, tol));
  const double idemDev = windowEquality(composeOp(q, q), q, win, 0.0).maxDeviation;
  rep.checks.push_back(
      makeCheck("defect-projection", "I - X3 X3* is an orthogonal projection", idemDev, tol));

  auto fundamentalDev = [&](const LocalOp& lhs1, const LocalOp& lhs2, const LocalOp& g) {
    LocalOp rhs = combineOp(Scalar{1.0, 0.0}, lhs1, Scalar{-1.0, 0.0}, lhs2);
    LocalOp recon = composeOp(data.dpStar, composeOp(g, data.dpStar));
    return windowEquality(rhs, recon, win, 0.0).maxDeviation;
  };
  rep.checks.push_back(makeCheck(
      "fundamental-g1", "X1* - X2 X3* = D* G1 D*",
      fundamentalDev(adjointOp(aOp), composeOp(bOp, adjointOp(pOp)), data.g1), tol));
  rep.checks.push_back(makeCheck(
      "fundamental-g2", "X2* - X1 X3* = D* G2 D*",
      fundamentalDev(adjointOp(bOp), composeOp(aOp, adjointOp(pOp)), data.g2), tol));

  DefectData dStar{data.dpStar, data.dpStar, true, cfg.windowDepth};
  FundamentalPair gp{data.g1, data.g2, 0.0, 0.0};
  RelationsReport rel = fundamentalRelationsCheck(t, dStar, gp, cfg.windowDepth, tol);
  rep.checks.push_back(makeCheck("fundamental-relations",
                                 "D* X1* = G1 D* + G2* D* X3* and D* X2* = G2 D* + G1* D* X3*",
                                 std::max(rel.deviation1, rel.deviation2), tol));

  CommutatorBalance bal = commutatorBalance(gp, cfg.windowDepth);
  rep.checks.push_back(makeCheck("commutator-balance", "|| [G1,G1*] - [G2,G2*] || = |alpha|^2",
                                 std::abs(bal.gapNorm - a * a), tol,
                                 std::variant<double, std::pair<double, double>>{bal.gapNorm}));

  appendDilationChecks(rep, t, data.dilation, a, cfg);
  return rep;
}

inline Report verifyToeplitzForm(const RunConfig& cfg) {
  Report rep{cfg, {}};
  const double tol = cfg.tol();
  OperatorTriple t = tetra::detail::palTripleUnchecked(cfg.alpha, cfg.windowDepth);
  FundamentalPair fp = tetra::detail::palFundamentalsUnchecked(cfg.alpha, cfg.windowDepth);
  LocalOp xi = adjointOp(fp.f1);
  DefectData d = defectOperator(t.p, cfg.windowDepth);

  DilationTriple direct = directDilation(t, fp, cfg.windowDepth);
  DilationTriple toep = toeplitzDilation(t, fp, xi, d, cfg.windowDepth);
  const std::vector<BasisIndex> bigWin = windowIndices(direct.bigSpace, cfg.windowDepth);
  rep.checks.push_back(makeCheck(
      "routes-agree-V1", "direct and Toeplitz-form dilations agree entrywise in the first slot",
      windowEquality(direct.v1, toep.v1, bigWin, 0.0).maxDeviation, tol));
  rep.checks.push_back(makeCheck(
      "routes-agree-V2", "direct and Toeplitz-form dilations agree entrywise in the second slot",
      windowEquality(direct.v2, toep.v2, bigWin, 0.0).maxDeviation, tol));
  rep.checks.push_back(makeCheck(
      "routes-agree-V3", "direct and Toeplitz-form dilations agree entrywise in the third slot",
      windowEquality(direct.v3, toep.v3, bigWin, 0.0).maxDeviation, tol));

  OperatorSymbol phi1(t.space, {{0, fp.f1}, {1, xi}, {2, adjointOp(fp.f2)}});
  OperatorSymbol phi2(t.space, {{0, fp.f2}, {1, adjointOp(xi)}, {2, adjointOp(fp.f1)}});
  LocalOp t1 = toeplitzFromSymbol(phi1);
  LocalOp t2 = toeplitzFromSymbol(phi2);
  LocalOp s2 = shiftOp(t.space, 2);
  const SpaceSpec seq = SpaceSpec::sequenceOf(t.space);
  const std::vector<BasisIndex> seqWin = windowIndices(seq, cfg.windowDepth);

  auto commutantDev = [&](const LocalOp& op) {
    return windowEquality(composeOp(op, s2), composeOp(s2, op), seqWin, 0.0).maxDeviation;
  };
  const bool pattern1 = tz2CommutantPatternCheck(t1, std::max(cfg.windowDepth, 3), tol);
  const bool pattern2 = tz2CommutantPatternCheck(t2, std::max(cfg.windowDepth, 3), tol);
  CheckEntry pat = makeCheck("double-shift-commutant",
                             "both block-Toeplitz tails commute with the double shift "
                             "and carry its commutant block pattern",
                             std::max(commutantDev(t1), commutantDev(t2)), tol);
  if (!pattern1 || !pattern2) pat.status = CheckStatus::Fail;
  rep.checks.push_back(pat);

  rep.checks.push_back(makeCheck("toeplitz-product-relation", "T_phi1 = T_phi2* T_z^2",
                                 windowEquality(t1, composeOp(adjointOp(t2), s2), seqWin, 0.0)
                                     .maxDeviation,
                                 tol));

  SymbolExtraction ext = extractSymbol(t1, std::max(cfg.windowDepth, 4));
  double roundtripDev = ext.toeplitzDeviation;
  if (ext.symbol) {
    const std::vector<BasisIndex> hWin = windowIndices(t.space, cfg.windowDepth);
    for (int n = -2; n <= 4; ++n) {
      roundtripDev = std::max(
          roundtripDev,
          windowEquality(ext.symbol->coefficient(n), phi1.coefficient(n), hWin, 0.0).maxDeviation);
    }
  } else {
    roundtripDev = std::numeric_limits<double>::infinity();
  }
  rep.checks.push_back(makeCheck(
      "symbol-roundtrip", "the symbol extracted from the block-Toeplitz tail matches phi1",
      roundtripDev, tol,
      std::variant<double, std::pair<double, double>>{ext.toeplitzDeviation}));

  OperatorTriple bigTriple{toep.bigSpace, toep.v1, toep.v2, toep.v3};
  IsometryReport iso =
      tetrablockIsometryCheck(bigTriple, cfg.windowDepth, tol, tol, cfg.normDepthMax);
  const double identityDev =
      std::max({iso.commutator12, iso.commutator13, iso.commutator23, iso.isometryDeviation,
                iso.productDeviation});
  rep.checks.push_back(makeCheck("toeplitz-dilation-identities",
                                 "the Toeplitz-form triple commutes, has isometric third slot, "
                                 "and satisfies V1 = V2* V3",
                                 identityDev, tol));
  return rep;
}

inline Report xiCheck(const RunConfig& cfg) {
  Report rep{cfg, {}};
  const double tol = cfg.tol();
  OperatorTriple t = tetra::detail::palTripleUnchecked(cfg.alpha, cfg.windowDepth);
  FundamentalPair fp = tetra::detail::palFundamentalsUnchecked(cfg.alpha, cfg.windowDepth);
  DefectData d = defectOperator(t.p, cfg.windowDepth);
  LocalOp xi = adjointOp(fp.f1);

  XiConditionsReport xr =
      xiConditions(fp, xi, d, t.p, cfg.windowDepth, tol, cfg.gridSize);
  const char* anchors[5] = {
      "(Xi F1* - Xi* F2*) D X3 = 0",
      "[F2, F2*] - [F1, F1*] = [Xi, Xi*]",
      "[F1, F2] = 0",
      "[Xi, F2] = [Xi*, F1]",
      "Xi D X3 = 0 and Xi* D X3 = 0",
  };
  for (int k = 0; k < 5; ++k) {
    rep.checks.push_back(makeCheck("xi-cond-" + std::to_string(k + 1), anchors[k],
                                   xr.deviations[static_cast<std::size_t>(k)], tol));
  }
  CheckEntry sup = makeCheck("xi-symbol-contractive", "sup_{|z|=1} ||phi1(z)|| <= 1",
                             std::max(0.0, xr.phi1SupNorm.lower - 1.0), std::max(tol, 1e-10),
                             std::variant<double, std::pair<double, double>>{
                                 std::pair<double, double>{xr.phi1SupNorm.lower,
                                                           xr.phi1SupNorm.upper}});
  rep.checks.push_back(sup);

  // With the coefficient forced to zero, conditions (1), (4), (5) hold for
  // trivial reasons and condition (2) is left with the full commutator gap.
  const double a = std::abs(cfg.alpha);
  std::array<double, 5> zeroDevs = tetra::detail::xiConditionDeviations(
      fp, zeroOp(t.space, t.space), d, t.p, windowIndices(t.space, cfg.windowDepth));
  const double trivialDev = std::max({zeroDevs[0], zeroDevs[3], zeroDevs[4], zeroDevs[2]});
  const double gapDev = std::abs(zeroDevs[1] - a * a);
  rep.checks.push_back(makeCheck(
      "xi-zero-reduction",
      "with Xi = 0 conditions (1), (4), (5) hold trivially and (2) has gap |alpha|^2",
      std::max(trivialDev, gapDev), tol,
      std::variant<double, std::pair<double, double>>{zeroDevs[1]}));
  return rep;
}

inline Report xiSearchSuite(const RunConfig& cfg) {
  Report rep{cfg, {}};
  const double tol = cfg.tol();
  OperatorTriple t = tetra::detail::palTripleUnchecked(cfg.alpha, cfg.windowDepth);
  FundamentalPair fp = tetra::detail::palFundamentalsUnchecked(cfg.alpha, cfg.windowDepth);
  DefectData d = defectOperator(t.p, cfg.windowDepth);

  XiSearchResult sr = xiSearch(fp, d, t.p, std::min(cfg.windowDepth, 4));
  CheckEntry found = makeCheck("search-found",
                               "the search produces a coefficient meeting the condition set",
                               sr.candidate ? sr.residual : std::max(sr.residual, 1.0),
                               std::max(tol, 1e-8),
                               std::variant<double, std::pair<double, double>>{sr.residual});
  if (!sr.candidate) found.status = CheckStatus::Fail;
  rep.checks.push_back(found);

  if (sr.candidate) {
    XiConditionsReport xr = xiConditions(fp, sr.candidate->xi, d, t.p, cfg.windowDepth,
                                         std::max(tol, 1e-8), cfg.gridSize);
    double worst = 0.0;
    for (double dev : xr.deviations) worst = std::max(worst, dev);
    rep.checks.push_back(makeCheck("search-candidate-valid",
                                   "the found coefficient satisfies all five conditions",
                                   worst, std::max(tol, 1e-8)));
    rep.checks.push_back(makeCheck(
        "search-symbol-contractive", "sup_{|z|=1} ||phi1(z)|| <= 1 for the found coefficient",
        std::max(0.0, xr.phi1SupNorm.lower - 1.0), std::max(tol, 1e-10),
        std::variant<double, std::pair<double, double>>{
            std::pair<double, double>{xr.phi1SupNorm.lower, xr.phi1SupNorm.upper}}));
  }
  return rep;
}

inline Report membershipSuite(const RunConfig& cfg) {
  require(cfg.point.has_value(), "membership: --point is required");
  Report rep{cfg, {}};
  const double tol = cfg.tol();
  MembershipResult closure = membershipOracle(*cfg.point, MembershipMode::Closure, tol);
  CheckEntry c = makeCheck("closure-member",
                           "some fiber element over the point has operator norm <= 1",
                           std::max(0.0, closure.achievedNorm - 1.0), tol,
                           std::variant<double, std::pair<double, double>>{closure.achievedNorm});
  if (closure.verdict == MembershipVerdict::Unknown) c.status = CheckStatus::Unknown;
  if (closure.verdict == MembershipVerdict::NotMember) c.status = CheckStatus::Fail;
  rep.checks.push_back(c);

  MembershipResult boundary = membershipOracle(*cfg.point, MembershipMode::Boundary, tol);
  CheckEntry b;
  b.name = "boundary-distance";
  b.paperAnchor = "distance of the fiber from the unitaries (informational)";
  b.status =
      boundary.verdict == MembershipVerdict::Unknown ? CheckStatus::Unknown : CheckStatus::Pass;
  b.value = boundary.unitaryDefect;
  b.tolerance = tol;
  b.deviation = 0.0;
  rep.checks.push_back(b);
  return rep;
}

}  // namespace detail

// Runs the named verification suite. Unrecognized subcommands and malformed
// configurations throw std::invalid_argument (the usage error path).
inline Report runSuite(const RunConfig& cfg) {
  if (cfg.subcommand == "verify-pal") return detail::verifyPal(cfg);
  if (cfg.subcommand == "verify-adjoint") return detail::verifyAdjoint(cfg);
  if (cfg.subcommand == "verify-toeplitz-form") return detail::verifyToeplitzForm(cfg);
  if (cfg.subcommand == "xi-check") return detail::xiCheck(cfg);
  if (cfg.subcommand == "xi-search") return detail::xiSearchSuite(cfg);
  if (cfg.subcommand == "membership") return detail::membershipSuite(cfg);
  throw std::invalid_argument("unknown subcommand: " + cfg.subcommand);
}

}  // namespace tetra::cli
