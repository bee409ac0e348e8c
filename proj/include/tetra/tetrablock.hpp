#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "tetra/scalar.hpp"

namespace tetra {

// A point of C^3 tested for membership in the closed tetrablock, the image of
// the closed unit ball of 2x2 matrices under A -> (a11, a22, det A).
struct TetrablockPoint {
  Scalar x1{};
  Scalar x2{};
  Scalar x3{};
};

inline TetrablockPoint piMap(const Eigen::Matrix2cd& a) {
  return TetrablockPoint{a(0, 0), a(1, 1), a.determinant()};
}

enum class MembershipMode { Closure, Boundary };
enum class MembershipVerdict { Member, NotMember, Unknown };

struct MembershipResult {
  MembershipVerdict verdict = MembershipVerdict::Unknown;
  Eigen::Matrix2cd witness = Eigen::Matrix2cd::Zero();
  double achievedNorm = 0.0;   // operator norm of the best norm-minimizing fiber element
  double unitaryDefect = 0.0;  // ||W*W - I||_F of the best near-unitary fiber element
  bool converged = false;
};

namespace detail {

inline double norm2x2(const Eigen::Matrix2cd& a) {
  // Largest singular value in closed form from tr(A*A) and |det A|^2.
  const double t = (a.adjoint() * a).trace().real();
  const double d = std::norm(a.determinant());
  const double disc = std::max(0.0, t * t - 4.0 * d);
  return std::sqrt(0.5 * (t + std::sqrt(disc)));
}

inline double unitaryDefect2x2(const Eigen::Matrix2cd& a) {
  return (a.adjoint() * a - Eigen::Matrix2cd::Identity()).norm();
}

// Fiber of the projection over a point: diagonal fixed, off-diagonal product
// fixed at q = x1 x2 - x3. branch 0 parameterizes a12 = r e^{i theta},
// a21 = q / a12 (needs q != 0 or r acting as a free upper entry); branches 1
// and 2 cover the degenerate product-zero fiber with one off-diagonal zero.
inline Eigen::Matrix2cd fiberElement(const TetrablockPoint& p, Scalar q, int branch, double r,
                                     double theta) {
  Eigen::Matrix2cd a;
  const Scalar off = std::polar(std::max(r, 0.0), theta);
  switch (branch) {
    case 0:
      a << p.x1, off, (std::abs(off) > 0.0 ? q / off : Scalar{}), p.x2;
      break;
    case 1:
      a << p.x1, off, Scalar{}, p.x2;
      break;
    default:
      a << p.x1, Scalar{}, off, p.x2;
      break;
  }
  return a;
}

struct FiberSearch {
  Eigen::Matrix2cd best = Eigen::Matrix2cd::Zero();
  double value = 0.0;
  bool converged = false;
};

// Coarse 64x64 (log r, theta) grid followed by shrinking pattern-search
// refinement of the given objective over one fiber branch.
template <typename Objective>
inline FiberSearch searchBranch(const TetrablockPoint& p, Scalar q, int branch, double rLo,
                                double rHi, Objective f) {
  constexpr int kGrid = 64;
  rLo = std::max(rLo, 1e-12);
  rHi = std::max(rHi, rLo * 1.0000001);
  const double lLo = std::log(rLo), lHi = std::log(rHi);
  double bestVal = std::numeric_limits<double>::infinity();
  double bestL = lLo, bestT = 0.0;
  for (int i = 0; i < kGrid; ++i) {
    const double l = lLo + (lHi - lLo) * i / (kGrid - 1);
    for (int j = 0; j < kGrid; ++j) {
      const double theta = 2.0 * std::numbers::pi * j / kGrid;
      const double v = f(fiberElement(p, q, branch, std::exp(l), theta));
      if (v < bestVal) {
        bestVal = v;
        bestL = l;
        bestT = theta;
      }
    }
  }
  double stepL = (lHi - lLo) / (kGrid - 1);
  double stepT = 2.0 * std::numbers::pi / kGrid;
  bool converged = false;
  for (int iter = 0; iter < 400; ++iter) {
    bool improved = false;
    const std::array<std::pair<double, double>, 4> moves{
        {{stepL, 0.0}, {-stepL, 0.0}, {0.0, stepT}, {0.0, -stepT}}};
    for (const auto& [dl, dt] : moves) {
      const double v = f(fiberElement(p, q, branch, std::exp(bestL + dl), bestT + dt));
      if (v < bestVal - 1e-18) {
        bestVal = v;
        bestL += dl;
        bestT += dt;
        improved = true;
      }
    }
    if (!improved) {
      stepL *= 0.5;
      stepT *= 0.5;
      if (stepL < 1e-10 && stepT < 1e-10) {
        converged = true;
        break;
      }
    }
  }
  FiberSearch out;
  out.best = fiberElement(p, q, branch, std::exp(bestL), bestT);
  out.value = bestVal;
  out.converged = converged;
  return out;
}

template <typename Objective>
inline FiberSearch searchFiber(const TetrablockPoint& p, Objective f) {
  const Scalar q = p.x1 * p.x2 - p.x3;
  const double aq = std::abs(q);
  FiberSearch best;
  best.value = std::numeric_limits<double>::infinity();
  auto consider = [&](const FiberSearch& s) {
    if (s.value < best.value) best = s;
  };
  if (aq <= 1e-14) {
    // Degenerate fiber: one off-diagonal vanishes; include the diagonal
    // element itself as the r -> 0 limit.
    Eigen::Matrix2cd diag;
    diag << p.x1, Scalar{}, Scalar{}, p.x2;
    FiberSearch d;
    d.best = diag;
    d.value = f(diag);
    d.converged = true;
    consider(d);
    consider(searchBranch(p, Scalar{}, 1, 1e-9, 4.0, f));
    consider(searchBranch(p, Scalar{}, 2, 1e-9, 4.0, f));
  } else {
    const double rc = std::sqrt(aq);
    const double rLo = std::min(rc / 64.0, std::max(aq / 4.0, 1e-9));
    const double rHi = std::max(64.0 * rc, 4.0);
    consider(searchBranch(p, q, 0, rLo, rHi, f));
  }
  return best;
}

}  // namespace detail

// Decides membership of a point in the closed tetrablock (mode Closure: some
// fiber element has operator norm <= 1 + tol) or in its distinguished
// boundary (mode Boundary: some fiber element is within tol of unitary).
// Non-convergence near the decision threshold is reported as Unknown.
inline MembershipResult membershipOracle(const TetrablockPoint& p, MembershipMode mode,
                                         double tol = 1e-6) {
  require(tol > 0.0, "membershipOracle: tol must be positive");
  require(isFiniteScalar(p.x1) && isFiniteScalar(p.x2) && isFiniteScalar(p.x3),
          "membershipOracle: point has non-finite coordinates");
  detail::FiberSearch normSearch =
      detail::searchFiber(p, [](const Eigen::Matrix2cd& a) { return detail::norm2x2(a); });
  MembershipResult out;
  out.achievedNorm = normSearch.value;
  if (mode == MembershipMode::Closure) {
    out.witness = normSearch.best;
    out.converged = normSearch.converged;
    if (normSearch.value <= 1.0 + tol) {
      out.verdict = MembershipVerdict::Member;
    } else if (!normSearch.converged && normSearch.value <= 1.0 + 10.0 * tol) {
      out.verdict = MembershipVerdict::Unknown;
    } else {
      out.verdict = MembershipVerdict::NotMember;
    }
    return out;
  }
  detail::FiberSearch defectSearch =
      detail::searchFiber(p, [](const Eigen::Matrix2cd& a) { return detail::unitaryDefect2x2(a); });
  out.witness = defectSearch.best;
  out.unitaryDefect = defectSearch.value;
  out.converged = defectSearch.converged;
  if (defectSearch.value <= tol) {
    out.verdict = MembershipVerdict::Member;
  } else if (!defectSearch.converged && defectSearch.value <= 10.0 * tol) {
    out.verdict = MembershipVerdict::Unknown;
  } else {
    out.verdict = MembershipVerdict::NotMember;
  }
  return out;
}

}  // namespace tetra
