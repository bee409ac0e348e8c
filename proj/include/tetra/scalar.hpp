#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace tetra {

// All coefficients are complex doubles; operators never store approximate
// zeros, so equality-of-columns questions reduce to small finite sums.
using Scalar = std::complex<double>;

inline bool isFiniteScalar(const Scalar& z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// Contract violations (invalid indices, mismatched spaces, bad parameters)
// throw; numerical outcomes of checks are reported as data, never thrown.
inline void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

}  // namespace tetra
