#pragma once

#include <cmath>
#include <map>

#include "tetra/scalar.hpp"
#include "tetra/space.hpp"

namespace tetra {

// Finitely supported vector in a graded space: a sorted map from basis paths
// to nonzero coefficients. Arithmetic is exact (no truncation); entries that
// cancel to exactly zero are dropped so support stays minimal.
class FinVec {
 public:
  explicit FinVec(SpaceSpec space) : space_(std::move(space)) {}

  static FinVec basis(SpaceSpec space, const BasisIndex& idx) {
    FinVec v(std::move(space));
    require(isValidIndex(v.space_, idx), "FinVec::basis: index invalid for space " + v.space_.str());
    v.entries_.emplace(idx, Scalar{1.0, 0.0});
    return v;
  }

  const SpaceSpec& space() const { return space_; }

  void add(const BasisIndex& idx, Scalar c) {
    if (c == Scalar{}) return;
    require(isValidIndex(space_, idx), "FinVec::add: index invalid for space " + space_.str());
    auto [it, inserted] = entries_.emplace(idx, c);
    if (!inserted) {
      it->second += c;
      if (it->second == Scalar{}) entries_.erase(it);
    }
  }

  // this += c * other
  void addScaled(const FinVec& other, Scalar c) {
    require(space_ == other.space_, "FinVec::addScaled: space mismatch");
    if (c == Scalar{}) return;
    for (const auto& [idx, v] : other.entries_) {
      auto [it, inserted] = entries_.emplace(idx, c * v);
      if (inserted) {
        if (it->second == Scalar{}) entries_.erase(it);
      } else {
        it->second += c * v;
        if (it->second == Scalar{}) entries_.erase(it);
      }
    }
  }

  Scalar entry(const BasisIndex& idx) const {
    auto it = entries_.find(idx);
    return it == entries_.end() ? Scalar{} : it->second;
  }

  double normSq() const {
    double s = 0.0;
    for (const auto& [idx, v] : entries_) s += std::norm(v);
    return s;
  }

  double norm() const { return std::sqrt(normSq()); }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  const std::map<BasisIndex, Scalar>& entries() const& { return entries_; }
  // Rvalue overload: hands the map out by value so patterns like
  // `for (auto& [i, c] : op.column(k).entries())` never iterate into a
  // destroyed temporary (the range-for lifetime gap closed only in C++23).
  std::map<BasisIndex, Scalar> entries() && { return std::move(entries_); }

 private:
  SpaceSpec space_;
  std::map<BasisIndex, Scalar> entries_;
};

// Inner product, linear in the first slot and conjugate-linear in the second.
inline Scalar inner(const FinVec& u, const FinVec& v) {
  require(u.space() == v.space(), "inner: space mismatch");
  // Iterate over the smaller support.
  const FinVec& small = u.size() <= v.size() ? u : v;
  const FinVec& large = u.size() <= v.size() ? v : u;
  Scalar s{};
  for (const auto& [idx, c] : small.entries()) {
    Scalar other = large.entry(idx);
    if (other == Scalar{}) continue;
    if (&small == &u) {
      s += c * std::conj(other);
    } else {
      s += other * std::conj(c);
    }
  }
  return s;
}

}  // namespace tetra
