#pragma once

#include <compare>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "tetra/scalar.hpp"

namespace tetra {

// Graded separable Hilbert-space descriptor: a finite-dimensional block, an
// l2-sequence of copies of an inner space, or a finite orthogonal sum.
// Immutable value type; copies share the underlying tree.
class SpaceSpec {
 public:
  enum class Kind { Finite, Sequence, Sum };

  static SpaceSpec finite(int dim) {
    require(dim >= 1, "SpaceSpec::finite: dimension must be >= 1");
    auto node = std::make_shared<Node>();
    node->kind = Kind::Finite;
    node->dim = dim;
    return SpaceSpec(std::move(node));
  }

  static SpaceSpec sequenceOf(SpaceSpec inner) {
    auto node = std::make_shared<Node>();
    node->kind = Kind::Sequence;
    node->children.push_back(std::move(inner));
    return SpaceSpec(std::move(node));
  }

  static SpaceSpec sum(std::vector<SpaceSpec> parts) {
    require(parts.size() >= 2, "SpaceSpec::sum: needs at least two parts");
    auto node = std::make_shared<Node>();
    node->kind = Kind::Sum;
    node->children = std::move(parts);
    return SpaceSpec(std::move(node));
  }

  Kind kind() const { return node_->kind; }

  int finiteDim() const {
    require(kind() == Kind::Finite, "SpaceSpec: not a finite block");
    return node_->dim;
  }

  const SpaceSpec& inner() const {
    require(kind() == Kind::Sequence, "SpaceSpec: not a sequence space");
    return node_->children.front();
  }

  const std::vector<SpaceSpec>& parts() const {
    require(kind() == Kind::Sum, "SpaceSpec: not a sum space");
    return node_->children;
  }

  bool operator==(const SpaceSpec& other) const {
    return equalNodes(node_.get(), other.node_.get());
  }
  bool operator!=(const SpaceSpec& other) const { return !(*this == other); }

  std::string str() const {
    std::ostringstream os;
    print(os);
    return os.str();
  }

 private:
  struct Node {
    Kind kind = Kind::Finite;
    int dim = 0;
    std::vector<SpaceSpec> children;
  };

  explicit SpaceSpec(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  static bool equalNodes(const Node* a, const Node* b) {
    if (a == b) return true;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
      case Kind::Finite:
        return a->dim == b->dim;
      case Kind::Sequence:
        return a->children.front() == b->children.front();
      case Kind::Sum: {
        if (a->children.size() != b->children.size()) return false;
        for (std::size_t i = 0; i < a->children.size(); ++i) {
          if (!(a->children[i] == b->children[i])) return false;
        }
        return true;
      }
    }
    return false;
  }

  void print(std::ostringstream& os) const {
    switch (kind()) {
      case Kind::Finite:
        os << "C^" << node_->dim;
        break;
      case Kind::Sequence:
        os << "l2(" << node_->children.front().str() << ")";
        break;
      case Kind::Sum: {
        os << "(";
        for (std::size_t i = 0; i < node_->children.size(); ++i) {
          if (i) os << " (+) ";
          os << node_->children[i].str();
        }
        os << ")";
        break;
      }
    }
  }

  std::shared_ptr<const Node> node_;
};

// One step of a basis path: which summand, which sequence copy, or which
// coordinate of a finite block. Steps compare by kind then value; along any
// two paths of the same space the kinds agree until a SumPart value differs,
// so path comparison is plain lexicographic comparison of steps.
struct Step {
  enum class Kind { SumPart, Copy, Coord };
  Kind kind;
  int value;
  auto operator<=>(const Step&) const = default;
};

inline Step part(int k) { return Step{Step::Kind::SumPart, k}; }
inline Step copy(int n) { return Step{Step::Kind::Copy, n}; }
inline Step coord(int j) { return Step{Step::Kind::Coord, j}; }

// A standard basis vector of a graded space, addressed by its full path from
// the root of the SpaceSpec tree down to a coordinate.
struct BasisIndex {
  std::vector<Step> path;

  auto operator<=>(const BasisIndex&) const = default;

  const Step& front() const {
    require(!path.empty(), "BasisIndex: empty path has no front step");
    return path.front();
  }

  BasisIndex tail() const {
    require(!path.empty(), "BasisIndex: empty path has no tail");
    return BasisIndex{std::vector<Step>(path.begin() + 1, path.end())};
  }

  BasisIndex prepended(Step s) const {
    BasisIndex out;
    out.path.reserve(path.size() + 1);
    out.path.push_back(s);
    out.path.insert(out.path.end(), path.begin(), path.end());
    return out;
  }

  std::string str() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < path.size(); ++i) {
      if (i) os << ",";
      switch (path[i].kind) {
        case Step::Kind::SumPart: os << "part " << path[i].value; break;
        case Step::Kind::Copy: os << "copy " << path[i].value; break;
        case Step::Kind::Coord: os << "coord " << path[i].value; break;
      }
    }
    os << "]";
    return os.str();
  }
};

inline BasisIndex index(std::vector<Step> steps) { return BasisIndex{std::move(steps)}; }

namespace detail {

inline bool validIndexFrom(const SpaceSpec& space, const BasisIndex& idx, std::size_t pos) {
  switch (space.kind()) {
    case SpaceSpec::Kind::Finite: {
      if (pos + 1 != idx.path.size()) return false;
      const Step& s = idx.path[pos];
      return s.kind == Step::Kind::Coord && s.value >= 0 && s.value < space.finiteDim();
    }
    case SpaceSpec::Kind::Sequence: {
      if (pos >= idx.path.size()) return false;
      const Step& s = idx.path[pos];
      if (s.kind != Step::Kind::Copy || s.value < 0) return false;
      return validIndexFrom(space.inner(), idx, pos + 1);
    }
    case SpaceSpec::Kind::Sum: {
      if (pos >= idx.path.size()) return false;
      const Step& s = idx.path[pos];
      if (s.kind != Step::Kind::SumPart || s.value < 0 ||
          s.value >= static_cast<int>(space.parts().size())) {
        return false;
      }
      return validIndexFrom(space.parts()[s.value], idx, pos + 1);
    }
  }
  return false;
}

inline void appendWindow(const SpaceSpec& space, int depth, std::vector<Step>& prefix,
                         std::vector<BasisIndex>& out) {
  switch (space.kind()) {
    case SpaceSpec::Kind::Finite: {
      for (int j = 0; j < space.finiteDim(); ++j) {
        prefix.push_back(coord(j));
        out.push_back(BasisIndex{prefix});
        prefix.pop_back();
      }
      break;
    }
    case SpaceSpec::Kind::Sequence: {
      for (int n = 0; n < depth; ++n) {
        prefix.push_back(copy(n));
        appendWindow(space.inner(), depth, prefix, out);
        prefix.pop_back();
      }
      break;
    }
    case SpaceSpec::Kind::Sum: {
      for (std::size_t k = 0; k < space.parts().size(); ++k) {
        prefix.push_back(part(static_cast<int>(k)));
        appendWindow(space.parts()[k], depth, prefix, out);
        prefix.pop_back();
      }
      break;
    }
  }
}

}  // namespace detail

inline bool isValidIndex(const SpaceSpec& space, const BasisIndex& idx) {
  return detail::validIndexFrom(space, idx, 0);
}

// All basis paths whose Copy(n) steps all satisfy n < depth, in lexicographic
// path order (sum parts in order, then copies, then coordinates). Identity
// checks and dense truncations both run over these finite windows.
inline std::vector<BasisIndex> windowIndices(const SpaceSpec& space, int depth) {
  require(depth >= 1, "windowIndices: depth must be >= 1");
  std::vector<BasisIndex> out;
  std::vector<Step> prefix;
  detail::appendWindow(space, depth, prefix, out);
  return out;
}

}  // namespace tetra
