#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "carnot/algebra.hpp"

namespace carnot {

// Lattices with exact integer coordinates and preset multiplication laws.
// Integer tuples keep BFS keys hashable and arithmetic exact; the embedding
// into exponential coordinates (the -xy/2 shift for Heisenberg factors) is a
// homomorphism onto bch multiplication, verified exactly in rational mode.

using LatticeElement = std::vector<std::int64_t>;

struct LatticeElementHash {
  std::size_t operator()(const LatticeElement& e) const {
    return static_cast<std::size_t>(fnv1a(e.data(), e.size() * sizeof(std::int64_t)));
  }
};

// Z^d with the identity embedding.
class ZdLattice {
 public:
  explicit ZdLattice(int d) : d_(d) {
    require(d >= 1, ErrorCode::BadDimensions, "Z^d needs d >= 1");
    std::vector<BracketEntry> none;
    alg_q_ = AlgebraQ::validate(d, d, none);
    alg_d_ = AlgebraD::validate(d, d, none);
  }

  std::string name() const { return "z" + std::to_string(d_); }
  int coord_count() const { return d_; }
  LatticeElement identity() const { return LatticeElement(static_cast<std::size_t>(d_), 0); }

  LatticeElement multiply(const LatticeElement& a, const LatticeElement& b) const {
    LatticeElement r(a);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
  }

  LatticeElement inverse(const LatticeElement& a) const {
    LatticeElement r(a);
    for (auto& x : r) x = -x;
    return r;
  }

  VecQ embed(const LatticeElement& a) const {
    VecQ r;
    r.reserve(a.size());
    for (auto x : a) r.emplace_back(x);
    return r;
  }

  const AlgebraQ::Handle& algebra_q() const { return alg_q_; }
  const AlgebraD::Handle& algebra_d() const { return alg_d_; }

  std::vector<LatticeElement> standard_generators() const {
    std::vector<LatticeElement> g;
    for (int i = 0; i < d_; ++i) {
      LatticeElement e = identity();
      e[static_cast<std::size_t>(i)] = 1;
      g.push_back(e);
    }
    return g;
  }

 private:
  int d_;
  AlgebraQ::Handle alg_q_;
  AlgebraD::Handle alg_d_;
};

// Integer Heisenberg group: (x,y,z)(x',y',z') = (x+x', y+y', z+z'+x y').
class H3ZLattice {
 public:
  H3ZLattice() {
    alg_q_ = heisenberg_algebra_q();
    alg_d_ = heisenberg_algebra();
  }

  std::string name() const { return "h3z"; }
  int coord_count() const { return 3; }
  LatticeElement identity() const { return {0, 0, 0}; }

  LatticeElement multiply(const LatticeElement& a, const LatticeElement& b) const {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2] + a[0] * b[1]};
  }

  LatticeElement inverse(const LatticeElement& a) const {
    return {-a[0], -a[1], -a[2] + a[0] * a[1]};
  }

  // (x,y,z) -> exponential coordinates (x, y, z - xy/2).
  VecQ embed(const LatticeElement& a) const {
    VecQ r;
    r.emplace_back(a[0]);
    r.emplace_back(a[1]);
    r.push_back(Rational(a[2]) - Rational(a[0]) * Rational(a[1]) / 2);
    return r;
  }

  const AlgebraQ::Handle& algebra_q() const { return alg_q_; }
  const AlgebraD::Handle& algebra_d() const { return alg_d_; }

  std::vector<LatticeElement> standard_generators() const {
    return {{1, 0, 0}, {0, 1, 0}};
  }

 private:
  AlgebraQ::Handle alg_q_;
  AlgebraD::Handle alg_d_;
};

// Z x H3(Z): coordinates (w, x, y, z); the Z factor is the slow direction of
// the convergence experiments.
class ZxH3ZLattice {
 public:
  ZxH3ZLattice() {
    // horizontal basis ordering (X, Y, W), center Z: [X1,X2] = X4
    alg_q_ = AlgebraQ::validate(4, 3, {{1, 2, 4, 1.0}}, {"X", "Y", "W", "Z"});
    alg_d_ = AlgebraD::validate(4, 3, {{1, 2, 4, 1.0}}, {"X", "Y", "W", "Z"});
  }

  std::string name() const { return "zxh3z"; }
  int coord_count() const { return 4; }
  LatticeElement identity() const { return {0, 0, 0, 0}; }

  LatticeElement multiply(const LatticeElement& a, const LatticeElement& b) const {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3] + a[1] * b[2]};
  }

  LatticeElement inverse(const LatticeElement& a) const {
    return {-a[0], -a[1], -a[2], -a[3] + a[1] * a[2]};
  }

  // (w,x,y,z) -> algebra coordinates (x, y, w, z - xy/2).
  VecQ embed(const LatticeElement& a) const {
    VecQ r;
    r.emplace_back(a[1]);
    r.emplace_back(a[2]);
    r.emplace_back(a[0]);
    r.push_back(Rational(a[3]) - Rational(a[1]) * Rational(a[2]) / 2);
    return r;
  }

  const AlgebraQ::Handle& algebra_q() const { return alg_q_; }
  const AlgebraD::Handle& algebra_d() const { return alg_d_; }

  // Product generators: the Z factor and the Heisenberg pair separately.
  std::vector<LatticeElement> product_generators() const {
    return {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}};
  }

  // Skew preset: every generator moves the Z factor; candidate for the slow
  // O(n^{-1/2}) behavior along the abnormal direction.
  std::vector<LatticeElement> skew_generators() const {
    return {{1, 1, 0, 0}, {1, 0, 1, 0}, {1, 0, 0, 0}};
  }

 private:
  AlgebraQ::Handle alg_q_;
  AlgebraD::Handle alg_d_;
};

// Custom lattice over an arbitrary validated algebra: elements are exact
// rational exponential coordinates multiplied by BCH.
class CustomLattice {
 public:
  using Element = VecQ;

  explicit CustomLattice(AlgebraQ::Handle alg, AlgebraD::Handle alg_d)
      : alg_q_(std::move(alg)), alg_d_(std::move(alg_d)) {}

  std::string name() const { return "custom"; }
  int coord_count() const { return alg_q_->dim(); }
  Element identity() const { return vec::zero<Rational>(alg_q_->dim()); }
  Element multiply(const Element& a, const Element& b) const { return alg_q_->bch(a, b); }
  Element inverse(const Element& a) const { return vec::neg(a); }
  const Element& embed(const Element& a) const { return a; }
  const AlgebraQ::Handle& algebra_q() const { return alg_q_; }
  const AlgebraD::Handle& algebra_d() const { return alg_d_; }

 private:
  AlgebraQ::Handle alg_q_;
  AlgebraD::Handle alg_d_;
};

struct CustomElementHash {
  std::size_t operator()(const VecQ& e) const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const auto& r : e) {
      const std::string s = r.str();
      h = fnv1a(s.data(), s.size(), h);
    }
    return static_cast<std::size_t>(h);
  }
};

// Symmetric closure, identity removed, duplicates dropped.
template <class L, class Hash>
std::vector<typename std::decay_t<decltype(std::declval<L>().identity())>> symmetrize_generators(
    const L& lattice, std::vector<typename std::decay_t<decltype(std::declval<L>().identity())>> gens) {
  using Elem = typename std::decay_t<decltype(std::declval<L>().identity())>;
  std::vector<Elem> out;
  std::unordered_map<Elem, bool, Hash> seen;
  const Elem id = lattice.identity();
  auto push = [&](const Elem& e) {
    if (e == id) return;
    if (seen.emplace(e, true).second) out.push_back(e);
  };
  for (const auto& g : gens) {
    push(g);
    push(lattice.inverse(g));
  }
  require(!out.empty(), ErrorCode::InvalidArgument, "generating set is empty after symmetrization");
  return out;
}

}  // namespace carnot
