#pragma once

#include <cmath>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "carnot/common.hpp"
#include "carnot/rational.hpp"

namespace carnot {

// Raw structure-constant entry as it appears in input files. 1-based indices,
// meaning [X_i, X_j] has coefficient c on X_k.
struct BracketEntry {
  int i = 0;
  int j = 0;
  int k = 0;
  double c = 0.0;
};

template <class S>
using Vector = std::vector<S>;

using VecD = Vector<double>;
using VecQ = Vector<Rational>;

namespace vec {

template <class S>
Vector<S> zero(int n) {
  return Vector<S>(static_cast<std::size_t>(n), S(0));
}

template <class S>
Vector<S> add(const Vector<S>& a, const Vector<S>& b) {
  Vector<S> r(a);
  for (std::size_t t = 0; t < r.size(); ++t) r[t] += b[t];
  return r;
}

template <class S>
Vector<S> sub(const Vector<S>& a, const Vector<S>& b) {
  Vector<S> r(a);
  for (std::size_t t = 0; t < r.size(); ++t) r[t] -= b[t];
  return r;
}

template <class S>
Vector<S> scale(const S& t, const Vector<S>& a) {
  Vector<S> r(a);
  for (auto& x : r) x *= t;
  return r;
}

template <class S>
S dot(const Vector<S>& a, const Vector<S>& b) {
  S s(0);
  for (std::size_t t = 0; t < a.size(); ++t) s += a[t] * b[t];
  return s;
}

template <class S>
Vector<S> neg(const Vector<S>& a) {
  Vector<S> r(a);
  for (auto& x : r) x = -x;
  return r;
}

inline double norm2(const VecD& a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(const VecD& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::fabs(x));
  return m;
}

template <class S>
Vector<S> to_scalar(const VecD& a) {
  Vector<S> r;
  r.reserve(a.size());
  for (double x : a) r.push_back(ScalarOps<S>::from_double(x));
  return r;
}

inline VecD to_dbl(const VecQ& a) {
  VecD r;
  r.reserve(a.size());
  for (const auto& x : a) r.push_back(to_double(x));
  return r;
}

inline VecD to_dbl(const VecD& a) { return a; }

}  // namespace vec

// A simply connected 2-step nilpotent Lie algebra/group in a fixed graded
// basis X_1..X_n: the first p vectors span V_inf, the rest span [n,n]. All
// group arithmetic runs in exponential coordinates through the truncated BCH
// product. Immutable after validation; share via shared_ptr.
template <class S>
class NilpotentAlgebra {
 public:
  struct Term {
    int i, j, k;  // 0-based, closed under antisymmetry (both (i,j) and (j,i))
    S c;
  };

  using Handle = std::shared_ptr<const NilpotentAlgebra<S>>;

  // validate_structure: checks index ranges, the 2-step grading and
  // antisymmetry, then completes the antisymmetric closure of the sparse list.
  static Handle validate(int n, int p, const std::vector<BracketEntry>& raw,
                         std::vector<std::string> names = {}) {
    require(1 <= p && p <= n, ErrorCode::BadDimensions,
            "need 1 <= p <= n, got p=" + std::to_string(p) + ", n=" + std::to_string(n));
    auto alg = std::shared_ptr<NilpotentAlgebra<S>>(new NilpotentAlgebra<S>());
    alg->n_ = n;
    alg->p_ = p;
    alg->names_ = std::move(names);
    require(alg->names_.empty() || static_cast<int>(alg->names_.size()) == n,
            ErrorCode::BadDimensions, "names list must have length n");

    // key (i,j,k) -> coefficient, 0-based, for duplicate/antisymmetry checks
    auto key = [n](int i, int j, int k) { return (static_cast<long long>(i) * n + j) * n + k; };
    std::vector<std::pair<long long, S>> seen;
    for (const auto& e : raw) {
      require(1 <= e.i && e.i <= n && 1 <= e.j && e.j <= n && 1 <= e.k && e.k <= n,
              ErrorCode::BadDimensions, "bracket index out of range");
      require(e.i <= p && e.j <= p && e.k > p, ErrorCode::NotTwoStep,
              "entry c[" + std::to_string(e.i) + "," + std::to_string(e.j) + "]^" +
                  std::to_string(e.k) + " violates the 2-step grading");
      require(e.i != e.j || e.c == 0.0, ErrorCode::AntisymmetryViolation,
              "c[i,i]^k must vanish");
      if (e.c == 0.0) continue;
      seen.emplace_back(key(e.i - 1, e.j - 1, e.k - 1), ScalarOps<S>::from_double(e.c));
    }
    // Merge duplicates exactly, then check stored mirror pairs.
    std::sort(seen.begin(), seen.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<long long, S>> merged;
    for (const auto& kv : seen) {
      if (!merged.empty() && merged.back().first == kv.first)
        require(merged.back().second == kv.second, ErrorCode::AntisymmetryViolation,
                "duplicate entry with conflicting coefficient");
      else
        merged.push_back(kv);
    }
    auto lookup = [&](long long k) -> const S* {
      auto it = std::lower_bound(merged.begin(), merged.end(), k,
                                 [](const auto& a, long long v) { return a.first < v; });
      if (it != merged.end() && it->first == k) return &it->second;
      return nullptr;
    };
    for (const auto& kv : merged) {
      const long long kk = kv.first;
      const int k = static_cast<int>(kk % n);
      const int j = static_cast<int>((kk / n) % n);
      const int i = static_cast<int>(kk / n / n);
      if (const S* mirror = lookup(key(j, i, k)))
        require(*mirror == -kv.second, ErrorCode::AntisymmetryViolation,
                "c[i,j]^k and c[j,i]^k are not opposite");
    }
    // Antisymmetric closure: store both orders once, (i,j) and (j,i).
    for (const auto& kv : merged) {
      const long long kk = kv.first;
      const int k = static_cast<int>(kk % n);
      const int j = static_cast<int>((kk / n) % n);
      const int i = static_cast<int>(kk / n / n);
      if (i < j || lookup(key(j, i, k)) == nullptr) {
        alg->terms_.push_back({i, j, k, kv.second});
        if (i != j) alg->terms_.push_back({j, i, k, -kv.second});
      } else if (i > j) {
        continue;  // mirror already emitted by the i<j branch
      }
    }
    std::sort(alg->terms_.begin(), alg->terms_.end(), [](const Term& a, const Term& b) {
      return std::tie(a.i, a.j, a.k) < std::tie(b.i, b.j, b.k);
    });
    return alg;
  }

  int dim() const { return n_; }
  int horizontal_dim() const { return p_; }
  int central_dim() const { return n_ - p_; }
  const std::vector<Term>& terms() const { return terms_; }
  const std::vector<std::string>& names() const { return names_; }

  void check_dim(const Vector<S>& a) const {
    require(static_cast<int>(a.size()) == n_, ErrorCode::DimensionMismatch,
            "expected an n-vector with n=" + std::to_string(n_));
  }

  // [A,B]_k = sum_{i,j<=p} A_i B_j c_{ij}^k; zero on horizontal coordinates.
  Vector<S> bracket(const Vector<S>& a, const Vector<S>& b) const {
    check_dim(a);
    check_dim(b);
    Vector<S> r = vec::zero<S>(n_);
    for (const Term& t : terms_) r[static_cast<std::size_t>(t.k)] += a[static_cast<std::size_t>(t.i)] * b[static_cast<std::size_t>(t.j)] * t.c;
    return r;
  }

  // log(exp(a) exp(b)) = a + b + [a,b]/2. Exact: BCH truncates in 2-step.
  Vector<S> bch(const Vector<S>& a, const Vector<S>& b) const {
    Vector<S> r = vec::add(a, b);
    const S h = ScalarOps<S>::half();
    for (const Term& t : terms_) r[static_cast<std::size_t>(t.k)] += h * a[static_cast<std::size_t>(t.i)] * b[static_cast<std::size_t>(t.j)] * t.c;
    return r;
  }

  // Embeds a horizontal coefficient vector (length p) as an n-vector.
  Vector<S> embed_horizontal(const Vector<S>& u) const {
    require(static_cast<int>(u.size()) == p_, ErrorCode::DimensionMismatch,
            "expected a p-vector with p=" + std::to_string(p_));
    Vector<S> r = vec::zero<S>(n_);
    for (int i = 0; i < p_; ++i) r[static_cast<std::size_t>(i)] = u[static_cast<std::size_t>(i)];
    return r;
  }

  Vector<S> project(const Vector<S>& a) const {
    check_dim(a);
    return Vector<S>(a.begin(), a.begin() + p_);
  }

  Vector<S> central_part(const Vector<S>& a) const {
    check_dim(a);
    return Vector<S>(a.begin() + p_, a.end());
  }

  Vector<S> dilate(const S& t, const Vector<S>& a) const {
    check_dim(a);
    require(t > S(0), ErrorCode::InvalidArgument, "dilation parameter must be positive");
    Vector<S> r(a);
    for (int i = 0; i < n_; ++i)
      r[static_cast<std::size_t>(i)] *= (i < p_) ? t : t * t;
    return r;
  }

 private:
  NilpotentAlgebra() = default;

  int n_ = 0;
  int p_ = 0;
  std::vector<Term> terms_;
  std::vector<std::string> names_;
};

using AlgebraD = NilpotentAlgebra<double>;
using AlgebraQ = NilpotentAlgebra<Rational>;

// Group element in exponential coordinates, tied to its algebra.
template <class S>
class GroupElement {
 public:
  GroupElement(typename NilpotentAlgebra<S>::Handle alg, Vector<S> coords)
      : alg_(std::move(alg)), coords_(std::move(coords)) {
    alg_->check_dim(coords_);
  }

  static GroupElement identity(typename NilpotentAlgebra<S>::Handle alg) {
    auto n = alg->dim();
    return GroupElement(std::move(alg), vec::zero<S>(n));
  }

  const Vector<S>& coords() const { return coords_; }
  const typename NilpotentAlgebra<S>::Handle& algebra() const { return alg_; }

  bool same_algebra(const GroupElement& o) const { return alg_.get() == o.alg_.get(); }

  GroupElement operator*(const GroupElement& o) const {
    require(same_algebra(o), ErrorCode::DimensionMismatch, "elements of different algebras");
    return GroupElement(alg_, alg_->bch(coords_, o.coords_));
  }

  // In exponential coordinates the inverse is the negation: X and -X commute.
  GroupElement inverse() const { return GroupElement(alg_, vec::neg(coords_)); }

  bool is_identity(const S& tol = S(0)) const {
    for (const auto& x : coords_)
      if (!(ScalarOps<S>::abs(x) <= tol)) return false;
    return true;
  }

  bool operator==(const GroupElement& o) const {
    return same_algebra(o) && coords_ == o.coords_;
  }

 private:
  typename NilpotentAlgebra<S>::Handle alg_;
  Vector<S> coords_;
};

using ElementD = GroupElement<double>;
using ElementQ = GroupElement<Rational>;

template <class S>
GroupElement<S> group_commutator(const GroupElement<S>& g, const GroupElement<S>& h) {
  return g.inverse() * h.inverse() * g * h;
}

template <class S>
GroupElement<S> dilate(const S& t, const GroupElement<S>& g) {
  return GroupElement<S>(g.algebra(), g.algebra()->dilate(t, g.coords()));
}

// pi(g): first p exponential coordinates; a homomorphism onto V_inf.
template <class S>
Vector<S> project_pi(const GroupElement<S>& g) {
  return g.algebra()->project(g.coords());
}

// Convenience constructors used all over the tests and tools.
inline AlgebraD::Handle heisenberg_algebra() {
  return AlgebraD::validate(3, 2, {{1, 2, 3, 1.0}}, {"X", "Y", "Z"});
}

inline AlgebraQ::Handle heisenberg_algebra_q() {
  return AlgebraQ::validate(3, 2, {{1, 2, 3, 1.0}}, {"X", "Y", "Z"});
}

// R x h3: horizontal X,Y,W with [X,Y]=Z; W is the singular direction.
inline AlgebraD::Handle r_times_heisenberg_algebra() {
  return AlgebraD::validate(4, 3, {{1, 2, 4, 1.0}}, {"X", "Y", "W", "Z"});
}

// h3 x h3: [X1,X2]=Z1, [X3,X4]=Z2.
inline AlgebraD::Handle heisenberg_squared_algebra() {
  return AlgebraD::validate(6, 4, {{1, 2, 5, 1.0}, {3, 4, 6, 1.0}});
}

}  // namespace carnot
