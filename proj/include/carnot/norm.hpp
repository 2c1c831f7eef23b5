#pragma once

#include <string>
#include <vector>

#include "carnot/lp.hpp"

namespace carnot {

// Norm on R^q with a dual-support oracle. l1/linf/polytope are polyhedral and
// exact (vertex scans and LPs); l2 is the smooth case. The dual-support
// oracle is exactly the maximizer required by the PMP maximality condition,
// with ties broken by the lexicographically smallest optimal vertex.
template <class S>
class Norm {
 public:
  enum class Kind { L1, L2, Linf, Polytope };

  static Norm l1(int dim) { return Norm(Kind::L1, dim, {}); }
  static Norm l2(int dim) { return Norm(Kind::L2, dim, {}); }
  static Norm linf(int dim) { return Norm(Kind::Linf, dim, {}); }

  static Norm polytope(std::vector<Vector<S>> vertices) {
    require(!vertices.empty(), ErrorCode::InvalidArgument, "polytope needs vertices");
    const int dim = static_cast<int>(vertices[0].size());
    for (const auto& v : vertices)
      require(static_cast<int>(v.size()) == dim, ErrorCode::DimensionMismatch,
              "polytope vertices of mixed dimension");
    Norm n(Kind::Polytope, dim, std::move(vertices));
    n.validate_polytope();
    return n;
  }

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool polyhedral() const { return kind_ != Kind::L2; }

  void check_dim(const Vector<S>& v) const {
    require(static_cast<int>(v.size()) == dim_, ErrorCode::DimensionMismatch,
            "vector dimension does not match norm dimension");
  }

  S eval(const Vector<S>& v) const {
    check_dim(v);
    switch (kind_) {
      case Kind::L1: {
        S s(0);
        for (const auto& x : v) s += ScalarOps<S>::abs(x);
        return s;
      }
      case Kind::L2:
        return ScalarOps<S>::sqrt(vec::dot(v, v));
      case Kind::Linf: {
        S m(0);
        for (const auto& x : v) {
          S a = ScalarOps<S>::abs(x);
          if (a > m) m = a;
        }
        return m;
      }
      case Kind::Polytope:
        return gauge(v);
    }
    return S(0);
  }

  // ||v||^2 without taking roots, for exact comparisons in rational mode.
  S eval_squared(const Vector<S>& v) const {
    if (kind_ == Kind::L2) return vec::dot(v, v);
    const S e = eval(v);
    return e * e;
  }

  bool is_unit(const Vector<S>& v, const S& tol) const {
    if (kind_ == Kind::L2) return ScalarOps<S>::abs(eval_squared(v) - S(1)) <= tol;
    return ScalarOps<S>::abs(eval(v) - S(1)) <= tol;
  }

  // argmax_{||u||=1} <xi,u>. The value is the dual norm of xi.
  Vector<S> dual_support(const Vector<S>& xi) const {
    check_dim(xi);
    bool all_zero = true;
    for (const auto& x : xi)
      if (!ScalarOps<S>::is_zero(x)) {
        all_zero = false;
        break;
      }
    require(!all_zero, ErrorCode::ZeroCovector, "dual support of the zero covector");
    switch (kind_) {
      case Kind::L2: {
        const S n = ScalarOps<S>::sqrt(vec::dot(xi, xi));
        return vec::scale(S(1) / n, xi);
      }
      case Kind::Linf: {
        // Optimal corners have u_i = sign(xi_i); free slots go to -1, which is
        // the lexicographically smallest optimal corner.
        Vector<S> u = vec::zero<S>(dim_);
        for (int i = 0; i < dim_; ++i)
          u[static_cast<std::size_t>(i)] = xi[static_cast<std::size_t>(i)] > S(0) ? S(1) : S(-1);
        return u;
      }
      case Kind::L1:
      case Kind::Polytope:
        return best_vertex(xi);
    }
    return {};
  }

  S dual_norm(const Vector<S>& xi) const {
    check_dim(xi);
    switch (kind_) {
      case Kind::L2:
        return ScalarOps<S>::sqrt(vec::dot(xi, xi));
      case Kind::Linf: {
        S s(0);
        for (const auto& x : xi) s += ScalarOps<S>::abs(x);
        return s;
      }
      case Kind::L1: {
        S m(0);
        for (const auto& x : xi) {
          S a = ScalarOps<S>::abs(x);
          if (a > m) m = a;
        }
        return m;
      }
      case Kind::Polytope: {
        S m(0);
        bool first = true;
        for (const auto& v : vertices_) {
          S val = vec::dot(xi, v);
          if (first || val > m) {
            m = val;
            first = false;
          }
        }
        return m;
      }
    }
    return S(0);
  }

  // Extreme points of the unit ball, used by bang-bang control and by the
  // box-path seeding. L1 and Linf synthesize theirs; L2 has none.
  std::vector<Vector<S>> ball_vertices() const {
    switch (kind_) {
      case Kind::Polytope:
        return vertices_;
      case Kind::L1: {
        std::vector<Vector<S>> vs;
        vs.reserve(static_cast<std::size_t>(2 * dim_));
        for (int i = 0; i < dim_; ++i)
          for (int s = -1; s <= 1; s += 2) {
            Vector<S> v = vec::zero<S>(dim_);
            v[static_cast<std::size_t>(i)] = S(s);
            vs.push_back(std::move(v));
          }
        return vs;
      }
      case Kind::Linf: {
        require(dim_ <= 12, ErrorCode::InvalidArgument,
                "linf vertex enumeration limited to dimension 12");
        std::vector<Vector<S>> vs;
        vs.reserve(1u << dim_);
        for (unsigned mask = 0; mask < (1u << dim_); ++mask) {
          Vector<S> v(static_cast<std::size_t>(dim_), S(1));
          for (int i = 0; i < dim_; ++i)
            if (mask & (1u << i)) v[static_cast<std::size_t>(i)] = S(-1);
          vs.push_back(std::move(v));
        }
        return vs;
      }
      case Kind::L2:
        fail(ErrorCode::InvalidArgument, "l2 ball has no vertices");
    }
    return {};
  }

  std::string kind_name() const {
    switch (kind_) {
      case Kind::L1: return "l1";
      case Kind::L2: return "l2";
      case Kind::Linf: return "linf";
      case Kind::Polytope: return "polytope";
    }
    return "?";
  }

  const std::vector<Vector<S>>& polytope_vertices() const { return vertices_; }

 private:
  Norm(Kind k, int dim, std::vector<Vector<S>> verts)
      : kind_(k), dim_(dim), vertices_(std::move(verts)) {
    require(dim_ >= 1, ErrorCode::BadDimensions, "norm dimension must be positive");
  }

  void validate_polytope() const {
    const S tol = polytope_tol();
    for (const auto& v : vertices_) {
      bool has_neg = false;
      for (const auto& w : vertices_) {
        bool match = true;
        for (int i = 0; i < dim_; ++i)
          if (ScalarOps<S>::abs(v[static_cast<std::size_t>(i)] + w[static_cast<std::size_t>(i)]) > tol) {
            match = false;
            break;
          }
        if (match) {
          has_neg = true;
          break;
        }
      }
      require(has_neg, ErrorCode::InvalidArgument, "polytope vertex list is not origin-symmetric");
    }
    Mat<S> m(vertices_.begin(), vertices_.end());
    require(linalg::rank(m, tol) == dim_, ErrorCode::InvalidArgument,
            "polytope vertices do not span the space");
  }

  static S polytope_tol() {
    if constexpr (std::is_same_v<S, double>)
      return 1e-12;
    else
      return S(0);
  }

  // Minkowski gauge of conv(vertices): min sum(lambda), V lambda = x, lambda>=0.
  S gauge(const Vector<S>& x) const {
    bool zero = true;
    for (const auto& v : x)
      if (!ScalarOps<S>::is_zero(v)) {
        zero = false;
        break;
      }
    if (zero) return S(0);
    const int m = dim_;
    const int nv = static_cast<int>(vertices_.size());
    Mat<S> a = linalg::zeros<S>(m, nv);
    for (int j = 0; j < nv; ++j)
      for (int i = 0; i < m; ++i) a[i][j] = vertices_[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    Vector<S> c(static_cast<std::size_t>(nv), S(1));
    auto r = lp_solve_eq<S>(a, x, c, lp_eps_scalar());
    require(r.feasible, ErrorCode::InfeasibleFiber, "gauge LP infeasible (vertices do not span)");
    require(r.optimal(), ErrorCode::NoConvergence, "gauge LP stalled");
    return r.value;
  }

  static S lp_eps_scalar() {
    if constexpr (std::is_same_v<S, double>)
      return 1e-11;
    else
      return S(0);
  }

  // Max of <xi,.> over vertices; ties resolved to the lexicographically
  // smallest vertex for determinism.
  Vector<S> best_vertex(const Vector<S>& xi) const {
    const auto vs = ball_vertices();
    const S tol = tie_tol(xi);
    S best(0);
    bool first = true;
    for (const auto& v : vs) {
      S val = vec::dot(xi, v);
      if (first || val > best) {
        best = val;
        first = false;
      }
    }
    const Vector<S>* pick = nullptr;
    for (const auto& v : vs) {
      if (vec::dot(xi, v) < best - tol) continue;
      if (!pick || lex_less(v, *pick)) pick = &v;
    }
    return *pick;
  }

  static bool lex_less(const Vector<S>& a, const Vector<S>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] < b[i]) return true;
      if (b[i] < a[i]) return false;
    }
    return false;
  }

  S tie_tol(const Vector<S>& xi) const {
    if constexpr (std::is_same_v<S, double>) {
      return 1e-12 * (1.0 + vec::norm_inf(xi));
    } else {
      (void)xi;
      return S(0);
    }
  }

  Kind kind_;
  int dim_;
  std::vector<Vector<S>> vertices_;
};

using NormD = Norm<double>;
using NormQ = Norm<Rational>;

}  // namespace carnot
