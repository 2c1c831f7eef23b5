#pragma once

#include <Eigen/Dense>
#include <optional>

#include "carnot/path.hpp"
#include "carnot/pmp.hpp"
#include "carnot/rng.hpp"

namespace carnot {

// The rank criterion: N is non-singular iff for every u != 0 the
// (n-p) x p matrix  M(u)_{k,a} = sum_i u_i c_{ia}^k  has full rank n-p.
// Equivalently, sigma_min(M(u)) > 0 on the whole unit sphere.
template <class S>
Mat<S> singularity_matrix(const NilpotentAlgebra<S>& alg, const Vector<S>& u) {
  const int p = alg.horizontal_dim();
  const int m = alg.central_dim();
  require(static_cast<int>(u.size()) == p, ErrorCode::DimensionMismatch, "expected a p-vector");
  Mat<S> out = linalg::zeros<S>(m, p);
  for (const auto& t : alg.terms())
    out[static_cast<std::size_t>(t.k - p)][static_cast<std::size_t>(t.j)] += u[static_cast<std::size_t>(t.i)] * t.c;
  return out;
}

struct SingularityReport {
  enum class Verdict { NonSingular, Singular, Undecidable };
  Verdict verdict = Verdict::Undecidable;
  double epsilon = 0.0;        // NonSingular: located min of sigma_min on the sphere
  VecD witness;                // Singular: u* with rank M(u*) < n-p
  VecD covector;               // Singular: unit xi* with xi*^T M(u*) = 0
  double witness_residual = 0.0;
  double observed_min = 0.0;   // optimizer trace
  VecD observed_argmin;
  long samples = 0;
  int restarts = 0;
  bool exact = false;          // verdict established by exact rational arithmetic
  std::string note;

  bool nonsingular() const { return verdict == Verdict::NonSingular; }
  bool singular() const { return verdict == Verdict::Singular; }
  const char* verdict_name() const {
    switch (verdict) {
      case Verdict::NonSingular: return "nonsingular";
      case Verdict::Singular: return "singular";
      case Verdict::Undecidable: return "undecidable";
    }
    return "?";
  }
};

struct ClassifyOptions {
  long samples = 100000;
  int restarts = 64;
  std::uint64_t seed = 0x5eed;
  double singular_threshold = 1e-12;
  double nonsingular_threshold = 1e-6;
};

namespace detail {

inline constexpr double kPiConst = 3.141592653589793238462643383279502884;

inline Eigen::MatrixXd to_eigen(const Mat<double>& m) {
  Eigen::MatrixXd e(m.size(), m.empty() ? 0 : m[0].size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j) e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m[i][j];
  return e;
}

inline double sigma_min(const AlgebraD& alg, const VecD& u) {
  Eigen::MatrixXd m = to_eigen(singularity_matrix(alg, u));
  if (m.rows() == 0) return std::numeric_limits<double>::infinity();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

// Deterministic near-uniform points on S^{p-1}.
inline std::vector<VecD> sphere_samples(int p, long count) {
  std::vector<VecD> out;
  out.reserve(static_cast<std::size_t>(count));
  if (p == 1) {
    out.push_back({1.0});
    out.push_back({-1.0});
    return out;
  }
  if (p == 2) {
    for (long j = 0; j < count; ++j) {
      const double a = kPiConst * static_cast<double>(j) / static_cast<double>(count);
      out.push_back({std::cos(a), std::sin(a)});
    }
    return out;
  }
  if (p == 3) {
    // Fibonacci sphere
    const double ga = kPiConst * (3.0 - std::sqrt(5.0));
    for (long j = 0; j < count; ++j) {
      const double z = 1.0 - 2.0 * (j + 0.5) / static_cast<double>(count);
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double a = ga * static_cast<double>(j);
      out.push_back({r * std::cos(a), r * std::sin(a), z});
    }
    return out;
  }
  // Kronecker sequence mapped through Box-Muller, normalized.
  static const double primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  const int pairs = (p + 1) / 2;
  for (long j = 0; j < count; ++j) {
    VecD v;
    v.reserve(static_cast<std::size_t>(p));
    for (int q = 0; q < pairs; ++q) {
      double u1 = std::fmod((j + 1) * std::sqrt(primes[(2 * q) % 12]), 1.0);
      double u2 = std::fmod((j + 1) * std::sqrt(primes[(2 * q + 1) % 12]), 1.0);
      u1 = std::max(u1, 1e-12);
      const double r = std::sqrt(-2.0 * std::log(u1));
      v.push_back(r * std::cos(2.0 * kPiConst * u2));
      if (static_cast<int>(v.size()) < p) v.push_back(r * std::sin(2.0 * kPiConst * u2));
    }
    const double n = vec::norm2(v);
    if (n < 1e-9) continue;
    for (auto& x : v) x /= n;
    out.push_back(std::move(v));
  }
  return out;
}

// Nelder-Mead on f(u) = sigma_min(M(u/|u|)); scale-invariant objective.
inline VecD nelder_mead_min(const AlgebraD& alg, VecD start, int iters) {
  const int p = static_cast<int>(start.size());
  auto f = [&](const VecD& v) {
    const double n = vec::norm2(v);
    if (n < 1e-12) return std::numeric_limits<double>::infinity();
    VecD u = vec::scale(1.0 / n, v);
    return sigma_min(alg, u);
  };
  std::vector<std::pair<double, VecD>> simplex;
  simplex.emplace_back(f(start), start);
  for (int i = 0; i < p; ++i) {
    VecD v = start;
    v[static_cast<std::size_t>(i)] += 0.25;
    simplex.emplace_back(f(v), v);
  }
  auto order = [&]() {
    std::sort(simplex.begin(), simplex.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
  };
  order();
  for (int it = 0; it < iters; ++it) {
    order();
    if (simplex.back().first - simplex.front().first < 1e-16) break;
    VecD centroid = vec::zero<double>(p);
    for (std::size_t i = 0; i + 1 < simplex.size(); ++i)
      centroid = vec::add(centroid, simplex[i].second);
    centroid = vec::scale(1.0 / p, centroid);
    const VecD& worst = simplex.back().second;
    VecD refl = vec::sub(vec::scale(2.0, centroid), worst);
    const double fr = f(refl);
    if (fr < simplex.front().first) {
      VecD expd = vec::sub(vec::scale(3.0, centroid), vec::scale(2.0, worst));
      const double fe = f(expd);
      simplex.back() = fe < fr ? std::make_pair(fe, expd) : std::make_pair(fr, refl);
    } else if (fr < simplex[simplex.size() - 2].first) {
      simplex.back() = {fr, refl};
    } else {
      VecD contr = vec::add(vec::scale(0.5, centroid), vec::scale(0.5, worst));
      const double fc = f(contr);
      if (fc < simplex.back().first) {
        simplex.back() = {fc, contr};
      } else {
        for (std::size_t i = 1; i < simplex.size(); ++i) {
          simplex[i].second = vec::scale(0.5, vec::add(simplex[i].second, simplex[0].second));
          simplex[i].first = f(simplex[i].second);
        }
      }
    }
  }
  order();
  VecD best = simplex.front().second;
  const double n = vec::norm2(best);
  return vec::scale(1.0 / n, best);
}

// Alternating bilinear refinement toward an exact singular pair:
// u <- argmin ||u^T C(xi)||, xi <- argmin ||xi^T M(u)||.
struct WitnessPair {
  VecD u;
  VecD xi;
  double residual = std::numeric_limits<double>::infinity();
};

inline double pair_residual(const AlgebraD& alg, const VecD& u, const VecD& xi) {
  Eigen::MatrixXd m = to_eigen(singularity_matrix(alg, u));
  Eigen::VectorXd x(m.rows());
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = xi[static_cast<std::size_t>(i)];
  return (x.transpose() * m).norm();
}

inline WitnessPair refine_witness(const AlgebraD& alg, VecD u0, int iters = 200) {
  const int p = alg.horizontal_dim();
  const int m = alg.central_dim();
  WitnessPair best;
  VecD u = u0;
  VecD xi(static_cast<std::size_t>(m), 0.0);
  for (int it = 0; it < iters; ++it) {
    // xi step: smallest left singular vector of M(u)
    Eigen::MatrixXd M = to_eigen(singularity_matrix(alg, u));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullU);
    Eigen::VectorXd left = svd.matrixU().col(M.rows() - 1);
    for (int i = 0; i < m; ++i) xi[static_cast<std::size_t>(i)] = left(i);
    // u step: smallest eigenvector of C(xi) C(xi)^T where C(xi)_{i,a} = sum_k xi_k c_{ia}^{p+k}
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(p, p);
    for (const auto& t : alg.terms())
      C(t.i, t.j) += xi[static_cast<std::size_t>(t.k - p)] * t.c;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd2(C.transpose(), Eigen::ComputeFullV);
    Eigen::VectorXd unew = svd2.matrixV().col(p - 1);
    for (int i = 0; i < p; ++i) u[static_cast<std::size_t>(i)] = unew(i);
    const double r = pair_residual(alg, u, xi);
    if (r < best.residual) {
      best = {u, xi, r};
      if (r == 0.0) break;
    }
  }
  // Snap tiny coordinates to zero when that does not hurt the residual.
  auto snap = [&](WitnessPair w) {
    for (auto& v : w.u)
      if (std::fabs(v) < 1e-9) v = 0.0;
    const double nu = vec::norm2(w.u);
    if (nu < 1e-12) return best;
    for (auto& v : w.u) v /= nu;
    Eigen::MatrixXd M = to_eigen(singularity_matrix(alg, w.u));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullU);
    Eigen::VectorXd left = svd.matrixU().col(M.rows() - 1);
    for (int i = 0; i < m; ++i) w.xi[static_cast<std::size_t>(i)] = left(i);
    for (auto& v : w.xi)
      if (std::fabs(v) < 1e-9) v = 0.0;
    const double nx = vec::norm2(w.xi);
    if (nx < 1e-12) return best;
    for (auto& v : w.xi) v /= nx;
    w.residual = pair_residual(alg, w.u, w.xi);
    return w.residual <= std::max(best.residual, 1e-13) ? w : best;
  };
  best = snap(best);
  // Canonical signs: first nonzero coordinate positive.
  auto canon = [](VecD& v) {
    for (double x : v) {
      if (x > 0) break;
      if (x < 0) {
        for (auto& y : v) y = -y;
        break;
      }
    }
  };
  canon(best.u);
  canon(best.xi);
  best.residual = pair_residual(alg, best.u, best.xi);
  return best;
}

// ---- exact fallback over the rationals -------------------------------------

inline AlgebraQ::Handle to_rational_algebra(const AlgebraD& alg) {
  std::vector<BracketEntry> raw;
  for (const auto& t : alg.terms())
    if (t.i < t.j) raw.push_back({t.i + 1, t.j + 1, t.k + 1, t.c});
  return AlgebraQ::validate(alg.dim(), alg.horizontal_dim(), raw);
}

// C(xi)_{i,a} over the rationals for a basis covector e_m.
inline Mat<Rational> central_pencil_matrix(const AlgebraQ& alg, int m_index) {
  const int p = alg.horizontal_dim();
  Mat<Rational> c = linalg::zeros<Rational>(p, p);
  for (const auto& t : alg.terms())
    if (t.k - p == m_index) c[static_cast<std::size_t>(t.i)][static_cast<std::size_t>(t.j)] += t.c;
  return c;
}

// Sturm chain real-root count of a univariate rational polynomial on R.
inline int sturm_real_root_count(std::vector<Rational> poly) {
  // strip leading zeros
  while (!poly.empty() && poly.back() == 0) poly.pop_back();
  if (poly.size() <= 1) return 0;  // constant (nonzero) or empty handled by caller
  auto derivative = [](const std::vector<Rational>& f) {
    std::vector<Rational> d;
    for (std::size_t i = 1; i < f.size(); ++i) d.push_back(f[i] * Rational(static_cast<long>(i)));
    return d;
  };
  auto rem = [](std::vector<Rational> a, const std::vector<Rational>& b) {
    while (a.size() >= b.size() && !a.empty()) {
      if (a.back() == 0) {
        a.pop_back();
        continue;
      }
      const Rational f = a.back() / b.back();
      const std::size_t shift = a.size() - b.size();
      for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
      a.pop_back();
    }
    while (!a.empty() && a.back() == 0) a.pop_back();
    return a;
  };
  std::vector<std::vector<Rational>> chain;
  chain.push_back(poly);
  chain.push_back(derivative(poly));
  while (chain.back().size() > 1) {
    auto r = rem(chain[chain.size() - 2], chain.back());
    if (r.empty()) break;
    for (auto& x : r) x = -x;
    chain.push_back(std::move(r));
  }
  auto sign_changes_at_inf = [&](int dir) {
    int changes = 0, prev = 0;
    for (const auto& f : chain) {
      if (f.empty()) continue;
      const Rational& lead = f.back();
      int s = lead > 0 ? 1 : -1;
      if (dir < 0 && (f.size() - 1) % 2 == 1) s = -s;
      if (prev != 0 && s != prev) ++changes;
      prev = s;
    }
    return changes;
  };
  return sign_changes_at_inf(-1) - sign_changes_at_inf(+1);
}

struct ExactVerdict {
  enum class Kind { Unknown, NonSingular, Singular } kind = Kind::Unknown;
  VecQ witness_u;  // exact when available
  VecQ witness_xi;
  std::string note;
};

inline ExactVerdict exact_classify(const AlgebraQ& alg) {
  ExactVerdict out;
  const int p = alg.horizontal_dim();
  const int m = alg.central_dim();
  if (m == 0) {
    out.kind = ExactVerdict::Kind::NonSingular;
    out.note = "trivial center";
    return out;
  }
  // Odd horizontal dimension: C(xi) is an odd antisymmetric matrix, hence
  // singular for every xi; the group is singular.
  if (p % 2 == 1) {
    Mat<Rational> c1 = central_pencil_matrix(alg, 0);
    auto ker = linalg::kernel_basis(c1, Rational(0));
    out.kind = ExactVerdict::Kind::Singular;
    out.witness_u = ker.empty() ? VecQ(static_cast<std::size_t>(p), Rational(0)) : ker.front();
    if (ker.empty()) out.witness_u[0] = 1;
    out.witness_xi = VecQ(static_cast<std::size_t>(m), Rational(0));
    out.witness_xi[0] = 1;
    out.note = "odd horizontal dimension";
    return out;
  }
  if (m == 1) {
    Mat<Rational> c1 = central_pencil_matrix(alg, 0);
    const Rational det = linalg::determinant(c1, Rational(0));
    if (det == 0) {
      auto ker = linalg::kernel_basis(c1, Rational(0));
      out.kind = ExactVerdict::Kind::Singular;
      out.witness_u = ker.front();
      out.witness_xi = {Rational(1)};
      out.note = "det C = 0";
    } else {
      out.kind = ExactVerdict::Kind::NonSingular;
      out.note = "det C != 0";
    }
    return out;
  }
  if (m == 2 && p <= 8) {
    // q(s,t) = det(s C1 + t C2), homogeneous of degree p. Real projective
    // roots <=> singular. Interpolate q(1,t) exactly, Sturm-count its roots,
    // and check the root at infinity via det C2.
    Mat<Rational> c1 = central_pencil_matrix(alg, 0);
    Mat<Rational> c2 = central_pencil_matrix(alg, 1);
    const Rational detc2 = linalg::determinant(c2, Rational(0));
    std::vector<Rational> values;
    for (int t = 0; t <= p; ++t) {
      Mat<Rational> s = c1;
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) s[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += Rational(t) * c2[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      values.push_back(linalg::determinant(s, Rational(0)));
    }
    // Solve the Vandermonde system for the coefficients of q(1,t).
    Mat<Rational> vand = linalg::zeros<Rational>(p + 1, p + 1);
    for (int r = 0; r <= p; ++r) {
      Rational pw(1);
      for (int c = 0; c <= p; ++c) {
        vand[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = pw;
        pw *= Rational(r);
      }
    }
    VecQ coeffs;
    require(linalg::solve_square(vand, values, coeffs, Rational(0)), ErrorCode::InvalidArgument,
            "vandermonde solve failed");
    bool all_zero = true;
    for (const auto& c : coeffs)
      if (c != 0) {
        all_zero = false;
        break;
      }
    if (all_zero || detc2 == 0) {
      out.kind = ExactVerdict::Kind::Singular;
      // xi* = (0,1) kills det C2 (or anything when q == 0).
      Mat<Rational> cmat = all_zero ? c1 : c2;
      auto ker = linalg::kernel_basis(cmat, Rational(0));
      if (ker.empty()) {
        // c1 invertible but q == 0 cannot happen; fall back to (1,0)
        ker = linalg::kernel_basis(c1, Rational(0));
      }
      out.witness_u = ker.front();
      out.witness_xi = {Rational(all_zero ? 1 : 0), Rational(all_zero ? 0 : 1)};
      out.note = all_zero ? "pencil determinant identically zero" : "det C2 = 0";
      return out;
    }
    const int roots = sturm_real_root_count(coeffs);
    if (roots > 0) {
      out.kind = ExactVerdict::Kind::Singular;
      out.note = "pencil determinant has a real root";
      // Try small rational roots for an exact witness; otherwise leave the
      // witness to the numeric refinement.
      for (long num = -32; num <= 32; ++num) {
        for (long den = 1; den <= 8; ++den) {
          Rational t(num, den);
          Rational val(0), pw(1);
          for (const auto& c : coeffs) {
            val += c * pw;
            pw *= t;
          }
          if (val == 0) {
            Mat<Rational> s = c1;
            for (int i = 0; i < p; ++i)
              for (int j = 0; j < p; ++j)
                s[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += t * c2[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            auto ker = linalg::kernel_basis(s, Rational(0));
            if (!ker.empty()) {
              out.witness_u = ker.front();
              out.witness_xi = {Rational(1), t};
            }
            return out;
          }
        }
      }
      return out;
    }
    out.kind = ExactVerdict::Kind::NonSingular;
    out.note = "pencil determinant has no real root";
    return out;
  }
  return out;
}

}  // namespace detail

// Decide non-singularity: exact rational routes where available (the center
// of dimension <= 2 covers the paper's examples), dense sphere sampling plus
// multi-start local descent otherwise, with an honest Undecidable band.
inline SingularityReport classify(const AlgebraD::Handle& alg, const ClassifyOptions& opts = {},
                                  unsigned threads = 1) {
  const int p = alg->horizontal_dim();
  const int m = alg->central_dim();
  SingularityReport rep;
  rep.restarts = opts.restarts;

  if (m == 0) {
    rep.verdict = SingularityReport::Verdict::NonSingular;
    rep.epsilon = std::numeric_limits<double>::infinity();
    rep.exact = true;
    rep.note = "trivial center: the rank condition is vacuous";
    return rep;
  }

  // p < n-p: rank n-p is impossible for any u.
  if (p < m) {
    rep.verdict = SingularityReport::Verdict::Singular;
    VecD u0(static_cast<std::size_t>(p), 0.0);
    u0[0] = 1.0;
    auto w = detail::refine_witness(*alg, u0);
    rep.witness = w.u;
    rep.covector = w.xi;
    rep.witness_residual = w.residual;
    rep.exact = true;
    rep.note = "p < n-p: rank n-p unreachable";
    return rep;
  }

  // Exact fallback.
  detail::ExactVerdict ex;
  try {
    ex = detail::exact_classify(*detail::to_rational_algebra(*alg));
  } catch (const Error&) {
    ex.kind = detail::ExactVerdict::Kind::Unknown;
  }

  // Numeric scan: dense deterministic sphere samples...
  auto samples = detail::sphere_samples(p, opts.samples);
  rep.samples = static_cast<long>(samples.size());
  std::vector<double> vals(samples.size());
  parallel_for(samples.size(), threads,
               [&](std::size_t i) { vals[i] = detail::sigma_min(*alg, samples[i]); });
  std::size_t best_i = 0;
  for (std::size_t i = 1; i < vals.size(); ++i)
    if (vals[i] < vals[best_i]) best_i = i;

  // ...then multi-start Nelder-Mead from the most promising samples.
  std::vector<std::size_t> starts;
  starts.push_back(best_i);
  std::vector<std::size_t> idx(vals.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
  for (std::size_t i = 0; i < idx.size() && static_cast<int>(starts.size()) < opts.restarts; ++i) {
    if (idx[i] != best_i) starts.push_back(idx[i]);
  }
  double global_min = vals[best_i];
  VecD global_arg = samples[best_i];
  for (std::size_t s : starts) {
    VecD u = detail::nelder_mead_min(*alg, samples[s], 150 * p);
    const double v = detail::sigma_min(*alg, u);
    if (v < global_min) {
      global_min = v;
      global_arg = u;
    }
  }
  rep.observed_min = global_min;
  rep.observed_argmin = global_arg;

  if (ex.kind == detail::ExactVerdict::Kind::Singular) {
    rep.verdict = SingularityReport::Verdict::Singular;
    rep.exact = true;
    rep.note = "exact: " + ex.note;
    if (!ex.witness_u.empty()) {
      VecD u = vec::to_dbl(ex.witness_u);
      const double n = vec::norm2(u);
      for (auto& x : u) x /= n;
      VecD xi = vec::to_dbl(ex.witness_xi);
      const double nx = vec::norm2(xi);
      for (auto& x : xi) x /= nx;
      rep.witness = u;
      rep.covector = xi;
      rep.witness_residual = detail::pair_residual(*alg, u, xi);
      // Normalize covector exactly against M(u) when the residual allows.
      if (rep.witness_residual > opts.singular_threshold) {
        auto w = detail::refine_witness(*alg, u);
        rep.witness = w.u;
        rep.covector = w.xi;
        rep.witness_residual = w.residual;
      }
    } else {
      auto w = detail::refine_witness(*alg, global_arg);
      rep.witness = w.u;
      rep.covector = w.xi;
      rep.witness_residual = w.residual;
    }
    return rep;
  }

  if (ex.kind == detail::ExactVerdict::Kind::NonSingular) {
    rep.verdict = SingularityReport::Verdict::NonSingular;
    rep.exact = true;
    rep.epsilon = global_min;
    rep.note = "exact: " + ex.note;
    return rep;
  }

  // Numeric verdict with the honest band.
  auto w = detail::refine_witness(*alg, global_arg);
  if (w.residual <= opts.singular_threshold) {
    rep.verdict = SingularityReport::Verdict::Singular;
    rep.witness = w.u;
    rep.covector = w.xi;
    rep.witness_residual = w.residual;
    rep.note = "witness certified numerically";
    return rep;
  }
  if (global_min > opts.nonsingular_threshold) {
    rep.verdict = SingularityReport::Verdict::NonSingular;
    rep.epsilon = global_min;
    rep.note = "sampled minimum above threshold";
    return rep;
  }
  rep.verdict = SingularityReport::Verdict::Undecidable;
  rep.note = "observed minimum " + std::to_string(global_min) + " in the undecidable band";
  return rep;
}

// The explicit abnormal extremal built from a certified singular pair:
// lambda0(t) = (exp(t X0), Z0*) with X0 = u* embedded horizontally and the
// covector supported on the center. Satisfies PMP1-PMP3 with nu = 0.
struct AbnormalExtremal {
  explicit AbnormalExtremal(PathD straight) : path(std::move(straight)) {}

  ExtremalState initial;
  VecD control;             // unit u* (p-vector)
  Trajectory trajectory;    // analytic samples of lambda0
  PathD path;               // straight path t -> exp(t X0)
  double certification_residual = 0.0;
  double pmp2_residual = 0.0;  // ODE residual of lambda0 against the extremal system
  double pmp3_residual = 0.0;  // |max_u h_u| along lambda0
};

inline AbnormalExtremal abnormal_from_witness(const SpaceD& space, VecD u_star, VecD xi_star,
                                              int samples = 100, double horizon = 1.0) {
  const auto& alg = *space.algebra();
  const int n = alg.dim();
  const int p = alg.horizontal_dim();
  const int m = alg.central_dim();
  require(static_cast<int>(u_star.size()) == p, ErrorCode::DimensionMismatch, "witness must be a p-vector");
  require(static_cast<int>(xi_star.size()) == m, ErrorCode::DimensionMismatch,
          "covector must have the center's dimension");
  const double nx = vec::norm2(xi_star);
  require(nx > 0, ErrorCode::WitnessNotSingular, "zero covector");
  for (auto& x : xi_star) x /= nx;

  // Normalize u* to unit projected norm.
  const double pn = space.projected_norm(u_star);
  require(pn > 0, ErrorCode::WitnessNotSingular, "zero witness direction");
  for (auto& x : u_star) x /= pn;

  const double resid = detail::pair_residual(alg, u_star, xi_star) / vec::norm2(u_star);
  require(resid <= 1e-12, ErrorCode::WitnessNotSingular,
          "witness certification failed: ||xi^T M(u)|| = " + std::to_string(resid));

  PathD straight(space);
  straight.append(space.lift_min_norm(u_star), horizon);
  AbnormalExtremal out(std::move(straight));
  out.certification_residual = resid;
  out.control = u_star;

  VecD xi_full(static_cast<std::size_t>(n), 0.0);
  for (int k = 0; k < m; ++k) xi_full[static_cast<std::size_t>(p + k)] = xi_star[static_cast<std::size_t>(k)];
  out.initial = {vec::zero<double>(n), xi_full, 0.0, 0.0};

  const VecD u_emb = alg.embed_horizontal(u_star);
  double pmp2 = 0.0, pmp3 = 0.0;
  out.trajectory.duration = horizon;
  for (int s = 0; s < samples; ++s) {
    const double t = horizon * static_cast<double>(s) / std::max(1, samples - 1);
    VecD x = vec::scale(t, u_emb);
    // analytic lambda0: xdot = u_emb, xidot = 0; compare with the PMP system.
    VecD dx, dxi;
    detail::pmp_derivative(alg, x, xi_full, u_star, dx, dxi);
    pmp2 = std::max(pmp2, vec::norm_inf(vec::sub(dx, u_emb)));
    pmp2 = std::max(pmp2, vec::norm_inf(dxi));
    // maximized Hamiltonian with nu = 0: all horizontal momenta must vanish.
    pmp3 = std::max(pmp3, vec::norm_inf(horizontal_momenta(alg, x, xi_full)));
    out.trajectory.points.push_back({t, x, xi_full, u_star});
  }
  out.pmp2_residual = pmp2;
  out.pmp3_residual = pmp3;
  return out;
}

}  // namespace carnot
