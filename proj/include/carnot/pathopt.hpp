#pragma once

#include <Eigen/Dense>

#include "carnot/path.hpp"
#include "carnot/rng.hpp"

namespace carnot {

// Direct minimization of path length over k-segment horizontal paths with a
// fixed endpoint. Paths are held as displacement vectors w_1..w_k in
// V-coordinates. Two structural facts about 2-step groups carry the whole
// optimizer:
//   * the endpoint is affine in any single w_s, and
//   * on the slice w_s + w_t = const it is affine in the pair,
// so feasibility is a linear condition pairwise and the length can be
// descended along exact null directions with derivative-free line searches.
struct PathOptOptions {
  int segments = 64;
  int restarts = 3;
  int sweeps = 40;
  int hops = 3;  // basin hops: random kick, repair, descend again
  std::uint64_t seed = 0xbeef;
  double drop_tol = 1e-12;
};

struct PathOptResult {
  std::vector<VecD> displacements;
  double length = std::numeric_limits<double>::infinity();
  double endpoint_gap = std::numeric_limits<double>::infinity();
  bool feasible = false;
};

namespace pathopt_detail {

inline VecD endpoint_coords(const SpaceD& space, const std::vector<VecD>& w) {
  const auto& alg = *space.algebra();
  VecD x = vec::zero<double>(alg.dim());
  for (const auto& d : w) x = alg.bch(x, space.embed(d));
  return x;
}

inline double total_length(const SpaceD& space, const std::vector<VecD>& w) {
  double s = 0.0;
  for (const auto& d : w) s += space.norm().eval(d);
  return s;
}

// Best unit pair maximizing <[X,Y]_central, dir>. Vertex scan for polyhedral
// norms; for l2 the bilinear form's top singular pair is the exact optimum.
inline bool best_commutator_pair(const SpaceD& space, const VecD& dir, VecD& X, VecD& Y,
                                 double& value) {
  const auto& alg = *space.algebra();
  const int q = space.q();
  const int p = alg.horizontal_dim();
  auto central_bracket_dot = [&](const VecD& a, const VecD& b) {
    const VecD br = alg.bracket(space.embed(a), space.embed(b));
    double s = 0.0;
    for (int k = p; k < alg.dim(); ++k) s += br[static_cast<std::size_t>(k)] * dir[static_cast<std::size_t>(k - p)];
    return s;
  };
  if (space.norm().polyhedral()) {
    const auto verts = space.norm().ball_vertices();
    value = 0.0;
    bool found = false;
    for (std::size_t i = 0; i < verts.size(); ++i)
      for (std::size_t j = 0; j < verts.size(); ++j) {
        const double v = central_bracket_dot(verts[i], verts[j]);
        if (v > value + 1e-15) {
          value = v;
          X = verts[i];
          Y = verts[j];
          found = true;
        }
      }
    return found;
  }
  // l2: antisymmetric form B[a][b] = <[e_a, e_b]_c, dir>; max over the unit
  // sphere pair is sigma_max with the leading singular vectors.
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(q, q);
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b) {
      VecD ea = vec::zero<double>(q), eb = vec::zero<double>(q);
      ea[static_cast<std::size_t>(a)] = 1.0;
      eb[static_cast<std::size_t>(b)] = 1.0;
      B(a, b) = central_bracket_dot(ea, eb);
    }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeFullU | Eigen::ComputeFullV);
  value = svd.singularValues()(0);
  if (value < 1e-14) return false;
  X.assign(static_cast<std::size_t>(q), 0.0);
  Y.assign(static_cast<std::size_t>(q), 0.0);
  for (int i = 0; i < q; ++i) {
    X[static_cast<std::size_t>(i)] = svd.matrixU()(i, 0);
    Y[static_cast<std::size_t>(i)] = svd.matrixV()(i, 0);
  }
  // Orient so the bracket points along +dir.
  if (central_bracket_dot(X, Y) < 0)
    for (auto& v : Y) v = -v;
  return true;
}

// Straight lift to pi(g) followed by greedy box corrections of the central
// defect; the seed every optimization run starts from. `split` controls how
// the lift is divided around the boxes (0: lift first, 1: boxes first,
// 2: boxes in the middle), which matters for polyhedral norms where the
// optimum wraps around the straight part.
inline std::vector<VecD> seed_displacements(const SpaceD& space, const ElementD& g,
                                            int split = 0) {
  const auto& alg = *space.algebra();
  const int p = alg.horizontal_dim();
  const int m = alg.central_dim();
  std::vector<VecD> w;
  const VecD lift = space.lift_min_norm(project_pi(g));
  if (space.norm().eval(lift) > 1e-15) {
    if (split == 2) {
      w.push_back(vec::scale(0.5, lift));
      w.push_back(vec::scale(0.5, lift));
    } else {
      w.push_back(lift);
    }
  }
  for (int round = 0; round < 8 * std::max(1, m); ++round) {
    const VecD at = endpoint_coords(space, w);
    const VecD defect = alg.central_part(alg.bch(vec::neg(at), g.coords()));
    const double dn = vec::norm2(defect);
    if (dn <= 1e-13) break;
    VecD dir = vec::scale(1.0 / dn, defect);
    VecD X, Y;
    double val = 0.0;
    if (!best_commutator_pair(space, dir, X, Y, val) || val < 1e-13) break;
    // r [X,Y]_c component along the defect (euclidean least squares).
    const VecD br = alg.bracket(space.embed(X), space.embed(Y));
    VecD brc = alg.central_part(br);
    const double r = vec::dot(brc, defect) / vec::dot(brc, brc);
    if (std::fabs(r) < 1e-16) break;
    VecD Xo = X, Yo = Y;
    double rr = r;
    if (rr < 0) {
      std::swap(Xo, Yo);
      rr = -rr;
    }
    const double s = std::sqrt(rr);
    std::vector<VecD> box = {vec::scale(-s, Xo), vec::scale(-s, Yo), vec::scale(s, Xo),
                             vec::scale(s, Yo)};
    // central factors commute, so the box can sit anywhere in the word
    const std::size_t insert_at =
        split == 0 ? w.size() : (split == 1 ? 0 : std::min<std::size_t>(1, w.size()));
    w.insert(w.begin() + static_cast<std::ptrdiff_t>(insert_at), box.begin(), box.end());
  }
  return w;
}

inline std::vector<VecD> resegment(const SpaceD& space, const std::vector<VecD>& w, int k) {
  if (static_cast<int>(w.size()) >= k) return w;
  PathD path(space);
  for (const auto& d : w) path.append_displacement(d);
  if (path.empty()) return w;
  std::vector<VecD> out;
  for (const auto& sub : path.subdivide(k))
    for (const auto& seg : sub.segments()) out.push_back(vec::scale(seg.duration, seg.direction));
  return out;
}

// Endpoint as a function of w_s on the slice w_s + w_t fixed is affine; its
// exact Jacobian comes from central differences. Returns the n x q matrix.
inline Eigen::MatrixXd slice_jacobian(const SpaceD& space, std::vector<VecD>& w, std::size_t s,
                                      std::size_t t, const VecD& sum) {
  const int n = space.algebra()->dim();
  const int q = space.q();
  Eigen::MatrixXd J(n, q);
  const VecD ws0 = w[s];
  for (int j = 0; j < q; ++j) {
    const double h = 1e-4 * (1.0 + std::fabs(ws0[static_cast<std::size_t>(j)]));
    VecD wp = ws0, wm = ws0;
    wp[static_cast<std::size_t>(j)] += h;
    wm[static_cast<std::size_t>(j)] -= h;
    w[s] = wp;
    w[t] = vec::sub(sum, wp);
    const VecD ep = endpoint_coords(space, w);
    w[s] = wm;
    w[t] = vec::sub(sum, wm);
    const VecD em = endpoint_coords(space, w);
    for (int i = 0; i < n; ++i) J(i, j) = (ep[static_cast<std::size_t>(i)] - em[static_cast<std::size_t>(i)]) / (2.0 * h);
  }
  w[s] = ws0;
  w[t] = vec::sub(sum, ws0);
  return J;
}

// Restores endpoint(w) == g exactly: a least-norm horizontal correction on
// one segment, then an affine central correction on a pair slice.
inline bool repair(const SpaceD& space, std::vector<VecD>& w, const ElementD& g) {
  const auto& alg = *space.algebra();
  if (w.empty()) w.push_back(vec::zero<double>(space.q()));
  if (w.size() == 1) w.push_back(vec::zero<double>(space.q()));
  for (int round = 0; round < 6; ++round) {
    VecD at = endpoint_coords(space, w);
    VecD defect = vec::sub(g.coords(), at);
    if (vec::norm_inf(defect) <= 1e-12) return true;
    // Horizontal stage: the endpoint's pi-part is sum of projections.
    VecD dh(defect.begin(), defect.begin() + alg.horizontal_dim());
    if (vec::norm2(dh) > 1e-14) {
      std::size_t longest = 0;
      for (std::size_t i = 1; i < w.size(); ++i)
        if (space.norm().eval(w[i]) > space.norm().eval(w[longest])) longest = i;
      w[longest] = vec::add(w[longest], space.lift_min_norm(dh));
    }
    // Central stage: solve on pair slices.
    at = endpoint_coords(space, w);
    defect = vec::sub(g.coords(), at);
    if (vec::norm_inf(defect) <= 1e-12) return true;
    Eigen::VectorXd dv(alg.dim());
    for (int i = 0; i < alg.dim(); ++i) dv(i) = defect[static_cast<std::size_t>(i)];
    bool fixed = false;
    for (std::size_t attempt = 0; attempt < w.size() && !fixed; ++attempt) {
      const std::size_t s = attempt;
      const std::size_t t = (attempt + w.size() / 2) % w.size();
      if (s == t) continue;
      const VecD sum = vec::add(w[s], w[t]);
      Eigen::MatrixXd J = slice_jacobian(space, w, s, t, sum);
      Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(J);
      if (cod.rank() < space.algebra()->central_dim()) continue;
      Eigen::VectorXd delta = cod.solve(dv);
      VecD ws = w[s];
      for (int j = 0; j < space.q(); ++j) ws[static_cast<std::size_t>(j)] += delta(j);
      w[s] = ws;
      w[t] = vec::sub(sum, ws);
      fixed = true;
    }
    if (!fixed) return false;
  }
  return vec::norm_inf(vec::sub(g.coords(), endpoint_coords(space, w))) <= 1e-9;
}

// Exact per-segment endpoint Jacobians. The endpoint is affine in each w_s:
//   dF_h = P dw,   dF_c = Q dw + 1/2 [ emb(Pre_s - Post_s), emb dw ]_c,
// with Pre/Post the sums of the other segments before/after s.
inline std::vector<Eigen::MatrixXd> segment_jacobians(const SpaceD& space,
                                                      const std::vector<VecD>& w) {
  const auto& alg = *space.algebra();
  const int n = alg.dim();
  const int p = alg.horizontal_dim();
  const int q = space.q();
  const std::size_t k = w.size();
  std::vector<VecD> prefix(k + 1, vec::zero<double>(q));
  for (std::size_t s = 0; s < k; ++s) prefix[s + 1] = vec::add(prefix[s], w[s]);
  std::vector<Eigen::MatrixXd> jac(k);
  for (std::size_t s = 0; s < k; ++s) {
    const VecD pre = prefix[s];
    const VecD post = vec::sub(prefix[k], prefix[s + 1]);
    const VecD diff = vec::sub(pre, post);
    const VecD diff_emb = space.embed(diff);
    Eigen::MatrixXd J(n, q);
    for (int j = 0; j < q; ++j) {
      VecD ej = vec::zero<double>(q);
      ej[static_cast<std::size_t>(j)] = 1.0;
      const VecD col_emb = space.embed(ej);
      const VecD br = alg.bracket(diff_emb, col_emb);
      for (int i = 0; i < n; ++i) {
        double v = col_emb[static_cast<std::size_t>(i)];
        if (i >= p) v += 0.5 * br[static_cast<std::size_t>(i)];
        J(i, j) = v;
      }
    }
    jac[s] = std::move(J);
  }
  return jac;
}

// One successive-linearization step for polyhedral norms: represent each
// segment in the ball-vertex cone (v_s = sum lambda_i vert_i, lambda >= 0;
// the objective sum(lambda) is then the total length), solve the LP against
// the linearized endpoint constraint, and line-search toward the solution.
inline bool slp_direction(const SpaceD& space, const std::vector<VecD>& w, const ElementD& g,
                          std::vector<VecD>& out) {
  const auto& alg = *space.algebra();
  const int n = alg.dim();
  const int q = space.q();
  const std::size_t k = w.size();
  const auto verts = space.norm().ball_vertices();
  const int nv = static_cast<int>(verts.size());
  const auto jac = segment_jacobians(space, w);

  // b = g - F(w) + sum_s A_s w_s
  VecD b = vec::sub(g.coords(), endpoint_coords(space, w));
  for (std::size_t s = 0; s < k; ++s)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < q; ++j) b[static_cast<std::size_t>(i)] += jac[s](i, j) * w[s][static_cast<std::size_t>(j)];

  Mat<double> A = linalg::zeros<double>(n, static_cast<int>(k) * nv);
  for (std::size_t s = 0; s < k; ++s)
    for (int v = 0; v < nv; ++v)
      for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < q; ++j) acc += jac[s](i, j) * verts[static_cast<std::size_t>(v)][static_cast<std::size_t>(j)];
        A[static_cast<std::size_t>(i)][s * static_cast<std::size_t>(nv) + static_cast<std::size_t>(v)] = acc;
      }
  Vector<double> c(k * static_cast<std::size_t>(nv), 1.0);
  auto lp = lp_solve_eq<double>(A, b, c, lp_eps());
  if (!lp.optimal()) return false;
  out.assign(k, vec::zero<double>(q));
  for (std::size_t s = 0; s < k; ++s)
    for (int v = 0; v < nv; ++v) {
      const double lam = lp.x[s * static_cast<std::size_t>(nv) + static_cast<std::size_t>(v)];
      if (lam <= 0) continue;
      for (int j = 0; j < q; ++j) out[s][static_cast<std::size_t>(j)] += lam * verts[static_cast<std::size_t>(v)][static_cast<std::size_t>(j)];
    }
  return true;
}

// One IRLS/Gauss-Newton step for the l2 norm: minimize the weighted quadratic
// surrogate sum ||v_s||^2 / (2 ||w_s||) under the linearized constraint.
inline bool irls_direction(const SpaceD& space, const std::vector<VecD>& w, const ElementD& g,
                           std::vector<VecD>& out) {
  const auto& alg = *space.algebra();
  const int n = alg.dim();
  const int q = space.q();
  const std::size_t k = w.size();
  const auto jac = segment_jacobians(space, w);
  double scale = 0.0;
  for (const auto& ws : w) scale += vec::norm2(ws);
  const double floor_w = std::max(1e-10, 1e-6 * scale / static_cast<double>(k));

  VecD b = vec::sub(g.coords(), endpoint_coords(space, w));
  for (std::size_t s = 0; s < k; ++s)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < q; ++j) b[static_cast<std::size_t>(i)] += jac[s](i, j) * w[s][static_cast<std::size_t>(j)];

  // v = D^{-1} A^T (A D^{-1} A^T)^{-1} b with D block-diagonal weights.
  Eigen::MatrixXd ADAt = Eigen::MatrixXd::Zero(n, n);
  std::vector<Eigen::MatrixXd> DiAt(k);
  Eigen::VectorXd be(n);
  for (int i = 0; i < n; ++i) be(i) = b[static_cast<std::size_t>(i)];
  for (std::size_t s = 0; s < k; ++s) {
    const double d = std::max(vec::norm2(w[s]), floor_w);
    DiAt[s] = d * jac[s].transpose();  // D^{-1} A_s^T with D = diag(1/d)
    ADAt += jac[s] * DiAt[s];
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(ADAt);
  if (!lu.isInvertible()) return false;
  const Eigen::VectorXd y = lu.solve(be);
  out.assign(k, vec::zero<double>(q));
  for (std::size_t s = 0; s < k; ++s) {
    const Eigen::VectorXd vs = DiAt[s] * y;
    for (int j = 0; j < q; ++j) out[s][static_cast<std::size_t>(j)] = vs(j);
  }
  return true;
}

inline double golden_min(const std::function<double(double)>& f, double lo, double hi, int iters) {
  const double phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 < f2 ? x1 : x2;
}

// One pairwise descent move; returns the length improvement.
inline double pair_move(const SpaceD& space, std::vector<VecD>& w, std::size_t s, std::size_t t) {
  const auto& norm = space.norm();
  const VecD sum = vec::add(w[s], w[t]);
  const double before = norm.eval(w[s]) + norm.eval(w[t]);
  Eigen::MatrixXd J = slice_jacobian(space, w, s, t, sum);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeFullV);
  const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  std::vector<VecD> null_dirs;
  for (int j = 0; j < svd.matrixV().cols(); ++j) {
    const double sv = j < svd.singularValues().size() ? svd.singularValues()(j) : 0.0;
    if (sv <= 1e-9 * (1.0 + smax)) {
      VecD d(static_cast<std::size_t>(space.q()), 0.0);
      for (int i = 0; i < space.q(); ++i) d[static_cast<std::size_t>(i)] = svd.matrixV()(i, j);
      null_dirs.push_back(std::move(d));
    }
  }
  if (null_dirs.empty()) return 0.0;
  VecD ws = w[s];
  const double range = before + 1.0;
  for (int round = 0; round < 2; ++round) {
    for (const auto& d : null_dirs) {
      auto f = [&](double a) {
        VecD trial = vec::add(ws, vec::scale(a, d));
        return norm.eval(trial) + norm.eval(vec::sub(sum, trial));
      };
      const double a = golden_min(f, -range, range, 48);
      if (f(a) < f(0.0) - 1e-15) ws = vec::add(ws, vec::scale(a, d));
    }
  }
  const double after = norm.eval(ws) + norm.eval(vec::sub(sum, ws));
  if (after < before - 1e-14) {
    w[s] = ws;
    w[t] = vec::sub(sum, ws);
    return before - after;
  }
  return 0.0;
}

inline void drop_null_segments(const SpaceD& space, std::vector<VecD>& w, double tol) {
  std::vector<VecD> out;
  for (const auto& d : w)
    if (space.norm().eval(d) > tol) out.push_back(d);
  if (out.size() < 2) {
    while (out.size() < 2) out.push_back(vec::zero<double>(space.q()));
  }
  w = std::move(out);
}

}  // namespace pathopt_detail

inline PathD displacements_to_path(const SpaceD& space, const std::vector<VecD>& w) {
  PathD path(space);
  for (const auto& d : w) path.append_displacement(d);
  return path;
}

// Nonlinear path-length minimization with endpoint constraint, seeded by a
// straight lift plus box corrections.
inline PathOptResult optimize_path_to(const SpaceD& space, const ElementD& g,
                                      const PathOptOptions& opts = {}) {
  using namespace pathopt_detail;
  PathOptResult best;
  Rng rng(opts.seed);

  for (int restart = 0; restart < std::max(1, opts.restarts); ++restart) {
    std::vector<VecD> w = seed_displacements(space, g, restart % 3);
    if (restart >= 3) {
      // jitter later restarts: tiny perturbation, re-repaired below
      for (auto& d : w)
        for (auto& x : d) x += 0.02 * restart * rng.normal() * (1.0 + std::fabs(x));
    }
    const int target_segments = std::max<int>(2, opts.segments);
    w = resegment(space, w, target_segments);
    if (!repair(space, w, g)) continue;

    auto sqp_pass = [&](std::vector<VecD>& v) {
      for (int iter = 0; iter < opts.sweeps; ++iter) {
        repair(space, v, g);
        const double len0 = total_length(space, v);
        std::vector<VecD> dir;
        const bool ok = space.norm().polyhedral() ? slp_direction(space, v, g, dir)
                                                  : irls_direction(space, v, g, dir);
        if (!ok) break;
        bool accepted = false;
        for (double alpha : {1.0, 0.5, 0.25, 0.1, 0.03}) {
          std::vector<VecD> cand(v.size());
          for (std::size_t s = 0; s < v.size(); ++s)
            cand[s] = vec::add(vec::scale(1.0 - alpha, v[s]), vec::scale(alpha, dir[s]));
          if (!repair(space, cand, g)) continue;
          if (total_length(space, cand) < len0 - 1e-12 * (1.0 + len0)) {
            v = std::move(cand);
            accepted = true;
            break;
          }
        }
        if (!accepted) break;
      }
      repair(space, v, g);
    };

    auto pairwise_polish = [&](std::vector<VecD>& v) {
      for (int sweep = 0; sweep < opts.sweeps; ++sweep) {
        double gain = 0.0;
        const std::size_t k = v.size();
        for (std::size_t s = 0; s + 1 < k; ++s) gain += pair_move(space, v, s, s + 1);
        if (k > 3)
          for (std::size_t s = 0; s < k; ++s) gain += pair_move(space, v, s, (s + k / 2) % k);
        if (sweep % 5 == 4) repair(space, v, g);
        if (gain < 1e-12 * (1.0 + total_length(space, v))) break;
      }
      repair(space, v, g);
    };

    auto descend = [&](std::vector<VecD>& v) {
      sqp_pass(v);
      if (v.size() <= 24) {  // pairwise polish helps small paths, SQP owns large ones
        pairwise_polish(v);
        sqp_pass(v);
      }
    };

    descend(w);
    std::vector<VecD> local_best = w;
    double local_len = total_length(space, w);
    for (int hop = 0; hop < opts.hops; ++hop) {
      std::vector<VecD> v = local_best;
      const double kick = 0.25 * local_len / static_cast<double>(v.size());
      for (auto& d : v)
        for (auto& x : d) x += kick * rng.normal();
      if (!repair(space, v, g)) continue;
      descend(v);
      const double len_v = total_length(space, v);
      if (len_v < local_len - 1e-12) {
        local_best = std::move(v);
        local_len = len_v;
      }
    }
    w = std::move(local_best);
    if (!repair(space, w, g)) continue;
    drop_null_segments(space, w, opts.drop_tol);
    repair(space, w, g);
    const double len = total_length(space, w);
    const double gap =
        vec::norm_inf(vec::sub(g.coords(), endpoint_coords(space, w)));
    if (gap < 1e-8 && len < best.length) {
      best.displacements = w;
      best.length = len;
      best.endpoint_gap = gap;
      best.feasible = true;
    }
  }
  // The raw seed (un-resegmented) is also a candidate: for polyhedral norms
  // it is often already optimal and carries the cleanest witness.
  {
    std::vector<VecD> w = seed_displacements(space, g, 0);
    if (repair(space, w, g)) {
      for (int sweep = 0; sweep < opts.sweeps; ++sweep) {
        double gain = 0.0;
        for (std::size_t s = 0; s + 1 < w.size(); ++s) gain += pair_move(space, w, s, s + 1);
        if (gain < 1e-13) break;
      }
      repair(space, w, g);
      drop_null_segments(space, w, opts.drop_tol);
      repair(space, w, g);
      const double len = total_length(space, w);
      const double gap = vec::norm_inf(vec::sub(g.coords(), endpoint_coords(space, w)));
      if (gap < 1e-8 && len < best.length + 1e-10) {
        // prefer the shorter segment list on ties
        if (len < best.length - 1e-10 || w.size() < best.displacements.size()) {
          best.displacements = w;
          best.length = len;
          best.endpoint_gap = gap;
          best.feasible = true;
        }
      }
    }
  }
  return best;
}

}  // namespace carnot
