#pragma once

#include <cmath>
#include <optional>

#include "carnot/path.hpp"

namespace carnot {

// Closed-form subFinsler distances on the 3-dimensional Heisenberg group for
// the l1 and l2 horizontal norms, plus geodesic synthesis for l1. These are
// the two cases with complete explicit solutions; everything else goes
// through the solvers. Used both as fast evaluators (lattice experiments
// need millions of distance queries) and as oracles in tests.

namespace h3 {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// --- l1 -------------------------------------------------------------------
//
// Reduce to x >= y >= 0, z >= 0 via the dihedral symmetries and inversion.
// Writing e = z - xy/2 for the area a monotone staircase cannot supply:
//   e <= 0               : d = x + y                    (staircase)
//   e <= x^2 - xy        : d = x + 2z/x                 (one-sided bulge)
//   otherwise            : d = 4 sqrt(z + xy/2) - x - y (rectangle wrap)
// The three pieces agree on the seams, and the pure central case gives the
// square of length 4 sqrt(z).

inline double l1_distance(double x, double y, double z) {
  x = std::fabs(x);
  y = std::fabs(y);
  z = std::fabs(z);
  if (x < y) std::swap(x, y);
  const double half_xy = 0.5 * x * y;
  if (z <= half_xy) return x + y;
  if (x > 0.0 && z <= x * x - half_xy) return x + 2.0 * z / x;
  return 4.0 * std::sqrt(z + half_xy) - x - y;
}

// --- l2 -------------------------------------------------------------------
//
// Unit-speed normal geodesics have constant-curvature projections. With
// theta the total turning angle, chord r and swept area a satisfy
//   r = 2 sin(theta/2) / omega,   a = (theta - sin theta) / (2 omega^2),
// so a / r^2 = (theta - sin theta) / (8 sin^2(theta/2)) =: mu(theta), which
// is strictly increasing on (0, 2 pi). Invert by bisection.

inline double l2_mu(double theta) {
  const double s = std::sin(0.5 * theta);
  return (theta - std::sin(theta)) / (8.0 * s * s);
}

inline double l2_distance(double x, double y, double z) {
  const double r = std::hypot(x, y);
  const double a = std::fabs(z);
  if (a <= 1e-300) return r;
  if (r <= 1e-300) return 2.0 * std::sqrt(kPi * a);
  const double mu = a / (r * r);
  double lo = 1e-9, hi = 2.0 * kPi - 1e-12;
  if (mu <= l2_mu(lo)) {
    // Nearly straight: mu ~ theta/12, and d = r (1 + theta^2/24 + ...).
    const double theta = 12.0 * mu;
    return r * (1.0 + theta * theta / 24.0);
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (l2_mu(mid) < mu)
      lo = mid;
    else
      hi = mid;
  }
  const double theta = 0.5 * (lo + hi);
  return r * theta / (2.0 * std::sin(0.5 * theta));
}

// --- structure detection ----------------------------------------------------

struct Form {
  enum class Kind { None, L1, L2 };
  Kind kind = Kind::None;
  double c = 1.0;  // [X1, X2] = c X3
};

inline bool norm_is_l1_like(const NormD& n) {
  if (n.kind() == NormD::Kind::L1) return true;
  if (n.kind() != NormD::Kind::Polytope) return false;
  const auto& vs = n.polytope_vertices();
  if (static_cast<int>(vs.size()) != 2 * n.dim()) return false;
  std::vector<bool> hit(vs.size(), false);
  for (int i = 0; i < n.dim(); ++i)
    for (int s = -1; s <= 1; s += 2) {
      bool found = false;
      for (std::size_t j = 0; j < vs.size(); ++j) {
        if (hit[j]) continue;
        bool match = true;
        for (int k = 0; k < n.dim(); ++k) {
          const double want = (k == i) ? s : 0.0;
          if (std::fabs(vs[j][static_cast<std::size_t>(k)] - want) > 1e-12) {
            match = false;
            break;
          }
        }
        if (match) {
          hit[j] = true;
          found = true;
          break;
        }
      }
      if (!found) return false;
    }
  return true;
}

// Recognizes the Heisenberg algebra [X1,X2] = c X3 in the standard grading.
inline std::optional<double> detect_h3(const AlgebraD& alg) {
  if (alg.dim() != 3 || alg.horizontal_dim() != 2) return std::nullopt;
  const auto& ts = alg.terms();
  if (ts.size() != 2) return std::nullopt;
  double c = 0.0;
  for (const auto& t : ts) {
    if (t.i == 0 && t.j == 1 && t.k == 2) c = t.c;
  }
  if (c == 0.0) return std::nullopt;
  return c;
}

inline Form closed_form_of(const SpaceD& space) {
  Form f;
  if (!space.standard_basis()) return f;
  auto c = detect_h3(*space.algebra());
  if (!c) return f;
  f.c = *c;
  if (space.norm().kind() == NormD::Kind::L2)
    f.kind = Form::Kind::L2;
  else if (norm_is_l1_like(space.norm()))
    f.kind = Form::Kind::L1;
  return f;
}

// d_inf under the detected form; coordinates in the algebra's own basis.
inline double distance(const Form& f, const VecD& coords) {
  const double x = coords[0], y = coords[1], z = coords[2] / f.c;
  switch (f.kind) {
    case Form::Kind::L1: return l1_distance(x, y, z);
    case Form::Kind::L2: return l2_distance(x, y, z);
    case Form::Kind::None: break;
  }
  fail(ErrorCode::InvalidArgument, "no closed form available");
}

// --- l1 geodesic synthesis --------------------------------------------------
//
// Builds an explicit minimizing path for the l1 metric by the same case split
// as l1_distance. Segment directions stay among the four l1 vertices.

inline PathD l1_geodesic(const SpaceD& space, double x, double y, double z) {
  // Symmetry reduction with a record of how to map the path back.
  bool flip_x = false, flip_y = false, swap_xy = false, flip_z = false;
  if (x < 0) {
    flip_x = true;
    x = -x;
    z = -z;
  }
  if (y < 0) {
    flip_y = true;
    y = -y;
    z = -z;
  }
  if (x < y) {
    swap_xy = true;
    std::swap(x, y);
    z = -z;
  }
  if (z < 0) {
    flip_z = true;
    z = -z;
  }

  // Planar waypoints for the reduced target.
  std::vector<std::pair<double, double>> pts;
  pts.emplace_back(0.0, 0.0);
  const double half_xy = 0.5 * x * y;
  if (z <= half_xy) {
    if (y > 0) {
      const double s = (z + half_xy) / y;
      pts.emplace_back(s, 0.0);
      pts.emplace_back(s, y);
      pts.emplace_back(x, y);
    } else {
      pts.emplace_back(x, 0.0);
    }
  } else if (x > 0.0 && z <= x * x - half_xy) {
    const double a = (z - half_xy) / x;
    pts.emplace_back(0.0, -a);
    pts.emplace_back(x, -a);
    pts.emplace_back(x, y);
  } else {
    const double s = std::sqrt(z + half_xy);
    const double a = s - y, c = s - x;
    pts.emplace_back(0.0, -a);
    pts.emplace_back(x + c, -a);
    pts.emplace_back(x + c, y);
    pts.emplace_back(x, y);
  }

  // Undo the reduction. flip_z realized as inversion + double sign flip,
  // which on the planar picture is: reverse traversal, negate both axes,
  // then translate so the path starts at the origin again. Equivalently the
  // displacement list is reversed with both coordinates kept.
  std::vector<std::pair<double, double>> disp;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    disp.emplace_back(pts[i + 1].first - pts[i].first, pts[i + 1].second - pts[i].second);
  if (flip_z) {
    std::reverse(disp.begin(), disp.end());
  }
  for (auto& d : disp) {
    if (swap_xy) std::swap(d.first, d.second);
    if (flip_y) d.second = -d.second;
    if (flip_x) d.first = -d.first;
  }

  PathD path(space);
  for (const auto& d : disp) path.append_displacement({d.first, d.second});
  return path;
}

// Polygonal approximation of the l2 circular-arc geodesic to a central
// target (0,0,z); `segments` chords, exact closure left to the caller.
inline PathD l2_central_arc(const SpaceD& space, double z, int segments) {
  PathD path(space);
  if (std::fabs(z) <= 1e-300) return path;
  const double total = 2.0 * std::sqrt(kPi * std::fabs(z));
  const double sgn = z > 0 ? 1.0 : -1.0;
  for (int j = 0; j < segments; ++j) {
    const double a = 2.0 * kPi * (j + 0.5) / segments;
    path.append_unit({std::cos(sgn * a), std::sin(sgn * a)}, total / segments);
  }
  return path;
}

}  // namespace h3

// Product form: one bracket pair (a,b) feeding a 1-dimensional center, l1
// norm. Costs decouple coordinate-wise, so
//   d(g) = sum_{f != a,b} |x_f| + d1_h3(x_a, x_b, z/c).
// Covers Z x H3(Z) with the product generating set and Z^d x H3.
struct L1ProductForm {
  int a = -1, b = -1;  // the interacting pair (0-based)
  double c = 1.0;
};

inline std::optional<L1ProductForm> detect_l1_product(const SpaceD& space) {
  if (!space.standard_basis()) return std::nullopt;
  const auto& alg = *space.algebra();
  if (alg.central_dim() != 1) return std::nullopt;
  if (!h3::norm_is_l1_like(space.norm())) return std::nullopt;
  const auto& ts = alg.terms();
  if (ts.size() != 2) return std::nullopt;
  L1ProductForm f;
  for (const auto& t : ts)
    if (t.i < t.j) {
      f.a = t.i;
      f.b = t.j;
      f.c = t.c;
    }
  if (f.a < 0 || f.c == 0.0) return std::nullopt;
  return f;
}

inline double l1_product_distance(const L1ProductForm& f, const VecD& coords) {
  const int n = static_cast<int>(coords.size());
  const double z = coords[static_cast<std::size_t>(n - 1)] / f.c;
  double extra = 0.0;
  for (int i = 0; i + 1 < n; ++i)
    if (i != f.a && i != f.b) extra += std::fabs(coords[static_cast<std::size_t>(i)]);
  return extra + h3::l1_distance(coords[static_cast<std::size_t>(f.a)], coords[static_cast<std::size_t>(f.b)], z);
}

}  // namespace carnot
