#pragma once

#include <utility>
#include <vector>

#include "carnot/horizontal.hpp"

namespace carnot {

// Piecewise-constant-control horizontal path: a list of (unit direction,
// duration) segments in V-coordinates, based at a group element. In a 2-step
// group the endpoint of each constant-control segment is an exact BCH factor,
// so endpoints of polygonal paths are exact (rational mode included).
template <class S>
class HorizontalPath {
 public:
  struct Segment {
    Vector<S> direction;  // unit norm whenever duration > 0
    S duration;
  };

  explicit HorizontalPath(HorizontalSpace<S> space)
      : space_(std::move(space)),
        base_(GroupElement<S>::identity(space_.algebra())) {}

  HorizontalPath(HorizontalSpace<S> space, GroupElement<S> base)
      : space_(std::move(space)), base_(std::move(base)) {}

  const HorizontalSpace<S>& space() const { return space_; }
  const std::vector<Segment>& segments() const { return segs_; }
  const GroupElement<S>& base() const { return base_; }
  std::size_t size() const { return segs_.size(); }
  bool empty() const { return segs_.empty(); }

  void set_base(GroupElement<S> base) { base_ = std::move(base); }

  // Appends a segment, normalizing the direction against the space's norm.
  void append(const Vector<S>& direction, const S& duration) {
    require(duration >= S(0), ErrorCode::InvalidArgument, "segment duration must be >= 0");
    if (ScalarOps<S>::is_zero(duration)) return;
    const S n = space_.norm().eval(direction);
    require(!ScalarOps<S>::is_zero(n), ErrorCode::InvalidArgument,
            "segment direction must be nonzero");
    segs_.push_back({vec::scale(S(1) / n, direction), duration * n});
  }

  // Appends the displacement w traversed at unit speed.
  void append_displacement(const Vector<S>& w) {
    const S n = space_.norm().eval(w);
    if (ScalarOps<S>::is_zero(n)) return;
    segs_.push_back({vec::scale(S(1) / n, w), n});
  }

  void append_unit(Vector<S> unit_direction, const S& duration) {
    require(duration >= S(0), ErrorCode::InvalidArgument, "segment duration must be >= 0");
    if (ScalarOps<S>::is_zero(duration)) return;
    segs_.push_back({std::move(unit_direction), duration});
  }

  void extend(const HorizontalPath& other) {
    for (const auto& s : other.segs_) segs_.push_back(s);
  }

  S length() const {
    S s(0);
    for (const auto& seg : segs_) s += seg.duration;
    return s;
  }

  // Product over segments of exp(duration * direction), left to right.
  GroupElement<S> endpoint() const {
    const auto& alg = space_.algebra();
    Vector<S> x = base_.coords();
    for (const auto& seg : segs_) {
      const Vector<S> step = space_.embed(vec::scale(seg.duration, seg.direction));
      x = alg->bch(x, step);
    }
    return GroupElement<S>(alg, std::move(x));
  }

  // Splits into M pieces of equal length; the concatenation reproduces the
  // path, each piece re-based at the identity.
  std::vector<HorizontalPath> subdivide(int pieces) const {
    require(pieces >= 1, ErrorCode::InvalidArgument, "subdivision needs M >= 1");
    std::vector<HorizontalPath> out;
    out.reserve(static_cast<std::size_t>(pieces));
    const S total = length();
    const S target = total / S(pieces);
    std::size_t idx = 0;
    S used(0);  // portion of segs_[idx] already consumed
    for (int piece = 0; piece < pieces; ++piece) {
      HorizontalPath sub(space_);
      S need = target;
      while (need > S(0) && idx < segs_.size()) {
        const S avail = segs_[idx].duration - used;
        if (avail > need) {
          sub.append_unit(segs_[idx].direction, need);
          used += need;
          need = S(0);
        } else {
          if (avail > S(0)) sub.append_unit(segs_[idx].direction, avail);
          need -= avail;
          used = S(0);
          ++idx;
        }
      }
      out.push_back(std::move(sub));
    }
    return out;
  }

 private:
  HorizontalSpace<S> space_;
  GroupElement<S> base_;
  std::vector<Segment> segs_;
};

using PathD = HorizontalPath<double>;
using PathQ = HorizontalPath<Rational>;

// The four-segment commutator realization: (-X,sqrt r),(-Y,sqrt r),
// (X,sqrt r),(Y,sqrt r). Endpoint exp(r[X,Y]), length 4 sqrt(r).
template <class S>
HorizontalPath<S> box_path(const HorizontalSpace<S>& space, const Vector<S>& x,
                           const Vector<S>& y, const S& r) {
  const S unit_tol = std::is_same_v<S, double> ? S(1e-9) : S(0);
  require(space.norm().is_unit(x, unit_tol), ErrorCode::NonUnitDirection,
          "box path requires unit X");
  require(space.norm().is_unit(y, unit_tol), ErrorCode::NonUnitDirection,
          "box path requires unit Y");
  require(r >= S(0), ErrorCode::InvalidArgument, "box path requires r >= 0");
  HorizontalPath<S> path(space);
  if (ScalarOps<S>::is_zero(r)) return path;
  const S s = ScalarOps<S>::sqrt(r);
  path.append_unit(vec::neg(x), s);
  path.append_unit(vec::neg(y), s);
  path.append_unit(x, s);
  path.append_unit(y, s);
  return path;
}

// |{ i : ||pi(h_i)||_inf < R * (length/M) }| over the M equal-length pieces;
// the segment length stands in for d(h_i), which each piece's own geodesic
// realizes as an upper bound.
template <class S>
int count_irregular_segments(const HorizontalPath<S>& path, int pieces, const S& ratio) {
  require(ratio > S(0) && ratio <= S(1), ErrorCode::InvalidArgument, "need R in (0,1]");
  const S total = path.length();
  const S piece_len = total / S(pieces);
  int count = 0;
  for (const auto& sub : path.subdivide(pieces)) {
    const auto h = sub.endpoint();
    const S pn = sub.space().projected_norm(project_pi(h));
    if (pn < ratio * piece_len) ++count;
  }
  return count;
}

}  // namespace carnot
