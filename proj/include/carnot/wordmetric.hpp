#pragma once

#include <algorithm>
#include <unordered_map>
#include <vector>

#include "carnot/lattice.hpp"

namespace carnot {

// Exact word metrics by breadth-first search over the Cayley graph. The
// frontier is expanded layer by layer so every stored distance is final; a
// configurable element budget guards memory (H3Z balls grow like n^4).
template <class Element, class Hash>
struct BallTable {
  std::unordered_map<Element, int, Hash> dist;
  std::vector<long long> sphere_sizes;  // sphere_sizes[r] = |{g : rho(g) = r}|
  int completed_radius = -1;
  bool complete = false;  // false when the budget cut the run short

  long long ball_size() const {
    long long s = 0;
    for (long long v : sphere_sizes) s += v;
    return s;
  }

  std::vector<Element> sphere(int r) const {
    std::vector<Element> out;
    for (const auto& kv : dist)
      if (kv.second == r) out.push_back(kv.first);
    std::sort(out.begin(), out.end());
    return out;
  }
};

struct BfsOptions {
  long long element_budget = 200000000;  // ~2e8 elements
};

template <class L, class Hash = LatticeElementHash>
auto bfs_ball(const L& lattice,
              const std::vector<std::decay_t<decltype(std::declval<L>().identity())>>& symmetric_gens,
              int radius, const BfsOptions& opts = {}) {
  using Elem = std::decay_t<decltype(std::declval<L>().identity())>;
  require(radius >= 0, ErrorCode::InvalidArgument, "radius must be >= 0");
  BallTable<Elem, Hash> table;
  const Elem id = lattice.identity();
  table.dist.emplace(id, 0);
  table.sphere_sizes.push_back(1);
  table.completed_radius = 0;
  std::vector<Elem> frontier{id};
  for (int r = 1; r <= radius; ++r) {
    std::vector<Elem> next;
    next.reserve(frontier.size() * symmetric_gens.size() / 2 + 16);
    for (const auto& g : frontier) {
      for (const auto& s : symmetric_gens) {
        Elem h = lattice.multiply(g, s);
        auto [it, inserted] = table.dist.emplace(std::move(h), r);
        if (inserted) next.push_back(it->first);
      }
    }
    if (static_cast<long long>(table.dist.size()) > opts.element_budget) {
      // roll back the incomplete layer
      for (const auto& e : next) table.dist.erase(e);
      table.complete = false;
      return table;
    }
    table.sphere_sizes.push_back(static_cast<long long>(next.size()));
    table.completed_radius = r;
    frontier = std::move(next);
    if (frontier.empty()) break;  // finite group or exhausted component
  }
  table.complete = true;
  return table;
}

// rho_S(g): cached ball lookup, otherwise bidirectional BFS.
template <class L, class Hash = LatticeElementHash>
int word_length(const L& lattice,
                const std::vector<std::decay_t<decltype(std::declval<L>().identity())>>& symmetric_gens,
                const std::decay_t<decltype(std::declval<L>().identity())>& target,
                const BallTable<std::decay_t<decltype(std::declval<L>().identity())>, Hash>* cache = nullptr,
                const BfsOptions& opts = {}) {
  using Elem = std::decay_t<decltype(std::declval<L>().identity())>;
  if (cache) {
    auto it = cache->dist.find(target);
    if (it != cache->dist.end()) return it->second;
  }
  if (target == lattice.identity()) return 0;

  std::unordered_map<Elem, int, Hash> from_id{{lattice.identity(), 0}};
  std::unordered_map<Elem, int, Hash> from_g{{target, 0}};
  std::vector<Elem> fa{lattice.identity()}, fb{target};
  int da = 0, db = 0;
  auto meet = [&]() -> int {
    int best = -1;
    const auto& small = from_id.size() <= from_g.size() ? from_id : from_g;
    const auto& large = from_id.size() <= from_g.size() ? from_g : from_id;
    for (const auto& kv : small) {
      auto it = large.find(kv.first);
      if (it != large.end()) {
        const int total = kv.second + it->second;
        if (best < 0 || total < best) best = total;
      }
    }
    return best;
  };
  for (int round = 0; round < 1000; ++round) {
    const int found = meet();
    if (found >= 0 && found <= da + db) return found;
    // expand the smaller side
    const bool expand_a = from_id.size() <= from_g.size();
    auto& table = expand_a ? from_id : from_g;
    auto& frontier = expand_a ? fa : fb;
    auto& depth = expand_a ? da : db;
    std::vector<Elem> next;
    for (const auto& g : frontier)
      for (const auto& s : symmetric_gens) {
        Elem h = lattice.multiply(g, s);
        auto [it, inserted] = table.emplace(std::move(h), depth + 1);
        if (inserted) next.push_back(it->first);
      }
    ++depth;
    frontier = std::move(next);
    require(static_cast<long long>(from_id.size() + from_g.size()) <= opts.element_budget,
            ErrorCode::BudgetExceeded, "bidirectional BFS exceeded the element budget");
    require(!frontier.empty(), ErrorCode::BudgetExceeded,
            "target not reachable within the explored component");
  }
  fail(ErrorCode::BudgetExceeded, "bidirectional BFS round limit");
}

// Least-squares slope of log|B(n)| against log n on [n_lo, n_hi].
template <class Elem, class Hash>
double growth_degree_fit(const BallTable<Elem, Hash>& table, int n_lo, int n_hi) {
  std::vector<double> xs, ys;
  long long acc = 0;
  for (int r = 0; r <= table.completed_radius; ++r) {
    acc += table.sphere_sizes[static_cast<std::size_t>(r)];
    if (r >= n_lo && r <= n_hi) {
      xs.push_back(std::log(static_cast<double>(r)));
      ys.push_back(std::log(static_cast<double>(acc)));
    }
  }
  require(xs.size() >= 2, ErrorCode::InvalidArgument, "not enough radii for a growth fit");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace carnot
