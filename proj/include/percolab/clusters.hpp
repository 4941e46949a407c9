#pragma once

// Open-cluster decomposition, the giant-cluster proxy for the infinite
// cluster, anchor points near a target site, and the tail diagnostics for the
// finite-cluster-radius and hole events.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "percolab/lattice.hpp"
#include "percolab/parallel.hpp"
#include "percolab/stats.hpp"

namespace percolab {

struct ClusterLabels {
  std::vector<std::uint32_t> root;   // per vertex: root id of its cluster
  std::vector<std::uint32_t> size;   // valid at roots only
  std::optional<std::uint32_t> giant;  // absent on an exact tie of the two largest
  std::uint32_t giant_size = 0;

  std::uint32_t cluster_size(std::uint32_t v) const { return size[root[v]]; }
  bool same_cluster(std::uint32_t u, std::uint32_t v) const { return root[u] == root[v]; }
  bool in_giant(std::uint32_t v) const { return giant && root[v] == *giant; }
};

namespace detail {

inline std::uint32_t uf_find(std::vector<std::uint32_t>& parent, std::uint32_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];  // path halving
    x = parent[x];
  }
  return x;
}

}  // namespace detail

inline ClusterLabels label_clusters(const Configuration& cfg) {
  const BoxWindow& w = cfg.window;
  const std::uint32_t n = static_cast<std::uint32_t>(w.vertex_count());
  ClusterLabels labels;
  std::vector<std::uint32_t> parent(n);
  for (std::uint32_t i = 0; i < n; ++i) parent[i] = i;
  std::vector<std::uint32_t> sz(n, 1);

  for (int a = 0; a < w.d; ++a) {
    const std::uint32_t stride = static_cast<std::uint32_t>(w.stride(a));
    for (std::uint32_t v = 0; v < n; ++v) {
      if (!cfg.axis_open(a, v)) continue;
      std::uint32_t ru = detail::uf_find(parent, v);
      std::uint32_t rv = detail::uf_find(parent, v + stride);
      if (ru == rv) continue;
      if (sz[ru] < sz[rv]) std::swap(ru, rv);
      parent[rv] = ru;
      sz[ru] += sz[rv];
    }
  }
  labels.root.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) labels.root[i] = detail::uf_find(parent, i);
  labels.size.assign(n, 0);
  for (std::uint32_t i = 0; i < n; ++i)
    if (labels.root[i] == i) labels.size[i] = sz[i];

  std::uint32_t best = 0, second = 0, best_root = 0;
  for (std::uint32_t i = 0; i < n; ++i) {
    if (labels.root[i] != i) continue;
    if (labels.size[i] > best) {
      second = best;
      best = labels.size[i];
      best_root = i;
    } else if (labels.size[i] > second) {
      second = labels.size[i];
    }
  }
  if (best > second) {
    labels.giant = best_root;
    labels.giant_size = best;
  }
  return labels;
}

inline std::optional<std::uint32_t> giant_cluster(const ClusterLabels& labels, const BoxWindow&) {
  return labels.giant;
}

enum class AnchorRule {
  giant_cluster,    // finite-window realization: membership in the giant cluster
  shell_connected,  // within-ball connection to the l1 sphere of a given radius
};

struct AnchorResult {
  Site point{};
  std::int64_t l1_distance = 0;
  bool empty_intersection = false;  // no candidate found; point == site
};

namespace detail {

// visit the l1 sphere { site + o : |o|_1 = rho } in lexicographic order of the
// resulting coordinates; stops early when fn returns true
inline bool visit_l1_shell(int d, const Site& site, std::int64_t rho,
                           const std::function<bool(const Site&)>& fn) {
  Site s = site;
  std::function<bool(int, std::int64_t)> rec = [&](int axis, std::int64_t left) -> bool {
    if (axis == d - 1) {
      if (left == 0) {
        s[axis] = site[axis];
        return fn(s);
      }
      s[axis] = site[axis] - left;
      if (fn(s)) return true;
      s[axis] = site[axis] + left;
      return fn(s);
    }
    for (std::int64_t o = -left; o <= left; ++o) {
      s[axis] = site[axis] + o;
      if (rec(axis + 1, left - (o < 0 ? -o : o))) return true;
    }
    return false;
  };
  return rec(0, rho);
}

// labels of clusters (restricted to the closed l1 ball) that touch the sphere
// of radius `outer`; used by the shell-connected anchor rule
inline std::vector<bool> shell_connected_mask(const Configuration& cfg, const Site& center,
                                              std::int64_t outer) {
  const BoxWindow& w = cfg.window;
  const int d = w.d;
  const std::int64_t box = 2 * outer + 1;
  std::int64_t cells = 1;
  for (int i = 0; i < d; ++i) cells *= box;
  auto local_index = [&](const Site& s) -> std::int64_t {
    std::int64_t idx = 0;
    for (int i = d - 1; i >= 0; --i) {
      std::int64_t c = s[i] - center[i] + outer;
      idx = idx * box + c;
    }
    return idx;
  };
  std::vector<std::uint32_t> parent(static_cast<std::size_t>(cells));
  for (std::int64_t i = 0; i < cells; ++i) parent[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(i);

  Site s = center;
  // union along open edges with both endpoints in the ball
  std::function<void(int, Site&)> sweep_box = [&](int axis, Site& t) {
    if (axis == d) {
      if (l1_dist(t, center, d) > outer) return;
      std::uint32_t vu = w.vertex_id(t);
      for (int a = 0; a < d; ++a) {
        Site nb = t;
        nb[a] += 1;
        if (l1_dist(nb, center, d) > outer || !w.contains(nb)) continue;
        if (!cfg.axis_open(a, vu)) continue;
        std::uint32_t pu = detail::uf_find(parent, static_cast<std::uint32_t>(local_index(t)));
        std::uint32_t pv = detail::uf_find(parent, static_cast<std::uint32_t>(local_index(nb)));
        if (pu != pv) parent[pv] = pu;
      }
      return;
    }
    for (std::int64_t o = -outer; o <= outer; ++o) {
      t[axis] = center[axis] + o;
      sweep_box(axis + 1, t);
    }
    t[axis] = center[axis];
  };
  sweep_box(0, s);

  std::vector<bool> touches(static_cast<std::size_t>(cells), false);
  visit_l1_shell(d, center, outer, [&](const Site& q) {
    if (w.contains(q)) touches[static_cast<std::size_t>(detail::uf_find(parent, static_cast<std::uint32_t>(local_index(q))))] = true;
    return false;
  });
  std::vector<bool> mask(static_cast<std::size_t>(cells), false);
  std::function<void(int, Site&)> mark = [&](int axis, Site& t) {
    if (axis == d) {
      if (l1_dist(t, center, d) > outer || !w.contains(t)) return;
      std::int64_t li = local_index(t);
      mask[static_cast<std::size_t>(li)] =
          touches[static_cast<std::size_t>(detail::uf_find(parent, static_cast<std::uint32_t>(li)))];
      return;
    }
    for (std::int64_t o = -outer; o <= outer; ++o) {
      t[axis] = center[axis] + o;
      mark(axis + 1, t);
    }
    t[axis] = center[axis];
  };
  mark(0, s);
  return mask;
}

}  // namespace detail

// Closest qualifying vertex to `site` within the l1 ball of the given radius,
// ties broken by lexicographic order on the coordinates; `site` itself with
// the empty flag when the intersection is empty. Under the shell rule,
// qualification means connection (inside the ball of radius `outer_radius`)
// to the sphere of that radius, and the result depends only on edges in that
// ball.
inline AnchorResult anchor_point(const Configuration& cfg, const ClusterLabels& labels,
                                 const Site& site, double radius,
                                 AnchorRule rule = AnchorRule::giant_cluster,
                                 std::int64_t outer_radius = 0) {
  const BoxWindow& w = cfg.window;
  if (!w.contains(site)) throw std::invalid_argument("anchor_point: site outside window");
  std::int64_t r = static_cast<std::int64_t>(std::floor(radius));
  if (r < 0) throw std::invalid_argument("anchor_point: negative radius");
  std::int64_t needed = rule == AnchorRule::shell_connected ? std::max(r, outer_radius) : r;
  if (w.boundary_margin(site) < needed)
    throw std::invalid_argument("anchor_point: site too close to the window boundary");

  std::vector<bool> shell_mask;
  std::int64_t box = 0;
  if (rule == AnchorRule::shell_connected) {
    if (outer_radius <= 0) throw std::invalid_argument("anchor_point: shell rule needs outer_radius > 0");
    shell_mask = detail::shell_connected_mask(cfg, site, outer_radius);
    box = 2 * outer_radius + 1;
  }
  auto qualifies = [&](const Site& q) {
    if (rule == AnchorRule::giant_cluster) return labels.in_giant(w.vertex_id(q));
    std::int64_t idx = 0;
    for (int i = w.d - 1; i >= 0; --i) idx = idx * box + (q[i] - site[i] + outer_radius);
    return static_cast<bool>(shell_mask[static_cast<std::size_t>(idx)]);
  };

  AnchorResult res;
  for (std::int64_t rho = 0; rho <= r; ++rho) {
    bool found = detail::visit_l1_shell(w.d, site, rho, [&](const Site& q) {
      if (!w.contains(q)) return false;
      if (!qualifies(q)) return false;
      res.point = q;
      res.l1_distance = rho;
      return true;
    });
    if (found) return res;
  }
  res.point = site;
  res.l1_distance = 0;
  res.empty_intersection = true;
  return res;
}

// Empirical decay curve of a radius-indexed rare event.
struct TailCurve {
  std::vector<std::int64_t> radii;
  std::vector<std::uint64_t> counts;
  std::uint64_t replicas = 0;
  FitResult fit;  // of -ln(count/replicas) against r; fit.ok false if < 3 nonzero

  double phat(std::size_t i) const {
    return replicas ? static_cast<double>(counts[i]) / static_cast<double>(replicas) : 0.0;
  }
};

namespace detail {

inline void fit_tail(TailCurve& c) {
  std::vector<double> xs, ks, ns;
  for (std::size_t i = 0; i < c.radii.size(); ++i) {
    xs.push_back(static_cast<double>(c.radii[i]));
    ks.push_back(static_cast<double>(c.counts[i]));
    ns.push_back(static_cast<double>(c.replicas));
  }
  try {
    c.fit = fit_exponential_decay(xs, ks, ns);
  } catch (const std::invalid_argument&) {
    c.fit = FitResult{};
    for (std::size_t i = 0; i < c.counts.size(); ++i)
      if (c.counts[i] == 0) {
        c.fit.zero_indices.push_back(i);
        c.fit.rule_of_three_bounds.push_back(-std::log(rule_of_three(c.replicas)));
      }
  }
}

}  // namespace detail

// Empirical frequencies of the finite-cluster-radius event (cluster of 0
// touches the l1 sphere of radius r but is not the giant) and of the hole
// event (giant cluster misses the l1 ball of radius r).
inline std::pair<TailCurve, TailCurve> tail_statistics(double p, int d,
                                                       const std::vector<std::int64_t>& radii,
                                                       std::uint64_t replicas,
                                                       std::uint64_t master_seed,
                                                       int threads = 0) {
  if (replicas == 0) throw std::invalid_argument("tail_statistics: zero replicas");
  if (radii.empty()) throw std::invalid_argument("tail_statistics: empty radius list");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (radii[i] <= radii[i - 1]) throw std::invalid_argument("tail_statistics: radii must increase");
  std::int64_t rmax = radii.back();
  std::int64_t margin = std::max<std::int64_t>(8, rmax / 2);
  std::int64_t side = 2 * (rmax + margin) + 1;
  Site origin{};
  for (int i = 0; i < d; ++i) origin[i] = -(rmax + margin);
  BoxWindow w = make_window(d, side, origin);
  if (w.boundary_margin(Site{}) < rmax) throw std::invalid_argument("tail_statistics: window too small");

  std::vector<std::uint8_t> finite_hits(radii.size() * replicas, 0);
  std::vector<std::uint8_t> hole_hits(radii.size() * replicas, 0);

  parallel_replicas(replicas, threads, [&](std::uint64_t rep) {
    Configuration cfg = sample_configuration(w, p, derive_seed({master_seed, rep}));
    ClusterLabels labels = label_clusters(cfg);
    std::uint32_t v0 = w.vertex_id(Site{});
    std::uint32_t root0 = labels.root[v0];
    bool zero_in_giant = labels.in_giant(v0);
    // one sweep: max l1 radius of 0's cluster, min l1 norm over the giant
    std::int64_t reach0 = 0;
    std::int64_t giant_min = std::numeric_limits<std::int64_t>::max();
    const std::uint32_t n = static_cast<std::uint32_t>(w.vertex_count());
    for (std::uint32_t v = 0; v < n; ++v) {
      bool of0 = labels.root[v] == root0;
      bool ofg = labels.giant && labels.root[v] == *labels.giant;
      if (!of0 && !ofg) continue;
      Site s = w.vertex_site(v);
      std::int64_t nrm = l1_norm(s, d);
      if (of0 && nrm > reach0) reach0 = nrm;
      if (ofg && nrm < giant_min) giant_min = nrm;
    }
    for (std::size_t i = 0; i < radii.size(); ++i) {
      if (!zero_in_giant && reach0 >= radii[i]) finite_hits[i * replicas + rep] = 1;
      if (giant_min > radii[i]) hole_hits[i * replicas + rep] = 1;
    }
  });

  TailCurve finite, hole;
  finite.radii = hole.radii = radii;
  finite.replicas = hole.replicas = replicas;
  finite.counts.assign(radii.size(), 0);
  hole.counts.assign(radii.size(), 0);
  for (std::size_t i = 0; i < radii.size(); ++i)
    for (std::uint64_t rep = 0; rep < replicas; ++rep) {
      finite.counts[i] += finite_hits[i * replicas + rep];
      hole.counts[i] += hole_hits[i * replicas + rep];
    }
  detail::fit_tail(finite);
  detail::fit_tail(hole);
  return {finite, hole};
}

}  // namespace percolab
