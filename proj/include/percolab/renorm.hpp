#pragma once

// Renormalization constructions: the wired/unwired vertex field, *-connected
// unwired components with their dilations, and the macroscopic edge field
// whose marginal tends to one as the mesh grows.

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "percolab/chemdist.hpp"
#include "percolab/clusters.hpp"
#include "percolab/geometry.hpp"
#include "percolab/lattice.hpp"
#include "percolab/parallel.hpp"
#include "percolab/stats.hpp"

namespace percolab {

// Per-vertex indicator of being unwired: 1 unwired, 0 wired, -1 undefined
// (boundary band of width one, where the stencil leaves the window).
struct WiredField {
  BoxWindow window;
  std::vector<std::int8_t> y;

  std::int8_t at(std::uint32_t v) const { return y[v]; }
};

namespace detail {

// edges with both endpoints in the {-1,0,1}^d stencil: per axis, lower
// endpoint offsets with the axis coordinate in {-1,0}
inline std::vector<std::pair<Site, int>> stencil_edges(int d) {
  std::vector<std::pair<Site, int>> out;
  for (int a = 0; a < d; ++a) {
    Site off{};
    std::function<void(int)> rec = [&](int axis) {
      if (axis == d) {
        out.emplace_back(off, a);
        return;
      }
      std::int64_t lo = -1, hi = axis == a ? 0 : 1;
      for (std::int64_t c = lo; c <= hi; ++c) {
        off[axis] = c;
        rec(axis + 1);
      }
      off[axis] = 0;
    };
    rec(0);
  }
  return out;
}

}  // namespace detail

// A vertex is wired iff every edge of its 3^d stencil is open; exact on
// interior vertices, undefined on the boundary band.
inline WiredField wired_field(const Configuration& cfg) {
  const BoxWindow& w = cfg.window;
  if (w.side < 3) throw std::invalid_argument("wired_field: window side must be >= 3");
  WiredField f;
  f.window = w;
  const std::uint32_t n = static_cast<std::uint32_t>(w.vertex_count());
  f.y.assign(n, -1);
  auto edges = detail::stencil_edges(w.d);
  for (std::uint32_t v = 0; v < n; ++v) {
    Site s = w.vertex_site(v);
    if (w.boundary_margin(s) < 1) continue;
    bool wired = true;
    for (const auto& [off, axis] : edges) {
      Site t = s;
      for (int i = 0; i < w.d; ++i) t[i] += off[i];
      if (!cfg.axis_open(axis, w.vertex_id(t))) {
        wired = false;
        break;
      }
    }
    f.y[v] = wired ? 0 : 1;
  }
  return f;
}

// number of edges in the 3^d stencil: 2 d 3^(d-1)
inline std::uint64_t stencil_edge_count(int d) {
  std::uint64_t n = 2 * static_cast<std::uint64_t>(d);
  for (int i = 1; i < d; ++i) n *= 3;
  return n;
}

// Maximal *-connected components of unwired vertices; a wired vertex has an
// empty component.
struct UnwiredComponents {
  BoxWindow window;
  std::vector<std::int32_t> comp;  // per vertex, -1 when none
  std::vector<std::vector<std::uint32_t>> members;

  // component of x dilated `times`-fold by {-1,0,1}^d, clipped to the window
  std::vector<std::uint32_t> dilated(std::int32_t component, int times) const {
    if (component < 0 || component >= static_cast<std::int32_t>(members.size()))
      throw std::invalid_argument("UnwiredComponents::dilated: bad component id");
    std::vector<bool> mask(window.vertex_count(), false);
    std::vector<std::uint32_t> cur = members[static_cast<std::size_t>(component)];
    for (std::uint32_t v : cur) mask[v] = true;
    for (int t = 0; t < times; ++t) {
      std::vector<std::uint32_t> grown;
      for (std::uint32_t v : cur) {
        Site s = window.vertex_site(v);
        Site off{};
        std::function<void(int)> rec = [&](int axis) {
          if (axis == window.d) {
            Site q = s;
            for (int i = 0; i < window.d; ++i) q[i] += off[i];
            if (!window.contains(q)) return;
            std::uint32_t u = window.vertex_id(q);
            if (!mask[u]) {
              mask[u] = true;
              grown.push_back(u);
            }
            return;
          }
          for (std::int64_t c = -1; c <= 1; ++c) {
            off[axis] = c;
            rec(axis + 1);
          }
          off[axis] = 0;
        };
        rec(0);
      }
      cur.insert(cur.end(), grown.begin(), grown.end());
    }
    return cur;
  }
};

inline UnwiredComponents unwired_components(const WiredField& f) {
  const BoxWindow& w = f.window;
  const std::uint32_t n = static_cast<std::uint32_t>(w.vertex_count());
  UnwiredComponents out;
  out.window = w;
  out.comp.assign(n, -1);
  std::vector<std::uint32_t> parent(n);
  for (std::uint32_t i = 0; i < n; ++i) parent[i] = i;
  for (std::uint32_t v = 0; v < n; ++v) {
    if (f.y[v] != 1) continue;
    Site s = w.vertex_site(v);
    Site off{};
    std::function<void(int)> rec = [&](int axis) {
      if (axis == w.d) {
        bool zero = true;
        for (int i = 0; i < w.d; ++i) zero = zero && off[i] == 0;
        if (zero) return;
        Site q = s;
        for (int i = 0; i < w.d; ++i) q[i] += off[i];
        if (!w.contains(q)) return;
        std::uint32_t u = w.vertex_id(q);
        if (f.y[u] != 1) return;
        std::uint32_t ra = detail::uf_find(parent, v), rb = detail::uf_find(parent, u);
        if (ra != rb) parent[rb] = ra;
        return;
      }
      for (std::int64_t c = -1; c <= 1; ++c) {
        off[axis] = c;
        rec(axis + 1);
      }
      off[axis] = 0;
    };
    rec(0);
  }
  std::vector<std::int32_t> id_of_root(n, -1);
  for (std::uint32_t v = 0; v < n; ++v) {
    if (f.y[v] != 1) continue;
    std::uint32_t r = detail::uf_find(parent, v);
    if (id_of_root[r] < 0) {
      id_of_root[r] = static_cast<std::int32_t>(out.members.size());
      out.members.emplace_back();
    }
    out.comp[v] = id_of_root[r];
    out.members[static_cast<std::size_t>(id_of_root[r])].push_back(v);
  }
  return out;
}

// Parameters of the macroscopic grid adapted to a rational unit direction.
struct MacroParams {
  std::int64_t N = 8;          // mesh
  int M = 4;                   // direction-scale integer
  double eta = 0.2;            // slack
  std::vector<std::int64_t> m; // M * rhat, integer vector with |m|_1 = M
  AdaptedBasis basis;          // adapted to M * rhat
  double mu_rhat = 1.0;        // gauge value of rhat
  std::int64_t macro_extent = 4;
  AnchorRule rule = AnchorRule::giant_cluster;

  int dim() const { return static_cast<int>(m.size()); }
  std::int64_t anchor_radius() const { return static_cast<std::int64_t>(std::floor(std::sqrt(static_cast<double>(N)))); }
  std::int64_t distance_cutoff() const {
    return static_cast<std::int64_t>(std::floor(static_cast<double>(N * M) * mu_rhat * (1.0 + eta)));
  }
  // microscopic position of a macroscopic vertex
  Site micro_position(const Site& xbar) const {
    Site s{};
    for (int i = 0; i < dim(); ++i) {
      double c = 0.0;
      for (int j = 0; j < dim(); ++j)
        c += basis.columns[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] * static_cast<double>(xbar[j]);
      s[i] = static_cast<std::int64_t>(std::llround(static_cast<double>(N) * c));
    }
    return s;
  }
};

inline MacroParams make_macro_params(std::int64_t N, int M, double eta,
                                     const std::vector<std::int64_t>& m, const NormBall& ball,
                                     std::int64_t macro_extent = 4,
                                     AnchorRule rule = AnchorRule::giant_cluster) {
  if (N < 1 || M < 1 || eta <= 0.0) throw std::invalid_argument("make_macro_params: bad N, M or eta");
  std::int64_t l1 = 0;
  for (auto c : m) l1 += c < 0 ? -c : c;
  if (l1 != M) throw std::invalid_argument("make_macro_params: |m|_1 must equal M");
  MacroParams p;
  p.N = N;
  p.M = M;
  p.eta = eta;
  p.m = m;
  Vec x(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) x[i] = static_cast<double>(m[i]);
  p.basis = adapted_basis(x);
  p.mu_rhat = ball.gauge(scale(x, 1.0 / static_cast<double>(M)));
  p.macro_extent = macro_extent;
  p.rule = rule;
  return p;
}

struct MacroEdge {
  Site from_bar{};
  int axis = 0;
  bool open = false;
  std::int32_t distance = kUnreachable;  // anchor-to-anchor, capped at the cutoff
};

struct MacroEdgeField {
  std::vector<MacroEdge> edges;
  std::uint64_t open_count = 0;

  double mean() const {
    return edges.empty() ? 0.0 : static_cast<double>(open_count) / static_cast<double>(edges.size());
  }
};

// Evaluates the macroscopic edge indicators on the census of edges with both
// ends in [0, macro_extent)^d: anchor both microscopic ends, then test
// whether the anchor-to-anchor chemical distance stays below
// N M mu(rhat) (1 + eta). The BFS is cut off at that threshold.
inline MacroEdgeField macro_edge_field(const Configuration& cfg, const MacroParams& params,
                                       const ClusterLabels& labels) {
  const BoxWindow& w = cfg.window;
  const int d = w.d;
  if (params.dim() != d) throw std::invalid_argument("macro_edge_field: dimension mismatch");
  const std::int64_t cutoff = params.distance_cutoff();
  const std::int64_t radius = params.anchor_radius();

  // anchor every macroscopic vertex once
  std::vector<Site> bars;
  Site xbar{};
  std::function<void(int)> enumerate = [&](int axis) {
    if (axis == d) {
      bars.push_back(xbar);
      return;
    }
    for (std::int64_t c = 0; c < params.macro_extent; ++c) {
      xbar[axis] = c;
      enumerate(axis + 1);
    }
    xbar[axis] = 0;
  };
  enumerate(0);

  auto bar_index = [&](const Site& b) -> std::int64_t {
    std::int64_t idx = 0;
    for (int i = d - 1; i >= 0; --i) idx = idx * params.macro_extent + b[i];
    return idx;
  };

  std::vector<std::uint32_t> anchors(bars.size());
  for (std::size_t i = 0; i < bars.size(); ++i) {
    Site micro = params.micro_position(bars[i]);
    if (!w.contains(micro) || w.boundary_margin(micro) < radius + cutoff + 1)
      throw std::invalid_argument("macro_edge_field: macro window clipped by the configuration window");
    AnchorResult a = anchor_point(cfg, labels, micro, static_cast<double>(radius), params.rule,
                                  params.rule == AnchorRule::shell_connected ? params.N : 0);
    anchors[i] = w.vertex_id(a.point);
  }

  MacroEdgeField field;
  for (const Site& b : bars) {
    // BFS once per macro vertex, read the d forward neighbors
    bool has_forward = false;
    for (int a = 0; a < d; ++a) has_forward = has_forward || b[a] + 1 < params.macro_extent;
    if (!has_forward) continue;
    DistanceField df = distance_field(cfg, anchors[static_cast<std::size_t>(bar_index(b))], cutoff);
    for (int a = 0; a < d; ++a) {
      if (b[a] + 1 >= params.macro_extent) continue;
      Site nb = b;
      nb[a] += 1;
      std::int32_t dist = df.dist[anchors[static_cast<std::size_t>(bar_index(nb))]];
      MacroEdge e;
      e.from_bar = b;
      e.axis = a;
      e.distance = dist;
      e.open = dist != kUnreachable && static_cast<double>(dist) <=
                                           static_cast<double>(params.N * params.M) * params.mu_rhat * (1.0 + params.eta);
      if (e.open) ++field.open_count;
      field.edges.push_back(e);
    }
  }
  return field;
}

// all integer vectors m >= 0, sorted coordinates, |m|_1 = M, gcd-free scaling
// not required: these are the fundamental-domain representatives of
// (1/M) Z^d on the l1 sphere
inline std::vector<std::vector<std::int64_t>> rhat_fundamental_domain(int d, int M) {
  std::vector<std::vector<std::int64_t>> out;
  std::vector<std::int64_t> m(static_cast<std::size_t>(d), 0);
  std::function<void(int, std::int64_t, std::int64_t)> rec = [&](int axis, std::int64_t left, std::int64_t cap) {
    if (axis == d - 1) {
      if (left <= cap) {
        m[static_cast<std::size_t>(axis)] = left;
        out.push_back(m);
      }
      return;
    }
    for (std::int64_t c = std::min<std::int64_t>(cap, left); c >= (left + d - axis - 1) / (d - axis); --c) {
      m[static_cast<std::size_t>(axis)] = c;
      rec(axis + 1, left - c, c);
    }
  };
  rec(0, M, M);
  return out;
}

struct PbarPoint {
  std::int64_t N = 0;
  double mean = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::uint64_t replicas = 0;
};

struct PbarCurve {
  std::vector<std::int64_t> n_grid;
  std::vector<std::vector<std::int64_t>> rhats;          // integer m vectors, |m|_1 = M
  std::vector<std::vector<PbarPoint>> per_rhat;          // [rhat][N]
  std::vector<PbarPoint> min_over_rhat;                  // per N
  int M = 0;
  double eta = 0.0;
};

// Empirical p(N): mean of the macroscopic edge indicator over a fixed edge
// census and fresh configurations, for every fundamental-domain direction.
inline PbarCurve estimate_pbar(double p, int d, const std::vector<std::int64_t>& n_grid, int M,
                               double eta, const NormBall& ball, std::uint64_t replicas,
                               std::uint64_t master_seed, std::int64_t macro_extent = 4,
                               int threads = 0,
                               AnchorRule rule = AnchorRule::giant_cluster) {
  if (n_grid.empty()) throw std::invalid_argument("estimate_pbar: empty N grid");
  if (replicas == 0) throw std::invalid_argument("estimate_pbar: zero replicas");
  PbarCurve curve;
  curve.n_grid = n_grid;
  curve.M = M;
  curve.eta = eta;
  curve.rhats = rhat_fundamental_domain(d, M);

  for (std::size_t ri = 0; ri < curve.rhats.size(); ++ri) {
    std::vector<PbarPoint> points;
    for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
      MacroParams params = make_macro_params(n_grid[ni], M, eta, curve.rhats[ri], ball, macro_extent, rule);
      // window sized from the corner images plus anchor and BFS reach
      std::int64_t margin = params.anchor_radius() + params.distance_cutoff() + 2;
      Site lo{}, hi{};
      for (int i = 0; i < d; ++i) {
        lo[i] = std::numeric_limits<std::int64_t>::max();
        hi[i] = std::numeric_limits<std::int64_t>::min();
      }
      Site corner{};
      std::function<void(int)> corners = [&](int axis) {
        if (axis == d) {
          Site micro = params.micro_position(corner);
          for (int i = 0; i < d; ++i) {
            lo[i] = std::min(lo[i], micro[i]);
            hi[i] = std::max(hi[i], micro[i]);
          }
          return;
        }
        for (std::int64_t c : {std::int64_t{0}, macro_extent - 1}) {
          corner[axis] = c;
          corners(axis + 1);
        }
      };
      corners(0);
      std::int64_t side = 0;
      for (int i = 0; i < d; ++i) side = std::max(side, hi[i] - lo[i] + 1 + 2 * margin);
      Site origin{};
      for (int i = 0; i < d; ++i) origin[i] = lo[i] - margin;
      BoxWindow w = make_window(d, side, origin);

      std::vector<double> means(replicas, 0.0);
      parallel_replicas(replicas, threads, [&](std::uint64_t rep) {
        std::uint64_t stream = (ri * n_grid.size() + ni) * replicas + rep;
        Configuration cfg = sample_configuration(w, p, derive_seed({master_seed, stream}));
        ClusterLabels labels = label_clusters(cfg);
        means[rep] = macro_edge_field(cfg, params, labels).mean();
      });
      MeanCI ci = mean_ci(means);
      points.push_back({n_grid[ni], ci.mean, ci.lo, ci.hi, replicas});
    }
    curve.per_rhat.push_back(std::move(points));
  }
  for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
    PbarPoint best = curve.per_rhat[0][ni];
    for (const auto& pts : curve.per_rhat)
      if (pts[ni].mean < best.mean) best = pts[ni];
    curve.min_over_rhat.push_back(best);
  }
  return curve;
}

}  // namespace percolab
