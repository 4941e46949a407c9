#pragma once

// Chemical distance machinery: BFS distance fields along open edges, wet
// regions, passage times to half-spaces and directional box-crossing times.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "percolab/lattice.hpp"

namespace percolab {

// reserved sentinel, never a real distance; serialized as "inf"
inline constexpr std::int32_t kUnreachable = std::numeric_limits<std::int32_t>::max();

struct DistanceField {
  std::uint32_t source = 0;
  std::vector<std::int32_t> dist;
  std::optional<std::int64_t> cutoff;
  bool boundary_contact = false;
  std::int32_t first_boundary_level = kUnreachable;
};

// Exact BFS distances along open edges from `source`; vertices beyond the
// cutoff stay unreachable. D(source, source) = 0 by the empty-path convention.
inline DistanceField distance_field(const Configuration& cfg, std::uint32_t source,
                                    std::optional<std::int64_t> cutoff = std::nullopt) {
  const BoxWindow& w = cfg.window;
  const std::uint32_t n = static_cast<std::uint32_t>(w.vertex_count());
  if (source >= n) throw std::invalid_argument("distance_field: source outside window");
  DistanceField f;
  f.source = source;
  f.cutoff = cutoff;
  f.dist.assign(n, kUnreachable);
  f.dist[source] = 0;
  if (w.on_boundary(source)) {
    f.boundary_contact = true;
    f.first_boundary_level = 0;
  }
  std::vector<std::uint32_t> frontier{source}, next;
  std::int32_t level = 0;
  std::uint32_t strides[kMaxDim];
  std::int64_t last = w.side - 1;
  for (int a = 0; a < w.d; ++a) strides[a] = static_cast<std::uint32_t>(w.stride(a));
  while (!frontier.empty()) {
    if (cutoff && level >= *cutoff) break;
    next.clear();
    for (std::uint32_t u : frontier) {
      for (int a = 0; a < w.d; ++a) {
        std::int64_t c = w.rel_coord(u, a);
        if (c < last && cfg.axis_open(a, u)) {
          std::uint32_t v = u + strides[a];
          if (f.dist[v] == kUnreachable) {
            f.dist[v] = level + 1;
            next.push_back(v);
            if (!f.boundary_contact && w.on_boundary(v)) {
              f.boundary_contact = true;
              f.first_boundary_level = level + 1;
            }
          }
        }
        if (c > 0 && cfg.axis_open(a, u - strides[a])) {
          std::uint32_t v = u - strides[a];
          if (f.dist[v] == kUnreachable) {
            f.dist[v] = level + 1;
            next.push_back(v);
            if (!f.boundary_contact && w.on_boundary(v)) {
              f.boundary_contact = true;
              f.first_boundary_level = level + 1;
            }
          }
        }
      }
    }
    frontier.swap(next);
    ++level;
  }
  return f;
}

struct PairDistance {
  std::int32_t value = kUnreachable;
  // true when the search touched the window boundary before finishing, i.e.
  // the in-window value may overestimate the unconstrained distance
  bool truncated = false;
};

// D(x, y): symmetric, zero on the diagonal; BFS with early exit.
inline PairDistance chemical_distance(const Configuration& cfg, std::uint32_t x, std::uint32_t y) {
  const BoxWindow& w = cfg.window;
  const std::uint32_t n = static_cast<std::uint32_t>(w.vertex_count());
  if (x >= n || y >= n) throw std::invalid_argument("chemical_distance: vertex outside window");
  if (x == y) return {0, false};
  std::vector<std::int32_t> dist(n, kUnreachable);
  dist[x] = 0;
  bool contact = w.on_boundary(x);
  std::int32_t contact_level = contact ? 0 : kUnreachable;
  std::vector<std::uint32_t> frontier{x}, next;
  std::int32_t level = 0;
  std::int64_t last = w.side - 1;
  while (!frontier.empty()) {
    next.clear();
    for (std::uint32_t u : frontier) {
      for (int a = 0; a < w.d; ++a) {
        std::uint32_t stride = static_cast<std::uint32_t>(w.stride(a));
        std::int64_t c = w.rel_coord(u, a);
        for (int s = 0; s < 2; ++s) {
          std::uint32_t v;
          if (s == 0) {
            if (c >= last || !cfg.axis_open(a, u)) continue;
            v = u + stride;
          } else {
            if (c <= 0 || !cfg.axis_open(a, u - stride)) continue;
            v = u - stride;
          }
          if (dist[v] != kUnreachable) continue;
          dist[v] = level + 1;
          if (v == y) return {level + 1, contact && contact_level < level + 1};
          next.push_back(v);
          if (!contact && w.on_boundary(v)) {
            contact = true;
            contact_level = level + 1;
          }
        }
      }
    }
    frontier.swap(next);
    ++level;
  }
  return {kUnreachable, contact};
}

// B_t: vertices with finite distance <= t.
inline std::vector<std::uint32_t> wet_region(const DistanceField& f, double t) {
  if (t < 0) throw std::invalid_argument("wet_region: negative t");
  if (f.cutoff && static_cast<double>(*f.cutoff) < t)
    throw std::invalid_argument("wet_region: field cutoff below t");
  std::int64_t tt = static_cast<std::int64_t>(std::floor(t));
  std::vector<std::uint32_t> out;
  for (std::uint32_t v = 0; v < f.dist.size(); ++v)
    if (f.dist[v] != kUnreachable && f.dist[v] <= tt) out.push_back(v);
  return out;
}

// Open half-space { z : <normal, z> > level } with a unit l2 normal.
struct HalfSpace {
  std::vector<double> normal;
  double level = 0.0;

  bool open_side(const Site& s) const {
    double v = 0.0;
    for (std::size_t i = 0; i < normal.size(); ++i) v += normal[i] * static_cast<double>(s[i]);
    return v > level;
  }
};

inline HalfSpace make_half_space(const std::vector<double>& direction, double r) {
  double nn = 0.0;
  for (double c : direction) nn += c * c;
  nn = std::sqrt(nn);
  if (nn == 0.0) throw std::invalid_argument("make_half_space: zero direction");
  HalfSpace hs;
  hs.normal.resize(direction.size());
  for (std::size_t i = 0; i < direction.size(); ++i) hs.normal[i] = direction[i] / nn;
  hs.level = 0.0;
  for (std::size_t i = 0; i < direction.size(); ++i)
    hs.level += hs.normal[i] * (r * direction[i] / nn);
  return hs;
}

struct PassageTime {
  std::int32_t value = kUnreachable;
  bool reached = false;
  // true when enlarging the window could produce a smaller value
  bool window_exhausted = false;
};

// First BFS level at which the open side of the half-space is reached. The
// search never leaves the window; exhaustion is reported, not hidden, since a
// clipped search can only overestimate the passage time.
inline PassageTime hyperplane_passage_time(const Configuration& cfg, std::uint32_t source,
                                           const HalfSpace& hs) {
  const BoxWindow& w = cfg.window;
  const std::uint32_t n = static_cast<std::uint32_t>(w.vertex_count());
  if (source >= n) throw std::invalid_argument("hyperplane_passage_time: source outside window");
  if (hs.open_side(w.vertex_site(source)))
    throw std::invalid_argument("hyperplane_passage_time: source already beyond the hyperplane");
  std::vector<bool> seen(n, false);
  seen[source] = true;
  bool contact = w.on_boundary(source);
  std::int32_t contact_level = contact ? 0 : kUnreachable;
  std::vector<std::uint32_t> frontier{source}, next;
  std::int32_t level = 0;
  std::int64_t last = w.side - 1;
  while (!frontier.empty()) {
    next.clear();
    for (std::uint32_t u : frontier) {
      for (int a = 0; a < w.d; ++a) {
        std::uint32_t stride = static_cast<std::uint32_t>(w.stride(a));
        std::int64_t c = w.rel_coord(u, a);
        for (int s = 0; s < 2; ++s) {
          std::uint32_t v;
          if (s == 0) {
            if (c >= last || !cfg.axis_open(a, u)) continue;
            v = u + stride;
          } else {
            if (c <= 0 || !cfg.axis_open(a, u - stride)) continue;
            v = u - stride;
          }
          if (seen[v]) continue;
          seen[v] = true;
          if (hs.open_side(w.vertex_site(v)))
            return {level + 1, true, contact && contact_level < level + 1};
          next.push_back(v);
          if (!contact && w.on_boundary(v)) {
            contact = true;
            contact_level = level + 1;
          }
        }
      }
    }
    frontier.swap(next);
    ++level;
  }
  return {kUnreachable, false, contact};
}

// Box adapted to a direction frame: T = { v : k_m <= <v,n_m>/<y_m,n_m> <
// k_m + alpha_m for all m }, with the two borders along axis m just outside
// the box. Membership snaps values within `tol` of a boundary onto it, so the
// half-open inequalities are evaluated deterministically under rounding.
struct BoxFrame {
  int d = 0;
  std::vector<std::vector<double>> y;  // adapted directions y_m
  std::vector<std::vector<double>> n;  // unit normals n_m
  std::vector<double> k;
  std::vector<double> alpha;
  double tol = 1e-9;

  double functional(const Site& v, int m) const {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < d; ++i) {
      num += n[m][static_cast<std::size_t>(i)] * static_cast<double>(v[i]);
      den += n[m][static_cast<std::size_t>(i)] * y[m][static_cast<std::size_t>(i)];
    }
    return num / den;
  }

  bool in_range(const Site& v, int m) const {
    double r = functional(v, m);
    return r >= k[static_cast<std::size_t>(m)] - tol &&
           r < k[static_cast<std::size_t>(m)] + alpha[static_cast<std::size_t>(m)] - tol;
  }
  bool below(const Site& v, int m) const { return functional(v, m) < k[static_cast<std::size_t>(m)] - tol; }
  bool above(const Site& v, int m) const {
    return functional(v, m) >= k[static_cast<std::size_t>(m)] + alpha[static_cast<std::size_t>(m)] - tol;
  }

  bool in_box(const Site& v) const {
    for (int m = 0; m < d; ++m)
      if (!in_range(v, m)) return false;
    return true;
  }
  // border membership also requires an l1-neighbor inside the box
  bool in_border(const Site& v, int m, bool plus, const BoxWindow& w) const {
    if (plus ? !above(v, m) : !below(v, m)) return false;
    for (int j = 0; j < d; ++j) {
      if (j == m) continue;
      if (!in_range(v, j)) return false;
    }
    for (int a = 0; a < d; ++a)
      for (int s = -1; s <= 1; s += 2) {
        Site t = v;
        t[a] += s;
        if (w.contains(t) && in_box(t)) return true;
      }
    return false;
  }
};

// Frame from raw directions/normals; throws when some <y_m, n_m> vanishes.
inline BoxFrame make_box_frame(const std::vector<std::vector<double>>& directions,
                               const std::vector<std::vector<double>>& normals,
                               const std::vector<double>& k, const std::vector<double>& alpha) {
  BoxFrame f;
  f.d = static_cast<int>(directions.size());
  if (normals.size() != directions.size() || k.size() != directions.size() ||
      alpha.size() != directions.size())
    throw std::invalid_argument("make_box_frame: size mismatch");
  for (double a : alpha)
    if (a <= 0) throw std::invalid_argument("make_box_frame: alpha must be positive");
  for (int m = 0; m < f.d; ++m) {
    double den = 0.0;
    for (int i = 0; i < f.d; ++i) den += normals[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)] * directions[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)];
    if (std::abs(den) < 1e-12) throw std::invalid_argument("make_box_frame: degenerate frame");
  }
  f.y = directions;
  f.n = normals;
  f.k = k;
  f.alpha = alpha;
  return f;
}

namespace detail {

// integer bounding box of the frame region (box plus both borders), clipped
// to the window; returns false when the region is clipped by the window
inline bool frame_bbox(const BoxFrame& f, const BoxWindow& w, Site& lo, Site& hi) {
  // invert the linear map v -> (functional_m(v)) at the 2^d corners
  const int d = f.d;
  std::vector<double> mat(static_cast<std::size_t>(d * d));
  for (int m = 0; m < d; ++m) {
    double den = 0.0;
    for (int i = 0; i < d; ++i) den += f.n[m][static_cast<std::size_t>(i)] * f.y[m][static_cast<std::size_t>(i)];
    for (int i = 0; i < d; ++i) mat[static_cast<std::size_t>(m * d + i)] = f.n[m][static_cast<std::size_t>(i)] / den;
  }
  // gaussian inverse
  std::vector<double> inv(static_cast<std::size_t>(d * d), 0.0);
  for (int i = 0; i < d; ++i) inv[static_cast<std::size_t>(i * d + i)] = 1.0;
  std::vector<double> a = mat;
  for (int col = 0; col < d; ++col) {
    int piv = col;
    for (int r = col + 1; r < d; ++r)
      if (std::abs(a[static_cast<std::size_t>(r * d + col)]) > std::abs(a[static_cast<std::size_t>(piv * d + col)])) piv = r;
    if (std::abs(a[static_cast<std::size_t>(piv * d + col)]) < 1e-14) return false;
    for (int c = 0; c < d; ++c) {
      std::swap(a[static_cast<std::size_t>(col * d + c)], a[static_cast<std::size_t>(piv * d + c)]);
      std::swap(inv[static_cast<std::size_t>(col * d + c)], inv[static_cast<std::size_t>(piv * d + c)]);
    }
    double pv = a[static_cast<std::size_t>(col * d + col)];
    for (int c = 0; c < d; ++c) {
      a[static_cast<std::size_t>(col * d + c)] /= pv;
      inv[static_cast<std::size_t>(col * d + c)] /= pv;
    }
    for (int r = 0; r < d; ++r) {
      if (r == col) continue;
      double fct = a[static_cast<std::size_t>(r * d + col)];
      for (int c = 0; c < d; ++c) {
        a[static_cast<std::size_t>(r * d + c)] -= fct * a[static_cast<std::size_t>(col * d + c)];
        inv[static_cast<std::size_t>(r * d + c)] -= fct * inv[static_cast<std::size_t>(col * d + c)];
      }
    }
  }
  for (int i = 0; i < d; ++i) {
    lo[i] = std::numeric_limits<std::int64_t>::max();
    hi[i] = std::numeric_limits<std::int64_t>::min();
  }
  for (int corner = 0; corner < (1 << d); ++corner) {
    std::vector<double> rho(static_cast<std::size_t>(d));
    for (int m = 0; m < d; ++m)
      rho[static_cast<std::size_t>(m)] =
          (corner >> m) & 1 ? f.k[static_cast<std::size_t>(m)] + f.alpha[static_cast<std::size_t>(m)] : f.k[static_cast<std::size_t>(m)];
    for (int i = 0; i < d; ++i) {
      double ci = 0.0;
      for (int m = 0; m < d; ++m) ci += inv[static_cast<std::size_t>(i * d + m)] * rho[static_cast<std::size_t>(m)];
      lo[i] = std::min<std::int64_t>(lo[i], static_cast<std::int64_t>(std::floor(ci)) - 2);
      hi[i] = std::max<std::int64_t>(hi[i], static_cast<std::int64_t>(std::ceil(ci)) + 2);
    }
  }
  for (int i = 0; i < d; ++i) {
    if (lo[i] < w.origin[i] || hi[i] > w.origin[i] + w.side - 1) return false;
  }
  return true;
}

}  // namespace detail

// Minimal length of an open path from the minus border to the plus border of
// the box in direction m, interior vertices inside the box. Multi-source BFS.
inline std::int32_t box_crossing_time(const Configuration& cfg, const BoxFrame& frame, int m) {
  const BoxWindow& w = cfg.window;
  if (m < 0 || m >= frame.d) throw std::invalid_argument("box_crossing_time: bad axis");
  Site lo{}, hi{};
  if (!detail::frame_bbox(frame, w, lo, hi))
    throw std::invalid_argument("box_crossing_time: box clipped by the window");

  // classify vertices in the bounding region
  enum : std::uint8_t { kOutside = 0, kBox = 1, kMinus = 2, kPlus = 3 };
  const int d = frame.d;
  std::vector<std::uint32_t> minus;
  std::vector<std::uint8_t> kind;
  std::vector<std::int64_t> dims(static_cast<std::size_t>(d));
  std::int64_t cells = 1;
  for (int i = 0; i < d; ++i) {
    dims[static_cast<std::size_t>(i)] = hi[i] - lo[i] + 1;
    cells *= dims[static_cast<std::size_t>(i)];
  }
  kind.assign(static_cast<std::size_t>(cells), kOutside);
  auto local = [&](const Site& s) {
    std::int64_t idx = 0;
    for (int i = d - 1; i >= 0; --i) idx = idx * dims[static_cast<std::size_t>(i)] + (s[i] - lo[i]);
    return idx;
  };
  Site cur{};
  std::function<void(int)> sweep = [&](int axis) {
    if (axis == d) {
      std::uint8_t kd = kOutside;
      if (frame.in_box(cur))
        kd = kBox;
      else if (frame.in_border(cur, m, false, w))
        kd = kMinus;
      else if (frame.in_border(cur, m, true, w))
        kd = kPlus;
      kind[static_cast<std::size_t>(local(cur))] = kd;
      if (kd == kMinus) minus.push_back(w.vertex_id(cur));
      return;
    }
    for (std::int64_t c = lo[axis]; c <= hi[axis]; ++c) {
      cur[axis] = c;
      sweep(axis + 1);
    }
  };
  sweep(0);
  if (minus.empty()) return kUnreachable;

  std::vector<std::int32_t> dist(w.vertex_count(), kUnreachable);
  std::vector<std::uint32_t> frontier, next;
  for (std::uint32_t v : minus) {
    dist[v] = 0;
    frontier.push_back(v);
  }
  std::int32_t level = 0;
  std::int64_t last = w.side - 1;
  while (!frontier.empty()) {
    next.clear();
    for (std::uint32_t u : frontier) {
      for (int a = 0; a < d; ++a) {
        std::uint32_t stride = static_cast<std::uint32_t>(w.stride(a));
        std::int64_t c = w.rel_coord(u, a);
        for (int s = 0; s < 2; ++s) {
          std::uint32_t v;
          if (s == 0) {
            if (c >= last || !cfg.axis_open(a, u)) continue;
            v = u + stride;
          } else {
            if (c <= 0 || !cfg.axis_open(a, u - stride)) continue;
            v = u - stride;
          }
          if (dist[v] != kUnreachable) continue;
          Site sv = w.vertex_site(v);
          bool inside_region = true;
          for (int i = 0; i < d; ++i)
            if (sv[i] < lo[i] || sv[i] > hi[i]) inside_region = false;
          std::uint8_t kd = inside_region ? kind[static_cast<std::size_t>(local(sv))] : kOutside;
          if (kd == kPlus) return level + 1;
          if (kd != kBox) continue;  // interior vertices must stay in the box
          dist[v] = level + 1;
          next.push_back(v);
        }
      }
    }
    frontier.swap(next);
    ++level;
  }
  return kUnreachable;
}

}  // namespace percolab
