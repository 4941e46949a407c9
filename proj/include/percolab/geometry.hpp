#pragma once

// Deterministic geometry: the lattice symmetry group, adapted bases that
// maximize an l1 co-norm, the empirical norm-ball polytope with its support
// normals and equivalence constants, and Hausdorff distances in the gauge of
// the ball.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "percolab/lattice.hpp"

namespace percolab {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}
inline double norm1(const Vec& a) {
  double s = 0.0;
  for (double c : a) s += std::abs(c);
  return s;
}
inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }
inline Vec sub(const Vec& a, const Vec& b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}
inline Vec scale(const Vec& a, double t) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * t;
  return r;
}

// Element of the grid symmetry group: x |-> sum_i sign[i] * x[perm[i]] e_i.
struct SignedPermutation {
  std::vector<int> perm;
  std::vector<int> sign;

  int dim() const { return static_cast<int>(perm.size()); }

  Vec apply(const Vec& x) const {
    Vec r(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) r[i] = sign[i] * x[static_cast<std::size_t>(perm[i])];
    return r;
  }
  std::vector<std::int64_t> apply_int(const std::vector<std::int64_t>& x) const {
    std::vector<std::int64_t> r(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) r[i] = sign[i] * x[static_cast<std::size_t>(perm[i])];
    return r;
  }
  // this after other
  SignedPermutation compose(const SignedPermutation& other) const {
    SignedPermutation r;
    r.perm.resize(perm.size());
    r.sign.resize(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) {
      r.perm[i] = other.perm[static_cast<std::size_t>(perm[i])];
      r.sign[i] = sign[i] * other.sign[static_cast<std::size_t>(perm[i])];
    }
    return r;
  }
  bool is_identity() const {
    for (std::size_t i = 0; i < perm.size(); ++i)
      if (perm[i] != static_cast<int>(i) || sign[i] != 1) return false;
    return true;
  }
};

// All 2^d d! elements; the identity comes first.
inline std::vector<SignedPermutation> signed_permutations(int d) {
  if (d < 1) throw std::invalid_argument("signed_permutations: d must be >= 1");
  std::vector<int> p(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) p[static_cast<std::size_t>(i)] = i;
  std::vector<SignedPermutation> out;
  do {
    for (int bits = 0; bits < (1 << d); ++bits) {
      SignedPermutation g;
      g.perm = p;
      g.sign.resize(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i) g.sign[static_cast<std::size_t>(i)] = (bits >> i) & 1 ? -1 : 1;
      out.push_back(std::move(g));
    }
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

namespace detail {

// Gauss-Jordan inverse; empty on (numerical) singularity.
inline std::vector<double> invert(const std::vector<double>& m, int n) {
  std::vector<double> a = m, inv(static_cast<std::size_t>(n * n), 0.0);
  double scale_max = 0.0;
  for (double v : m) scale_max = std::max(scale_max, std::abs(v));
  if (scale_max == 0.0) return {};
  for (int i = 0; i < n; ++i) inv[static_cast<std::size_t>(i * n + i)] = 1.0;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[static_cast<std::size_t>(r * n + col)]) > std::abs(a[static_cast<std::size_t>(piv * n + col)])) piv = r;
    if (std::abs(a[static_cast<std::size_t>(piv * n + col)]) < 1e-12 * scale_max) return {};
    for (int c = 0; c < n; ++c) {
      std::swap(a[static_cast<std::size_t>(col * n + c)], a[static_cast<std::size_t>(piv * n + c)]);
      std::swap(inv[static_cast<std::size_t>(col * n + c)], inv[static_cast<std::size_t>(piv * n + c)]);
    }
    double pv = a[static_cast<std::size_t>(col * n + col)];
    for (int c = 0; c < n; ++c) {
      a[static_cast<std::size_t>(col * n + c)] /= pv;
      inv[static_cast<std::size_t>(col * n + c)] /= pv;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = a[static_cast<std::size_t>(r * n + col)];
      if (f == 0.0) continue;
      for (int c = 0; c < n; ++c) {
        a[static_cast<std::size_t>(r * n + c)] -= f * a[static_cast<std::size_t>(col * n + c)];
        inv[static_cast<std::size_t>(r * n + c)] -= f * inv[static_cast<std::size_t>(col * n + c)];
      }
    }
  }
  return inv;
}

}  // namespace detail

// inf over the l1 unit sphere of ||A y||_1, i.e. 1 / ||A^{-1}||_{1->1};
// zero for singular A. Columns given as vectors.
inline double conorm_l1(const std::vector<Vec>& columns) {
  int n = static_cast<int>(columns.size());
  std::vector<double> m(static_cast<std::size_t>(n * n));
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) m[static_cast<std::size_t>(r * n + c)] = columns[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)];
  std::vector<double> inv = detail::invert(m, n);
  if (inv.empty()) return 0.0;
  double worst = 0.0;
  for (int c = 0; c < n; ++c) {
    double colsum = 0.0;
    for (int r = 0; r < n; ++r) colsum += std::abs(inv[static_cast<std::size_t>(r * n + c)]);
    worst = std::max(worst, colsum);
  }
  return worst == 0.0 ? 0.0 : 1.0 / worst;
}

// Basis of images of x under the symmetry group, chosen to maximize the l1
// co-norm of the map e_i |-> g_i(x); g_1 is the identity.
struct AdaptedBasis {
  Vec x;
  std::vector<SignedPermutation> g;
  std::vector<Vec> columns;  // L e_i = g_i(x)
  double conorm = 0.0;       // b(x)
  double ratio = 0.0;        // b(x) / ||x||_1

  Vec apply(const Vec& y) const {
    Vec r(x.size(), 0.0);
    for (std::size_t i = 0; i < columns.size(); ++i)
      for (std::size_t j = 0; j < r.size(); ++j) r[j] += columns[i][j] * y[i];
    return r;
  }
};

// Exhaustive maximization over (g_2, ..., g_d); first maximizer wins, which
// matches enumeration order over tuple indices. Tuples sharing the same
// column images are collapsed to their first occurrence.
inline AdaptedBasis adapted_basis(const Vec& x) {
  const int d = static_cast<int>(x.size());
  if (d < 2 || d > 4) throw std::invalid_argument("adapted_basis: d must be in [2,4]");
  if (norm1(x) == 0.0) throw std::invalid_argument("adapted_basis: zero vector");
  auto group = signed_permutations(d);
  // distinct images, keeping the first group element producing each
  std::vector<Vec> images;
  std::vector<int> image_owner;
  for (std::size_t gi = 0; gi < group.size(); ++gi) {
    Vec img = group[gi].apply(x);
    bool dup = false;
    for (const Vec& seen : images) {
      double diff = 0.0;
      for (int i = 0; i < d; ++i) diff += std::abs(seen[static_cast<std::size_t>(i)] - img[static_cast<std::size_t>(i)]);
      if (diff < 1e-12) {
        dup = true;
        break;
      }
    }
    if (!dup) {
      images.push_back(std::move(img));
      image_owner.push_back(static_cast<int>(gi));
    }
  }
  AdaptedBasis best;
  best.x = x;
  std::vector<Vec> cols(static_cast<std::size_t>(d));
  cols[0] = x;
  std::vector<int> pick(static_cast<std::size_t>(d - 1), 0);
  bool done = false;
  while (!done) {
    for (int i = 0; i < d - 1; ++i) cols[static_cast<std::size_t>(i + 1)] = images[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])];
    double c = conorm_l1(cols);
    if (c > best.conorm) {
      best.conorm = c;
      best.columns = cols;
      best.g.assign(1, group[0]);
      for (int i = 0; i < d - 1; ++i) best.g.push_back(group[static_cast<std::size_t>(image_owner[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])])]);
    }
    int pos = d - 2;
    while (pos >= 0) {
      if (++pick[static_cast<std::size_t>(pos)] < static_cast<int>(images.size())) break;
      pick[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) done = true;
  }
  if (best.conorm <= 0.0) throw std::runtime_error("adapted_basis: no invertible tuple found");
  best.ratio = best.conorm / norm1(x);
  return best;
}

namespace detail {

struct Facet {
  Vec normal;     // unit l2, outward
  double offset;  // support value <normal, x> on the facet, > 0
  std::vector<int> verts;
};

struct Hull {
  std::vector<Vec> vertices;
  std::vector<Facet> facets;
};

inline Hull convex_hull_2d(std::vector<Vec> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) {
    return a[0] != b[0] ? a[0] < b[0] : a[1] < b[1];
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec& a, const Vec& b) {
                          return std::abs(a[0] - b[0]) < 1e-12 && std::abs(a[1] - b[1]) < 1e-12;
                        }),
            pts.end());
  if (pts.size() < 3) throw std::invalid_argument("convex_hull_2d: degenerate point set");
  auto cross = [](const Vec& o, const Vec& a, const Vec& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  std::vector<Vec> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 1e-12) --k;
    h[k++] = pts[i];
  }
  std::size_t lower = k + 1;
  for (std::size_t i = pts.size() - 1; i-- > 0;) {
    while (k >= lower && cross(h[k - 2], h[k - 1], pts[i]) <= 1e-12) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);  // CCW
  if (h.size() < 3) throw std::invalid_argument("convex_hull_2d: flat point set");
  Hull hull;
  hull.vertices = h;
  for (std::size_t i = 0; i < h.size(); ++i) {
    std::size_t j = (i + 1) % h.size();
    Vec e{h[j][0] - h[i][0], h[j][1] - h[i][1]};
    Vec nrm{e[1], -e[0]};  // outward for CCW
    double len = norm2(nrm);
    nrm[0] /= len;
    nrm[1] /= len;
    Facet f;
    f.normal = nrm;
    f.offset = dot(nrm, h[i]);
    f.verts = {static_cast<int>(i), static_cast<int>(j)};
    hull.facets.push_back(std::move(f));
  }
  return hull;
}

inline Vec cross3(const Vec& a, const Vec& b) {
  return Vec{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

// Incremental hull; points within eps of the current hull are absorbed, so
// facet-interior samples do not become vertices.
inline Hull convex_hull_3d(std::vector<Vec> pts) {
  // dedupe
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec& a, const Vec& b) {
                          return std::abs(a[0] - b[0]) < 1e-12 && std::abs(a[1] - b[1]) < 1e-12 &&
                                 std::abs(a[2] - b[2]) < 1e-12;
                        }),
            pts.end());
  if (pts.size() < 4) throw std::invalid_argument("convex_hull_3d: degenerate point set");
  double span = 0.0;
  for (const Vec& p : pts) span = std::max({span, std::abs(p[0]), std::abs(p[1]), std::abs(p[2])});
  const double eps = 1e-9 * std::max(span, 1.0);

  // initial simplex: extreme pair, then max-area, then max-volume
  std::size_t i0 = 0, i1 = 1;
  double dmax = -1.0;
  for (int axis = 0; axis < 3; ++axis) {
    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (pts[i][static_cast<std::size_t>(axis)] < pts[lo][static_cast<std::size_t>(axis)]) lo = i;
      if (pts[i][static_cast<std::size_t>(axis)] > pts[hi][static_cast<std::size_t>(axis)]) hi = i;
    }
    double dd = norm2(sub(pts[hi], pts[lo]));
    if (dd > dmax) {
      dmax = dd;
      i0 = lo;
      i1 = hi;
    }
  }
  if (dmax < eps) throw std::invalid_argument("convex_hull_3d: all points coincide");
  std::size_t i2 = 0;
  double amax = -1.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double a = norm2(cross3(sub(pts[i1], pts[i0]), sub(pts[i], pts[i0])));
    if (a > amax) {
      amax = a;
      i2 = i;
    }
  }
  if (amax < eps * dmax) throw std::invalid_argument("convex_hull_3d: collinear point set");
  Vec plane_n = cross3(sub(pts[i1], pts[i0]), sub(pts[i2], pts[i0]));
  std::size_t i3 = 0;
  double vmax = -1.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double v = std::abs(dot(plane_n, sub(pts[i], pts[i0])));
    if (v > vmax) {
      vmax = v;
      i3 = i;
    }
  }
  if (vmax < eps * amax) throw std::invalid_argument("convex_hull_3d: coplanar point set");

  struct Face {
    int a, b, c;
    Vec n;
    double off;
    bool alive = true;
  };
  std::vector<Face> faces;
  Vec centroid(3, 0.0);
  for (std::size_t idx : {i0, i1, i2, i3})
    for (int k = 0; k < 3; ++k) centroid[static_cast<std::size_t>(k)] += pts[idx][static_cast<std::size_t>(k)] / 4.0;
  auto add_face = [&](int a, int b, int c) {
    Face f{a, b, c, {}, 0.0, true};
    f.n = cross3(sub(pts[static_cast<std::size_t>(b)], pts[static_cast<std::size_t>(a)]),
                 sub(pts[static_cast<std::size_t>(c)], pts[static_cast<std::size_t>(a)]));
    double len = norm2(f.n);
    for (int k = 0; k < 3; ++k) f.n[static_cast<std::size_t>(k)] /= len;
    f.off = dot(f.n, pts[static_cast<std::size_t>(a)]);
    if (dot(f.n, centroid) > f.off) {  // flip inward-facing
      std::swap(f.b, f.c);
      for (int k = 0; k < 3; ++k) f.n[static_cast<std::size_t>(k)] = -f.n[static_cast<std::size_t>(k)];
      f.off = -f.off;
    }
    faces.push_back(std::move(f));
  };
  add_face(static_cast<int>(i0), static_cast<int>(i1), static_cast<int>(i2));
  add_face(static_cast<int>(i0), static_cast<int>(i1), static_cast<int>(i3));
  add_face(static_cast<int>(i0), static_cast<int>(i2), static_cast<int>(i3));
  add_face(static_cast<int>(i1), static_cast<int>(i2), static_cast<int>(i3));

  for (std::size_t pi = 0; pi < pts.size(); ++pi) {
    if (pi == i0 || pi == i1 || pi == i2 || pi == i3) continue;
    const Vec& p = pts[pi];
    std::vector<std::size_t> visible;
    for (std::size_t fi = 0; fi < faces.size(); ++fi)
      if (faces[fi].alive && dot(faces[fi].n, p) > faces[fi].off + eps) visible.push_back(fi);
    if (visible.empty()) continue;
    // horizon: directed edges of visible faces whose reverse edge is absent
    std::map<std::pair<int, int>, int> edge_count;
    for (std::size_t fi : visible) {
      const Face& f = faces[fi];
      int vs[3] = {f.a, f.b, f.c};
      for (int k = 0; k < 3; ++k) {
        int u = vs[k], v = vs[(k + 1) % 3];
        ++edge_count[{u, v}];
      }
    }
    std::vector<std::pair<int, int>> horizon;
    for (const auto& [e, c] : edge_count) {
      (void)c;
      if (!edge_count.count({e.second, e.first})) horizon.push_back(e);
    }
    for (std::size_t fi : visible) faces[fi].alive = false;
    for (const auto& [u, v] : horizon) {
      Face f{u, v, static_cast<int>(pi), {}, 0.0, true};
      f.n = cross3(sub(pts[static_cast<std::size_t>(v)], pts[static_cast<std::size_t>(u)]),
                   sub(p, pts[static_cast<std::size_t>(u)]));
      double len = norm2(f.n);
      if (len < eps * eps) continue;  // degenerate sliver
      for (int k = 0; k < 3; ++k) f.n[static_cast<std::size_t>(k)] /= len;
      f.off = dot(f.n, pts[static_cast<std::size_t>(u)]);
      if (dot(f.n, centroid) > f.off) {
        std::swap(f.b, f.c);
        for (int k = 0; k < 3; ++k) f.n[static_cast<std::size_t>(k)] = -f.n[static_cast<std::size_t>(k)];
        f.off = -f.off;
      }
      faces.push_back(std::move(f));
    }
  }

  Hull hull;
  std::map<int, int> remap;
  for (const Face& f : faces) {
    if (!f.alive) continue;
    for (int v : {f.a, f.b, f.c})
      if (!remap.count(v)) {
        remap[v] = static_cast<int>(hull.vertices.size());
        hull.vertices.push_back(pts[static_cast<std::size_t>(v)]);
      }
    Facet facet;
    facet.normal = f.n;
    facet.offset = f.off;
    facet.verts = {remap[f.a], remap[f.b], remap[f.c]};
    hull.facets.push_back(std::move(facet));
  }
  return hull;
}

inline double dist_point_segment(const Vec& p, const Vec& a, const Vec& b) {
  Vec ab = sub(b, a), ap = sub(p, a);
  double t = dot(ab, ab) > 0 ? dot(ap, ab) / dot(ab, ab) : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  Vec q(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) q[i] = a[i] + t * ab[i];
  return norm2(sub(p, q));
}

inline double dist_origin_facet(const Hull& hull, const Facet& f) {
  if (f.verts.size() == 2) {
    return dist_point_segment(Vec(2, 0.0), hull.vertices[static_cast<std::size_t>(f.verts[0])],
                              hull.vertices[static_cast<std::size_t>(f.verts[1])]);
  }
  // triangle in 3d: projection of the origin onto the plane, then edges
  const Vec& a = hull.vertices[static_cast<std::size_t>(f.verts[0])];
  const Vec& b = hull.vertices[static_cast<std::size_t>(f.verts[1])];
  const Vec& c = hull.vertices[static_cast<std::size_t>(f.verts[2])];
  Vec q = scale(f.normal, f.offset);
  // barycentric inside test
  Vec v0 = sub(b, a), v1 = sub(c, a), v2 = sub(q, a);
  double d00 = dot(v0, v0), d01 = dot(v0, v1), d11 = dot(v1, v1), d20 = dot(v2, v0), d21 = dot(v2, v1);
  double denom = d00 * d11 - d01 * d01;
  if (denom > 0) {
    double v = (d11 * d20 - d01 * d21) / denom;
    double w = (d00 * d21 - d01 * d20) / denom;
    if (v >= -1e-12 && w >= -1e-12 && v + w <= 1.0 + 1e-12) return std::abs(f.offset);
  }
  Vec origin(3, 0.0);
  return std::min({dist_point_segment(origin, a, b), dist_point_segment(origin, b, c),
                   dist_point_segment(origin, c, a)});
}

}  // namespace detail

struct DirectionEstimate {
  std::vector<std::int64_t> u;
  double mu = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

// Polytope approximation of the unit ball of the estimated norm: the convex
// hull of the points g(u)/mu(u) over the sampled directions u and the full
// symmetry group. Gauge evaluation is a max over facets.
struct NormBall {
  int d = 0;
  std::vector<DirectionEstimate> samples;
  std::vector<Vec> vertices;
  std::vector<detail::Facet> facets;
  double K1 = 0.0;      // best K1 ||x||_2 <= gauge(x)
  double K2 = 0.0;      // best gauge(x) <= K2 ||x||_2
  double mu_inf = 0.0;  // min of the gauge over the l1 sphere
  double mu_e1 = 0.0;

  double gauge(const Vec& x) const {
    double g = 0.0;
    for (const auto& f : facets) g = std::max(g, dot(f.normal, x) / f.offset);
    return g;
  }
  double gauge_dir(const std::vector<std::int64_t>& u) const {
    Vec x(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) x[i] = static_cast<double>(u[i]);
    return gauge(x);
  }

  static NormBall from_direction_values(int d, std::vector<DirectionEstimate> samples);
};

inline NormBall NormBall::from_direction_values(int d, std::vector<DirectionEstimate> samples) {
  if (d < 2 || d > 3) throw std::invalid_argument("NormBall: polytope construction supports d in {2,3}");
  if (samples.size() < static_cast<std::size_t>(d) + 1)
    throw std::invalid_argument("NormBall: need at least d+1 direction samples");
  NormBall ball;
  ball.d = d;
  ball.samples = std::move(samples);
  auto group = signed_permutations(d);
  std::vector<Vec> pts;
  for (const auto& s : ball.samples) {
    if (s.mu <= 0.0) throw std::invalid_argument("NormBall: nonpositive direction value");
    for (const auto& g : group) {
      auto img = g.apply_int(s.u);
      Vec p(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i) p[static_cast<std::size_t>(i)] = static_cast<double>(img[static_cast<std::size_t>(i)]) / s.mu;
      pts.push_back(std::move(p));
    }
  }
  detail::Hull hull = d == 2 ? detail::convex_hull_2d(std::move(pts)) : detail::convex_hull_3d(std::move(pts));
  ball.vertices = std::move(hull.vertices);
  ball.facets = std::move(hull.facets);
  for (const auto& f : ball.facets)
    if (f.offset <= 1e-12) throw std::invalid_argument("NormBall: origin not interior to the polytope");

  double vmax2 = 0.0, vmax1 = 0.0;
  for (const Vec& v : ball.vertices) {
    vmax2 = std::max(vmax2, norm2(v));
    vmax1 = std::max(vmax1, norm1(v));
  }
  ball.K1 = 1.0 / vmax2;
  ball.mu_inf = 1.0 / vmax1;
  detail::Hull hv;
  hv.vertices = ball.vertices;
  double mind = std::numeric_limits<double>::infinity();
  for (const auto& f : ball.facets) mind = std::min(mind, detail::dist_origin_facet(hv, f));
  ball.K2 = 1.0 / mind;
  Vec e1(static_cast<std::size_t>(d), 0.0);
  e1[0] = 1.0;
  ball.mu_e1 = ball.gauge(e1);
  return ball;
}

struct SupportData {
  Vec y;
  Vec normal;   // unit l2 outward normal of a supporting hyperplane
  Vec contact;  // boundary point of the polytope in direction y
  double c_d = 0.0;
  double c_prime_d = 0.0;
};

struct BallConstants {
  double K1 = 0.0, K2 = 0.0;
  double c_d = 0.0;        // K1 / K2
  double c_prime_d = 0.0;  // l1 variant; the norm-equivalence argument gives the same value
  double mu_inf = 0.0;
  double mu_e1 = 0.0;
};

inline BallConstants ball_constants(const NormBall& ball) {
  if (ball.facets.empty()) throw std::invalid_argument("ball_constants: degenerate polytope");
  BallConstants c;
  c.K1 = ball.K1;
  c.K2 = ball.K2;
  c.c_d = ball.K1 / ball.K2;
  c.c_prime_d = c.c_d;
  c.mu_inf = ball.mu_inf;
  c.mu_e1 = ball.mu_e1;
  return c;
}

// Outward normal of a supporting hyperplane at the boundary point in
// direction y. On lower-dimensional contact the normal maximizing the angle
// with y wins; y/|y| itself is admitted as a candidate whenever it separates,
// which reproduces the sphere normal on vertex contact. Remaining ties break
// lexicographically.
inline SupportData support_normal(const NormBall& ball, const Vec& y) {
  if (ball.facets.empty()) throw std::invalid_argument("support_normal: degenerate polytope");
  double ny = norm2(y);
  if (ny == 0.0) throw std::invalid_argument("support_normal: zero direction");
  double g = ball.gauge(y);
  if (g <= 0.0) throw std::invalid_argument("support_normal: direction sees no facet");
  SupportData out;
  out.y = y;
  out.contact = scale(y, 1.0 / g);
  Vec yhat = scale(y, 1.0 / ny);

  std::vector<Vec> candidates;
  for (const auto& f : ball.facets)
    if (dot(f.normal, y) / f.offset >= g * (1.0 - 1e-9)) candidates.push_back(f.normal);
  double sep = dot(yhat, out.contact);
  bool yhat_valid = true;
  for (const Vec& v : ball.vertices)
    if (dot(yhat, v) > sep + 1e-9) {
      yhat_valid = false;
      break;
    }
  if (yhat_valid) candidates.push_back(yhat);

  const Vec* best = &candidates.front();
  double best_score = dot(*best, yhat);
  for (const Vec& c : candidates) {
    double s = dot(c, yhat);
    if (s > best_score + 1e-12) {
      best = &c;
      best_score = s;
    } else if (std::abs(s - best_score) <= 1e-12 && c < *best) {
      best = &c;
    }
  }
  out.normal = *best;
  BallConstants bc = ball_constants(ball);
  out.c_d = bc.c_d;
  out.c_prime_d = bc.c_prime_d;
  return out;
}

namespace detail {

// gauge distance from a point to a convex polytope; zero inside. When the
// polytope is the gauge's own unit ball this is gauge(x) - 1; otherwise the
// minimum is taken over the boundary facets by nested ternary search (the
// objective is convex in the facet parameters).
inline double dist_point_polytope(const Vec& x, const NormBall& body, const NormBall& gauge) {
  double gb = body.gauge(x);
  if (gb <= 1.0 + 1e-12) return 0.0;
  if (&body == &gauge) return gb - 1.0;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& f : body.facets) {
    if (f.verts.size() == 2) {
      const Vec& a = body.vertices[static_cast<std::size_t>(f.verts[0])];
      const Vec& b = body.vertices[static_cast<std::size_t>(f.verts[1])];
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 60; ++it) {
        double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        auto val = [&](double t) {
          Vec q(a.size());
          for (std::size_t i = 0; i < a.size(); ++i) q[i] = a[i] + t * (b[i] - a[i]);
          return gauge.gauge(sub(x, q));
        };
        if (val(m1) < val(m2))
          hi = m2;
        else
          lo = m1;
      }
      Vec q(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) q[i] = a[i] + 0.5 * (lo + hi) * (b[i] - a[i]);
      best = std::min(best, gauge.gauge(sub(x, q)));
    } else {
      const Vec& a = body.vertices[static_cast<std::size_t>(f.verts[0])];
      const Vec& b = body.vertices[static_cast<std::size_t>(f.verts[1])];
      const Vec& c = body.vertices[static_cast<std::size_t>(f.verts[2])];
      auto val = [&](double s, double t) {
        Vec q(a.size());
        for (std::size_t i = 0; i < a.size(); ++i)
          q[i] = a[i] + s * (b[i] - a[i]) + t * (c[i] - a[i]);
        return gauge.gauge(sub(x, q));
      };
      double lo = 0.0, hi = 1.0;
      for (int it = 0; it < 40; ++it) {
        double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        auto inner = [&](double s) {
          double l2 = 0.0, h2 = 1.0 - s;
          for (int jt = 0; jt < 40; ++jt) {
            double n1 = l2 + (h2 - l2) / 3.0, n2 = h2 - (h2 - l2) / 3.0;
            if (val(s, n1) < val(s, n2))
              h2 = n2;
            else
              l2 = n1;
          }
          return val(s, 0.5 * (l2 + h2));
        };
        if (inner(m1) < inner(m2))
          hi = m2;
        else
          lo = m1;
      }
      double s = 0.5 * (lo + hi);
      double l2 = 0.0, h2 = 1.0 - s;
      for (int jt = 0; jt < 60; ++jt) {
        double n1 = l2 + (h2 - l2) / 3.0, n2 = h2 - (h2 - l2) / 3.0;
        if (val(s, n1) < val(s, n2))
          h2 = n2;
        else
          l2 = n1;
      }
      best = std::min(best, val(s, 0.5 * (l2 + h2)));
    }
  }
  return best;
}

// uniform-bucket nearest neighbor under the gauge metric
struct GaugeNN {
  const std::vector<Vec>* pts = nullptr;
  const NormBall* gauge = nullptr;
  double h = 1.0;
  int d = 2;
  std::vector<double> lo;
  std::vector<std::int64_t> dims;
  std::vector<std::vector<int>> buckets;

  void build(const std::vector<Vec>& points, const NormBall& g, double bucket) {
    pts = &points;
    gauge = &g;
    d = g.d;
    h = bucket;
    lo.assign(static_cast<std::size_t>(d), std::numeric_limits<double>::infinity());
    std::vector<double> hi(static_cast<std::size_t>(d), -std::numeric_limits<double>::infinity());
    for (const Vec& p : points)
      for (int i = 0; i < d; ++i) {
        lo[static_cast<std::size_t>(i)] = std::min(lo[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(i)]);
        hi[static_cast<std::size_t>(i)] = std::max(hi[static_cast<std::size_t>(i)], p[static_cast<std::size_t>(i)]);
      }
    dims.assign(static_cast<std::size_t>(d), 1);
    std::int64_t cells = 1;
    for (int i = 0; i < d; ++i) {
      dims[static_cast<std::size_t>(i)] = std::max<std::int64_t>(1, static_cast<std::int64_t>((hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)]) / h) + 1);
      cells *= dims[static_cast<std::size_t>(i)];
    }
    buckets.assign(static_cast<std::size_t>(cells), {});
    for (std::size_t pi = 0; pi < points.size(); ++pi)
      buckets[static_cast<std::size_t>(cell_of(points[pi]))].push_back(static_cast<int>(pi));
  }

  std::int64_t cell_of(const Vec& p) const {
    std::int64_t idx = 0;
    for (int i = d - 1; i >= 0; --i) {
      std::int64_t c = static_cast<std::int64_t>((p[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)]) / h);
      c = std::clamp<std::int64_t>(c, 0, dims[static_cast<std::size_t>(i)] - 1);
      idx = idx * dims[static_cast<std::size_t>(i)] + c;
    }
    return idx;
  }

  double query(const Vec& q) const {
    std::vector<std::int64_t> qc(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i)
      qc[static_cast<std::size_t>(i)] = std::clamp<std::int64_t>(
          static_cast<std::int64_t>((q[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)]) / h), 0,
          dims[static_cast<std::size_t>(i)] - 1);
    double best = std::numeric_limits<double>::infinity();
    std::int64_t max_ring = 0;
    for (int i = 0; i < d; ++i) max_ring = std::max(max_ring, dims[static_cast<std::size_t>(i)]);
    for (std::int64_t ring = 0; ring <= max_ring; ++ring) {
      if (best < std::numeric_limits<double>::infinity() &&
          gauge->K1 * static_cast<double>(ring - 1) * h > best)
        break;
      // visit cells at Chebyshev distance `ring`
      std::function<void(int, std::vector<std::int64_t>&, bool)> rec = [&](int axis, std::vector<std::int64_t>& c, bool extreme) {
        if (axis == d) {
          if (!extreme) return;
          std::int64_t idx = 0;
          for (int i = d - 1; i >= 0; --i) {
            if (c[static_cast<std::size_t>(i)] < 0 || c[static_cast<std::size_t>(i)] >= dims[static_cast<std::size_t>(i)]) return;
            idx = idx * dims[static_cast<std::size_t>(i)] + c[static_cast<std::size_t>(i)];
          }
          for (int pi : buckets[static_cast<std::size_t>(idx)])
            best = std::min(best, gauge->gauge(sub(q, (*pts)[static_cast<std::size_t>(pi)])));
          return;
        }
        for (std::int64_t o = -ring; o <= ring; ++o) {
          c[static_cast<std::size_t>(axis)] = qc[static_cast<std::size_t>(axis)] + o;
          rec(axis + 1, c, extreme || o == -ring || o == ring);
        }
      };
      std::vector<std::int64_t> c(static_cast<std::size_t>(d));
      if (ring == 0) {
        c = qc;
        std::int64_t idx = 0;
        bool ok = true;
        for (int i = d - 1; i >= 0; --i) {
          if (c[static_cast<std::size_t>(i)] < 0 || c[static_cast<std::size_t>(i)] >= dims[static_cast<std::size_t>(i)]) ok = false;
          idx = idx * dims[static_cast<std::size_t>(i)] + std::clamp<std::int64_t>(c[static_cast<std::size_t>(i)], 0, dims[static_cast<std::size_t>(i)] - 1);
        }
        if (ok)
          for (int pi : buckets[static_cast<std::size_t>(idx)])
            best = std::min(best, gauge->gauge(sub(q, (*pts)[static_cast<std::size_t>(pi)])));
      } else {
        rec(0, c, false);
      }
    }
    return best;
  }
};

}  // namespace detail

// Hausdorff distance between a finite point set A and a convex polytope B,
// both measured in the gauge of `gauge`. When cell_scale > 0 each point of A
// stands for its closed axis cell of that size, which bounds the
// discretization error of lattice sets by the cell diameter.
inline double hausdorff_distance(const std::vector<Vec>& A, const NormBall& B,
                                 const NormBall& gauge, double cell_scale = 0.0,
                                 double grid_step = 0.0) {
  if (A.empty()) throw std::invalid_argument("hausdorff_distance: empty point set");
  const int d = gauge.d;

  std::vector<Vec> corners;
  if (cell_scale > 0.0) {
    for (int mask = 0; mask < (1 << d); ++mask) {
      Vec c(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i) c[static_cast<std::size_t>(i)] = ((mask >> i) & 1 ? 0.5 : -0.5) * cell_scale;
      corners.push_back(std::move(c));
    }
  } else {
    corners.push_back(Vec(static_cast<std::size_t>(d), 0.0));
  }
  double cell_rad = 0.0;
  for (const Vec& c : corners) cell_rad = std::max(cell_rad, gauge.gauge(c));

  // directed A -> B over inflated cells (max of a convex function on a cell
  // is at a corner)
  double dAB = 0.0;
  for (const Vec& a : A)
    for (const Vec& c : corners) {
      Vec p(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i) p[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)] + c[static_cast<std::size_t>(i)];
      dAB = std::max(dAB, detail::dist_point_polytope(p, B, gauge));
    }

  // directed B -> A over the polytope vertices and a grid inside it
  double span = 0.0;
  Vec blo(static_cast<std::size_t>(d), std::numeric_limits<double>::infinity());
  Vec bhi(static_cast<std::size_t>(d), -std::numeric_limits<double>::infinity());
  for (const Vec& v : B.vertices)
    for (int i = 0; i < d; ++i) {
      blo[static_cast<std::size_t>(i)] = std::min(blo[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(i)]);
      bhi[static_cast<std::size_t>(i)] = std::max(bhi[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(i)]);
      span = std::max(span, bhi[static_cast<std::size_t>(i)] - blo[static_cast<std::size_t>(i)]);
    }
  if (grid_step <= 0.0) grid_step = std::max(span / 128.0, cell_scale > 0.0 ? cell_scale / 2.0 : span / 128.0);

  detail::GaugeNN nn;
  nn.build(A, gauge, std::max(grid_step, span / 256.0));

  double dBA = 0.0;
  for (const Vec& v : B.vertices) dBA = std::max(dBA, std::max(0.0, nn.query(v) - cell_rad));
  std::vector<double> coord(static_cast<std::size_t>(d));
  std::function<void(int)> scan = [&](int axis) {
    if (axis == d) {
      Vec q(coord);
      if (B.gauge(q) <= 1.0 + 1e-12) dBA = std::max(dBA, std::max(0.0, nn.query(q) - cell_rad));
      return;
    }
    for (double c = blo[static_cast<std::size_t>(axis)]; c <= bhi[static_cast<std::size_t>(axis)] + 1e-12; c += grid_step) {
      coord[static_cast<std::size_t>(axis)] = c;
      scan(axis + 1);
    }
  };
  scan(0);
  return std::max(dAB, dBA);
}

}  // namespace percolab
