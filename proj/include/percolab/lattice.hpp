#pragma once

// Finite windows of the hypercubic lattice, deterministic edge indexing and
// seeded Bernoulli sampling of bond configurations.

#include <array>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace percolab {

inline constexpr int kMaxDim = 8;

// Lattice point. Coordinates beyond the active dimension must stay zero so
// that lexicographic comparison of the raw arrays is meaningful.
using Site = std::array<std::int64_t, kMaxDim>;

inline Site make_site(std::initializer_list<std::int64_t> cs) {
  Site s{};
  int i = 0;
  for (auto c : cs) s[i++] = c;
  return s;
}

inline std::int64_t l1_norm(const Site& s, int d) {
  std::int64_t n = 0;
  for (int i = 0; i < d; ++i) n += s[i] < 0 ? -s[i] : s[i];
  return n;
}

inline std::int64_t l1_dist(const Site& a, const Site& b, int d) {
  std::int64_t n = 0;
  for (int i = 0; i < d; ++i) {
    std::int64_t t = a[i] - b[i];
    n += t < 0 ? -t : t;
  }
  return n;
}

// SplitMix64 finalizer; bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

// SplitMix64 stream step.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  return mix64(state);
}

struct SeedStream {
  std::uint64_t master_seed = 0;
  std::uint64_t replica_index = 0;
};

// Pure derivation; distinct replica indices give distinct seeds because the
// mixed inputs differ by an odd multiple and the finalizer is a bijection.
inline std::uint64_t derive_seed(SeedStream s) {
  return mix64(s.master_seed + (s.replica_index + 1) * 0x9E3779B97F4A7C15ull);
}

// Axis-aligned window [origin, origin + side)^d of Z^d.
//
// Vertex ids enumerate window-relative coordinates with coordinate 0 fastest.
// Edge ids are axis-major: axis a occupies the block
// [a * edges_per_axis(), (a+1) * edges_per_axis()), ordered by the lower
// endpoint in the same coordinate order (the axis coordinate runs over
// side-1 values).
struct BoxWindow {
  int d = 0;
  std::int64_t side = 0;
  Site origin{};

  std::uint64_t vertex_count() const {
    std::uint64_t n = 1;
    for (int i = 0; i < d; ++i) n *= static_cast<std::uint64_t>(side);
    return n;
  }
  std::uint64_t edges_per_axis() const {
    std::uint64_t n = static_cast<std::uint64_t>(side - 1);
    for (int i = 1; i < d; ++i) n *= static_cast<std::uint64_t>(side);
    return n;
  }
  std::uint64_t edge_count() const { return static_cast<std::uint64_t>(d) * edges_per_axis(); }

  std::uint64_t stride(int axis) const {
    std::uint64_t s = 1;
    for (int i = 0; i < axis; ++i) s *= static_cast<std::uint64_t>(side);
    return s;
  }

  bool contains(const Site& s) const {
    for (int i = 0; i < d; ++i) {
      std::int64_t c = s[i] - origin[i];
      if (c < 0 || c >= side) return false;
    }
    for (int i = d; i < kMaxDim; ++i)
      if (s[i] != 0) return false;
    return true;
  }

  std::uint32_t vertex_id(const Site& s) const {
    std::uint64_t v = 0;
    for (int i = d - 1; i >= 0; --i) v = v * static_cast<std::uint64_t>(side) + static_cast<std::uint64_t>(s[i] - origin[i]);
    return static_cast<std::uint32_t>(v);
  }

  Site vertex_site(std::uint32_t vid) const {
    Site s{};
    std::uint64_t v = vid;
    for (int i = 0; i < d; ++i) {
      s[i] = origin[i] + static_cast<std::int64_t>(v % static_cast<std::uint64_t>(side));
      v /= static_cast<std::uint64_t>(side);
    }
    return s;
  }

  // window-relative coordinate along one axis
  std::int64_t rel_coord(std::uint32_t vid, int axis) const {
    std::uint64_t v = vid;
    for (int i = 0; i < axis; ++i) v /= static_cast<std::uint64_t>(side);
    return static_cast<std::int64_t>(v % static_cast<std::uint64_t>(side));
  }

  bool on_boundary(std::uint32_t vid) const {
    std::uint64_t v = vid;
    for (int i = 0; i < d; ++i) {
      std::int64_t c = static_cast<std::int64_t>(v % static_cast<std::uint64_t>(side));
      if (c == 0 || c == side - 1) return true;
      v /= static_cast<std::uint64_t>(side);
    }
    return false;
  }

  // min distance from the vertex to any window face
  std::int64_t boundary_margin(const Site& s) const {
    std::int64_t m = std::numeric_limits<std::int64_t>::max();
    for (int i = 0; i < d; ++i) {
      std::int64_t c = s[i] - origin[i];
      m = std::min(m, std::min(c, side - 1 - c));
    }
    return m;
  }

  std::uint64_t edge_id(int axis, std::uint32_t from) const {
    // linear index of `from` in the grid whose axis extent is side-1
    std::uint64_t v = from, idx = 0, mult = 1;
    for (int i = 0; i < d; ++i) {
      std::uint64_t extent = static_cast<std::uint64_t>(i == axis ? side - 1 : side);
      idx += (v % static_cast<std::uint64_t>(side)) * mult;
      mult *= extent;
      v /= static_cast<std::uint64_t>(side);
    }
    return static_cast<std::uint64_t>(axis) * edges_per_axis() + idx;
  }

  struct EdgeEnds {
    std::uint32_t u = 0, v = 0;
    int axis = 0;
  };

  EdgeEnds edge_ends(std::uint64_t e) const {
    EdgeEnds r;
    r.axis = static_cast<int>(e / edges_per_axis());
    // decode reduced-grid coords of the lower endpoint, re-encode in the full grid
    std::uint64_t idx = e % edges_per_axis();
    std::uint64_t coords[kMaxDim];
    for (int i = 0; i < d; ++i) {
      std::uint64_t extent = static_cast<std::uint64_t>(i == r.axis ? side - 1 : side);
      coords[i] = idx % extent;
      idx /= extent;
    }
    std::uint64_t vid = 0;
    for (int i = d - 1; i >= 0; --i) vid = vid * static_cast<std::uint64_t>(side) + coords[i];
    r.u = static_cast<std::uint32_t>(vid);
    r.v = static_cast<std::uint32_t>(vid + stride(r.axis));
    return r;
  }
};

inline BoxWindow make_window(int d, std::int64_t side, const Site& origin = Site{}) {
  if (d < 2 || d > kMaxDim) throw std::invalid_argument("make_window: dimension must be in [2," + std::to_string(kMaxDim) + "]");
  if (side < 2) throw std::invalid_argument("make_window: side must be >= 2");
  long double vc = 1.0L;
  for (int i = 0; i < d; ++i) vc *= static_cast<long double>(side);
  if (vc >= 4294967296.0L) throw std::invalid_argument("make_window: vertex count overflows the 32-bit vertex index");
  BoxWindow w;
  w.d = d;
  w.side = side;
  w.origin = origin;
  return w;
}

// Immutable Bernoulli bond configuration over a window.
//
// Storage is one bit plane per axis indexed by the lower endpoint's vertex id
// (bits of vertices with no forward edge along the axis stay 0); the canonical
// axis-major edge order is used when drawing bits, so identical
// (window, p, seed) give identical states regardless of how they are read.
struct Configuration {
  BoxWindow window;
  double p = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::uint64_t>> plane;

  bool axis_open(int axis, std::uint32_t from) const {
    return (plane[static_cast<std::size_t>(axis)][from >> 6] >> (from & 63u)) & 1u;
  }

  bool edge_open(std::uint64_t e) const {
    auto ends = window.edge_ends(e);
    return axis_open(ends.axis, ends.u);
  }

  std::uint64_t open_count() const {
    std::uint64_t n = 0;
    for (const auto& pl : plane)
      for (std::uint64_t word : pl) n += static_cast<std::uint64_t>(__builtin_popcountll(word));
    return n;
  }

  Configuration with_edge(std::uint64_t e, bool open) const {
    Configuration c = *this;
    auto ends = window.edge_ends(e);
    auto& word = c.plane[static_cast<std::size_t>(ends.axis)][ends.u >> 6];
    if (open)
      word |= (1ull << (ends.u & 63u));
    else
      word &= ~(1ull << (ends.u & 63u));
    return c;
  }
};

inline Configuration sample_configuration(const BoxWindow& w, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("sample_configuration: p must lie in [0,1]");
  if (w.d < 2 || w.d > 3) throw std::invalid_argument("sample_configuration: sampling supports d in {2,3}");
  Configuration c;
  c.window = w;
  c.p = p;
  c.seed = seed;
  const std::uint64_t vcount = w.vertex_count();
  const std::uint64_t words = (vcount + 63) / 64;
  c.plane.assign(static_cast<std::size_t>(w.d), std::vector<std::uint64_t>(words, 0));

  std::uint64_t state = seed;
  if (p >= 1.0) {
    for (int a = 0; a < w.d; ++a)
      for (std::uint32_t v = 0; v < vcount; ++v)
        if (w.rel_coord(v, a) < w.side - 1)
          c.plane[static_cast<std::size_t>(a)][v >> 6] |= (1ull << (v & 63u));
    return c;
  }
  if (p <= 0.0) return c;

  const unsigned __int128 threshold =
      static_cast<unsigned __int128>(p * 18446744073709551616.0);
  for (int a = 0; a < w.d; ++a) {
    auto& pl = c.plane[static_cast<std::size_t>(a)];
    for (std::uint32_t v = 0; v < vcount; ++v) {
      if (w.rel_coord(v, a) >= w.side - 1) continue;
      std::uint64_t r = splitmix64(state);
      if (static_cast<unsigned __int128>(r) < threshold) pl[v >> 6] |= (1ull << (v & 63u));
    }
  }
  return c;
}

// documented literature constants, used for warnings and test-point choice only
inline constexpr double kPc2 = 0.5;
inline constexpr double kPc3 = 0.2488;
inline constexpr double kOrientedPc2 = 0.6447;

inline double critical_probability(int d) {
  if (d == 2) return kPc2;
  if (d == 3) return kPc3;
  return 0.0;
}

}  // namespace percolab
