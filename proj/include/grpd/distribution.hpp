#pragma once

// Distributions on grid models: a sampled smooth density plus singular layers.
//
// Conventions (PAIR_CIRCLE, grid k/n on both factors):
//   smooth density K:  <u, f> = (1/n^2) sum_{x,y} K(x,y) f(x,y)
//   layer (theta, c, k): <u, f> = (1/n) sum_x c(x) ((-D_y)^k f)(x, x - theta)
// so a layer acts on the right factor like the density
//   n c(x) sum_m w_m delta_{y, x - theta + m}
// with w the stencil of (-D)^k. CIRCLE_GROUP point masses follow the same
// pattern with <u, f> = c ((-D)^k f)(a). PAIR_TIMES_Z carries smooth parts only.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <complex>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "grpd/errors.hpp"
#include "grpd/fft.hpp"
#include "grpd/groupoid.hpp"
#include "grpd/stencil.hpp"

namespace grpd {

using cd = std::complex<double>;

struct Layer {
  long long section = 0;    // theta index (PAIR_CIRCLE) or point index a (CIRCLE_GROUP)
  std::vector<cd> coeffs;   // length n (PAIR_CIRCLE) or 1 (CIRCLE_GROUP)
  int order = 0;

  friend bool operator==(const Layer&, const Layer&) = default;
};

struct Distribution {
  GroupoidModel model;
  std::vector<cd> smooth;  // empty means zero
  std::vector<Layer> layers;
  std::string label;
  // Transversality to r (resp. s) known by construction.
  bool r_transversal = true;
  bool s_transversal = true;

  bool has_smooth() const { return !smooth.empty(); }
};

inline bool same_content(const Distribution& a, const Distribution& b) {
  return a.model == b.model && a.smooth == b.smooth && a.layers == b.layers;
}

struct TestFunction {
  GroupoidModel model;
  std::vector<cd> values;
};

struct PointMass {
  long long position = 0;
  cd weight{0.0, 0.0};
  int order = 0;
};

/// The member u_x of the family attached to a transversal distribution.
struct FiberDistribution {
  GroupoidModel model;
  Unit base;
  std::vector<cd> density;  // on the fiber grid, weight 1/n
  std::vector<PointMass> masses;
};

enum class Anchor { kAlongS, kAlongR };

// ---------------------------------------------------------------------------
// Grid geometry

inline std::vector<int> grid_dims(const GroupoidModel& m) {
  switch (m.kind) {
    case ModelKind::kPairCircle: return {m.n, m.n};
    case ModelKind::kCircleGroup: return {m.n};
    case ModelKind::kPairTimesZ: return {m.n, m.n, m.m_z};
    case ModelKind::kAffineGroup: break;
  }
  throw UnsupportedError("the affine group carries no grid");
}

inline std::size_t grid_size(const GroupoidModel& m) {
  std::size_t s = 1;
  for (int d : grid_dims(m)) s *= static_cast<std::size_t>(d);
  return s;
}

/// Quadrature weight of one grid cell of G.
inline double cell_weight(const GroupoidModel& m) { return 1.0 / static_cast<double>(grid_size(m)); }

inline std::size_t unit_grid_size(const GroupoidModel& m) {
  switch (m.kind) {
    case ModelKind::kPairCircle: return static_cast<std::size_t>(m.n);
    case ModelKind::kCircleGroup: return 1;
    case ModelKind::kPairTimesZ: return static_cast<std::size_t>(m.n) * m.m_z;
    case ModelKind::kAffineGroup: break;
  }
  throw UnsupportedError("the affine group carries no grid");
}

inline std::size_t pidx(int n, long long x, long long y) {
  return static_cast<std::size_t>(wrap_index(x, n)) * n + wrap_index(y, n);
}

inline std::size_t zidx(const GroupoidModel& m, long long x, long long y, long long z) {
  return (static_cast<std::size_t>(wrap_index(x, m.n)) * m.n + wrap_index(y, m.n)) * m.m_z + wrap_index(z, m.m_z);
}

inline void check_grid(const GroupoidModel& m, const std::vector<cd>& v, const char* what) {
  if (v.size() != grid_size(m)) throw DomainError(std::string(what) + ": grid shape does not match the model");
}

inline TestFunction make_test_function(const GroupoidModel& m, std::vector<cd> values) {
  check_grid(m, values, "test function");
  return TestFunction{m, std::move(values)};
}

/// Samples f on the grid of G.
template <class F>
TestFunction sample_test_function(const GroupoidModel& m, F f) {
  std::vector<cd> v(grid_size(m));
  switch (m.kind) {
    case ModelKind::kPairCircle:
      for (int x = 0; x < m.n; ++x)
        for (int y = 0; y < m.n; ++y) v[pidx(m.n, x, y)] = f(std::vector<double>{circle_coord(x, m.n), circle_coord(y, m.n)});
      break;
    case ModelKind::kCircleGroup:
      for (int x = 0; x < m.n; ++x) v[x] = f(std::vector<double>{circle_coord(x, m.n)});
      break;
    case ModelKind::kPairTimesZ:
      for (int x = 0; x < m.n; ++x)
        for (int y = 0; y < m.n; ++y)
          for (int z = 0; z < m.m_z; ++z)
            v[zidx(m, x, y, z)] =
                f(std::vector<double>{circle_coord(x, m.n), circle_coord(y, m.n), circle_coord(z, m.m_z)});
      break;
    case ModelKind::kAffineGroup: throw UnsupportedError("the affine group carries no grid");
  }
  return TestFunction{m, std::move(v)};
}

// ---------------------------------------------------------------------------
// Constructors

inline Distribution zero_distribution(const GroupoidModel& m) { return Distribution{m, {}, {}, "zero"}; }

inline Distribution make_smooth(const GroupoidModel& m, std::vector<cd> values, std::string label = "smooth") {
  grid_dims(m);
  check_grid(m, values, "smooth part");
  return Distribution{m, std::move(values), {}, std::move(label)};
}

inline Distribution make_layer(const GroupoidModel& m, long long section, std::vector<cd> coeffs, int fiber_order,
                               std::string label = "layer") {
  if (fiber_order < 0 || fiber_order > kMaxFiberOrder)
    throw OrderCapError("fiber order " + std::to_string(fiber_order) + " exceeds the cap " + std::to_string(kMaxFiberOrder));
  switch (m.kind) {
    case ModelKind::kPairCircle:
      if (coeffs.size() == 1) coeffs.assign(m.n, coeffs[0]);
      if (coeffs.size() != static_cast<std::size_t>(m.n)) throw DomainError("layer coeffs must have length n");
      break;
    case ModelKind::kCircleGroup:
      if (coeffs.size() != 1) throw DomainError("a point-mass layer has a single coefficient");
      break;
    default: throw UnsupportedError("layers are available on PAIR_CIRCLE and CIRCLE_GROUP");
  }
  Distribution u{m, {}, {}, std::move(label)};
  u.layers.push_back(Layer{static_cast<long long>(wrap_index(section, m.n)), std::move(coeffs), fiber_order});
  return u;
}

/// Graph of the rotation x -> x - theta, theta = theta_index / n.
inline Distribution rotation_layer(const GroupoidModel& m, long long theta_index, int fiber_order = 0) {
  return make_layer(m, theta_index, {cd{1.0, 0.0}}, fiber_order, "rotation-layer");
}

/// The unit of the convolution algebra.
inline Distribution unit_delta(const GroupoidModel& m) {
  if (m.kind == ModelKind::kPairTimesZ) throw UnsupportedError("PAIR_TIMES_Z carries smooth parts only");
  return make_layer(m, 0, {cd{1.0, 0.0}}, 0, "delta");
}

/// Point mass of a CIRCLE_GROUP element as a layer.
inline Distribution group_point_mass(const GroupoidModel& m, long long a, cd c = {1.0, 0.0}, int k = 0) {
  if (m.kind != ModelKind::kCircleGroup) throw UnsupportedError("group point masses live on CIRCLE_GROUP");
  return make_layer(m, a, {c}, k, "point-mass");
}

/// Grid indicator of one element (value 1 at one cell). Carries no
/// transversality.
inline Distribution point_mass_grid(const Element& g) {
  validate(g);
  const auto& m = g.model;
  std::vector<cd> v(grid_size(m));
  switch (m.kind) {
    case ModelKind::kPairCircle: v[pidx(m.n, circle_index(g.coords[0], m.n), circle_index(g.coords[1], m.n))] = 1.0; break;
    case ModelKind::kCircleGroup: v[circle_index(g.coords[0], m.n)] = 1.0; break;
    case ModelKind::kPairTimesZ:
      v[zidx(m, circle_index(g.coords[0], m.n), circle_index(g.coords[1], m.n), circle_index(g.coords[2], m.m_z))] = 1.0;
      break;
    case ModelKind::kAffineGroup: throw UnsupportedError("the affine group carries no grid");
  }
  Distribution u = make_smooth(m, std::move(v), "point-mass-grid");
  u.r_transversal = u.s_transversal = false;
  return u;
}

/// Rank one smooth kernel f(x) g(y) on PAIR_CIRCLE.
inline Distribution rank_one(const GroupoidModel& m, const std::vector<cd>& f, const std::vector<cd>& g) {
  if (m.kind != ModelKind::kPairCircle || f.size() != static_cast<std::size_t>(m.n) || g.size() != f.size())
    throw DomainError("rank_one needs PAIR_CIRCLE and two length-n vectors");
  std::vector<cd> v(grid_size(m));
  for (int x = 0; x < m.n; ++x)
    for (int y = 0; y < m.n; ++y) v[pidx(m.n, x, y)] = f[x] * g[y];
  return make_smooth(m, std::move(v), "rank-one");
}

/// Periodized Gaussian bump exp(-d^2 / (2 w^2)) around an element, d in grid units.
inline Distribution gaussian_bump(const Element& center, double width_cells) {
  const auto& m = center.model;
  const auto dist2 = [&](const std::vector<double>& c) {
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const int res = (m.kind == ModelKind::kPairTimesZ && i == 2) ? m.m_z : m.n;
      double d = (c[i] - center.coords[i]) * res;
      d -= std::round(d / res) * res;
      s += d * d;
    }
    return s;
  };
  auto tf = sample_test_function(m, [&](const std::vector<double>& c) {
    return cd{std::exp(-dist2(c) / (2.0 * width_cells * width_cells)), 0.0};
  });
  return make_smooth(m, std::move(tf.values), "gaussian-bump");
}

/// Random trigonometric polynomial with frequencies |p|,|q| <= band.
inline Distribution band_limited_field(const GroupoidModel& m, int band, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  auto v = std::vector<cd>(grid_size(m));
  if (m.kind == ModelKind::kPairCircle) {
    for (int p = -band; p <= band; ++p)
      for (int q = -band; q <= band; ++q) {
        const cd a{nd(rng), nd(rng)};
        for (int x = 0; x < m.n; ++x)
          for (int y = 0; y < m.n; ++y) {
            const double ph = (2.0 * std::numbers::pi / m.n) * static_cast<double>(wrap_index(static_cast<long long>(p) * x + static_cast<long long>(q) * y, m.n));
            v[pidx(m.n, x, y)] += a * cd{std::cos(ph), std::sin(ph)};
          }
      }
  } else if (m.kind == ModelKind::kCircleGroup) {
    for (int p = -band; p <= band; ++p) {
      const cd a{nd(rng), nd(rng)};
      for (int x = 0; x < m.n; ++x) {
        const double ph = (2.0 * std::numbers::pi / m.n) * static_cast<double>(wrap_index(static_cast<long long>(p) * x, m.n));
        v[x] += a * cd{std::cos(ph), std::sin(ph)};
      }
    }
  } else {
    throw UnsupportedError("band_limited_field supports PAIR_CIRCLE and CIRCLE_GROUP");
  }
  return make_smooth(m, std::move(v), "band-limited");
}

/// Grid distribution with Fourier coefficients chi(eta) exp(-xi^2 / (2 eta^2)).
/// Its pushforward along r (x coordinate) is smooth, yet its wave front set
/// meets the conormal directions (xi, 0).
inline Distribution counterexample_distribution(int n) {
  if (n < 64) throw DomainError("counterexample_distribution needs n >= 64");
  const GroupoidModel m = make_model(ModelKind::kPairCircle, n);
  std::vector<cd> hat(grid_size(m));
  const auto freq = [n](int k) { return k < n / 2 ? k : k - n; };
  for (int kp = 0; kp < n; ++kp)
    for (int kq = 0; kq < n; ++kq) {
      const double xi = freq(kp), eta = freq(kq);
      const double t = std::clamp((std::abs(eta) - 0.5) / 0.5, 0.0, 1.0);
      const double chi = t * t * (3.0 - 2.0 * t);
      hat[pidx(n, kp, kq)] = chi == 0.0 ? 0.0 : chi * std::exp(-xi * xi / (2.0 * eta * eta));
    }
  dft_inplace(hat, {n, n}, +1);
  Distribution u = make_smooth(m, std::move(hat), "counterexample");
  u.r_transversal = true;
  u.s_transversal = false;
  return u;
}

/// u + v, with layers of equal section and order kept separate.
inline Distribution add(const Distribution& u, const Distribution& v) {
  require_same_model(u.model, v.model);
  Distribution out{u.model, u.smooth, u.layers, u.label + "+" + v.label};
  out.r_transversal = u.r_transversal && v.r_transversal;
  out.s_transversal = u.s_transversal && v.s_transversal;
  if (v.has_smooth()) {
    if (out.smooth.empty()) out.smooth.assign(v.smooth.size(), cd{});
    for (std::size_t i = 0; i < v.smooth.size(); ++i) out.smooth[i] += v.smooth[i];
  }
  out.layers.insert(out.layers.end(), v.layers.begin(), v.layers.end());
  return out;
}

// ---------------------------------------------------------------------------
// Pairing, pushforward, slices

inline cd pair(const Distribution& u, const TestFunction& f) {
  require_same_model(u.model, f.model);
  check_grid(f.model, f.values, "test function");
  const auto& m = u.model;
  cd acc{0.0, 0.0};
  if (u.has_smooth()) {
    cd s{0.0, 0.0};
    for (std::size_t i = 0; i < u.smooth.size(); ++i) s += u.smooth[i] * f.values[i];
    acc += s * cell_weight(m);
  }
  if (u.layers.empty()) return acc;
  const StencilTable st(m.n);
  for (const auto& l : u.layers) {
    const auto& w = st(l.order);
    if (m.kind == ModelKind::kPairCircle) {
      cd s{0.0, 0.0};
      for (int x = 0; x < m.n; ++x) {
        cd d{0.0, 0.0};
        for (const auto& [off, wt] : w) d += wt * f.values[pidx(m.n, x, x - l.section + off)];
        s += l.coeffs[x] * d;
      }
      acc += s / static_cast<double>(m.n);
    } else {
      cd d{0.0, 0.0};
      for (const auto& [off, wt] : w) d += wt * f.values[wrap_index(l.section + off, m.n)];
      acc += l.coeffs[0] * d;
    }
  }
  return acc;
}

/// x -> <u restricted to the pi-fiber over x, f>, pi = s or r.
inline std::vector<cd> pushforward_base(const Distribution& u, const TestFunction& f, Anchor which) {
  require_same_model(u.model, f.model);
  check_grid(f.model, f.values, "test function");
  const auto& m = u.model;
  const int n = m.n;
  std::vector<cd> out(unit_grid_size(m));
  switch (m.kind) {
    case ModelKind::kCircleGroup: out[0] = pair(u, f); return out;
    case ModelKind::kPairTimesZ:
      if (!u.layers.empty()) throw UnsupportedError("PAIR_TIMES_Z carries smooth parts only");
      if (!u.has_smooth()) return out;
      for (int a = 0; a < n; ++a)
        for (int z = 0; z < m.m_z; ++z) {
          cd s{0.0, 0.0};
          for (int b = 0; b < n; ++b) {
            const std::size_t i = which == Anchor::kAlongR ? zidx(m, a, b, z) : zidx(m, b, a, z);
            s += u.smooth[i] * f.values[i];
          }
          out[static_cast<std::size_t>(a) * m.m_z + z] = s / static_cast<double>(n);
        }
      return out;
    case ModelKind::kPairCircle: break;
    case ModelKind::kAffineGroup: throw UnsupportedError("the affine group carries no grid");
  }
  if (u.has_smooth()) {
    for (int a = 0; a < n; ++a) {
      cd s{0.0, 0.0};
      for (int b = 0; b < n; ++b) {
        const std::size_t i = which == Anchor::kAlongR ? pidx(n, a, b) : pidx(n, b, a);
        s += u.smooth[i] * f.values[i];
      }
      out[a] = s / static_cast<double>(n);
    }
  }
  const StencilTable st(n);
  for (const auto& l : u.layers) {
    const auto& w = st(l.order);
    for (int a = 0; a < n; ++a) {
      cd s{0.0, 0.0};
      if (which == Anchor::kAlongR) {
        for (const auto& [off, wt] : w) s += wt * f.values[pidx(n, a, a - l.section + off)];
        s *= l.coeffs[a];
      } else {
        for (const auto& [off, wt] : w) {
          const long long x = a + l.section - off;
          s += l.coeffs[wrap_index(x, n)] * wt * f.values[pidx(n, x, a)];
        }
      }
      out[a] += s;
    }
  }
  return out;
}

inline FiberDistribution slice_family(const Distribution& u, const Unit& x, Anchor which) {
  require_same_model(u.model, x.model);
  validate(x);
  const auto& m = u.model;
  const int n = m.n;
  FiberDistribution fd{m, x, {}, {}};
  switch (m.kind) {
    case ModelKind::kCircleGroup: {
      fd.density = u.has_smooth() ? u.smooth : std::vector<cd>(n);
      for (const auto& l : u.layers) fd.masses.push_back({l.section, l.coeffs[0], l.order});
      return fd;
    }
    case ModelKind::kPairTimesZ: {
      if (!u.layers.empty()) throw UnsupportedError("PAIR_TIMES_Z carries smooth parts only");
      const int a = circle_index(x.coords[0], n), z = circle_index(x.coords[1], m.m_z);
      fd.density.assign(n, cd{});
      if (u.has_smooth())
        for (int b = 0; b < n; ++b) fd.density[b] = u.smooth[which == Anchor::kAlongR ? zidx(m, a, b, z) : zidx(m, b, a, z)];
      return fd;
    }
    case ModelKind::kPairCircle: break;
    case ModelKind::kAffineGroup: throw UnsupportedError("the affine group carries no grid");
  }
  const int a = circle_index(x.coords[0], n);
  fd.density.assign(n, cd{});
  if (u.has_smooth())
    for (int b = 0; b < n; ++b) fd.density[b] = u.smooth[which == Anchor::kAlongR ? pidx(n, a, b) : pidx(n, b, a)];
  const StencilTable st(n);
  for (const auto& l : u.layers) {
    if (which == Anchor::kAlongR) {
      fd.masses.push_back({wrap_index(a - l.section, n), l.coeffs[a], l.order});
    } else {
      // The fiber derivative is transverse to the s-fiber: the slice is a
      // finite sum of plain point masses.
      for (const auto& [off, wt] : st(l.order)) {
        const long long xx = wrap_index(a + l.section - off, n);
        fd.masses.push_back({xx, l.coeffs[xx] * wt, 0});
      }
    }
  }
  return fd;
}

/// <u_x, g> for a function g on the fiber grid.
inline cd pair_fiber(const FiberDistribution& fd, const std::vector<cd>& g) {
  const int n = static_cast<int>(g.size());
  cd s{0.0, 0.0};
  for (int i = 0; i < n && i < static_cast<int>(fd.density.size()); ++i) s += fd.density[i] * g[i];
  s /= static_cast<double>(n);
  if (fd.masses.empty()) return s;
  const StencilTable st(fd.model.n);
  for (const auto& pm : fd.masses) {
    cd d{0.0, 0.0};
    for (const auto& [off, wt] : st(pm.order)) d += wt * g[wrap_index(pm.position + off, n)];
    s += pm.weight * d;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Involution u* = conj(i^* u)

inline Distribution star_involution(const Distribution& u) {
  const auto& m = u.model;
  Distribution out{m, {}, {}, u.label + "*"};
  out.r_transversal = u.s_transversal;
  out.s_transversal = u.r_transversal;
  const int n = m.n;
  if (u.has_smooth()) {
    out.smooth.resize(u.smooth.size());
    switch (m.kind) {
      case ModelKind::kPairCircle:
        for (int x = 0; x < n; ++x)
          for (int y = 0; y < n; ++y) out.smooth[pidx(n, x, y)] = std::conj(u.smooth[pidx(n, y, x)]);
        break;
      case ModelKind::kCircleGroup:
        for (int x = 0; x < n; ++x) out.smooth[x] = std::conj(u.smooth[wrap_index(-x, n)]);
        break;
      case ModelKind::kPairTimesZ:
        for (int x = 0; x < n; ++x)
          for (int y = 0; y < n; ++y)
            for (int z = 0; z < m.m_z; ++z) out.smooth[zidx(m, x, y, z)] = std::conj(u.smooth[zidx(m, y, x, z)]);
        break;
      case ModelKind::kAffineGroup: break;
    }
  }
  if (u.layers.empty()) return out;
  const StencilTable st(n);
  for (const auto& l : u.layers) {
    const double sign = (l.order % 2 == 0) ? 1.0 : -1.0;
    if (m.kind == ModelKind::kCircleGroup) {
      out.layers.push_back({wrap_index(-l.section, n), {sign * std::conj(l.coeffs[0])}, l.order});
      continue;
    }
    bool constant = true;
    for (const auto& c : l.coeffs) constant = constant && c == l.coeffs[0];
    if (constant) {
      std::vector<cd> c(n, sign * std::conj(l.coeffs[0]));
      out.layers.push_back({wrap_index(-l.section, n), std::move(c), l.order});
    } else if (l.order == 0) {
      std::vector<cd> c(n);
      for (int x = 0; x < n; ++x) c[x] = std::conj(l.coeffs[wrap_index(x + l.section, n)]);
      out.layers.push_back({wrap_index(-l.section, n), std::move(c), 0});
    } else {
      // n c(x) sum_m w_m delta_{y, x-theta+m}, transposed and conjugated,
      // is a sum of order-0 layers with sections m - theta.
      for (const auto& [off, wt] : st(l.order)) {
        std::vector<cd> c(n);
        for (int x = 0; x < n; ++x) c[x] = wt * std::conj(l.coeffs[wrap_index(x + l.section - off, n)]);
        out.layers.push_back({wrap_index(off - l.section, n), std::move(c), 0});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dense materialization (density on the grid of G, layers included)

inline std::vector<cd> to_dense(const Distribution& u) {
  const auto& m = u.model;
  std::vector<cd> out = u.has_smooth() ? u.smooth : std::vector<cd>(grid_size(m));
  if (u.layers.empty()) return out;
  const int n = m.n;
  const StencilTable st(n);
  for (const auto& l : u.layers) {
    for (const auto& [off, wt] : st(l.order)) {
      if (m.kind == ModelKind::kPairCircle) {
        for (int x = 0; x < n; ++x) out[pidx(n, x, x - l.section + off)] += static_cast<double>(n) * l.coeffs[x] * wt;
      } else {
        out[wrap_index(l.section + off, n)] += static_cast<double>(n) * l.coeffs[0] * wt;
      }
    }
  }
  return out;
}

}  // namespace grpd
