#pragma once

// Convolution on the grid models, the composable-pair route and G-operators.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "grpd/cone_algebra.hpp"
#include "grpd/distribution.hpp"
#include "grpd/errors.hpp"
#include "grpd/parallel.hpp"

namespace grpd {

namespace detail {

/// Merges layers with equal (section, order) and drops identically zero ones.
inline std::vector<Layer> merge_layers(std::vector<Layer> in) {
  std::map<std::pair<long long, int>, std::size_t> seen;
  std::vector<Layer> out;
  for (auto& l : in) {
    const auto key = std::make_pair(l.section, l.order);
    auto it = seen.find(key);
    if (it == seen.end()) {
      seen.emplace(key, out.size());
      out.push_back(std::move(l));
    } else {
      auto& c = out[it->second].coeffs;
      for (std::size_t i = 0; i < c.size(); ++i) c[i] += l.coeffs[i];
    }
  }
  std::erase_if(out, [](const Layer& l) {
    return std::all_of(l.coeffs.begin(), l.coeffs.end(), [](const cd& c) { return c == cd{}; });
  });
  return out;
}

inline bool constant_coeffs(const Layer& l) {
  return std::all_of(l.coeffs.begin(), l.coeffs.end(), [&](const cd& c) { return c == l.coeffs[0]; });
}

inline void add_into(std::vector<cd>& acc, const std::vector<cd>& v) {
  if (acc.empty()) {
    acc = v;
    return;
  }
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
}

// ---- PAIR_CIRCLE and PAIR_TIMES_Z slices ---------------------------------

/// (1/n) sum_y U(x,y) V(y,z) on one n x n slice with stride `st` and offset `z0`.
inline void pair_smooth_smooth(int n, const cd* u, const cd* v, cd* out, std::size_t stride) {
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t x) {
    for (int z = 0; z < n; ++z) {
      cd s{0.0, 0.0};
      for (int y = 0; y < n; ++y) s += u[(x * n + y) * stride] * v[(static_cast<std::size_t>(y) * n + z) * stride];
      out[(x * n + z) * stride] = s / static_cast<double>(n);
    }
  });
}

inline std::vector<cd> pair_layer_smooth(int n, const Layer& l, const std::vector<cd>& v, const Stencil& w) {
  std::vector<cd> out(static_cast<std::size_t>(n) * n);
  for (int x = 0; x < n; ++x)
    for (int z = 0; z < n; ++z) {
      cd s{0.0, 0.0};
      for (const auto& [off, wt] : w) s += wt * v[pidx(n, x - l.section + off, z)];
      out[pidx(n, x, z)] = l.coeffs[x] * s;
    }
  return out;
}

inline std::vector<cd> pair_smooth_layer(int n, const std::vector<cd>& u, const Layer& l, const Stencil& w) {
  std::vector<cd> out(static_cast<std::size_t>(n) * n);
  for (int x = 0; x < n; ++x)
    for (int z = 0; z < n; ++z) {
      cd s{0.0, 0.0};
      for (const auto& [off, wt] : w) {
        const long long y = z + l.section - off;
        s += wt * u[pidx(n, x, y)] * l.coeffs[wrap_index(y, n)];
      }
      out[pidx(n, x, z)] = s;
    }
  return out;
}

inline std::vector<Layer> pair_layer_layer(int n, const Layer& a, const Layer& b, const StencilTable& st) {
  if ((a.order == 0 || constant_coeffs(b)) && a.order + b.order <= kMaxFiberOrder) {
    std::vector<cd> c(n);
    for (int x = 0; x < n; ++x) c[x] = a.coeffs[x] * b.coeffs[wrap_index(x - a.section, n)];
    return {Layer{wrap_index(a.section + b.section, n), std::move(c), a.order + b.order}};
  }
  std::vector<Layer> out;
  for (const auto& [off, wt] : st(a.order)) {
    std::vector<cd> c(n);
    for (int x = 0; x < n; ++x) c[x] = wt * a.coeffs[x] * b.coeffs[wrap_index(x - a.section + off, n)];
    out.push_back(Layer{wrap_index(a.section + b.section - off, n), std::move(c), b.order});
  }
  return out;
}

// ---- CIRCLE_GROUP ----------------------------------------------------------

inline std::vector<cd> group_smooth_smooth(int n, const std::vector<cd>& u, const std::vector<cd>& v) {
  std::vector<cd> out(n);
  for (int x = 0; x < n; ++x) {
    cd s{0.0, 0.0};
    for (int y = 0; y < n; ++y) s += u[y] * v[wrap_index(x - y, n)];
    out[x] = s / static_cast<double>(n);
  }
  return out;
}

/// Point mass convolved with a smooth density (the group is abelian, so the
/// side does not matter).
inline std::vector<cd> group_mass_smooth(int n, const Layer& l, const std::vector<cd>& v, const Stencil& w) {
  std::vector<cd> out(n);
  for (int x = 0; x < n; ++x) {
    cd s{0.0, 0.0};
    for (const auto& [off, wt] : w) s += wt * v[wrap_index(x - l.section - off, n)];
    out[x] = l.coeffs[0] * s;
  }
  return out;
}

inline std::vector<Layer> group_mass_mass(int n, const Layer& a, const Layer& b, const StencilTable& st) {
  if (a.order + b.order <= kMaxFiberOrder)
    return {Layer{wrap_index(a.section + b.section, n), {a.coeffs[0] * b.coeffs[0]}, a.order + b.order}};
  std::vector<Layer> out;
  for (const auto& [off, wt] : st(a.order))
    out.push_back(Layer{wrap_index(a.section + b.section + off, n), {wt * a.coeffs[0] * b.coeffs[0]}, b.order});
  return out;
}

}  // namespace detail

/// u * v. Needs u s-transversal or v r-transversal by construction.
inline Distribution convolve(const Distribution& u, const Distribution& v) {
  require_same_model(u.model, v.model);
  if (!u.s_transversal && !v.r_transversal)
    throw TransversalityError("convolve: need u s-transversal or v r-transversal; use convolve_gated");
  const auto& m = u.model;
  const int n = m.n;
  Distribution out{m, {}, {}, u.label + "*" + v.label};
  out.r_transversal = u.r_transversal && v.r_transversal;
  out.s_transversal = u.s_transversal && v.s_transversal;

  if (m.kind == ModelKind::kPairTimesZ) {
    if (!u.layers.empty() || !v.layers.empty()) throw UnsupportedError("PAIR_TIMES_Z carries smooth parts only");
    if (u.has_smooth() && v.has_smooth()) {
      out.smooth.assign(grid_size(m), cd{});
      for (int z = 0; z < m.m_z; ++z)
        detail::pair_smooth_smooth(n, u.smooth.data() + z, v.smooth.data() + z, out.smooth.data() + z, m.m_z);
    }
    return out;
  }
  if (m.kind == ModelKind::kAffineGroup) throw UnsupportedError("the affine group carries no grid");

  const StencilTable st(n);
  std::vector<Layer> layers;
  if (m.kind == ModelKind::kPairCircle) {
    if (u.has_smooth() && v.has_smooth()) {
      std::vector<cd> r(grid_size(m));
      detail::pair_smooth_smooth(n, u.smooth.data(), v.smooth.data(), r.data(), 1);
      detail::add_into(out.smooth, r);
    }
    for (const auto& l : u.layers)
      if (v.has_smooth()) detail::add_into(out.smooth, detail::pair_layer_smooth(n, l, v.smooth, st(l.order)));
    for (const auto& l : v.layers)
      if (u.has_smooth()) detail::add_into(out.smooth, detail::pair_smooth_layer(n, u.smooth, l, st(l.order)));
    for (const auto& a : u.layers)
      for (const auto& b : v.layers)
        for (auto& l : detail::pair_layer_layer(n, a, b, st)) layers.push_back(std::move(l));
  } else {
    if (u.has_smooth() && v.has_smooth()) detail::add_into(out.smooth, detail::group_smooth_smooth(n, u.smooth, v.smooth));
    for (const auto& l : u.layers)
      if (v.has_smooth()) detail::add_into(out.smooth, detail::group_mass_smooth(n, l, v.smooth, st(l.order)));
    for (const auto& l : v.layers)
      if (u.has_smooth()) detail::add_into(out.smooth, detail::group_mass_smooth(n, l, u.smooth, st(l.order)));
    for (const auto& a : u.layers)
      for (const auto& b : v.layers)
        for (auto& l : detail::group_mass_mass(n, a, b, st)) layers.push_back(std::move(l));
  }
  out.layers = detail::merge_layers(std::move(layers));
  return out;
}

// ---------------------------------------------------------------------------
// Composable pairs

/// u1 x u2 restricted to the composable pairs {(x,y,y,z)} ~ (x,y,z) (pair
/// models) or G x G (group model). Smooth factors are sampled pointwise;
/// layer factors stay symbolic.
struct ComposablePairDistribution {
  GroupoidModel model;
  Distribution first;
  Distribution second;

  /// Sampled smooth-smooth part u1(x,y) u2(y,z) (z-slice last for PAIR_TIMES_Z).
  cd smooth_value(long long x, long long y, long long z, long long slice = 0) const {
    if (!first.has_smooth() || !second.has_smooth()) return {0.0, 0.0};
    switch (model.kind) {
      case ModelKind::kPairCircle: return first.smooth[pidx(model.n, x, y)] * second.smooth[pidx(model.n, y, z)];
      case ModelKind::kPairTimesZ:
        return first.smooth[zidx(model, x, y, slice)] * second.smooth[zidx(model, y, z, slice)];
      case ModelKind::kCircleGroup:
        return first.smooth[wrap_index(x, model.n)] * second.smooth[wrap_index(y, model.n)];
      case ModelKind::kAffineGroup: break;
    }
    throw UnsupportedError("the affine group carries no grid");
  }
};

inline ComposablePairDistribution tensor_restrict(const Distribution& u1, const Distribution& u2) {
  require_same_model(u1.model, u2.model);
  grid_dims(u1.model);
  return ComposablePairDistribution{u1.model, u1, u2};
}

/// Pushforward along multiplication, by direct scattering over the
/// composable-pair grid.
inline Distribution multiply_pushforward(const ComposablePairDistribution& p) {
  const auto& m = p.model;
  const int n = m.n;
  const double dn = static_cast<double>(n);
  const auto& u1 = p.first;
  const auto& u2 = p.second;
  Distribution out{m, {}, {}, u1.label + "*g" + u2.label};
  out.r_transversal = u1.r_transversal && u2.r_transversal;
  out.s_transversal = u1.s_transversal && u2.s_transversal;
  const StencilTable st(n);

  if (m.kind == ModelKind::kPairTimesZ) {
    if (!u1.layers.empty() || !u2.layers.empty()) throw UnsupportedError("PAIR_TIMES_Z carries smooth parts only");
    if (!u1.has_smooth() || !u2.has_smooth()) return out;
    out.smooth.assign(grid_size(m), cd{});
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t x) {
      for (int y = 0; y < n; ++y)
        for (int z = 0; z < n; ++z)
          for (int s = 0; s < m.m_z; ++s) out.smooth[zidx(m, x, z, s)] += p.smooth_value(x, y, z, s) / dn;
    });
    return out;
  }

  if (m.kind == ModelKind::kPairCircle) {
    std::vector<cd> acc(grid_size(m));
    bool any = false;
    if (u1.has_smooth() && u2.has_smooth()) {
      any = true;
      parallel_for(static_cast<std::size_t>(n), [&](std::size_t x) {
        for (int y = 0; y < n; ++y)
          for (int z = 0; z < n; ++z) acc[pidx(n, x, z)] += p.smooth_value(x, y, z) / dn;
      });
    }
    // Smooth first factor, layer second: the constraint z = y - theta + m.
    if (u1.has_smooth())
      for (const auto& l : u2.layers) {
        any = true;
        for (int x = 0; x < n; ++x)
          for (int y = 0; y < n; ++y)
            for (const auto& [off, wt] : st(l.order))
              acc[pidx(n, x, y - l.section + off)] += u1.smooth[pidx(n, x, y)] * l.coeffs[y] * wt;
      }
    // Layer first factor: y = x - theta + m.
    if (u2.has_smooth())
      for (const auto& l : u1.layers) {
        any = true;
        for (int x = 0; x < n; ++x)
          for (const auto& [off, wt] : st(l.order)) {
            const long long y = x - l.section + off;
            for (int z = 0; z < n; ++z) acc[pidx(n, x, z)] += l.coeffs[x] * wt * u2.smooth[pidx(n, y, z)];
          }
      }
    if (any) out.smooth = std::move(acc);
    // Layer-layer: the composed layer over {(x, x - t1 + m, x - t1 + m - t2)},
    // kept symbolic and expanded over the first stencil.
    std::vector<Layer> layers;
    for (const auto& a : u1.layers)
      for (const auto& b : u2.layers)
        for (const auto& [off, wt] : st(a.order)) {
          std::vector<cd> c(n);
          for (int x = 0; x < n; ++x) c[x] = wt * a.coeffs[x] * b.coeffs[wrap_index(x - a.section + off, n)];
          layers.push_back(Layer{wrap_index(a.section + b.section - off, n), std::move(c), b.order});
        }
    out.layers = detail::merge_layers(std::move(layers));
    return out;
  }

  // CIRCLE_GROUP: composable pairs are all of G x G, m(a, b) = a + b.
  std::vector<cd> acc(n);
  bool any = false;
  if (u1.has_smooth() && u2.has_smooth()) {
    any = true;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) acc[wrap_index(a + b, n)] += p.smooth_value(a, b, 0) / dn;
  }
  const auto scatter_mass = [&](const Layer& l, const std::vector<cd>& dens) {
    any = true;
    for (const auto& [off, wt] : st(l.order))
      for (int b = 0; b < n; ++b) acc[wrap_index(l.section + off + b, n)] += l.coeffs[0] * wt * dens[b];
  };
  if (u2.has_smooth())
    for (const auto& l : u1.layers) scatter_mass(l, u2.smooth);
  if (u1.has_smooth())
    for (const auto& l : u2.layers) scatter_mass(l, u1.smooth);
  if (any) out.smooth = std::move(acc);
  std::vector<Layer> layers;
  for (const auto& a : u1.layers)
    for (const auto& b : u2.layers)
      for (const auto& [off, wt] : st(a.order))
        layers.push_back(Layer{wrap_index(a.section + b.section + off, n), {wt * a.coeffs[0] * b.coeffs[0]}, b.order});
  out.layers = detail::merge_layers(std::move(layers));
  return out;
}

struct GatedProduct {
  Distribution result;
  ConeSet predicted;
};

/// Product through the composable-pair route, allowed when the cones pass the
/// Hormander gate.
inline GatedProduct convolve_gated(const Distribution& u, const Distribution& v, const ConeSet& w1, const ConeSet& w2) {
  require_same_model(u.model, v.model);
  require_same_model(w1.model, u.model);
  require_same_model(w2.model, u.model);
  if (!hormander_gate(w1, w2)) throw ConeConditionError("cone condition fails: W1 x W2 meets ker m");
  return GatedProduct{multiply_pushforward(tensor_restrict(u, v)), cone_product_bar(w1, w2)};
}

/// Max modulus of the difference of two distributions, compared as densities.
inline double max_abs_difference(const Distribution& a, const Distribution& b) {
  require_same_model(a.model, b.model);
  const auto da = to_dense(a), db = to_dense(b);
  double e = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) e = std::max(e, std::abs(da[i] - db[i]));
  return e;
}

/// max_abs_difference scaled by max(1, largest modulus of a). Derivative
/// layers carry densities of size n^(k+1), so laws are compared relatively.
inline double relative_difference(const Distribution& a, const Distribution& b) {
  require_same_model(a.model, b.model);
  const auto da = to_dense(a), db = to_dense(b);
  double e = 0.0, scale = 1.0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    e = std::max(e, std::abs(da[i] - db[i]));
    scale = std::max(scale, std::abs(da[i]));
  }
  return e / scale;
}

// ---------------------------------------------------------------------------
// G-operators

struct GOperator {
  Distribution kernel;
  const GroupoidModel& model() const { return kernel.model; }
};

inline GOperator make_goperator(Distribution kernel) {
  if (!kernel.r_transversal) throw TransversalityError("a G-operator kernel must be r-transversal");
  return GOperator{std::move(kernel)};
}

inline TestFunction apply_operator(const GOperator& p, const TestFunction& f) {
  require_same_model(p.model(), f.model);
  const Distribution w = convolve(p.kernel, make_smooth(f.model, f.values, "f"));
  return TestFunction{f.model, to_dense(w)};
}

/// Adjoint of a bi-transversal kernel.
inline GOperator adjoint(const GOperator& p) {
  if (!p.kernel.s_transversal) throw TransversalityError("only bi-transversal kernels are adjointable");
  return make_goperator(star_involution(p.kernel));
}

inline std::vector<TestFunction> module_basket(const GroupoidModel& m) {
  std::vector<TestFunction> out;
  for (std::uint64_t seed : {11u, 23u, 37u}) {
    std::mt19937_64 rng(seed);
    auto d = m.kind == ModelKind::kPairTimesZ ? gaussian_bump(random_element(m, rng), 3.0 + seed % 5)
                                              : band_limited_field(m, 3, seed);
    out.push_back(TestFunction{m, d.smooth});
  }
  return out;
}

/// max |P(f*g) - P(f)*g| over a fixed basket of f.
inline double module_property_check(const GOperator& p, const TestFunction& g) {
  require_same_model(p.model(), g.model);
  const Distribution gd = make_smooth(g.model, g.values, "g");
  double defect = 0.0;
  for (const auto& f : module_basket(g.model)) {
    const Distribution fd = make_smooth(f.model, f.values, "f");
    const auto lhs = apply_operator(p, TestFunction{f.model, convolve(fd, gd).smooth});
    const auto pf = apply_operator(p, f);
    const auto rhs = to_dense(convolve(make_smooth(f.model, pf.values), gd));
    for (std::size_t i = 0; i < rhs.size(); ++i) defect = std::max(defect, std::abs(lhs.values[i] - rhs[i]));
  }
  return defect;
}

/// Right translation by gamma on the grid: (R_gamma f)(eta) = f(eta gamma)
/// for eta in the s-fiber over r(gamma).
inline TestFunction right_translate(const Element& gamma, const TestFunction& f) {
  require_same_model(gamma.model, f.model);
  validate(gamma);
  const auto& m = f.model;
  const int n = m.n;
  TestFunction out{m, std::vector<cd>(f.values.size())};
  switch (m.kind) {
    case ModelKind::kCircleGroup: {
      const int g = circle_index(gamma.coords[0], n);
      for (int x = 0; x < n; ++x) out.values[x] = f.values[wrap_index(x + g, n)];
      return out;
    }
    case ModelKind::kPairCircle: {
      const int d = circle_index(gamma.coords[1], n) - circle_index(gamma.coords[0], n);
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) out.values[pidx(n, x, y)] = f.values[pidx(n, x, y + d)];
      return out;
    }
    case ModelKind::kPairTimesZ: {
      const int d = circle_index(gamma.coords[1], n) - circle_index(gamma.coords[0], n);
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
          for (int z = 0; z < m.m_z; ++z) out.values[zidx(m, x, y, z)] = f.values[zidx(m, x, y + d, z)];
      return out;
    }
    case ModelKind::kAffineGroup: break;
  }
  throw UnsupportedError("the affine group carries no grid");
}

/// max over the s-fiber G_{r(gamma)} of |P(R_gamma f) - R_gamma P(f)|.
inline double equivariance_defect(const GOperator& p, const Element& gamma, const TestFunction& f) {
  require_same_model(p.model(), f.model);
  const auto& m = f.model;
  const int n = m.n;
  const auto lhs = apply_operator(p, right_translate(gamma, f));
  const auto rhs = right_translate(gamma, apply_operator(p, f));
  double e = 0.0;
  switch (m.kind) {
    case ModelKind::kCircleGroup:
      for (int x = 0; x < n; ++x) e = std::max(e, std::abs(lhs.values[x] - rhs.values[x]));
      break;
    case ModelKind::kPairCircle: {
      const int a = circle_index(gamma.coords[0], n);
      for (int x = 0; x < n; ++x) e = std::max(e, std::abs(lhs.values[pidx(n, x, a)] - rhs.values[pidx(n, x, a)]));
      break;
    }
    case ModelKind::kPairTimesZ: {
      const int a = circle_index(gamma.coords[0], n), z = circle_index(gamma.coords[2], m.m_z);
      for (int x = 0; x < n; ++x) e = std::max(e, std::abs(lhs.values[zidx(m, x, a, z)] - rhs.values[zidx(m, x, a, z)]));
      break;
    }
    case ModelKind::kAffineGroup: throw UnsupportedError("the affine group carries no grid");
  }
  return e;
}

using ApplyCallback = std::function<TestFunction(const TestFunction&)>;

/// Rebuilds the kernel of a G-operator from its action on the basis
/// functions supported on the s-fiber over 0. A kernel whose grid is a single
/// order-0 graph {y = x - theta} is returned as a layer.
inline Distribution recover_kernel(const GroupoidModel& m, const ApplyCallback& apply) {
  grid_dims(m);
  const int n = m.n;
  const double dn = static_cast<double>(n);
  const std::size_t size = grid_size(m);
  const auto call = [&](const TestFunction& f) {
    TestFunction r = apply(f);
    if (r.values.size() != size) throw DomainError("recover_kernel: callback output has the wrong shape");
    return r;
  };
  std::vector<cd> k(size);

  if (m.kind == ModelKind::kCircleGroup) {
    TestFunction e{m, std::vector<cd>(size)};
    e.values[0] = 1.0;
    const auto r = call(e);
    for (int x = 0; x < n; ++x) k[x] = dn * r.values[x];
    std::vector<int> nz;
    for (int x = 0; x < n; ++x)
      if (k[x] != cd{}) nz.push_back(x);
    if (nz.size() == 1) return group_point_mass(m, nz[0], k[nz[0]] / dn, 0);
    return make_smooth(m, std::move(k), "recovered");
  }

  const int slices = m.kind == ModelKind::kPairTimesZ ? m.m_z : 1;
  const auto at = [&](int x, int y, int z) {
    return m.kind == ModelKind::kPairTimesZ ? zidx(m, x, y, z) : pidx(n, x, y);
  };
  parallel_for(static_cast<std::size_t>(n) * slices, [&](std::size_t job) {
    const int j = static_cast<int>(job / slices), z = static_cast<int>(job % slices);
    TestFunction e{m, std::vector<cd>(size)};
    e.values[at(j, 0, z)] = 1.0;
    const auto r = call(e);
    for (int x = 0; x < n; ++x) k[at(x, j, z)] = dn * r.values[at(x, 0, z)];
  });

  if (m.kind == ModelKind::kPairCircle) {
    // Single graph y = x - theta with all mass on it?
    std::optional<long long> theta;
    bool graph = true;
    for (int x = 0; x < n && graph; ++x) {
      int count = 0;
      for (int y = 0; y < n; ++y)
        if (k[pidx(n, x, y)] != cd{}) {
          ++count;
          const long long t = wrap_index(x - y, n);
          if (!theta) theta = t;
          graph = graph && *theta == t;
        }
      graph = graph && count == 1;
    }
    if (graph && theta) {
      std::vector<cd> c(n);
      for (int x = 0; x < n; ++x) c[x] = k[pidx(n, x, x - *theta)] / dn;
      Distribution l = make_layer(m, *theta, std::move(c), 0, "recovered-layer");
      return l;
    }
  }
  return make_smooth(m, std::move(k), "recovered");
}

inline Distribution recover_kernel(const GOperator& p) {
  return recover_kernel(p.model(), [&](const TestFunction& f) { return apply_operator(p, f); });
}

}  // namespace grpd
