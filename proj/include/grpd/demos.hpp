#pragma once

// Built-in demos. Each one exercises one group of properties, writes its
// artifacts to an output directory and reports named checks.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "grpd/cone_algebra.hpp"
#include "grpd/convolution.hpp"
#include "grpd/cotangent.hpp"
#include "grpd/distribution.hpp"
#include "grpd/io.hpp"
#include "grpd/wavefront.hpp"

namespace grpd {

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct DemoResult {
  std::string name;
  std::uint64_t seed = 0;
  std::vector<Check> checks;

  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  void below(std::string n, double v, double tol) { checks.push_back({std::move(n), v, tol, v < tol}); }
  void zero(std::string n, double v) { checks.push_back({std::move(n), v, 0.0, v == 0.0}); }
  void truth(std::string n, bool ok) { checks.push_back({std::move(n), ok ? 1.0 : 0.0, 1.0, ok}); }
};

inline nlohmann::json summary_json(const DemoResult& r) {
  auto checks = nlohmann::json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass}});
  return {{"demo", r.name}, {"seed", r.seed}, {"pass", r.pass()}, {"checks", checks}};
}

namespace demo_detail {

/// Coordinate residual; circle coordinates compare modulo 1.
inline double residual(const Element& a, const Element& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.coords.size(); ++i) {
    double d = a.coords[i] - b.coords[i];
    if (!a.model.continuous()) d -= std::round(d);
    e = std::max(e, std::abs(d));
  }
  return e;
}

inline double residual(const CotangentPoint& a, const CotangentPoint& b) {
  return std::max(residual(a.base, b.base), detail::max_abs_diff(a.xi, b.xi));
}

inline std::vector<GroupoidModel> all_models() {
  return {make_model(ModelKind::kPairCircle, 64), make_model(ModelKind::kCircleGroup, 64),
          make_model(ModelKind::kPairTimesZ, 64, 16), make_model(ModelKind::kAffineGroup)};
}

inline std::vector<cd> smooth_coeffs(int n) {
  std::vector<cd> c(n);
  for (int i = 0; i < n; ++i) c[i] = 2.0 + std::polar(1.0, 2.0 * kPi * i / n);
  return c;
}

/// Mixed smooth/layer catalog on PAIR_CIRCLE used by the algebra demos.
inline std::vector<Distribution> algebra_catalog(const GroupoidModel& m, std::uint64_t seed) {
  const auto c = smooth_coeffs(m.n);
  return {band_limited_field(m, 3, seed + 1),
          make_layer(m, 5, c, 0, "L5c"),
          make_layer(m, m.n - 9, {cd{1.0, 0.0}}, 1, "L-9d"),
          make_layer(m, 17, c, 2, "L17cdd"),
          add(band_limited_field(m, 2, seed + 2), rotation_layer(m, 3))};
}

inline void write_csv_rows(const fs::path& p, const std::string& header, const std::vector<std::vector<double>>& rows) {
  std::string s = header + "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + format_double(r[i]);
    s += "\n";
  }
  write_file(p, s);
}

}  // namespace demo_detail

// ---------------------------------------------------------------------------

inline DemoResult demo_groupoid_axioms(std::uint64_t seed, const fs::path& /*out*/) {
  using demo_detail::residual;
  DemoResult r{"groupoid-axioms", seed, {}};
  std::mt19937_64 rng(seed);
  for (const auto& m : demo_detail::all_models()) {
    double assoc = 0.0, unit = 0.0, inv = 0.0, ct_assoc = 0.0, ct_unit = 0.0, ct_inv = 0.0;
    for (int t = 0; t < 1000; ++t) {
      const Element g1 = random_element(m, rng);
      const Element g2 = random_composable_after(g1, rng);
      const Element g3 = random_composable_after(g2, rng);
      assoc = std::max(assoc, residual(multiply(multiply(g1, g2), g3), multiply(g1, multiply(g2, g3))));
      unit = std::max({unit, residual(multiply(unit_embed(target(g1)), g1), g1),
                       residual(multiply(g1, unit_embed(source(g1))), g1)});
      inv = std::max({inv, residual(multiply(g1, invert(g1)), unit_embed(target(g1))),
                      residual(multiply(invert(g1), g1), unit_embed(source(g1)))});

      const CotangentPoint d1 = random_cotangent(m, rng);
      const CotangentPoint d2 = random_ct_composable_after(d1, rng);
      const CotangentPoint d3 = random_ct_composable_after(d2, rng);
      ct_assoc = std::max(ct_assoc, residual(ct_multiply(ct_multiply(d1, d2), d3), ct_multiply(d1, ct_multiply(d2, d3))));
      ct_unit = std::max({ct_unit, residual(ct_multiply(ct_unit_embed(ct_target(d1)), d1), d1),
                          residual(ct_multiply(d1, ct_unit_embed(ct_source(d1))), d1)});
      ct_inv = std::max({ct_inv, residual(ct_multiply(d1, ct_invert(d1)), ct_unit_embed(ct_target(d1))),
                         residual(ct_multiply(ct_invert(d1), d1), ct_unit_embed(ct_source(d1)))});
    }
    const std::string k(to_string(m.kind));
    r.below(k + " associativity", assoc, 1e-9);
    r.below(k + " unit", unit, 1e-9);
    r.below(k + " inverse", inv, 1e-9);
    r.below(k + " cotangent associativity", ct_assoc, 1e-9);
    r.below(k + " cotangent unit", ct_unit, 1e-9);
    r.below(k + " cotangent inverse", ct_inv, 1e-9);
  }
  return r;
}

/// Residual of (-xi, xi1, xi2) on finite-difference tangents of the graph
/// of multiplication at (g1 g2, g1, g2), affine group.
inline double lagrangian_residual(const CotangentPoint& d1, const CotangentPoint& d2) {
  const CotangentPoint d = ct_multiply(d1, d2);
  const double h = 1e-6;
  double e = 0.0;
  for (int which = 0; which < 2; ++which)
    for (int i = 0; i < 2; ++i) {
      Element p1 = d1.base, p2 = d2.base, q1 = d1.base, q2 = d2.base;
      auto& pp = which == 0 ? p1 : p2;
      auto& qq = which == 0 ? q1 : q2;
      pp.coords[i] += h;
      qq.coords[i] -= h;
      const Element mp = multiply(p1, p2), mq = multiply(q1, q2);
      double pairing = 0.0;
      for (int k = 0; k < 2; ++k) pairing -= d.xi[k] * (mp.coords[k] - mq.coords[k]) / (2.0 * h);
      const auto& xi_i = which == 0 ? d1.xi : d2.xi;
      pairing += xi_i[i];
      e = std::max(e, std::abs(pairing));
    }
  return e;
}

inline DemoResult demo_kernel_identities(std::uint64_t seed, const fs::path& /*out*/) {
  DemoResult r{"kernel-identities", seed, {}};
  const auto m = make_model(ModelKind::kPairCircle, 64);
  const int n = m.n;
  long long bad_s = 0, bad_r = 0, bad_m = 0;
  // ker dr is spanned by d/dy and ker ds by d/dx, read off grid differences.
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      const Element g = element_from_indices(m, {x, y});
      const Element gy = element_from_indices(m, {x, y + 1});
      const Element gx = element_from_indices(m, {x + 1, y});
      const bool dr_kills_y = target(g).coords == target(gy).coords;
      const bool ds_kills_x = source(g).coords == source(gx).coords;
      for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b) {
          if (a == 0 && b == 0) continue;
          const CotangentPoint d{g, {double(a), double(b)}};
          const bool annihilates_ker_dr = dr_kills_y && b == 0;
          const bool annihilates_ker_ds = ds_kills_x && a == 0;
          bad_s += in_kernel(d, KernelKind::kKerS) != annihilates_ker_dr;
          bad_r += in_kernel(d, KernelKind::kKerR) != annihilates_ker_ds;
        }
      // Composable pairs over (x, y) with z = x + y + 1.
      const Element g2 = element_from_indices(m, {y, x + y + 1});
      for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b)
          for (int c = -1; c <= 1; ++c) {
            const CotangentPoint d1{g, {double(a), double(b)}};
            const CotangentPoint d2{g2, {double(-b), double(c)}};
            // N*G^(2) = {((x,y,0,eta),(y,z,-eta,0))}
            const bool conormal = a == 0 && c == 0;
            bad_m += in_kernel_m(d1, d2) != conormal;
          }
    }
  r.zero("ker s = (ker dr)^perp mismatches", double(bad_s));
  r.zero("ker r = (ker ds)^perp mismatches", double(bad_r));
  r.zero("ker m = conormal of composable pairs mismatches", double(bad_m));

  std::mt19937_64 rng(seed);
  const auto aff = make_model(ModelKind::kAffineGroup);
  double lag = 0.0;
  for (int t = 0; t < 200; ++t) {
    const auto d1 = random_cotangent(aff, rng);
    lag = std::max(lag, lagrangian_residual(d1, random_ct_composable_after(d1, rng)));
  }
  r.below("affine Lagrangian graph residual", lag, 1e-6);
  return r;
}

inline DemoResult demo_unit_laws(std::uint64_t seed, const fs::path& out) {
  DemoResult r{"unit-laws", seed, {}};
  const auto m = make_model(ModelKind::kPairCircle, 64);
  const auto cat = demo_detail::algebra_catalog(m, seed);
  const auto delta = unit_delta(m);
  double assoc = 0.0, star = 0.0, unit_layers = 0.0, unit_smooth = 0.0, invol = 0.0;
  for (const auto& a : cat) {
    const double e = std::max(max_abs_difference(convolve(delta, a), a), max_abs_difference(convolve(a, delta), a));
    double& slot = a.has_smooth() ? unit_smooth : unit_layers;
    slot = std::max(slot, e);
    invol = std::max(invol, max_abs_difference(star_involution(star_involution(a)), a));
    for (const auto& b : cat) {
      star = std::max(star, relative_difference(star_involution(convolve(a, b)),
                                                convolve(star_involution(b), star_involution(a))));
      for (const auto& c : cat)
        assoc = std::max(assoc, relative_difference(convolve(convolve(a, b), c), convolve(a, convolve(b, c))));
    }
  }
  r.below("associativity (relative)", assoc, 1e-9);
  r.zero("delta unit on layers", unit_layers);
  r.below("delta unit on smooth parts", unit_smooth, 1e-12);
  r.below("star anti-homomorphism (relative)", star, 1e-10);
  r.zero("star involution", invol);

  const auto g = make_model(ModelKind::kCircleGroup, 64);
  const auto ab = convolve(group_point_mass(g, 5), group_point_mass(g, 9));
  r.truth("point masses add on CIRCLE_GROUP", ab.layers.size() == 1 && ab.layers[0].section == 14 && !ab.has_smooth());
  save_distribution(out, "delta_times_layer", convolve(delta, cat[1]));
  return r;
}

inline DemoResult demo_g_operators(std::uint64_t seed, const fs::path& out) {
  DemoResult r{"g-operators", seed, {}};
  const auto m = make_model(ModelKind::kPairCircle, 64);
  const int n = m.n;
  const auto cat = demo_detail::algebra_catalog(m, seed);
  const TestFunction g{m, band_limited_field(m, 2, seed + 7).smooth};
  std::mt19937_64 rng(seed);
  double module = 0.0, eq_layers = 0.0, eq_smooth = 0.0, round_trip = 0.0;
  for (const auto& k : cat) {
    const auto p = make_goperator(k);
    module = std::max(module, module_property_check(p, g));
    for (int t = 0; t < 4; ++t) {
      const double e = equivariance_defect(p, random_element(m, rng), g);
      if (k.has_smooth())
        eq_smooth = std::max(eq_smooth, e);
      else
        eq_layers = std::max(eq_layers, e);
    }
    const auto rec = recover_kernel(p);
    for (int j = 0; j < n; ++j) {
      TestFunction e{m, std::vector<cd>(grid_size(m))};
      e.values[pidx(n, j, 0)] = 1.0;
      const auto lhs = to_dense(convolve(rec, make_smooth(m, e.values)));
      const auto rhs = apply_operator(p, e);
      for (std::size_t i = 0; i < lhs.size(); ++i) round_trip = std::max(round_trip, std::abs(lhs[i] - rhs.values[i]));
    }
  }
  r.below("module property defect", module, 1e-9);
  r.zero("equivariance defect (layers)", eq_layers);
  r.below("equivariance defect (smooth)", eq_smooth, 1e-12);
  r.below("recover_kernel round trip", round_trip, 1e-9);
  const auto shift = recover_kernel(make_goperator(rotation_layer(m, 7)));
  r.truth("shift operator recovered as a layer", shift.layers.size() == 1 && shift.layers[0].section == 7);
  save_distribution(out, "recovered_shift", shift);
  return r;
}

inline DemoResult demo_transformation_groupoid(std::uint64_t seed, const fs::path& /*out*/) {
  DemoResult r{"transformation-groupoid", seed, {}};
  std::mt19937_64 rng(seed);
  for (const auto& m : {make_model(ModelKind::kAffineGroup), make_model(ModelKind::kCircleGroup, 64)}) {
    double e = 0.0;
    for (int t = 0; t < 100; ++t) {
      const auto d1 = random_cotangent(m, rng);
      const auto d2 = random_ct_composable_after(d1, rng);
      const auto lhs = transformation_iso_phi(ct_multiply(d1, d2));
      const auto rhs = transformation_multiply(transformation_iso_phi(d1), transformation_iso_phi(d2));
      e = std::max({e, demo_detail::residual(lhs.g, rhs.g), detail::max_abs_diff(lhs.zeta, rhs.zeta)});
    }
    r.below(std::string(to_string(m.kind)) + " Phi is a morphism", e, 1e-9);
  }
  return r;
}

/// Largest Fourier coefficient (DFT / n) of index beyond n/4.
inline double dft_tail(const std::vector<cd>& v) {
  const int n = static_cast<int>(v.size());
  const auto f = dft(v, {n});
  double tail = 0.0;
  for (int k = 0; k < n; ++k)
    if ((k < n / 2 ? k : n - k) > n / 4) tail = std::max(tail, std::abs(f[k]) / n);
  return tail;
}

/// Smooth test functions used to probe pushforwards.
inline std::vector<TestFunction> pushforward_probes(const GroupoidModel& m) {
  return {sample_test_function(m, [](const std::vector<double>&) { return cd{1.0, 0.0}; }),
          sample_test_function(m, [](const std::vector<double>& c) {
            return cd{std::exp(std::sin(2.0 * kPi * c[0])) * std::cos(2.0 * kPi * c[1]), 0.0};
          }),
          sample_test_function(m, [](const std::vector<double>& c) {
            return cd{std::exp(std::cos(2.0 * kPi * c[1]) + 0.5 * std::cos(2.0 * kPi * c[0])), 0.0};
          })};
}

inline DemoResult demo_remark_counterexample(std::uint64_t seed, const fs::path& out) {
  DemoResult r{"remark-counterexample", seed, {}};
  const int n = 128;
  const auto u = counterexample_distribution(n);
  double tail = 0.0;
  for (const auto& f : pushforward_probes(u.model)) tail = std::max(tail, dft_tail(pushforward_base(u, f, Anchor::kAlongR)));
  r.below("pushforward along r: DFT tail beyond n/4", tail, 1e-8);

  const auto p = WfParams::defaults(n);
  const auto rep = estimate_wavefront(u, p);
  bool near_axis = false;
  for (const auto& c : rep.estimated.cells) {
    if (!c.base_box[0].contains(0.0) || !c.base_box[1].contains(0.0)) continue;
    for (const auto& a : c.arcs) near_axis = near_axis || a.contains(0.0, kPi / 18.0) || a.contains(kPi, kPi / 18.0);
  }
  r.truth("estimated WF has a direction within 10 degrees of (+-1, 0)", near_axis);
  save_report(out, "counterexample_wf", rep);
  // Slopes at the singular center, one row per direction.
  std::vector<std::vector<double>> rows;
  for (const auto& row : rep.slopes)
    if (row.center[0] == 0 && row.center[1] == 0)
      rows.push_back({double(row.direction), row.direction * p.angular_step(), row.slope});
  demo_detail::write_csv_rows(out / "counterexample_slopes_origin.csv", "direction,angle,slope", rows);
  return r;
}

struct ProductCase {
  std::string name;
  Distribution u1, u2;
  ConeSet w1, w2;
};

inline std::vector<ProductCase> product_catalog(int n) {
  const auto m = make_model(ModelKind::kPairCircle, n);
  const ConeSet none{m, {}};
  const long long t1 = n / 8, t2 = 3 * n / 16;
  const auto bump1 = gaussian_bump(make_element(m, {0.25, 0.5}), n / 24.0);
  const auto bump2 = gaussian_bump(make_element(m, {0.5, 0.75}), n / 24.0);
  const auto pm1 = point_mass_grid(make_element(m, {0.0, 0.0}));
  const auto pm2 = point_mass_grid(make_element(m, {0.5, 0.5}));
  return {
      {"layer-layer", rotation_layer(m, t1), rotation_layer(m, t2), rotation_conormal(m, t1), rotation_conormal(m, t2)},
      {"delta-layer", unit_delta(m), rotation_layer(m, t1), rotation_conormal(m, 0), rotation_conormal(m, t1)},
      {"layer-smooth", rotation_layer(m, t1), bump1, rotation_conormal(m, t1), none},
      {"smooth-smooth", bump1, bump2, none, none},
      {"disjoint-point-masses", pm1, pm2, point_cone(make_element(m, {0.0, 0.0})), point_cone(make_element(m, {0.5, 0.5}))},
  };
}

inline DemoResult demo_wf_product_layers(std::uint64_t seed, const fs::path& out) {
  DemoResult r{"wf-product-layers", seed, {}};
  const int n = 128;
  const auto p = WfParams::defaults(n);
  for (const auto& c : product_catalog(n)) {
    const auto rep = verify_product_bound(c.u1, c.u2, c.w1, c.w2, p);
    r.truth(c.name + ": WF(u1*u2) within the predicted cone", rep.pass);
    if (c.name == "disjoint-point-masses") {
      r.below(c.name + ": product max norm", rep.product_max_norm, 1e-12);
      r.truth(c.name + ": estimate empty", rep.estimate.estimated.empty());
    }
    save_cone_set(out / (c.name + "_estimated.json"), rep.estimate.estimated);
    save_cone_set(out / (c.name + "_predicted_bar.json"), rep.predicted_bar);
    save_cone_set(out / (c.name + "_predicted_plain.json"), rep.predicted_plain);
  }
  return r;
}

/// Random cone cell on PAIR_CIRCLE or CIRCLE_GROUP.
inline ConeCell random_cell(const GroupoidModel& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  ConeCell c;
  for (int i = 0; i < m.dim(); ++i) {
    const double lo = u01(rng), w = 0.25 * u01(rng);
    c.base_box.push_back(CircleInterval::from_bounds(lo, lo + w));
  }
  if (m.kind == ModelKind::kCircleGroup) {
    const int mask = 1 + static_cast<int>(u01(rng) * 3.0) % 3;
    if (mask & 1) c.arcs.push_back(Arc::point(0.0));
    if (mask & 2) c.arcs.push_back(Arc::point(kPi));
    return c;
  }
  const int count = 1 + static_cast<int>(u01(rng) * 2.0);
  for (int k = 0; k < count; ++k) {
    const double lo = kTwoPi * u01(rng), w = 0.6 * u01(rng);
    c.arcs.push_back(Arc::from_bounds(lo, lo + w));
  }
  return c;
}

inline DemoResult demo_cone_heredity(std::uint64_t seed, const fs::path& /*out*/) {
  DemoResult r{"cone-heredity", seed, {}};
  std::mt19937_64 rng(seed);
  for (const auto& m : {make_model(ModelKind::kPairCircle, 64), make_model(ModelKind::kCircleGroup, 64)}) {
    long long one_r = 0, one_s = 0, bad_r = 0, bad_s = 0, both_r = 0, both_s = 0;
    for (int t = 0; t < 500; ++t) {
      const ConeSet w1{m, {random_cell(m, rng)}}, w2{m, {random_cell(m, rng)}};
      const auto bar = cone_product_bar(w1, w2);
      const bool r1 = transversality(w1, Transversality::kR), r2 = transversality(w2, Transversality::kR);
      const bool s1 = transversality(w1, Transversality::kS), s2 = transversality(w2, Transversality::kS);
      const bool bar_r = transversality(bar, Transversality::kR), bar_s = transversality(bar, Transversality::kS);
      if (s1) one_s += !bar_s;
      if (r2) one_r += !bar_r;
      if (r1 && r2) both_r += !bar_r;
      if (s1 && s2) both_s += !bar_s;
    }
    // Pointwise: r_Gamma o m_Gamma = r_Gamma o pr1 and s_Gamma o m_Gamma = s_Gamma o pr2.
    for (int t = 0; t < 500; ++t) {
      const auto d1 = random_cotangent(m, rng);
      auto d2 = random_ct_composable_after(d1, rng);
      if (t % 5 == 0) d2.xi.back() = 0.0;  // hit ker s_Gamma / ker r_Gamma now and then
      if (!ct_is_composable(d1, d2)) continue;
      const auto p = ct_multiply(d1, d2);
      if (!in_kernel(d1, KernelKind::kKerR)) bad_s += in_kernel(p, KernelKind::kKerR);
      if (!in_kernel(d2, KernelKind::kKerS)) bad_r += in_kernel(p, KernelKind::kKerS);
    }
    const std::string k(to_string(m.kind));
    r.zero(k + " bar product: s-transversal W1 gives s-transversal product (failures)", double(one_s));
    r.zero(k + " bar product: r-transversal W2 gives r-transversal product (failures)", double(one_r));
    r.zero(k + " bar product: r-transversal W1, W2 give r-transversal product (failures)", double(both_r));
    r.zero(k + " bar product: s-transversal W1, W2 give s-transversal product (failures)", double(both_s));
    r.zero(k + " pointwise product heredity (failures)", double(bad_r + bad_s));
    r.truth(k + " A*G units bi-transversal", transversality(a_star_units(m), Transversality::kBi));
  }
  return r;
}

inline DemoResult demo_determinism_serialization(std::uint64_t seed, const fs::path& out);

struct DemoEntry {
  std::string name;
  std::string description;
  std::function<DemoResult(std::uint64_t, const fs::path&)> run;
};

inline const std::vector<DemoEntry>& demo_catalog() {
  static const std::vector<DemoEntry> cat = {
      {"groupoid-axioms", "associativity, unit and inverse laws of all models and their cotangent groupoids",
       demo_groupoid_axioms},
      {"kernel-identities", "ker s, ker r and ker m of the cotangent groupoid; affine Lagrangian graph residual",
       demo_kernel_identities},
      {"unit-laws", "convolution algebra: associativity, unit delta, star involution", demo_unit_laws},
      {"g-operators", "module property, equivariance and kernel recovery of G-operators", demo_g_operators},
      {"transformation-groupoid", "Phi: T*G -> G x g* is a groupoid morphism", demo_transformation_groupoid},
      {"remark-counterexample", "transversal distribution with smooth pushforward and WF meeting (ker dpi)^perp",
       demo_remark_counterexample},
      {"wf-product-layers", "WF(u1*u2) inside the cone product on the catalog", demo_wf_product_layers},
      {"cone-heredity", "transversality heredity under the cone product; units bi-transversal", demo_cone_heredity},
      {"determinism-serialization", "byte-identical reruns and bit-exact format round trips",
       demo_determinism_serialization},
  };
  return cat;
}

/// Runs a demo and writes <out>/summary.json.
inline DemoResult run_demo(const std::string& name, std::uint64_t seed, const fs::path& out) {
  for (const auto& d : demo_catalog())
    if (d.name == name) {
      fs::create_directories(out);
      DemoResult r = d.run(seed, out);
      write_file(out / "summary.json", dump_json(summary_json(r)));
      return r;
    }
  throw DomainError("unknown demo: " + name);
}

namespace demo_detail {

inline std::vector<std::pair<std::string, std::string>> snapshot(const fs::path& dir) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files.emplace_back(fs::relative(e.path(), dir).string(), read_file(e.path()));
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace demo_detail

inline DemoResult demo_determinism_serialization(std::uint64_t seed, const fs::path& out) {
  DemoResult r{"determinism-serialization", seed, {}};
  // Two runs of every other demo with the same seed must match byte for byte.
  bool identical = true;
  for (const auto& d : demo_catalog()) {
    if (d.name == "determinism-serialization") continue;
    const fs::path a = out / "run_a" / d.name, b = out / "run_b" / d.name;
    fs::remove_all(a);
    fs::remove_all(b);
    run_demo(d.name, seed, a);
    run_demo(d.name, seed, b);
    const bool same = demo_detail::snapshot(a) == demo_detail::snapshot(b);
    r.truth(d.name + " byte-identical across runs", same);
    identical = identical && same;
  }
  fs::remove_all(out / "run_b");

  // Round trips.
  const auto m = make_model(ModelKind::kPairCircle, 64);
  const auto rt = out / "roundtrip";
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Grid g{{8, 4, 2}, std::vector<cd>(64)};
  for (auto& v : g.data) v = cd{nd(rng), nd(rng)};
  g.data[0] = cd{-0.0, std::numeric_limits<double>::denorm_min()};
  write_grid(rt / "grid.grpd", g);
  const Grid g2 = read_grid(rt / "grid.grpd");
  bool grid_ok = g2.dims == g.dims && g2.data.size() == g.data.size();
  for (std::size_t i = 0; grid_ok && i < g.data.size(); ++i)
    grid_ok = std::bit_cast<std::uint64_t>(g.data[i].real()) == std::bit_cast<std::uint64_t>(g2.data[i].real()) &&
              std::bit_cast<std::uint64_t>(g.data[i].imag()) == std::bit_cast<std::uint64_t>(g2.data[i].imag());
  r.truth("GRPD grid bit-exact round trip", grid_ok);

  const auto u = add(band_limited_field(m, 2, seed), make_layer(m, 9, demo_detail::smooth_coeffs(m.n), 2));
  save_distribution(rt, "dist", u);
  const auto u2 = load_distribution(rt / "dist.json");
  r.truth("distribution sidecar round trip", same_content(u, u2) && u2.label == u.label);

  const auto cones = cone_product_bar(rotation_conormal(m, 3), point_cone(make_element(m, {3.0 / 64, 0.5})));
  save_cone_set(rt / "cones.json", cones);
  r.truth("cone set JSON round trip", load_cone_set(rt / "cones.json") == cones);

  const auto rep = estimate_wavefront(rotation_layer(m, 5), WfParams::defaults(m.n));
  save_report(rt, "report", rep);
  const auto rep2 = load_report(rt / "report.json");
  save_report(rt / "again", "report", rep2);
  r.truth("WfReport JSON + CSV byte-identical round trip",
          read_file(rt / "report.json") == read_file(rt / "again" / "report.json") &&
              read_file(rt / "report_slopes.csv") == read_file(rt / "again" / "report_slopes.csv"));
  r.truth("all demos deterministic", identical);
  return r;
}

}  // namespace grpd
