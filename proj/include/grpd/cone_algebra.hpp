#pragma once

// Cone arithmetic on T*G: images under m_Gamma of composable cell pairs,
// transversality predicates, the ker m_Gamma gate and cone containment.
//
// PAIR_CIRCLE and CIRCLE_GROUP are handled in closed form. PAIR_TIMES_Z uses
// sampled caps dilated by one angular step.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "grpd/cone.hpp"
#include "grpd/errors.hpp"
#include "grpd/groupoid.hpp"

namespace grpd {

inline constexpr double kConeAngularStep = kTwoPi / 256.0;

enum class Transversality { kR, kS, kBi };

namespace detail {

inline constexpr double kBig = 1e150;

struct Span {
  double lo, hi;  // unwrapped, lo <= hi
};

/// Closed pieces of arc a inside the open interval (s, s + pi), expressed in
/// [s, s + pi]. Pieces reduced to a boundary point are dropped.
inline std::vector<Span> pieces_in_half(const Arc& a, double s) {
  std::vector<Span> out;
  const double e = s + kPi;
  if (a.is_full()) {
    out.push_back({s, e});
    return out;
  }
  for (int k = -2; k <= 2; ++k) {
    const double shift = kTwoPi * k;
    const double lo = std::max(a.lo + shift, s);
    const double hi = std::min(a.hi + shift, e);
    if (lo > hi) continue;
    if (lo == hi && (lo == s || lo == e)) continue;
    // open endpoints of the arc touching the boundary leave nothing either
    if (lo == hi && ((a.open_lo && lo == a.lo + shift) || (a.open_hi && hi == a.hi + shift))) continue;
    out.push_back({lo, hi});
  }
  return out;
}

/// Value range of a function decreasing on (s, s + pi) with limits +inf and -inf.
template <class F>
inline std::array<double, 2> decreasing_range(const Span& p, double s, F f) {
  const double top = p.lo <= s ? kBig : std::clamp(f(p.lo), -kBig, kBig);
  const double bot = p.hi >= s + kPi ? -kBig : std::clamp(f(p.hi), -kBig, kBig);
  return {bot, top};
}

/// Smallest arc containing the given angles (all assumed to lie in a half plane).
inline Arc hull_of_angles(std::vector<double> angs) {
  for (double& a : angs) a = wrap_angle(a);
  std::sort(angs.begin(), angs.end());
  angs.erase(std::unique(angs.begin(), angs.end()), angs.end());
  if (angs.size() == 1) return Arc::point(angs[0]);
  double best_gap = angs.front() + kTwoPi - angs.back();
  std::size_t start = 0;
  for (std::size_t i = 1; i < angs.size(); ++i) {
    const double gap = angs[i] - angs[i - 1];
    if (gap > best_gap) {
      best_gap = gap;
      start = i;
    }
  }
  const double lo = angs[start];
  const double width = kTwoPi - best_gap;
  return Arc{lo, lo + width};
}

/// Directions of the nonzero points of [u0,u1] x [v0,v1].
inline std::vector<Arc> rectangle_directions(double u0, double u1, double v0, double v1) {
  const bool has_origin = u0 <= 0.0 && 0.0 <= u1 && v0 <= 0.0 && 0.0 <= v1;
  if (!has_origin) {
    return {hull_of_angles({std::atan2(v0, u0), std::atan2(v1, u0), std::atan2(v0, u1), std::atan2(v1, u1)})};
  }
  // Tangent cone at the origin: each coordinate contributes +, - or both.
  std::vector<int> gu, gv;
  if (u1 > 0.0) gu.push_back(1);
  if (u0 < 0.0) gu.push_back(-1);
  if (v1 > 0.0) gv.push_back(1);
  if (v0 < 0.0) gv.push_back(-1);
  if (gu.size() == 2 && gv.size() == 2) return {Arc::full()};
  std::vector<Arc> out;
  if (gu.empty() || gv.empty()) {
    for (int s : gu) out.push_back(Arc::point(s > 0 ? 0.0 : kPi));
    for (int s : gv) out.push_back(Arc::point(s > 0 ? 0.5 * kPi : 1.5 * kPi));
    return out;
  }
  for (int su : gu)
    for (int sv : gv) {
      const double a = std::atan2(0.0, static_cast<double>(su));
      const double b = std::atan2(static_cast<double>(sv), 0.0);
      out.push_back(hull_of_angles({a, b}));
    }
  return out;
}

inline bool has_direction(const std::vector<Arc>& arcs, double theta) {
  for (const auto& a : arcs)
    if (a.contains(theta)) return true;
  return false;
}

inline bool has_direction(const std::vector<Cap>& caps, const std::array<double, 3>& v, double tol = 0.0) {
  for (const auto& c : caps)
    if (c.contains(v, tol)) return true;
  return false;
}

/// Products of direction arcs for PAIR_CIRCLE:
/// (x,y,xi,eta)(y,z,-eta,zeta) = (x,z,xi,zeta).
inline std::vector<Arc> pair_circle_directions(const std::vector<Arc>& a1, const std::vector<Arc>& a2) {
  std::vector<Arc> out;
  const auto cot = [](double a) { return std::cos(a) / std::sin(a); };
  const auto mtan = [](double a) { return -std::sin(a) / std::cos(a); };
  // eta != 0: normalize |eta| = 1; the eta < 0 branch is the antipode.
  for (int branch = 0; branch < 2; ++branch) {
    const double s1 = branch == 0 ? 0.0 : kPi;
    const double s2 = branch == 0 ? 0.5 * kPi : 1.5 * kPi;
    for (const auto& arc1 : a1)
      for (const auto& p1 : pieces_in_half(arc1, s1))
        for (const auto& arc2 : a2)
          for (const auto& p2 : pieces_in_half(arc2, s2)) {
            const auto u = decreasing_range(p1, s1, cot);
            const auto v = decreasing_range(p2, s2, mtan);
            for (Arc r : rectangle_directions(u[0], u[1], v[0], v[1])) {
              if (branch == 1 && !r.is_full()) r = Arc{wrap_angle(r.lo + kPi), wrap_angle(r.lo + kPi) + r.width(), r.open_lo, r.open_hi};
              out.push_back(r);
            }
          }
  }
  // eta = 0: xi and zeta scale independently, giving open quadrants.
  for (int sx : {1, -1}) {
    if (!has_direction(a1, sx > 0 ? 0.0 : kPi)) continue;
    for (int sz : {1, -1}) {
      if (!has_direction(a2, sz > 0 ? 0.5 * kPi : 1.5 * kPi)) continue;
      const double ax = sx > 0 ? 0.0 : kPi;
      const double az = sz > 0 ? 0.5 * kPi : 1.5 * kPi;
      Arc q = hull_of_angles({ax, az});
      q.open_lo = q.open_hi = true;
      out.push_back(q);
    }
  }
  return out;
}

inline std::vector<std::array<double, 3>> sample_cap(const Cap& cap, int rings = 8, int azimuths = 32) {
  std::vector<std::array<double, 3>> pts;
  if (cap.is_full()) {
    const int m = rings * azimuths * 2;
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < m; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / m;
      const double r = std::sqrt(1.0 - z * z);
      pts.push_back({r * std::cos(golden * i), r * std::sin(golden * i), z});
    }
    return pts;
  }
  const auto& c = cap.center;
  pts.push_back(c);
  if (cap.radius <= 0.0) return pts;
  std::array<double, 3> t = std::abs(c[0]) < 0.9 ? std::array<double, 3>{1, 0, 0} : std::array<double, 3>{0, 1, 0};
  std::array<double, 3> e1{c[1] * t[2] - c[2] * t[1], c[2] * t[0] - c[0] * t[2], c[0] * t[1] - c[1] * t[0]};
  const double n1 = std::hypot(e1[0], e1[1], e1[2]);
  for (double& v : e1) v /= n1;
  const std::array<double, 3> e2{c[1] * e1[2] - c[2] * e1[1], c[2] * e1[0] - c[0] * e1[2], c[0] * e1[1] - c[1] * e1[0]};
  for (int i = 1; i <= rings; ++i) {
    const double a = cap.radius * i / rings;
    for (int j = 0; j < azimuths; ++j) {
      const double phi = kTwoPi * j / azimuths;
      std::array<double, 3> p;
      for (int k = 0; k < 3; ++k)
        p[k] = std::cos(a) * c[k] + std::sin(a) * (std::cos(phi) * e1[k] + std::sin(phi) * e2[k]);
      pts.push_back(p);
    }
  }
  return pts;
}

/// Smallest-ish cap around sampled unit directions, dilated by one step.
inline std::optional<Cap> cap_around(const std::vector<std::array<double, 3>>& dirs) {
  if (dirs.empty()) return std::nullopt;
  std::array<double, 3> m{0, 0, 0};
  for (const auto& d : dirs)
    for (int k = 0; k < 3; ++k) m[k] += d[k];
  const double nm = std::hypot(m[0], m[1], m[2]) / static_cast<double>(dirs.size());
  if (nm < 0.25) return Cap{{1.0, 0.0, 0.0}, kPi};
  Cap cap{m, 0.0};
  for (const auto& d : dirs) cap.radius = std::max(cap.radius, Cap::angle_between(m, d));
  cap.radius += kConeAngularStep;
  const double nrm = std::hypot(m[0], m[1], m[2]);
  for (double& v : cap.center) v /= nrm;
  if (cap.radius >= kPi) cap.radius = kPi;
  return cap;
}

inline double unit_norm(std::array<double, 3>& v) {
  const double n = std::hypot(v[0], v[1], v[2]);
  if (n > 0.0)
    for (double& x : v) x /= n;
  return n;
}

/// (x,y,z,xi,eta,sigma)(y,x',z,-eta,xi',sigma') = (x,x',z,xi,xi',sigma+sigma').
inline std::vector<Cap> pair_times_z_directions(const std::vector<Cap>& c1, const std::vector<Cap>& c2) {
  constexpr double tol = 1e-12;
  std::vector<Cap> out;
  for (const auto& cap1 : c1)
    for (const auto& cap2 : c2) {
      const auto s1 = sample_cap(cap1);
      const auto s2 = sample_cap(cap2);
      std::vector<std::array<double, 3>> dirs;
      for (const auto& d1 : s1)
        for (const auto& d2 : s2) {
          const double b1 = d1[1], a2 = d2[0];
          if (b1 * a2 < 0.0 && std::abs(b1) > tol && std::abs(a2) > tol) {
            const double r2 = -b1 / a2;
            std::array<double, 3> o{d1[0], r2 * d2[1], d1[2] + r2 * d2[2]};
            if (unit_norm(o) > tol) dirs.push_back(o);
          } else if (std::abs(b1) <= tol && std::abs(a2) <= tol) {
            for (int k = 0; k <= 4; ++k) {
              const double t = 0.25 * k;
              std::array<double, 3> o{(1 - t) * d1[0], t * d2[1], (1 - t) * d1[2] + t * d2[2]};
              if (unit_norm(o) > tol) dirs.push_back(o);
            }
          }
        }
      if (auto cap = cap_around(dirs)) out.push_back(*cap);
    }
  return out;
}

/// Angular distance from the center of a cap to the plane {v[axis] = 0}.
inline bool cap_meets_plane(const Cap& cap, int axis) {
  if (cap.is_full() || cap.radius >= 0.5 * kPi) return true;
  return std::asin(std::min(1.0, std::abs(cap.center[axis]))) <= cap.radius;
}

inline double base_dilation(const GroupoidModel& m, int coord, double cells) {
  const int res = (m.kind == ModelKind::kPairTimesZ && coord == 2) ? m.m_z : m.n;
  return cells / static_cast<double>(res);
}

inline bool boxes_intersect(const std::vector<CircleInterval>& a, const std::vector<CircleInterval>& b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i)
    if (!intersects(a[i], b[i])) return false;
  return true;
}

enum class ProductMode { kPlain, kBar };

inline ConeSet product_impl(const ConeSet& w1, const ConeSet& w2, ProductMode mode) {
  require_same_model(w1.model, w2.model);
  require_cone_model(w1.model);
  const auto& m = w1.model;
  ConeSet out{m, {}};
  switch (m.kind) {
    case ModelKind::kPairCircle: {
      for (const auto& c1 : w1.cells)
        for (const auto& c2 : w2.cells) {
          if (!intersects(c1.base_box[1], c2.base_box[0])) continue;
          ConeCell c;
          c.base_box = {c1.base_box[0], c2.base_box[1]};
          c.arcs = pair_circle_directions(c1.arcs, c2.arcs);
          if (!c.arcs.empty()) out.cells.push_back(std::move(c));
        }
      if (mode == ProductMode::kBar) {
        // W1 x 0: eta = 0 on the left, any z on the right.
        for (const auto& c1 : w1.cells) {
          ConeCell c;
          c.base_box = {c1.base_box[0], CircleInterval::full()};
          if (has_direction(c1.arcs, 0.0)) c.arcs.push_back(Arc::point(0.0));
          if (has_direction(c1.arcs, kPi)) c.arcs.push_back(Arc::point(kPi));
          if (!c.arcs.empty()) out.cells.push_back(std::move(c));
        }
        // 0 x W2: the left factor covector vanishes, so -eta = 0 on the right.
        for (const auto& c2 : w2.cells) {
          ConeCell c;
          c.base_box = {CircleInterval::full(), c2.base_box[1]};
          if (has_direction(c2.arcs, 0.5 * kPi)) c.arcs.push_back(Arc::point(0.5 * kPi));
          if (has_direction(c2.arcs, 1.5 * kPi)) c.arcs.push_back(Arc::point(1.5 * kPi));
          if (!c.arcs.empty()) out.cells.push_back(std::move(c));
        }
      }
      break;
    }
    case ModelKind::kCircleGroup: {
      // (g1, xi)(g2, xi) = (g1 + g2, xi); zero-section terms force xi = 0.
      for (const auto& c1 : w1.cells)
        for (const auto& c2 : w2.cells) {
          ConeCell c;
          c.base_box = {minkowski_sum(c1.base_box[0], c2.base_box[0])};
          for (double th : {0.0, kPi})
            if (has_direction(c1.arcs, th) && has_direction(c2.arcs, th)) c.arcs.push_back(Arc::point(th));
          if (!c.arcs.empty()) out.cells.push_back(std::move(c));
        }
      break;
    }
    case ModelKind::kPairTimesZ: {
      for (const auto& c1 : w1.cells)
        for (const auto& c2 : w2.cells) {
          if (!intersects(c1.base_box[1], c2.base_box[0])) continue;
          const auto z = intersection_hull(c1.base_box[2], c2.base_box[2]);
          if (!z) continue;
          ConeCell c;
          c.base_box = {c1.base_box[0], c2.base_box[1], *z};
          c.caps = pair_times_z_directions(c1.caps, c2.caps);
          if (!c.caps.empty()) out.cells.push_back(std::move(c));
        }
      if (mode == ProductMode::kBar) {
        for (const auto& c1 : w1.cells) {
          ConeCell c;
          c.base_box = {c1.base_box[0], CircleInterval::full(), c1.base_box[2]};
          for (const auto& cap : c1.caps)
            if (cap_meets_plane(cap, 1)) c.caps.push_back(cap);
          if (!c.caps.empty()) out.cells.push_back(std::move(c));
        }
        for (const auto& c2 : w2.cells) {
          ConeCell c;
          c.base_box = {CircleInterval::full(), c2.base_box[1], c2.base_box[2]};
          for (const auto& cap : c2.caps)
            if (cap_meets_plane(cap, 0)) c.caps.push_back(cap);
          if (!c.caps.empty()) out.cells.push_back(std::move(c));
        }
      }
      break;
    }
    case ModelKind::kAffineGroup: break;
  }
  return normalized(std::move(out));
}

/// Coverage of [0, w] by closed intervals (relative coordinates).
inline bool covers(std::vector<Span> iv, double w) {
  constexpr double eps = 1e-12;
  std::sort(iv.begin(), iv.end(), [](const Span& x, const Span& y) { return x.lo < y.lo; });
  double reach = 0.0;
  for (const auto& s : iv) {
    if (s.hi < -eps) continue;
    if (s.lo > reach + eps) break;
    reach = std::max(reach, s.hi);
    if (reach >= w - eps) return true;
  }
  return false;
}

inline bool arc_covered(const Arc& a, const std::vector<Arc>& bs, double tol) {
  for (const auto& b : bs)
    if (b.is_full() || b.width() + 2.0 * tol >= kTwoPi) return true;
  if (a.is_full()) return false;
  const double w = a.width();
  std::vector<Span> iv;
  for (const auto& b : bs) {
    const double d = wrap_angle(b.lo - tol - a.lo);
    const double bw = b.width() + 2.0 * tol;
    iv.push_back({d, d + bw});
    iv.push_back({d - kTwoPi, d - kTwoPi + bw});
  }
  return covers(iv, w);
}

inline bool cap_covered(const Cap& a, const std::vector<Cap>& bs, double tol) {
  for (const auto& b : bs) {
    if (b.is_full()) return true;
    if (Cap::angle_between(a.center, b.center) + a.radius <= b.radius + tol + 1e-12) return true;
  }
  if (a.is_full()) return false;
  for (const auto& p : sample_cap(a))
    if (!has_direction(bs, p, tol + 1e-12)) return false;
  return true;
}

}  // namespace detail

/// m_Gamma((W1 x W2) cap Gamma^(2)).
inline ConeSet cone_product(const ConeSet& w1, const ConeSet& w2) {
  return detail::product_impl(w1, w2, detail::ProductMode::kPlain);
}

/// m_Gamma((W1 x W2 u W1 x 0 u 0 x W2) cap Gamma^(2)) with zero covectors pruned.
inline ConeSet cone_product_bar(const ConeSet& w1, const ConeSet& w2) {
  return detail::product_impl(w1, w2, detail::ProductMode::kBar);
}

/// r-transversal: W misses ker s_Gamma. s-transversal: W misses ker r_Gamma.
inline bool transversality(const ConeSet& w, Transversality which) {
  detail::require_cone_model(w.model);
  if (which == Transversality::kBi) return transversality(w, Transversality::kR) && transversality(w, Transversality::kS);
  switch (w.model.kind) {
    case ModelKind::kPairCircle: {
      const double a = which == Transversality::kR ? 0.0 : 0.5 * kPi;
      for (const auto& c : w.cells)
        if (detail::has_direction(c.arcs, a) || detail::has_direction(c.arcs, a + kPi)) return false;
      return true;
    }
    case ModelKind::kCircleGroup: return true;
    case ModelKind::kPairTimesZ: {
      const int axis = which == Transversality::kR ? 1 : 0;
      for (const auto& c : w.cells)
        for (const auto& cap : c.caps)
          if (detail::cap_meets_plane(cap, axis)) return false;
      return true;
    }
    case ModelKind::kAffineGroup: break;
  }
  return false;
}

/// True iff (W1 x W2) cap ker m_Gamma is empty.
inline bool hormander_gate(const ConeSet& w1, const ConeSet& w2) {
  require_same_model(w1.model, w2.model);
  detail::require_cone_model(w1.model);
  switch (w1.model.kind) {
    case ModelKind::kPairCircle:
      // ker m_Gamma = {((x,y,0,eta),(y,z,-eta,0))}
      for (const auto& c1 : w1.cells)
        for (const auto& c2 : w2.cells) {
          if (!intersects(c1.base_box[1], c2.base_box[0])) continue;
          if (detail::has_direction(c1.arcs, 0.5 * kPi) && detail::has_direction(c2.arcs, kPi)) return false;
          if (detail::has_direction(c1.arcs, 1.5 * kPi) && detail::has_direction(c2.arcs, 0.0)) return false;
        }
      return true;
    case ModelKind::kCircleGroup: return true;
    case ModelKind::kPairTimesZ: {
      // ker m_Gamma = {((x,y,z,0,eta,sigma),(y,x',z,-eta,0,-sigma))}
      const int steps = 256;
      for (const auto& c1 : w1.cells)
        for (const auto& c2 : w2.cells) {
          if (!intersects(c1.base_box[1], c2.base_box[0]) || !intersects(c1.base_box[2], c2.base_box[2])) continue;
          for (int k = 0; k < steps; ++k) {
            const double phi = kTwoPi * k / steps;
            const std::array<double, 3> v1{0.0, std::cos(phi), std::sin(phi)};
            const std::array<double, 3> v2{-std::cos(phi), 0.0, -std::sin(phi)};
            if (detail::has_direction(c1.caps, v1, kConeAngularStep) &&
                detail::has_direction(c2.caps, v2, kConeAngularStep))
              return false;
          }
        }
      return true;
    }
    case ModelKind::kAffineGroup: break;
  }
  return false;
}

/// A*G \ 0 realized in model coordinates.
inline ConeSet a_star_units(const GroupoidModel& m) {
  ConeSet w{m, {}};
  switch (m.kind) {
    case ModelKind::kPairCircle:
      for (int i = 0; i < m.n; ++i) {
        const double x = circle_coord(i, m.n);
        w.cells.push_back({{CircleInterval::point(x), CircleInterval::point(x)},
                           {Arc::point(0.75 * kPi), Arc::point(1.75 * kPi)},
                           {}});
      }
      return w;
    case ModelKind::kCircleGroup:
      w.cells.push_back({{CircleInterval::point(0.0)}, {Arc::point(0.0), Arc::point(kPi)}, {}});
      return w;
    case ModelKind::kPairTimesZ: {
      const double h = 1.0 / std::sqrt(2.0);
      for (int i = 0; i < m.n; ++i)
        for (int k = 0; k < m.m_z; ++k) {
          const double x = circle_coord(i, m.n), z = circle_coord(k, m.m_z);
          w.cells.push_back({{CircleInterval::point(x), CircleInterval::point(x), CircleInterval::point(z)},
                             {},
                             {Cap{{h, -h, 0.0}, 0.0}, Cap{{-h, h, 0.0}, 0.0}}});
        }
      return w;
    }
    case ModelKind::kAffineGroup: break;
  }
  throw UnsupportedError("a_star_units needs a grid model");
}

/// Every cell of A is covered by the directions of the B cells whose base
/// boxes, dilated by base_tol grid cells, meet the base box of the A cell.
inline bool cone_contains(const ConeSet& a, const ConeSet& b, double angular_tol, double base_tol) {
  require_same_model(a.model, b.model);
  for (const auto& ca : a.cells) {
    std::vector<Arc> arcs;
    std::vector<Cap> caps;
    for (const auto& cb : b.cells) {
      bool meets = true;
      for (std::size_t i = 0; i < ca.base_box.size() && meets; ++i)
        meets = intersects(ca.base_box[i], cb.base_box[i].dilated(detail::base_dilation(a.model, static_cast<int>(i), base_tol)));
      if (!meets) continue;
      arcs.insert(arcs.end(), cb.arcs.begin(), cb.arcs.end());
      caps.insert(caps.end(), cb.caps.begin(), cb.caps.end());
    }
    for (const auto& arc : ca.arcs)
      if (!detail::arc_covered(arc, arcs, angular_tol)) return false;
    for (const auto& cap : ca.caps)
      if (!detail::cap_covered(cap, caps, angular_tol)) return false;
  }
  return true;
}

}  // namespace grpd
