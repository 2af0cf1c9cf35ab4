#pragma once

// Conic subsets of T*G \ 0 as finite unions of cells. A cell is a box on G
// (one circle interval per coordinate) times a set of covector directions:
// angle arcs for dim 1 and 2, spherical caps for dim 3.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include <json.hpp>

#include "grpd/errors.hpp"
#include "grpd/groupoid.hpp"

namespace grpd {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double wrap_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

inline double wrap_unit(double c) {
  double r = c - std::floor(c);
  if (r >= 1.0) r = 0.0;
  return r;
}

/// Closed arc [lo, hi] of a circle of circumference 1 (base coordinates),
/// with lo in [0,1) and hi - lo the width.
struct CircleInterval {
  double lo = 0.0;
  double hi = 0.0;  // hi - lo >= 1 means the whole circle

  static CircleInterval full() { return {0.0, 1.0}; }
  static CircleInterval point(double c) {
    const double w = wrap_unit(c);
    return {w, w};
  }
  static CircleInterval from_bounds(double lo, double hi) {
    if (hi - lo >= 1.0) return full();
    const double l = wrap_unit(lo);
    return {l, l + std::max(0.0, hi - lo)};
  }

  double width() const { return hi - lo; }
  bool is_full() const { return hi - lo >= 1.0; }

  CircleInterval dilated(double d) const {
    if (is_full() || width() + 2.0 * d >= 1.0) return full();
    return from_bounds(lo - d, hi + d);
  }

  bool contains(double c) const { return is_full() || wrap_unit(c - lo) <= width(); }

  friend bool intersects(const CircleInterval& a, const CircleInterval& b) {
    if (a.is_full() || b.is_full()) return true;
    return wrap_unit(b.lo - a.lo) <= a.width() || wrap_unit(a.lo - b.lo) <= b.width();
  }

  /// Smallest single interval containing the intersection (over-approximation).
  friend std::optional<CircleInterval> intersection_hull(const CircleInterval& a, const CircleInterval& b) {
    if (!intersects(a, b)) return std::nullopt;
    if (a.is_full()) return b;
    if (b.is_full()) return a;
    const double db = wrap_unit(b.lo - a.lo);
    const double da = wrap_unit(a.lo - b.lo);
    const bool b_starts_in_a = db <= a.width();
    const bool a_starts_in_b = da <= b.width();
    if (b_starts_in_a && a_starts_in_b) return a.width() <= b.width() ? a : b;
    if (b_starts_in_a) return CircleInterval{b.lo, b.lo + std::min(b.width(), a.width() - db)};
    return CircleInterval{a.lo, a.lo + std::min(a.width(), b.width() - da)};
  }

  friend CircleInterval minkowski_sum(const CircleInterval& a, const CircleInterval& b) {
    if (a.width() + b.width() >= 1.0) return full();
    return from_bounds(a.lo + b.lo, a.lo + b.lo + a.width() + b.width());
  }

  friend bool operator==(const CircleInterval&, const CircleInterval&) = default;
};

/// Arc [lo, hi] of directions, lo in [0, 2pi). Endpoints are closed unless
/// flagged open.
struct Arc {
  double lo = 0.0;
  double hi = 0.0;  // hi - lo >= 2pi means the full circle
  bool open_lo = false;
  bool open_hi = false;

  static Arc full() { return {0.0, kTwoPi}; }
  static Arc point(double a) {
    const double w = wrap_angle(a);
    return {w, w};
  }
  static Arc from_bounds(double lo, double hi, bool open_lo = false, bool open_hi = false) {
    if (hi - lo >= kTwoPi) return full();
    const double l = wrap_angle(lo);
    return {l, l + std::max(0.0, hi - lo), open_lo, open_hi};
  }

  double width() const { return hi - lo; }
  bool is_full() const { return hi - lo >= kTwoPi; }

  /// Membership; with tol > 0 the arc is dilated and treated as closed.
  bool contains(double theta, double tol = 0.0) const {
    if (is_full()) return true;
    const double w = width();
    const double d = wrap_angle(theta - lo);
    if (tol > 0.0) return d <= w + tol || d >= kTwoPi - tol;
    if (d > w) return false;
    if (open_lo && d == 0.0) return false;
    if (open_hi && d == w) return false;
    return true;
  }

  friend bool operator==(const Arc&, const Arc&) = default;
};

/// Spherical cap of unit covectors in dimension 3.
struct Cap {
  std::array<double, 3> center{1.0, 0.0, 0.0};
  double radius = 0.0;  // >= pi means the whole sphere

  bool is_full() const { return radius >= kPi; }

  static double angle_between(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    const double na = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
    const double nb = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
    double c = (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]) / (na * nb);
    c = std::clamp(c, -1.0, 1.0);
    return std::acos(c);
  }

  bool contains(const std::array<double, 3>& v, double tol = 0.0) const {
    if (is_full()) return true;
    return angle_between(center, v) <= radius + tol;
  }

  friend bool operator==(const Cap&, const Cap&) = default;
};

struct ConeCell {
  std::vector<CircleInterval> base_box;
  std::vector<Arc> arcs;  // dim 1 and 2
  std::vector<Cap> caps;  // dim 3

  bool empty_directions() const { return arcs.empty() && caps.empty(); }
  friend bool operator==(const ConeCell&, const ConeCell&) = default;
};

struct ConeSet {
  GroupoidModel model;
  std::vector<ConeCell> cells;

  bool empty() const { return cells.empty(); }
  friend bool operator==(const ConeSet&, const ConeSet&) = default;
};

namespace detail {

inline void require_cone_model(const GroupoidModel& m) {
  if (m.kind == ModelKind::kAffineGroup) throw UnsupportedError("cone sets need a grid model");
}

inline void normalize_arc(Arc& a) {
  if (a.is_full()) {
    a = Arc::full();
    return;
  }
  if (a.lo < 0.0 || a.lo >= kTwoPi) a = Arc::from_bounds(a.lo, a.hi, a.open_lo, a.open_hi);
  if (a.hi < a.lo) a.hi = a.lo;
}

}  // namespace detail

/// Drops cells without directions and canonicalizes intervals.
inline ConeSet normalized(ConeSet w) {
  std::vector<ConeCell> out;
  out.reserve(w.cells.size());
  for (auto& c : w.cells) {
    for (auto& a : c.arcs) detail::normalize_arc(a);
    for (auto& b : c.base_box)
      if (b.is_full() || b.lo < 0.0 || b.lo >= 1.0) b = CircleInterval::from_bounds(b.lo, b.hi);
    for (auto& cap : c.caps) {
      const double nrm = std::hypot(cap.center[0], cap.center[1], cap.center[2]);
      if (nrm > 0.0)
        for (double& v : cap.center) v /= nrm;
      if (cap.radius >= kPi) cap.radius = kPi;
    }
    if (!c.empty_directions()) out.push_back(std::move(c));
  }
  w.cells = std::move(out);
  return w;
}

// ---------------------------------------------------------------------------
// Builders

/// Base box for a single grid element.
inline std::vector<CircleInterval> point_box(const Element& g) {
  std::vector<CircleInterval> box;
  for (double c : g.coords) box.push_back(CircleInterval::point(c));
  return box;
}

inline std::vector<Arc> full_directions_arcs() { return {Arc::full()}; }

/// All nonzero covectors over one point of G (the wave front of a point mass).
inline ConeSet point_cone(const Element& g) {
  detail::require_cone_model(g.model);
  validate(g);
  ConeCell c;
  c.base_box = point_box(g);
  if (g.model.dim() == 3)
    c.caps = {Cap{{1.0, 0.0, 0.0}, kPi}};
  else if (g.model.dim() == 1)
    c.arcs = {Arc::point(0.0), Arc::point(kPi)};
  else
    c.arcs = {Arc::full()};
  return ConeSet{g.model, {c}};
}

/// Conormal cone of the graph {(x, x - theta)} on PAIR_CIRCLE: directions (xi, -xi).
inline ConeSet rotation_conormal(const GroupoidModel& m, long long theta_index) {
  if (m.kind != ModelKind::kPairCircle) throw UnsupportedError("rotation_conormal is defined on PAIR_CIRCLE");
  ConeSet w{m, {}};
  w.cells.reserve(m.n);
  for (int i = 0; i < m.n; ++i) {
    ConeCell c;
    c.base_box = {CircleInterval::point(circle_coord(i, m.n)), CircleInterval::point(circle_coord(i - theta_index, m.n))};
    c.arcs = {Arc::point(0.75 * kPi), Arc::point(1.75 * kPi)};
    w.cells.push_back(std::move(c));
  }
  return w;
}

/// Conormal cone of a point mass on CIRCLE_GROUP: both directions over g.
inline ConeSet group_point_conormal(const Element& g) { return point_cone(g); }

// ---------------------------------------------------------------------------
// JSON

inline void to_json(nlohmann::json& j, const ConeSet& w) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : w.cells) {
    nlohmann::json jc;
    nlohmann::json box = nlohmann::json::array();
    for (const auto& b : c.base_box) box.push_back({b.lo, b.hi});
    jc["base_box"] = box;
    if (w.model.dim() == 3) {
      nlohmann::json caps = nlohmann::json::array();
      for (const auto& cap : c.caps)
        caps.push_back({{"center", {cap.center[0], cap.center[1], cap.center[2]}}, {"radius", cap.radius}});
      jc["caps"] = caps;
    } else {
      nlohmann::json arcs = nlohmann::json::array();
      nlohmann::json open = nlohmann::json::array();
      bool any_open = false;
      for (const auto& a : c.arcs) {
        arcs.push_back({a.lo, a.hi});
        open.push_back({a.open_lo, a.open_hi});
        any_open = any_open || a.open_lo || a.open_hi;
      }
      jc["arcs"] = arcs;
      if (any_open) jc["open"] = open;
    }
    cells.push_back(std::move(jc));
  }
  j = nlohmann::json{{"model", w.model}, {"cells", cells}};
}

inline void from_json(const nlohmann::json& j, ConeSet& w) {
  if (!j.is_object() || !j.contains("model") || !j.contains("cells")) throw FormatError("cone set needs model and cells");
  w.model = j.at("model").get<GroupoidModel>();
  w.cells.clear();
  for (const auto& jc : j.at("cells")) {
    ConeCell c;
    for (const auto& b : jc.at("base_box")) {
      const double lo = b.at(0).get<double>(), hi = b.at(1).get<double>();
      c.base_box.push_back(CircleInterval{lo, hi});
    }
    if (static_cast<int>(c.base_box.size()) != w.model.dim()) throw FormatError("base_box has wrong rank");
    if (jc.contains("arcs")) {
      const auto& arcs = jc.at("arcs");
      for (std::size_t i = 0; i < arcs.size(); ++i) {
        const double lo = arcs[i].at(0).get<double>(), hi = arcs[i].at(1).get<double>();
        Arc a{lo, hi};
        if (jc.contains("open")) {
          a.open_lo = jc["open"].at(i).at(0).get<bool>();
          a.open_hi = jc["open"].at(i).at(1).get<bool>();
        }
        c.arcs.push_back(a);
      }
    }
    if (jc.contains("caps")) {
      for (const auto& jcap : jc.at("caps")) {
        Cap cap;
        for (int k = 0; k < 3; ++k) cap.center[k] = jcap.at("center").at(k).get<double>();
        cap.radius = jcap.at("radius").get<double>();
        c.caps.push_back(cap);
      }
    }
    w.cells.push_back(std::move(c));
  }
}

}  // namespace grpd
