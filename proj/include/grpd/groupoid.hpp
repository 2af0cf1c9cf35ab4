#pragma once

// Concrete Lie groupoid models and their structural maps.
//
// Four models are provided:
//   PAIR_CIRCLE   T x T  =>  T             (x,y)(y,z) = (x,z)
//   CIRCLE_GROUP  T      =>  pt            addition mod 1
//   PAIR_TIMES_Z  T x T x T_Z  =>  T x T_Z (x,y,z)(y,x',z) = (x,x',z)
//   AFFINE_GROUP  {(a,b): a > 0} => pt     (a1,b1)(a2,b2) = (a1 a2, a1 b2 + b1)
//
// Circle coordinates live in [0,1) on the grid k/n. Since n is a power of
// two, k/n is exactly representable and grid arithmetic is done on indices.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "grpd/errors.hpp"

namespace grpd {

enum class ModelKind { kPairCircle, kCircleGroup, kPairTimesZ, kAffineGroup };

inline std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kPairCircle: return "PAIR_CIRCLE";
    case ModelKind::kCircleGroup: return "CIRCLE_GROUP";
    case ModelKind::kPairTimesZ: return "PAIR_TIMES_Z";
    case ModelKind::kAffineGroup: return "AFFINE_GROUP";
  }
  return "?";
}

inline ModelKind model_kind_from_string(std::string_view s) {
  if (s == "PAIR_CIRCLE") return ModelKind::kPairCircle;
  if (s == "CIRCLE_GROUP") return ModelKind::kCircleGroup;
  if (s == "PAIR_TIMES_Z") return ModelKind::kPairTimesZ;
  if (s == "AFFINE_GROUP") return ModelKind::kAffineGroup;
  throw FormatError("unknown model kind: " + std::string(s));
}

constexpr bool is_power_of_two(long long v) { return v > 0 && (v & (v - 1)) == 0; }

struct GroupoidModel {
  ModelKind kind = ModelKind::kPairCircle;
  int n = 64;
  int m_z = 1;

  bool continuous() const { return kind == ModelKind::kAffineGroup; }

  /// dim G (number of coordinates of an element).
  int dim() const {
    switch (kind) {
      case ModelKind::kPairCircle: return 2;
      case ModelKind::kCircleGroup: return 1;
      case ModelKind::kPairTimesZ: return 3;
      case ModelKind::kAffineGroup: return 2;
    }
    return 0;
  }

  /// Number of coordinates used to describe a unit.
  int unit_dim() const {
    switch (kind) {
      case ModelKind::kPairCircle: return 1;
      case ModelKind::kCircleGroup: return 0;
      case ModelKind::kPairTimesZ: return 2;
      case ModelKind::kAffineGroup: return 2;
    }
    return 0;
  }

  void validate() const {
    if (n < 8 || !is_power_of_two(n))
      throw DomainError("grid resolution n must be a power of two >= 8, got " + std::to_string(n));
    if (kind == ModelKind::kPairTimesZ && !is_power_of_two(m_z))
      throw DomainError("m_z must be a positive power of two, got " + std::to_string(m_z));
  }

  friend bool operator==(const GroupoidModel& a, const GroupoidModel& b) {
    return a.kind == b.kind && a.n == b.n && (a.kind != ModelKind::kPairTimesZ || a.m_z == b.m_z);
  }
};

inline GroupoidModel make_model(ModelKind kind, int n = 64, int m_z = 1) {
  GroupoidModel m{kind, n, kind == ModelKind::kPairTimesZ ? m_z : 1};
  m.validate();
  return m;
}

inline void to_json(nlohmann::json& j, const GroupoidModel& m) {
  j = nlohmann::json{{"kind", std::string(to_string(m.kind))}, {"n", m.n}};
  if (m.kind == ModelKind::kPairTimesZ) j["m_z"] = m.m_z;
}

inline void from_json(const nlohmann::json& j, GroupoidModel& m) {
  if (!j.is_object() || !j.contains("kind")) throw FormatError("model descriptor needs \"kind\"");
  m.kind = model_kind_from_string(j.at("kind").get<std::string>());
  m.n = j.value("n", 64);
  m.m_z = m.kind == ModelKind::kPairTimesZ ? j.value("m_z", 1) : 1;
  m.validate();
}

inline void require_same_model(const GroupoidModel& a, const GroupoidModel& b) {
  if (!(a == b))
    throw ModelMismatchError(std::string("model mismatch: ") + std::string(to_string(a.kind)) +
                             " vs " + std::string(to_string(b.kind)));
}

// ---------------------------------------------------------------------------
// Grid helpers

/// Index of a circle coordinate on a grid of resolution n; throws when off-grid.
inline int circle_index(double c, int n) {
  if (!(c >= 0.0 && c < 1.0)) throw DomainError("circle coordinate outside [0,1): " + std::to_string(c));
  const double scaled = c * n;
  const double k = std::round(scaled);
  if (scaled != k) throw DomainError("coordinate " + std::to_string(c) + " is not on the grid");
  return static_cast<int>(k);
}

constexpr int wrap_index(long long k, int n) {
  const long long r = k % n;
  return static_cast<int>(r < 0 ? r + n : r);
}

inline double circle_coord(long long k, int n) {
  return static_cast<double>(wrap_index(k, n)) / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// Elements and units

struct Unit {
  GroupoidModel model;
  std::vector<double> coords;
  friend bool operator==(const Unit& a, const Unit& b) { return a.model == b.model && a.coords == b.coords; }
};

struct Element {
  GroupoidModel model;
  std::vector<double> coords;
  friend bool operator==(const Element& a, const Element& b) {
    return a.model == b.model && a.coords == b.coords;
  }
};

namespace detail {

inline void check_length(std::size_t got, int want, const char* what) {
  if (got != static_cast<std::size_t>(want))
    throw DomainError(std::string(what) + ": expected " + std::to_string(want) + " coordinates, got " +
                      std::to_string(got));
}

}  // namespace detail

inline void validate(const Element& g) {
  const auto& m = g.model;
  detail::check_length(g.coords.size(), m.dim(), "element");
  switch (m.kind) {
    case ModelKind::kPairCircle:
    case ModelKind::kCircleGroup:
      for (double c : g.coords) circle_index(c, m.n);
      break;
    case ModelKind::kPairTimesZ:
      circle_index(g.coords[0], m.n);
      circle_index(g.coords[1], m.n);
      circle_index(g.coords[2], m.m_z);
      break;
    case ModelKind::kAffineGroup:
      if (!(g.coords[0] > 0.0) || !std::isfinite(g.coords[0]) || !std::isfinite(g.coords[1]))
        throw DomainError("affine element needs a > 0");
      break;
  }
}

inline void validate(const Unit& x) {
  const auto& m = x.model;
  detail::check_length(x.coords.size(), m.unit_dim(), "unit");
  switch (m.kind) {
    case ModelKind::kPairCircle: circle_index(x.coords[0], m.n); break;
    case ModelKind::kCircleGroup: break;
    case ModelKind::kPairTimesZ:
      circle_index(x.coords[0], m.n);
      circle_index(x.coords[1], m.m_z);
      break;
    case ModelKind::kAffineGroup:
      if (x.coords[0] != 1.0 || x.coords[1] != 0.0) throw DomainError("affine group has the single unit (1,0)");
      break;
  }
}

inline Element make_element(const GroupoidModel& m, std::vector<double> coords) {
  Element g{m, std::move(coords)};
  validate(g);
  return g;
}

inline Unit make_unit(const GroupoidModel& m, std::vector<double> coords) {
  Unit x{m, std::move(coords)};
  validate(x);
  return x;
}

/// Grid element from integer indices; indices are wrapped.
inline Element element_from_indices(const GroupoidModel& m, const std::vector<long long>& idx) {
  switch (m.kind) {
    case ModelKind::kPairCircle:
      return Element{m, {circle_coord(idx.at(0), m.n), circle_coord(idx.at(1), m.n)}};
    case ModelKind::kCircleGroup:
      return Element{m, {circle_coord(idx.at(0), m.n)}};
    case ModelKind::kPairTimesZ:
      return Element{m, {circle_coord(idx.at(0), m.n), circle_coord(idx.at(1), m.n), circle_coord(idx.at(2), m.m_z)}};
    case ModelKind::kAffineGroup: break;
  }
  throw UnsupportedError("affine group has no grid");
}

/// Source and target of an element.
struct Anchors {
  Unit src;
  Unit tgt;
};

inline Anchors anchor_maps(const Element& g) {
  validate(g);
  const auto& m = g.model;
  const auto& c = g.coords;
  switch (m.kind) {
    case ModelKind::kPairCircle: return {Unit{m, {c[1]}}, Unit{m, {c[0]}}};
    case ModelKind::kCircleGroup: return {Unit{m, {}}, Unit{m, {}}};
    case ModelKind::kPairTimesZ: return {Unit{m, {c[1], c[2]}}, Unit{m, {c[0], c[2]}}};
    case ModelKind::kAffineGroup: return {Unit{m, {1.0, 0.0}}, Unit{m, {1.0, 0.0}}};
  }
  throw DomainError("bad model");
}

inline Unit source(const Element& g) { return anchor_maps(g).src; }
inline Unit target(const Element& g) { return anchor_maps(g).tgt; }

inline Element unit_embed(const Unit& x) {
  validate(x);
  const auto& m = x.model;
  switch (m.kind) {
    case ModelKind::kPairCircle: return Element{m, {x.coords[0], x.coords[0]}};
    case ModelKind::kCircleGroup: return Element{m, {0.0}};
    case ModelKind::kPairTimesZ: return Element{m, {x.coords[0], x.coords[0], x.coords[1]}};
    case ModelKind::kAffineGroup: return Element{m, {1.0, 0.0}};
  }
  throw DomainError("bad model");
}

/// s(g1) == r(g2). Grid models compare grid indices; the affine group has one unit.
inline bool is_composable(const Element& g1, const Element& g2) {
  require_same_model(g1.model, g2.model);
  validate(g1);
  validate(g2);
  const auto& m = g1.model;
  switch (m.kind) {
    case ModelKind::kPairCircle:
      return circle_index(g1.coords[1], m.n) == circle_index(g2.coords[0], m.n);
    case ModelKind::kCircleGroup: return true;
    case ModelKind::kPairTimesZ:
      return circle_index(g1.coords[1], m.n) == circle_index(g2.coords[0], m.n) &&
             circle_index(g1.coords[2], m.m_z) == circle_index(g2.coords[2], m.m_z);
    case ModelKind::kAffineGroup: return true;
  }
  return false;
}

inline Element multiply(const Element& g1, const Element& g2) {
  if (!is_composable(g1, g2)) throw CompositionError("elements are not composable");
  const auto& m = g1.model;
  const auto& a = g1.coords;
  const auto& b = g2.coords;
  switch (m.kind) {
    case ModelKind::kPairCircle: return Element{m, {a[0], b[1]}};
    case ModelKind::kCircleGroup:
      return Element{m, {circle_coord(circle_index(a[0], m.n) + circle_index(b[0], m.n), m.n)}};
    case ModelKind::kPairTimesZ: return Element{m, {a[0], b[1], a[2]}};
    case ModelKind::kAffineGroup: return Element{m, {a[0] * b[0], a[0] * b[1] + a[1]}};
  }
  throw DomainError("bad model");
}

inline Element invert(const Element& g) {
  validate(g);
  const auto& m = g.model;
  const auto& c = g.coords;
  switch (m.kind) {
    case ModelKind::kPairCircle: return Element{m, {c[1], c[0]}};
    case ModelKind::kCircleGroup: return Element{m, {circle_coord(-circle_index(c[0], m.n), m.n)}};
    case ModelKind::kPairTimesZ: return Element{m, {c[1], c[0], c[2]}};
    case ModelKind::kAffineGroup: return Element{m, {1.0 / c[0], -c[1] / c[0]}};
  }
  throw DomainError("bad model");
}

// ---------------------------------------------------------------------------
// Sampling (used by property checks and the CLI demos)

inline Element random_element(const GroupoidModel& m, std::mt19937_64& rng) {
  if (m.kind == ModelKind::kAffineGroup) {
    std::uniform_real_distribution<double> la(-1.5, 1.5), ub(-2.0, 2.0);
    return Element{m, {std::exp(la(rng)), ub(rng)}};
  }
  std::uniform_int_distribution<int> idx(0, m.n - 1), zdx(0, m.m_z - 1);
  switch (m.kind) {
    case ModelKind::kPairCircle: return element_from_indices(m, {idx(rng), idx(rng)});
    case ModelKind::kCircleGroup: return element_from_indices(m, {idx(rng)});
    default: return element_from_indices(m, {idx(rng), idx(rng), zdx(rng)});
  }
}

/// A random element composable on the right of g (s(g) == r(result)).
inline Element random_composable_after(const Element& g, std::mt19937_64& rng) {
  const auto& m = g.model;
  Element h = random_element(m, rng);
  switch (m.kind) {
    case ModelKind::kPairCircle: h.coords[0] = g.coords[1]; break;
    case ModelKind::kPairTimesZ:
      h.coords[0] = g.coords[1];
      h.coords[2] = g.coords[2];
      break;
    default: break;
  }
  return h;
}

}  // namespace grpd
