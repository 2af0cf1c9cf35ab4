#pragma once

// The cotangent groupoid T*G => A*G of each model, in the global coordinate
// trivialization of T*G. Covectors have the same length as the coordinates
// of the base element.

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "grpd/errors.hpp"
#include "grpd/groupoid.hpp"

namespace grpd {

inline constexpr double kCovectorTol = 1e-9;

struct CotangentPoint {
  Element base;
  std::vector<double> xi;
};

/// A point of A*G. PAIR_CIRCLE stores (xi, -xi), PAIR_TIMES_Z (xi, -xi, 0),
/// CIRCLE_GROUP (xi), AFFINE_GROUP a covector at the identity.
struct CotangentUnit {
  Unit unit;
  std::vector<double> xi;
};

struct CotangentAnchors {
  CotangentUnit src;
  CotangentUnit tgt;
};

inline CotangentPoint make_cotangent(const Element& g, std::vector<double> xi) {
  validate(g);
  detail::check_length(xi.size(), g.model.dim(), "covector");
  return CotangentPoint{g, std::move(xi)};
}

namespace detail {

/// dL_g|e and dR_g|e transposed, applied to a covector at g (affine group).
inline std::array<double, 2> affine_lstar(double a, double /*b*/, const std::vector<double>& xi) {
  return {a * xi[0], a * xi[1]};
}

inline std::array<double, 2> affine_rstar(double a, double b, const std::vector<double>& xi) {
  return {a * xi[0] + b * xi[1], xi[1]};
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return a.size() == b.size() ? m : INFINITY;
}

}  // namespace detail

inline CotangentAnchors ct_anchor_maps(const CotangentPoint& d) {
  const Anchors an = anchor_maps(d.base);
  detail::check_length(d.xi.size(), d.base.model.dim(), "covector");
  const auto& xi = d.xi;
  switch (d.base.model.kind) {
    case ModelKind::kPairCircle:
      return {{an.src, {-xi[1], xi[1]}}, {an.tgt, {xi[0], -xi[0]}}};
    case ModelKind::kCircleGroup:
      return {{an.src, {xi[0]}}, {an.tgt, {xi[0]}}};
    case ModelKind::kPairTimesZ:
      return {{an.src, {-xi[1], xi[1], 0.0}}, {an.tgt, {xi[0], -xi[0], 0.0}}};
    case ModelKind::kAffineGroup: {
      const double a = d.base.coords[0], b = d.base.coords[1];
      const auto l = detail::affine_lstar(a, b, xi);
      const auto r = detail::affine_rstar(a, b, xi);
      return {{an.src, {l[0], l[1]}}, {an.tgt, {r[0], r[1]}}};
    }
  }
  throw DomainError("bad model");
}

inline CotangentUnit ct_source(const CotangentPoint& d) { return ct_anchor_maps(d).src; }
inline CotangentUnit ct_target(const CotangentPoint& d) { return ct_anchor_maps(d).tgt; }

/// The unit of Gamma over a point of A*G.
inline CotangentPoint ct_unit_embed(const CotangentUnit& u) {
  return CotangentPoint{unit_embed(u.unit), u.xi};
}

inline bool ct_is_composable(const CotangentPoint& d1, const CotangentPoint& d2, double tol = kCovectorTol) {
  if (!is_composable(d1.base, d2.base)) return false;
  return detail::max_abs_diff(ct_source(d1).xi, ct_target(d2).xi) <= tol;
}

inline CotangentPoint ct_multiply(const CotangentPoint& d1, const CotangentPoint& d2, double tol = kCovectorTol) {
  if (!ct_is_composable(d1, d2, tol)) throw CompositionError("cotangent points are not composable");
  const Element g = multiply(d1.base, d2.base);
  const auto& x1 = d1.xi;
  const auto& x2 = d2.xi;
  switch (g.model.kind) {
    case ModelKind::kPairCircle: return {g, {x1[0], x2[1]}};
    case ModelKind::kCircleGroup: return {g, {x1[0]}};
    case ModelKind::kPairTimesZ: return {g, {x1[0], x2[1], x1[2] + x2[2]}};
    case ModelKind::kAffineGroup: {
      // Solve xi o dm(t1, t2) = xi1(t1) + xi2(t2); the t1 part gives
      // xi1 = R_{g2}^* xi with R_{g2} linear in h.
      const double a2 = d2.base.coords[0], b2 = d2.base.coords[1];
      return {g, {(x1[0] - b2 * x1[1]) / a2, x1[1]}};
    }
  }
  throw DomainError("bad model");
}

inline CotangentPoint ct_invert(const CotangentPoint& d) {
  const Element gi = invert(d.base);
  const auto& xi = d.xi;
  switch (gi.model.kind) {
    case ModelKind::kPairCircle: return {gi, {-xi[1], -xi[0]}};
    case ModelKind::kCircleGroup: return {gi, {xi[0]}};
    case ModelKind::kPairTimesZ: return {gi, {-xi[1], -xi[0], -xi[2]}};
    case ModelKind::kAffineGroup: {
      const double a = d.base.coords[0], b = d.base.coords[1];
      return {gi, {a * a * xi[0] + a * b * xi[1], a * xi[1]}};
    }
  }
  throw DomainError("bad model");
}

/// Random covector over a random element, entries N(0, 1).
inline CotangentPoint random_cotangent(const GroupoidModel& m, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Element g = random_element(m, rng);
  std::vector<double> xi(m.dim());
  for (double& v : xi) v = nd(rng);
  return CotangentPoint{std::move(g), std::move(xi)};
}

/// Random d2 with (d, d2) composable in the cotangent groupoid.
inline CotangentPoint random_ct_composable_after(const CotangentPoint& d, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Element g2 = random_composable_after(d.base, rng);
  const auto t = ct_source(d).xi;
  std::vector<double> xi(g2.model.dim());
  for (double& v : xi) v = nd(rng);
  switch (g2.model.kind) {
    case ModelKind::kPairCircle:
    case ModelKind::kPairTimesZ: xi[0] = t[0]; break;
    case ModelKind::kCircleGroup: xi[0] = t[0]; break;
    case ModelKind::kAffineGroup: {
      const double a2 = g2.coords[0], b2 = g2.coords[1];
      xi = {(t[0] - b2 * t[1]) / a2, t[1]};
      break;
    }
  }
  return CotangentPoint{std::move(g2), std::move(xi)};
}

enum class KernelKind { kKerS, kKerR };

inline bool is_zero_covector(const std::vector<double>& xi, double tol = 0.0) {
  for (double v : xi)
    if (std::abs(v) > tol) return false;
  return true;
}

/// Membership in ker s_Gamma or ker r_Gamma (exact, tol = 0 by default).
inline bool in_kernel(const CotangentPoint& d, KernelKind which, double tol = 0.0) {
  const auto an = ct_anchor_maps(d);
  return is_zero_covector(which == KernelKind::kKerS ? an.src.xi : an.tgt.xi, tol);
}

/// Membership of a composable pair in ker m_Gamma.
inline bool in_kernel_m(const CotangentPoint& d1, const CotangentPoint& d2, double tol = 0.0) {
  if (!ct_is_composable(d1, d2, tol > 0.0 ? tol : kCovectorTol)) return false;
  return is_zero_covector(ct_multiply(d1, d2, tol > 0.0 ? tol : kCovectorTol).xi, tol);
}

// ---------------------------------------------------------------------------
// Transformation groupoid G x g* for Lie groups.

struct PhiPoint {
  Element g;
  std::vector<double> zeta;
};

inline PhiPoint transformation_iso_phi(const CotangentPoint& d) {
  switch (d.base.model.kind) {
    case ModelKind::kCircleGroup: validate(d.base); return {d.base, d.xi};
    case ModelKind::kAffineGroup: return {d.base, ct_target(d).xi};
    default: throw UnsupportedError("transformation_iso_phi needs a Lie group model");
  }
}

inline CotangentPoint transformation_iso_phi_inverse(const PhiPoint& p) {
  switch (p.g.model.kind) {
    case ModelKind::kCircleGroup: return {p.g, p.zeta};
    case ModelKind::kAffineGroup: {
      const double a = p.g.coords[0], b = p.g.coords[1];
      return {p.g, {(p.zeta[0] - b * p.zeta[1]) / a, p.zeta[1]}};
    }
    default: throw UnsupportedError("transformation_iso_phi needs a Lie group model");
  }
}

/// Coadjoint action Ad*_g = L_g^* o (R_g^*)^{-1} on g*.
inline std::vector<double> coadjoint(const Element& g, const std::vector<double>& zeta) {
  switch (g.model.kind) {
    case ModelKind::kCircleGroup: return zeta;
    case ModelKind::kAffineGroup: {
      const double a = g.coords[0], b = g.coords[1];
      const std::vector<double> xi{(zeta[0] - b * zeta[1]) / a, zeta[1]};
      const auto l = detail::affine_lstar(a, b, xi);
      return {l[0], l[1]};
    }
    default: throw UnsupportedError("coadjoint needs a Lie group model");
  }
}

/// (g1, z1)(g2, Ad*_{g1} z1) = (g1 g2, z1).
inline PhiPoint transformation_multiply(const PhiPoint& p1, const PhiPoint& p2, double tol = kCovectorTol) {
  if (detail::max_abs_diff(coadjoint(p1.g, p1.zeta), p2.zeta) > tol)
    throw CompositionError("transformation groupoid pair is not composable");
  return {multiply(p1.g, p2.g), p1.zeta};
}

}  // namespace grpd
