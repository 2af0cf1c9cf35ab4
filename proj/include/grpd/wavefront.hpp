#pragma once

// Wave front estimation by windowed DFT decay.
//
// For each probe center the dense density is multiplied by a window, zero
// padded to twice the grid and transformed. Frequencies are grouped into
// direction sectors and dyadic shells; the log of the largest modulus per
// shell is fitted against the log shell radius. Directions whose fitted slope
// exceeds the threshold are reported as singular.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "grpd/cone.hpp"
#include "grpd/cone_algebra.hpp"
#include "grpd/convolution.hpp"
#include "grpd/distribution.hpp"
#include "grpd/errors.hpp"
#include "grpd/fft.hpp"
#include "grpd/parallel.hpp"

namespace grpd {

struct WfParams {
  double window_radius = 64.0;  // grid points
  double window_sigma = 12.0;   // Gaussian taper inside the bump, grid points
  int n_directions = 64;
  double sector_half_width = kPi / 64.0;
  double shell_lo = 16.0;  // cycles per unit
  double shell_hi = 64.0;
  double slope_threshold = -2.5;
  int probe_stride = 8;
  int pad = 2;
  double noise_floor = 1e-13;  // relative to the largest modulus of the patch
  double dynamic_range = 1e-6; // relative to the strongest outer shell

  static WfParams defaults(int n) {
    WfParams p;
    p.window_radius = n / 2.0;
    p.window_sigma = 3.0 * n / 32.0;
    p.n_directions = 64;
    p.sector_half_width = kPi / p.n_directions;
    p.shell_lo = n / 8.0;
    p.shell_hi = n / 2.0;
    p.probe_stride = std::max(1, n / 16);
    return p;
  }

  void validate() const {
    if (window_radius < 4.0) throw DomainError("window_radius must be >= 4");
    if (n_directions < 16) throw DomainError("n_directions must be >= 16");
    if (!(slope_threshold < 0.0)) throw DomainError("slope_threshold must be negative");
    if (probe_stride < 1 || pad < 1) throw DomainError("probe_stride and pad must be positive");
    if (!(shell_lo > 0.0) || shell_hi < 2.0 * shell_lo) throw DomainError("need at least one dyadic shell");
  }

  /// Dyadic shells [lo, 2 lo), [2 lo, 4 lo), ... inside [shell_lo, shell_hi].
  std::vector<std::pair<double, double>> shells() const {
    std::vector<std::pair<double, double>> s;
    for (double lo = shell_lo; 2.0 * lo <= shell_hi * (1.0 + 1e-12); lo *= 2.0) s.emplace_back(lo, 2.0 * lo);
    return s;
  }

  double angular_step() const { return kTwoPi / n_directions; }
};

struct SlopeRow {
  std::vector<int> center;  // grid indices
  int direction = 0;        // sector index; angle = direction * angular_step
  double slope = 0.0;
};

struct WfReport {
  ConeSet estimated;
  std::vector<SlopeRow> slopes;
  WfParams params;
};

namespace detail {

inline double bump(double t) { return std::abs(t) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - t * t)) : 0.0; }

inline int centered_offset(long long i, long long c, int n) { return wrap_index(i - c + n / 2, n) - n / 2; }

/// Sector and shell membership of every padded frequency.
struct SpectralBins {
  int size = 0;                      // padded length per axis
  std::vector<std::vector<int>> dirs;  // per frequency: sectors it belongs to
  std::vector<int> shell;            // per frequency: shell index or -1
};

inline SpectralBins make_bins(int n, int dim, const WfParams& p) {
  SpectralBins b;
  b.size = n * p.pad;
  const int big = b.size;
  const auto shells = p.shells();
  const double scale = static_cast<double>(n) / big;
  const auto freq = [&](int k) { return (k < big / 2 ? k : k - big) * scale; };
  const std::size_t total = dim == 2 ? static_cast<std::size_t>(big) * big : big;
  b.dirs.resize(total);
  b.shell.assign(total, -1);
  const double step = p.angular_step();
  for (std::size_t i = 0; i < total; ++i) {
    const double fx = dim == 2 ? freq(static_cast<int>(i / big)) : freq(static_cast<int>(i));
    const double fy = dim == 2 ? freq(static_cast<int>(i % big)) : 0.0;
    const double r = std::hypot(fx, fy);
    for (std::size_t s = 0; s < shells.size(); ++s)
      if (r >= shells[s].first && r < shells[s].second) b.shell[i] = static_cast<int>(s);
    if (b.shell[i] < 0) continue;
    if (dim == 1) {
      b.dirs[i] = {fx > 0.0 ? 0 : 1};
      continue;
    }
    const double a = wrap_angle(std::atan2(fy, fx));
    const int j0 = static_cast<int>(std::floor(a / step));
    for (int j : {j0 - 1, j0, j0 + 1, j0 + 2}) {
      const int jj = ((j % p.n_directions) + p.n_directions) % p.n_directions;
      const double d = std::abs(std::remainder(a - jj * step, kTwoPi));
      if (d <= p.sector_half_width + 1e-12 &&
          std::find(b.dirs[i].begin(), b.dirs[i].end(), jj) == b.dirs[i].end())
        b.dirs[i].push_back(jj);
    }
  }
  return b;
}

inline int direction_count(int dim, const WfParams& p) { return dim == 2 ? p.n_directions : 2; }

/// Fitted slopes for all directions at one center.
inline std::vector<double> center_slopes(const std::vector<cd>& dense, int n, int dim, const std::vector<int>& center,
                                         const WfParams& p, const SpectralBins& bins) {
  const int big = bins.size;
  const std::size_t total = dim == 2 ? static_cast<std::size_t>(big) * big : big;
  std::vector<cd> buf(total);
  // Window recentered so the patch does not straddle the torus seam.
  const double two_s2 = 2.0 * p.window_sigma * p.window_sigma;
  if (dim == 2) {
    for (int x = 0; x < n; ++x) {
      const int dx = centered_offset(x, center[0], n);
      for (int y = 0; y < n; ++y) {
        const int dy = centered_offset(y, center[1], n);
        const double r = std::hypot(dx, dy);
        const double w = bump(r / p.window_radius) * std::exp(-r * r / two_s2);
        if (w == 0.0) continue;
        buf[static_cast<std::size_t>(wrap_index(dx, big)) * big + wrap_index(dy, big)] = w * dense[pidx(n, x, y)];
      }
    }
  } else {
    for (int x = 0; x < n; ++x) {
      const int dx = centered_offset(x, center[0], n);
      const double r = std::abs(dx);
      const double w = bump(r / p.window_radius) * std::exp(-r * r / two_s2);
      buf[wrap_index(dx, big)] = w * dense[x];
    }
  }
  if (dim == 2)
    dft_inplace(buf, {big, big}, -1);
  else
    dft_inplace(buf, {big}, -1);

  const auto shells = p.shells();
  const int nd = direction_count(dim, p);
  std::vector<double> ymax(static_cast<std::size_t>(nd) * shells.size(), 0.0);
  double fmax = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    const double a = std::abs(buf[i]);
    fmax = std::max(fmax, a);
    if (bins.shell[i] < 0) continue;
    for (int j : bins.dirs[i]) {
      double& slot = ymax[static_cast<std::size_t>(j) * shells.size() + bins.shell[i]];
      slot = std::max(slot, a);
    }
  }
  const double floor = p.noise_floor * fmax;
  const std::size_t last = shells.size() - 1;
  double top = 0.0;
  for (int j = 0; j < nd; ++j) top = std::max(top, ymax[j * shells.size() + last]);

  std::vector<double> xs;
  for (const auto& [lo, hi] : shells) xs.push_back(std::log(std::sqrt(lo * hi)));
  const double xm = [&] {
    double s = 0.0;
    for (double v : xs) s += v;
    return s / xs.size();
  }();
  std::vector<double> out(nd);
  for (int j = 0; j < nd; ++j) {
    const double* y = &ymax[j * shells.size()];
    if (y[last] <= std::max(floor, p.dynamic_range * top) || y[last] == 0.0) {
      out[j] = -std::numeric_limits<double>::infinity();
      continue;
    }
    double ym = 0.0;
    for (std::size_t s = 0; s < shells.size(); ++s) ym += std::log(std::max(y[s], floor));
    ym /= shells.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t s = 0; s < shells.size(); ++s) {
      sxy += (xs[s] - xm) * (std::log(std::max(y[s], floor)) - ym);
      sxx += (xs[s] - xm) * (xs[s] - xm);
    }
    out[j] = sxy / sxx;
  }
  return out;
}

inline int grid_dim_for_estimator(const GroupoidModel& m) {
  switch (m.kind) {
    case ModelKind::kPairCircle: return 2;
    case ModelKind::kCircleGroup: return 1;
    case ModelKind::kAffineGroup: throw UnsupportedError("the affine group is continuous; no estimator");
    case ModelKind::kPairTimesZ: break;
  }
  throw UnsupportedError("the estimator covers PAIR_CIRCLE and CIRCLE_GROUP");
}

/// Arcs for singular sectors, consecutive sectors merged.
inline std::vector<Arc> sector_arcs(const std::vector<bool>& hit, const WfParams& p, int dim) {
  std::vector<Arc> arcs;
  if (dim == 1) {
    if (hit[0]) arcs.push_back(Arc::point(0.0));
    if (hit[1]) arcs.push_back(Arc::point(kPi));
    return arcs;
  }
  const int nd = p.n_directions;
  if (std::all_of(hit.begin(), hit.end(), [](bool b) { return b; })) return {Arc::full()};
  const double step = p.angular_step();
  int start = 0;
  while (hit[start]) ++start;  // start at a gap so runs do not wrap
  for (int k = 1; k <= nd; ++k) {
    const int j = (start + k) % nd;
    if (!hit[j]) continue;
    int len = 1;
    while (k + len <= nd && hit[(start + k + len) % nd]) ++len;
    arcs.push_back(Arc::from_bounds(j * step - step / 2.0, (j + len - 1) * step + step / 2.0));
    k += len - 1;
  }
  return arcs;
}

}  // namespace detail

inline std::vector<std::vector<int>> probe_centers(const GroupoidModel& m, const WfParams& p) {
  const int dim = detail::grid_dim_for_estimator(m);
  std::vector<std::vector<int>> out;
  for (int x = 0; x < m.n; x += p.probe_stride) {
    if (dim == 1) {
      out.push_back({x});
      continue;
    }
    for (int y = 0; y < m.n; y += p.probe_stride) out.push_back({x, y});
  }
  return out;
}

inline WfReport estimate_wavefront(const Distribution& u, const WfParams& p) {
  p.validate();
  const auto& m = u.model;
  const int dim = detail::grid_dim_for_estimator(m);
  const int n = m.n;
  const auto dense = to_dense(u);
  const auto bins = detail::make_bins(n, dim, p);
  const auto centers = probe_centers(m, p);
  std::vector<std::vector<double>> slopes(centers.size());
  parallel_for(centers.size(), [&](std::size_t i) {
    slopes[i] = detail::center_slopes(dense, n, dim, centers[i], p, bins);
  });

  WfReport rep{ConeSet{m, {}}, {}, p};
  const int nd = detail::direction_count(dim, p);
  const double half_box = p.window_radius / n;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    std::vector<bool> hit(nd);
    for (int j = 0; j < nd; ++j) {
      rep.slopes.push_back(SlopeRow{centers[i], j, slopes[i][j]});
      hit[j] = slopes[i][j] > p.slope_threshold;
    }
    auto arcs = detail::sector_arcs(hit, p, dim);
    if (arcs.empty()) continue;
    ConeCell c;
    for (int k : centers[i]) {
      const double x = circle_coord(k, n);
      c.base_box.push_back(CircleInterval::from_bounds(x - half_box, x + half_box));
    }
    c.arcs = std::move(arcs);
    rep.estimated.cells.push_back(std::move(c));
  }
  return rep;
}

inline WfReport estimate_wavefront(const Distribution& u) { return estimate_wavefront(u, WfParams::defaults(u.model.n)); }

/// Fitted slope for one center (grid indices) and one direction sector. On
/// CIRCLE_GROUP the sectors are 0 (positive) and 1 (negative frequencies).
inline double decay_slope(const Distribution& u, const std::vector<int>& center, int direction, const WfParams& p) {
  p.validate();
  const auto& m = u.model;
  const int dim = detail::grid_dim_for_estimator(m);
  if (static_cast<int>(center.size()) != dim) throw DomainError("decay_slope: center has the wrong rank");
  if (direction < 0 || direction >= detail::direction_count(dim, p)) throw DomainError("decay_slope: bad direction");
  const auto bins = detail::make_bins(m.n, dim, p);
  return detail::center_slopes(to_dense(u), m.n, dim, center, p, bins)[direction];
}

/// Sector index nearest to a covector direction angle.
inline int direction_index(double angle, const WfParams& p) {
  const double step = p.angular_step();
  return static_cast<int>(std::lround(wrap_angle(angle) / step)) % p.n_directions;
}

// ---------------------------------------------------------------------------

struct ProductBoundReport {
  bool pass = false;
  std::string route;  // "structural" or "gated"
  Distribution product;
  WfReport estimate;
  ConeSet predicted_bar;
  ConeSet predicted_plain;
  double product_max_norm = 0.0;
};

inline constexpr double kProductAngularTol = kPi / 18.0;
inline constexpr double kProductBaseTol = 2.0;

inline ProductBoundReport verify_product_bound(const Distribution& u1, const Distribution& u2, const ConeSet& w1,
                                               const ConeSet& w2, const WfParams& p) {
  require_same_model(u1.model, u2.model);
  ProductBoundReport rep;
  if (u1.s_transversal || u2.r_transversal) {
    rep.route = "structural";
    rep.product = convolve(u1, u2);
  } else {
    rep.route = "gated";
    rep.product = convolve_gated(u1, u2, w1, w2).result;
  }
  for (const auto& v : to_dense(rep.product)) rep.product_max_norm = std::max(rep.product_max_norm, std::abs(v));
  rep.estimate = estimate_wavefront(rep.product, p);
  rep.predicted_bar = cone_product_bar(w1, w2);
  rep.predicted_plain = cone_product(w1, w2);
  rep.pass = cone_contains(rep.estimate.estimated, rep.predicted_bar, kProductAngularTol, kProductBaseTol);
  return rep;
}

}  // namespace grpd
