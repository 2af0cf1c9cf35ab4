#pragma once

// Sixth-order central differences on a periodic grid of resolution n.
// A stencil is a list of (offset, weight) pairs: (S f)(i) = sum_m w_m f(i + m).

#include <map>
#include <utility>
#include <vector>

#include "grpd/errors.hpp"

namespace grpd {

inline constexpr int kMaxFiberOrder = 4;

using Stencil = std::vector<std::pair<int, double>>;

/// Stencil of the first derivative d/dt with t = i / n.
inline Stencil derivative_stencil(int n) {
  const double s = static_cast<double>(n) / 60.0;
  return {{-3, -1.0 * s}, {-2, 9.0 * s}, {-1, -45.0 * s}, {1, 45.0 * s}, {2, -9.0 * s}, {3, 1.0 * s}};
}

inline Stencil compose(const Stencil& a, const Stencil& b) {
  std::map<int, double> acc;
  for (const auto& [ia, wa] : a)
    for (const auto& [ib, wb] : b) acc[ia + ib] += wa * wb;
  Stencil out;
  for (const auto& [i, w] : acc)
    if (w != 0.0) out.emplace_back(i, w);
  return out;
}

/// Stencil of (-D)^k. k = 0 is the identity {(0, 1)}.
inline Stencil fiber_stencil(int n, int k) {
  if (k < 0) throw DomainError("negative fiber order");
  Stencil minus_d = derivative_stencil(n);
  for (auto& p : minus_d) p.second = -p.second;
  Stencil out{{0, 1.0}};
  for (int i = 0; i < k; ++i) out = compose(out, minus_d);
  return out;
}

/// Cached stencils for orders 0..2*kMaxFiberOrder at a fixed n.
class StencilTable {
 public:
  explicit StencilTable(int n) : n_(n) {
    for (int k = 0; k <= 2 * kMaxFiberOrder; ++k) table_.push_back(fiber_stencil(n, k));
  }
  const Stencil& operator()(int k) const {
    if (k < 0 || k >= static_cast<int>(table_.size())) throw OrderCapError("fiber order out of range");
    return table_[k];
  }
  int n() const { return n_; }

 private:
  int n_;
  std::vector<Stencil> table_;
};

}  // namespace grpd
