#pragma once

// Thin FFTW3 wrapper. Planning is serialized (the FFTW planner is not
// thread-safe); execution on private buffers may run concurrently.

#include <complex>
#include <cstring>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace grpd {

using cd = std::complex<double>;

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace detail

/// In-place unnormalized DFT of a row-major array with the given dims.
/// sign = -1 is the forward transform sum f(x) e^{-2 pi i k x / n}.
inline void dft_inplace(std::vector<cd>& data, const std::vector<int>& dims, int sign) {
  std::size_t total = 1;
  for (int d : dims) total *= static_cast<std::size_t>(d);
  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total));
  std::memcpy(buf, data.data(), sizeof(fftw_complex) * total);
  fftw_plan plan;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf,
                         sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::memcpy(data.data(), buf, sizeof(fftw_complex) * total);
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(buf);
}

inline std::vector<cd> dft(std::vector<cd> data, const std::vector<int>& dims, int sign = -1) {
  dft_inplace(data, dims, sign);
  return data;
}

}  // namespace grpd
