#pragma once

#include <fftw3.h>

#include <cstddef>
#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "dgbo/grid.hpp"

namespace dgbo::fft {

namespace detail {

enum class Kind { r2c, c2r, c2c_backward };

// SIMD-aligned staging arrays. Every transform runs through these, so the same codelets are
// used no matter how the caller's storage happens to be aligned.
struct Buffers {
  explicit Buffers(std::size_t n) : size(n), real(fftw_alloc_real(n)), complex(fftw_alloc_complex(n)) {}
  ~Buffers() {
    fftw_free(real);
    fftw_free(complex);
  }
  Buffers(const Buffers&) = delete;
  Buffers& operator=(const Buffers&) = delete;
  std::size_t size;
  double* real;
  fftw_complex* complex;
};

inline Buffers& buffers(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<Buffers>> pool;
  auto& slot = pool[n];
  if (!slot) slot = std::make_unique<Buffers>(n);
  return *slot;
}

// FFTW's planner is not thread-safe; execution through the new-array API is.
// Plans are created once per (N, kind) and never destroyed.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  // FFTW_ESTIMATE keeps plan selection deterministic, so repeated runs are bit-identical.
  fftw_plan get(std::size_t n, Kind kind) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, kind);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    Buffers b(n);
    const int ni = static_cast<int>(n);
    fftw_plan p = nullptr;
    switch (kind) {
      case Kind::r2c:
        p = fftw_plan_dft_r2c_1d(ni, b.real, b.complex, FFTW_ESTIMATE);
        break;
      case Kind::c2r:
        p = fftw_plan_dft_c2r_1d(ni, b.complex, b.real, FFTW_ESTIMATE);
        break;
      case Kind::c2c_backward:
        p = fftw_plan_dft_1d(ni, b.complex, b.complex, FFTW_BACKWARD, FFTW_ESTIMATE);
        break;
    }
    plans_.emplace(key, p);
    return p;
  }

 private:
  PlanCache() = default;
  std::mutex mutex_;
  std::map<std::pair<std::size_t, Kind>, fftw_plan> plans_;
};

}  // namespace detail

/// Number of non-redundant coefficients of a real transform of length n.
inline std::size_t half_size(std::size_t n) { return n / 2 + 1; }

/// Normalized forward transform of real samples into modes m = 0..N/2.
inline void forward(std::span<const double> in, std::span<Complex> out) {
  const std::size_t n = in.size();
  require(out.size() == half_size(n), "fft::forward: output must hold N/2+1 coefficients");
  fftw_plan p = detail::PlanCache::instance().get(n, detail::Kind::r2c);
  auto& b = detail::buffers(n);
  std::copy(in.begin(), in.end(), b.real);
  fftw_execute_dft_r2c(p, b.real, b.complex);
  const auto* res = reinterpret_cast<const Complex*>(b.complex);
  std::copy(res, res + out.size(), out.begin());
  const double scale = 1.0 / static_cast<double>(n);
  for (auto& c : out) c *= scale;
}

/// Inverse of forward(). The input is staged first because c2r destroys its input array.
inline void inverse(std::span<const Complex> in, std::span<double> out) {
  const std::size_t n = out.size();
  require(in.size() == half_size(n), "fft::inverse: input must hold N/2+1 coefficients");
  fftw_plan p = detail::PlanCache::instance().get(n, detail::Kind::c2r);
  auto& b = detail::buffers(n);
  std::copy(in.begin(), in.end(), reinterpret_cast<Complex*>(b.complex));
  fftw_execute_dft_c2r(p, b.complex, b.real);
  std::copy(b.real, b.real + n, out.begin());
}

/// Full Hermitian spectrum of a real field, in FFT slot order.
inline SpectralField to_spectral(const RealField& u) {
  const std::size_t n = u.size();
  std::vector<Complex> half(half_size(n));
  forward(u.samples(), half);
  SpectralField out(u.grid());
  auto c = out.coefficients();
  for (std::size_t i = 0; i < half.size(); ++i) c[i] = half[i];
  for (std::size_t i = half.size(); i < n; ++i) c[i] = std::conj(half[n - i]);
  return out;
}

/// Real part of the inverse transform of a (nominally Hermitian) spectrum.
inline RealField to_real(const SpectralField& s) {
  const std::size_t n = s.size();
  fftw_plan p = detail::PlanCache::instance().get(n, detail::Kind::c2c_backward);
  auto& b = detail::buffers(n);
  auto* buf = reinterpret_cast<Complex*>(b.complex);
  std::copy(s.coefficients().begin(), s.coefficients().end(), buf);
  fftw_execute_dft(p, b.complex, b.complex);
  RealField out(s.grid());
  for (std::size_t j = 0; j < n; ++j) out[j] = buf[j].real();
  return out;
}

}  // namespace dgbo::fft
