#pragma once

#include <random>

#include "dgbo/fft.hpp"
#include "dgbo/grid.hpp"

namespace dgbo {

/// Random real trigonometric polynomial with standard-normal coefficients on |m| <= max_mode.
/// Coefficients are drawn in the order m = 0, 1, ..., so one seed gives the same continuum
/// function on any grid of the same length that resolves max_mode.
inline RealField random_band_limited(const Grid& g, long max_mode, std::mt19937_64& rng, bool zero_mean = false) {
  require(max_mode >= 0 && max_mode < static_cast<long>(g.size() / 2), "random_band_limited: max_mode must be below N/2");
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralField s(g);
  for (long m = 0; m <= max_mode; ++m) {
    if (m == 0) {
      const double c0 = normal(rng);
      s.coefficient(0) = zero_mean ? Complex{} : Complex(c0, 0.0);
      continue;
    }
    const Complex c(normal(rng), normal(rng));
    s.coefficient(m) = c;
    s.coefficient(-m) = std::conj(c);
  }
  return fft::to_real(s);
}

}  // namespace dgbo
