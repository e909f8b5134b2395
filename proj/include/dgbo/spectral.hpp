#pragma once

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "dgbo/fft.hpp"
#include "dgbo/grid.hpp"

namespace dgbo {

namespace detail {

inline void require_finite(const RealField& u, const char* who) {
  if (!u.all_finite()) throw InvalidArgument(std::string(who) + ": field contains non-finite samples");
}

}  // namespace detail

/// Applies the Fourier multiplier `symbol(k)` to a real field. The symbol must satisfy
/// symbol(-k) = conj(symbol(k)); it is evaluated on m = 0..N/2-1 and the Nyquist mode is
/// dropped unless `keep_nyquist` is set (then the real part of the symbol is used there).
template <typename Symbol>
RealField apply_symbol(const RealField& u, Symbol&& symbol, bool keep_nyquist = false) {
  const Grid& g = u.grid();
  const std::size_t n = g.size();
  std::vector<Complex> half(fft::half_size(n));
  fft::forward(u.samples(), half);
  for (std::size_t m = 0; m < n / 2; ++m) half[m] *= symbol(g.wavenumber(static_cast<long>(m)));
  const double k_nyq = g.wavenumber(static_cast<long>(n / 2));
  half[n / 2] = keep_nyquist ? half[n / 2] * symbol(k_nyq).real() : Complex{};
  RealField out(g);
  fft::inverse(half, out.samples());
  return out;
}

/// D^s with symbol |k|^s; the zero mode is annihilated for s > 0 and s = 0 is the identity.
inline RealField fractional_derivative(const RealField& u, double s) {
  detail::require_finite(u, "fractional_derivative");
  require(std::isfinite(s) && s >= 0.0, "fractional_derivative: order must be >= 0 (inverse derivatives unsupported)");
  if (s == 0.0) return u;
  return apply_symbol(u, [s](double k) { return Complex(k == 0.0 ? 0.0 : std::pow(std::abs(k), s), 0.0); });
}

/// Hilbert transform, symbol -i sgn(k).
inline RealField hilbert(const RealField& u) {
  detail::require_finite(u, "hilbert");
  return apply_symbol(u, [](double k) {
    if (k == 0.0) return Complex{};
    return Complex(0.0, k > 0.0 ? -1.0 : 1.0);
  });
}

/// d/dx, symbol i k.
inline RealField derivative(const RealField& u) {
  detail::require_finite(u, "derivative");
  return apply_symbol(u, [](double k) { return Complex(0.0, k); });
}

/// j-th derivative, symbol (i k)^j.
inline RealField derivative(const RealField& u, int order) {
  detail::require_finite(u, "derivative");
  require(order >= 0, "derivative: order must be non-negative");
  if (order == 0) return u;
  return apply_symbol(u, [order](double k) { return std::pow(Complex(0.0, k), order); });
}

/// Translate: returns u(x - a).
inline RealField shift(const RealField& u, double a) {
  detail::require_finite(u, "shift");
  return apply_symbol(u, [a](double k) { return std::exp(Complex(0.0, -k * a)); }, true);
}

/// Largest retained |m| under the 2/3 rule: the largest m with 3m < N, so that aliases of a
/// quadratic product of retained modes always land on discarded modes.
inline long dealias_cutoff(std::size_t n) { return static_cast<long>((n - 1) / 3); }

/// Zeroes every coefficient above dealias_cutoff().
inline SpectralField dealias(SpectralField u_hat) {
  const Grid g = u_hat.grid();
  const long cut = dealias_cutoff(g.size());
  auto c = u_hat.coefficients();
  for (std::size_t i = 0; i < c.size(); ++i)
    if (std::labs(g.mode(i)) > cut) c[i] = Complex{};
  return u_hat;
}

/// Physical-space projection onto the retained modes.
inline RealField dealias(const RealField& u) {
  const Grid& g = u.grid();
  const double k_cut = g.wavenumber(dealias_cutoff(g.size()));
  return apply_symbol(u, [k_cut](double k) { return Complex(std::abs(k) <= k_cut * (1.0 + 1e-12) ? 1.0 : 0.0, 0.0); });
}

/// Pseudospectral product of two fields, dealiased.
inline RealField dealiased_product(const RealField& a, const RealField& b) { return dealias(a * b); }

/// L * sum_m |u_hat_m|^2, which equals the rectangle-rule integral of u^2.
inline double spectral_energy(const SpectralField& u_hat) {
  double s = 0.0;
  for (const auto& c : u_hat.coefficients()) s += std::norm(c);
  return s * u_hat.grid().length();
}

/// Sobolev norm (L sum_m (1 + k_m^2)^s |u_hat_m|^2)^(1/2).
inline double sobolev_norm(const RealField& u, double s) {
  const SpectralField u_hat = fft::to_spectral(u);
  const Grid& g = u.grid();
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double k = g.wavenumber(g.mode(i));
    acc += std::pow(1.0 + k * k, s) * std::norm(u_hat.coefficients()[i]);
  }
  return std::sqrt(acc * g.length());
}

}  // namespace dgbo
