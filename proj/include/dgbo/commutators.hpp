#pragma once

// Expansion of the commutator [H D^a, f] into local terms P_n plus a remainder R_n:
//   P_n(a) = a sum_{0<=j<=n} c_{2j+1} (-1)^j 4^{-j} D^{mu-j} f^{(2j+1)} D^{mu-j},  mu = (a-1)/2,
//   R_n(a) = -[H D^a, f] - (P_n(a) - H P_n(a) H) / 2.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "dgbo/errors.hpp"
#include "dgbo/fft.hpp"
#include "dgbo/grid.hpp"
#include "dgbo/spectral.hpp"
#include "dgbo/weights.hpp"

namespace dgbo {

/// c_1 = 1, c_{2j+1} = (1/(2j+1)!) prod_{0<=k<j} (a^2 - (2k+1)^2).
inline double commutator_coefficient(double a, int j) {
  require(j >= 0, "commutator_coefficient: j must be >= 0");
  double c = 1.0;
  for (int k = 0; k < j; ++k) c *= a * a - (2.0 * k + 1.0) * (2.0 * k + 1.0);
  for (int m = 2; m <= 2 * j + 1; ++m) c /= m;
  return c;
}

class CommutatorSpec {
 public:
  /// f is treated as periodic on its grid; its odd derivatives are taken spectrally.
  static CommutatorSpec periodic(RealField f, double order, int n, double sigma = 0.0) {
    CommutatorSpec s(std::move(f), order, n, sigma);
    for (int j = 0; j <= n; ++j) s.odd_derivatives_.push_back(derivative(s.f_, 2 * j + 1));
    return s;
  }

  /// f with caller-supplied odd derivatives f', f''', ..., f^{(2n+1)} (needed when f itself is
  /// not periodic on the grid, e.g. an antiderivative with a jump across the seam).
  static CommutatorSpec with_derivatives(RealField f, std::vector<RealField> odd_derivatives, double order, int n,
                                         double sigma = 0.0) {
    CommutatorSpec s(std::move(f), order, n, sigma);
    require(odd_derivatives.size() == static_cast<std::size_t>(n) + 1,
            "CommutatorSpec: need exactly n+1 odd derivatives");
    for (const auto& d : odd_derivatives) require(d.grid() == s.f_.grid(), "CommutatorSpec: derivative grid mismatch");
    s.odd_derivatives_ = std::move(odd_derivatives);
    return s;
  }

  double order() const { return order_; }
  int n() const { return n_; }
  double sigma() const { return sigma_; }
  double mu() const { return 0.5 * (order_ - 1.0); }
  const RealField& f() const { return f_; }
  const RealField& odd_derivative(int j) const { return odd_derivatives_.at(static_cast<std::size_t>(j)); }
  const Grid& grid() const { return f_.grid(); }

 private:
  CommutatorSpec(RealField f, double order, int n, double sigma) : f_(std::move(f)), order_(order), n_(n), sigma_(sigma) {
    require(std::isfinite(order) && order >= 1.0, "CommutatorSpec: order must be >= 1");
    require(n >= 0, "CommutatorSpec: n must be >= 0");
    require(std::isfinite(sigma) && sigma >= 0.0, "CommutatorSpec: sigma must be >= 0");
    const double s = order + 2.0 * sigma;
    require(2.0 * n + 1.0 <= s && s <= 2.0 * n + 3.0,
            "CommutatorSpec: need 2n+1 <= order + 2 sigma <= 2n+3, got order=" + std::to_string(order) +
                " sigma=" + std::to_string(sigma) + " n=" + std::to_string(n));
    require(mu() - n >= 0.0, "CommutatorSpec: mu - n < 0 would need a negative-order D");
    require(f_.all_finite(), "CommutatorSpec: weight has non-finite samples");
  }

  RealField f_;
  std::vector<RealField> odd_derivatives_;
  double order_;
  int n_;
  double sigma_;
};

/// H D^s.
inline RealField hilbert_derivative(const RealField& u, double s) { return hilbert(fractional_derivative(u, s)); }

/// [H D^a, f] h = H D^a (f h) - f H D^a h.
inline RealField apply_commutator(const CommutatorSpec& spec, const RealField& h) {
  return hilbert_derivative(spec.f() * h, spec.order()) - spec.f() * hilbert_derivative(h, spec.order());
}

inline RealField apply_P_n(const CommutatorSpec& spec, const RealField& h) {
  require(h.grid() == spec.grid(), "apply_P_n: grid mismatch");
  RealField out(h.grid());
  for (int j = 0; j <= spec.n(); ++j) {
    const double c = commutator_coefficient(spec.order(), j);
    if (c == 0.0) continue;
    const double s = spec.mu() - j;
    const double scale = spec.order() * c * ((j % 2) ? -1.0 : 1.0) * std::pow(4.0, -j);
    out += fractional_derivative(spec.odd_derivative(j) * fractional_derivative(h, s), s) * scale;
  }
  return out;
}

inline RealField apply_R_n(const CommutatorSpec& spec, const RealField& h) {
  require(h.grid() == spec.grid(), "apply_R_n: grid mismatch");
  const RealField p = apply_P_n(spec, h);
  const RealField hph = hilbert(apply_P_n(spec, hilbert(h)));
  return (p - hph) * -0.5 - apply_commutator(spec, h);
}

/// sum_m |g_m| for g = D^{order + 2 sigma} f: the discrete counterpart of
/// (2 pi)^{-1/2} || unitary transform of g ||_1.
inline double commutator_bound_rhs(const CommutatorSpec& spec) {
  const RealField g = fractional_derivative(spec.f(), spec.order() + 2.0 * spec.sigma());
  const SpectralField gh = fft::to_spectral(g);
  double s = 0.0;
  for (const auto& c : gh.coefficients()) s += std::abs(c);
  return s;
}

/// Continuum value of (2 pi)^{-1/2} || (D^{alpha+2} phi_alpha(./lambda))^ ||_1.
inline double phi_weight_bound_rhs(double alpha, double lambda) {
  return std::pow(2.0 * std::numbers::pi / lambda, alpha + 2.0) * weights::moment_integral(alpha) /
         (2.0 * std::numbers::pi);
}

struct A3Split {
  double a31 = 0.0;
  double a32 = 0.0;
  double a33 = 0.0;
  double direct = 0.0;  // -(prefactor/2) <u, [H D^{alpha+2}, f] u>
  double sum() const { return a31 + a32 + a33; }
  double closure_residual() const {
    const double scale = std::max({std::abs(a31), std::abs(a32), std::abs(a33), std::abs(direct)});
    return scale == 0.0 ? 0.0 : std::abs(sum() - direct) / scale;
  }
};

/// Splits -(prefactor/2) <u, [H D^{alpha+2}, phi_alpha(./lambda)] u> with n = 0. The weight is
/// multiplied pointwise on the grid and f' = phi_alpha'(x/lambda)/lambda is taken analytically.
inline A3Split step2_A3_decomposition(const RealField& u, const weights::WeightSpec& weight, double alpha,
                                      double prefactor, double tolerance = 1e-8) {
  require(std::abs(weight.alpha - alpha) < 1e-15, "step2_A3_decomposition: weight alpha differs from alpha");
  const Grid& g = u.grid();
  RealField fp = weight.sample_density(g);
  fp *= 1.0 / weight.scale;
  const auto spec = CommutatorSpec::with_derivatives(weight.sample_antiderivative(g), {fp}, alpha + 2.0, 0);

  A3Split r;
  r.a31 = 0.5 * prefactor * inner(u, apply_R_n(spec, u));
  const double mu = 0.5 * (alpha + 1.0);
  const RealField dmu = fractional_derivative(u, mu);
  const RealField hdmu = hilbert(dmu);
  r.a32 = prefactor * (alpha + 2.0) / 4.0 * inner(fp, dmu * dmu);
  r.a33 = prefactor * (alpha + 2.0) / 4.0 * inner(fp, hdmu * hdmu);
  r.direct = -0.5 * prefactor * inner(u, apply_commutator(spec, u));
  if (r.closure_residual() > tolerance)
    throw ConvergenceError("step2_A3_decomposition: identity closure failed, residual " +
                           std::to_string(r.closure_residual()));
  return r;
}

}  // namespace dgbo
