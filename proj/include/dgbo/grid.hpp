#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dgbo/errors.hpp"

namespace dgbo {

using Complex = std::complex<double>;

/// Uniform periodic grid on [-L/2, L/2).
class Grid {
 public:
  Grid(std::size_t n_points, double length) : n_(n_points), length_(length) {
    require(n_points >= 16 && n_points % 2 == 0,
            "Grid: n_points must be even and >= 16, got " + std::to_string(n_points));
    require(std::isfinite(length) && length > 0.0, "Grid: length must be positive and finite");
  }

  std::size_t size() const { return n_; }
  double length() const { return length_; }
  double spacing() const { return length_ / static_cast<double>(n_); }

  double node(std::size_t j) const { return -0.5 * length_ + static_cast<double>(j) * spacing(); }

  std::vector<double> nodes() const {
    std::vector<double> x(n_);
    for (std::size_t j = 0; j < n_; ++j) x[j] = node(j);
    return x;
  }

  /// Signed mode index for FFT slot i: 0..N/2-1 then -N/2..-1.
  long mode(std::size_t i) const {
    const long n = static_cast<long>(n_);
    const long m = static_cast<long>(i);
    return m < n / 2 ? m : m - n;
  }

  /// FFT slot for signed mode m in [-N/2, N/2).
  std::size_t slot(long m) const {
    const long n = static_cast<long>(n_);
    require(m >= -n / 2 && m < n / 2, "Grid::slot: mode out of range");
    return static_cast<std::size_t>(m >= 0 ? m : m + n);
  }

  /// Angular wavenumber 2 pi m / L for mode m.
  double wavenumber(long m) const { return 2.0 * std::numbers::pi * static_cast<double>(m) / length_; }

  bool is_nyquist(long m) const { return m == -static_cast<long>(n_ / 2); }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t n_;
  double length_;
};

/// Samples of a real function on a Grid.
class RealField {
 public:
  explicit RealField(Grid grid) : grid_(std::move(grid)), samples_(grid_.size(), 0.0) {}

  RealField(Grid grid, std::vector<double> samples) : grid_(std::move(grid)), samples_(std::move(samples)) {
    require(samples_.size() == grid_.size(), "RealField: sample count does not match grid");
  }

  template <typename F>
  static RealField from_function(const Grid& grid, F&& f) {
    RealField out(grid);
    for (std::size_t j = 0; j < grid.size(); ++j) out.samples_[j] = f(grid.node(j));
    return out;
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return samples_.size(); }
  std::span<const double> samples() const { return samples_; }
  std::span<double> samples() { return samples_; }
  const std::vector<double>& values() const { return samples_; }

  double operator[](std::size_t j) const { return samples_[j]; }
  double& operator[](std::size_t j) { return samples_[j]; }

  bool all_finite() const {
    for (double v : samples_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : samples_) m = std::max(m, std::abs(v));
    return m;
  }

  RealField& operator+=(const RealField& o) {
    check_same(o);
    for (std::size_t j = 0; j < size(); ++j) samples_[j] += o.samples_[j];
    return *this;
  }
  RealField& operator-=(const RealField& o) {
    check_same(o);
    for (std::size_t j = 0; j < size(); ++j) samples_[j] -= o.samples_[j];
    return *this;
  }
  RealField& operator*=(double s) {
    for (double& v : samples_) v *= s;
    return *this;
  }

  friend RealField operator+(RealField a, const RealField& b) { return a += b; }
  friend RealField operator-(RealField a, const RealField& b) { return a -= b; }
  friend RealField operator*(RealField a, double s) { return a *= s; }
  friend RealField operator*(double s, RealField a) { return a *= s; }

  /// Pointwise product.
  friend RealField operator*(const RealField& a, const RealField& b) {
    a.check_same(b);
    RealField out(a.grid_);
    for (std::size_t j = 0; j < a.size(); ++j) out.samples_[j] = a.samples_[j] * b.samples_[j];
    return out;
  }

 private:
  void check_same(const RealField& o) const {
    require(grid_ == o.grid_, "RealField: fields live on different grids");
  }

  Grid grid_;
  std::vector<double> samples_;
};

/// Discrete Fourier coefficients u_hat_m = (1/N) sum_j u_j exp(-2 pi i j m / N), stored in FFT slot order.
class SpectralField {
 public:
  explicit SpectralField(Grid grid) : grid_(std::move(grid)), coeffs_(grid_.size(), Complex{}) {}

  SpectralField(Grid grid, std::vector<Complex> coeffs) : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
    require(coeffs_.size() == grid_.size(), "SpectralField: coefficient count does not match grid");
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return coeffs_.size(); }
  std::span<const Complex> coefficients() const { return coeffs_; }
  std::span<Complex> coefficients() { return coeffs_; }

  Complex coefficient(long m) const { return coeffs_[grid_.slot(m)]; }
  Complex& coefficient(long m) { return coeffs_[grid_.slot(m)]; }

  /// Largest |c(-m) - conj(c(m))| over modes with both partners on the grid.
  double hermitian_defect() const {
    const long half = static_cast<long>(grid_.size() / 2);
    double d = std::abs(coefficient(0).imag());
    for (long m = 1; m < half; ++m) d = std::max(d, std::abs(coefficient(-m) - std::conj(coefficient(m))));
    return d;
  }

 private:
  Grid grid_;
  std::vector<Complex> coeffs_;
};

/// Rectangle-rule integral of a grid function; spectrally accurate for smooth periodic integrands.
inline double integrate(const RealField& u) {
  double s = 0.0;
  for (double v : u.samples()) s += v;
  return s * u.grid().spacing();
}

/// Rectangle-rule inner product.
inline double inner(const RealField& a, const RealField& b) {
  require(a.grid() == b.grid(), "inner: fields live on different grids");
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s * a.grid().spacing();
}

inline double norm_l2(const RealField& u) { return std::sqrt(inner(u, u)); }

inline double norm_lp(const RealField& u, double p) {
  double s = 0.0;
  for (double v : u.samples()) s += std::pow(std::abs(v), p);
  return std::pow(s * u.grid().spacing(), 1.0 / p);
}

inline double norm_l1(const RealField& u) { return norm_lp(u, 1.0); }

inline double max_abs_diff(const RealField& a, const RealField& b) {
  require(a.size() == b.size(), "max_abs_diff: size mismatch");
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

}  // namespace dgbo
