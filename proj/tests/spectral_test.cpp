#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "dgbo/spectral.hpp"
#include "test_support.hpp"

using namespace dgbo;
using dgbo::testing::random_band_limited;
using std::numbers::pi;

namespace {

const Grid kUnit(64, 2.0 * pi);

RealField sin_mode(const Grid& g, double k) {
  return RealField::from_function(g, [k](double x) { return std::sin(k * x); });
}

}  // namespace

TEST(GridTest, RejectsBadSizes) {
  EXPECT_THROW(Grid(15, 1.0), InvalidArgument);
  EXPECT_THROW(Grid(8, 1.0), InvalidArgument);
  EXPECT_THROW(Grid(64, 0.0), InvalidArgument);
  EXPECT_NO_THROW(Grid(16, 1.0));
}

TEST(GridTest, NodesAndWavenumbers) {
  Grid g(32, 10.0);
  EXPECT_DOUBLE_EQ(g.node(0), -5.0);
  EXPECT_DOUBLE_EQ(g.node(16), 0.0);
  EXPECT_EQ(g.mode(16), -16);
  EXPECT_EQ(g.mode(15), 15);
  EXPECT_DOUBLE_EQ(g.wavenumber(3), 2.0 * pi * 3.0 / 10.0);
}

TEST(SpectralTest, RoundTripAndHermitian) {
  std::mt19937_64 rng(7);
  Grid g(128, 30.0);
  RealField u(g);
  std::normal_distribution<double> nd;
  for (std::size_t j = 0; j < g.size(); ++j) u[j] = nd(rng);
  const SpectralField s = fft::to_spectral(u);
  EXPECT_LT(s.hermitian_defect(), 1e-15);
  const RealField back = fft::to_real(s);
  EXPECT_LE(max_abs_diff(back, u), 1e-12 * u.max_abs());
}

TEST(SpectralTest, Parseval) {
  std::mt19937_64 rng(11);
  Grid g(256, 17.0);
  RealField u(g);
  std::normal_distribution<double> nd;
  for (std::size_t j = 0; j < g.size(); ++j) u[j] = nd(rng);
  const double physical = inner(u, u);
  const double spectral = spectral_energy(fft::to_spectral(u));
  EXPECT_NEAR(spectral / physical, 1.0, 1e-12);
}

TEST(FractionalDerivativeTest, OrderZeroIsIdentity) {
  std::mt19937_64 rng(1);
  RealField u(kUnit);
  std::normal_distribution<double> nd;
  for (std::size_t j = 0; j < kUnit.size(); ++j) u[j] = nd(rng);
  const RealField d0 = fractional_derivative(u, 0.0);
  EXPECT_EQ(d0.values(), u.values());
}

TEST(FractionalDerivativeTest, SingleMode) {
  for (double s : {0.3, 0.5, 1.0, 1.5, 2.7}) {
    const RealField d = fractional_derivative(sin_mode(kUnit, 3.0), s);
    const RealField want = sin_mode(kUnit, 3.0) * std::pow(3.0, s);
    EXPECT_LE(max_abs_diff(d, want), 1e-12 * std::pow(3.0, s)) << "s=" << s;
  }
}

TEST(FractionalDerivativeTest, RejectsNegativeOrderAndNaN) {
  EXPECT_THROW(fractional_derivative(sin_mode(kUnit, 1.0), -0.5), InvalidArgument);
  RealField bad = sin_mode(kUnit, 1.0);
  bad[3] = std::nan("");
  EXPECT_THROW(fractional_derivative(bad, 1.0), InvalidArgument);
  EXPECT_THROW(hilbert(bad), InvalidArgument);
}

// Continuum D^1 of 4/(1+x^2): (1/2pi) int |k| 4 pi e^{-|k|} e^{ikx} dk = 4 int_0^inf k e^{-k} cos(kx) dk.
TEST(FractionalDerivativeTest, LorentzianAgainstQuadratureOracle) {
  auto oracle = [](double x) {
    auto f = [x](double k) { return 4.0 * k * std::exp(-k) * std::cos(k * x); };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-13);
  };
  auto closed = [](double x) { return 4.0 * (1.0 - x * x) / std::pow(1.0 + x * x, 2); };
  for (double x : {0.0, 0.5, 1.0, 2.0, 4.0}) EXPECT_NEAR(oracle(x), closed(x), 1e-10) << x;

  Grid g(8192, 400.0);
  const RealField q = RealField::from_function(g, [](double x) { return 4.0 / (1.0 + x * x); });
  const RealField dq = fractional_derivative(q, 1.0);
  double err = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double x = g.node(j);
    if (std::abs(x) <= 10.0) err = std::max(err, std::abs(dq[j] - closed(x)));
  }
  EXPECT_LE(err, 1e-3);
}

TEST(HilbertTest, CosineToSine) {
  const RealField c = RealField::from_function(kUnit, [](double x) { return std::cos(x); });
  EXPECT_LE(max_abs_diff(hilbert(c), sin_mode(kUnit, 1.0)), 1e-14);
}

TEST(HilbertTest, ConstantToZero) {
  const RealField c = RealField::from_function(kUnit, [](double) { return 2.5; });
  EXPECT_LE(hilbert(c).max_abs(), 1e-15);
}

TEST(HilbertTest, SquareIsMinusIdentityOnZeroMean) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const RealField u = random_band_limited(kUnit, 31, rng, /*zero_mean=*/true);
    const RealField hh = hilbert(hilbert(u));
    EXPECT_LE(max_abs_diff(hh, u * -1.0), 1e-12 * u.max_abs());
  }
}

TEST(DerivativeTest, Basics) {
  const RealField d = derivative(sin_mode(kUnit, 2.0));
  const RealField want = RealField::from_function(kUnit, [](double x) { return 2.0 * std::cos(2.0 * x); });
  EXPECT_LE(max_abs_diff(d, want), 1e-13);
  const RealField c = RealField::from_function(kUnit, [](double) { return -1.0; });
  EXPECT_LE(derivative(c).max_abs(), 1e-15);
}

TEST(DerivativeTest, FirstOrderDerivativeIsHilbertOfDerivative) {
  std::mt19937_64 rng(5);
  Grid g(128, 12.0);
  for (int trial = 0; trial < 10; ++trial) {
    RealField u(g);
    std::normal_distribution<double> nd;
    for (std::size_t j = 0; j < g.size(); ++j) u[j] = nd(rng);
    const RealField a = fractional_derivative(u, 1.0);
    const RealField b = hilbert(derivative(u));
    EXPECT_LE(max_abs_diff(a, b), 1e-12 * std::max(1.0, a.max_abs()));
  }
}

TEST(MultiplierProperties, PairwiseCommute) {
  std::mt19937_64 rng(9);
  Grid g(128, 20.0);
  for (int trial = 0; trial < 10; ++trial) {
    const RealField u = random_band_limited(g, 40, rng);
    const double scale = std::max(1.0, fractional_derivative(derivative(u), 0.7).max_abs());
    EXPECT_LE(max_abs_diff(hilbert(derivative(u)), derivative(hilbert(u))), 1e-12 * scale);
    EXPECT_LE(max_abs_diff(hilbert(fractional_derivative(u, 0.7)), fractional_derivative(hilbert(u), 0.7)), 1e-12 * scale);
    EXPECT_LE(max_abs_diff(derivative(fractional_derivative(u, 0.7)), fractional_derivative(derivative(u), 0.7)), 1e-12 * scale);
  }
}

TEST(MultiplierProperties, OrdersAdd) {
  std::mt19937_64 rng(13);
  Grid g(128, 20.0);
  for (auto [s1, s2] : {std::pair{0.25, 0.5}, {0.75, 1.25}, {1.0, 1.5}}) {
    const RealField u = random_band_limited(g, 40, rng, true);
    const RealField once = fractional_derivative(u, s1 + s2);
    const RealField twice = fractional_derivative(fractional_derivative(u, s1), s2);
    EXPECT_LE(max_abs_diff(once, twice), 1e-10 * once.max_abs());
  }
}

TEST(DealiasTest, BandLimitedUnchanged) {
  std::mt19937_64 rng(17);
  const SpectralField s = fft::to_spectral(random_band_limited(kUnit, dealias_cutoff(64), rng));
  const SpectralField d = dealias(s);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_LE(std::abs(d.coefficients()[i] - s.coefficients()[i]), 1e-14);
}

TEST(DealiasTest, TopModeRemoved) {
  const RealField u = RealField::from_function(kUnit, [](double x) { return std::cos(31.0 * x); });
  EXPECT_LE(dealias(u).max_abs(), 1e-13);
  EXPECT_LE(fft::to_real(dealias(fft::to_spectral(u))).max_abs(), 1e-13);
}

// Oracle: direct convolution of the coefficient sequences, truncated to |m| <= N/3.
TEST(DealiasTest, ProductMatchesDirectConvolution) {
  std::mt19937_64 rng(19);
  for (std::size_t n : {32u, 48u, 64u}) {
    Grid g(n, 2.0 * pi);
    const long cut = dealias_cutoff(n);
    const RealField a = random_band_limited(g, cut, rng);
    const RealField b = random_band_limited(g, cut, rng);
    const SpectralField ah = fft::to_spectral(a), bh = fft::to_spectral(b);
    const SpectralField got = fft::to_spectral(dealiased_product(a, b));
    double err = 0.0;
    for (long m = -cut; m <= cut; ++m) {
      Complex want{};
      for (long p = -cut; p <= cut; ++p) {
        const long q = m - p;
        if (std::labs(q) <= cut) want += ah.coefficient(p) * bh.coefficient(q);
      }
      err = std::max(err, std::abs(got.coefficient(m) - want));
    }
    for (long m = -static_cast<long>(n / 2); m < static_cast<long>(n / 2); ++m)
      if (std::labs(m) > cut) err = std::max(err, std::abs(got.coefficient(m)));
    EXPECT_LE(err, 1e-12) << "N=" << n;
  }
}

TEST(ShiftTest, IntegerGridShiftIsExactRoll) {
  std::mt19937_64 rng(23);
  Grid g(64, 8.0);
  const RealField u = random_band_limited(g, 20, rng);
  const RealField s = shift(u, 3 * g.spacing());
  for (std::size_t j = 0; j < g.size(); ++j) EXPECT_NEAR(s[(j + 3) % g.size()], u[j], 1e-12);
}
