#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>

#include "dgbo/commutators.hpp"
#include "test_support.hpp"

using namespace dgbo;
using dgbo::testing::random_band_limited;
using std::numbers::pi;

namespace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Every operator below is materialized independently of the FFT path: a multiplier with symbol
// s(k) becomes M_{jl} = (1/N) sum_m s(k_m) e^{i k_m (x_j - x_l)}, Nyquist dropped.
Matrix multiplier_matrix(const Grid& g, const std::function<std::complex<double>(double)>& symbol) {
  const std::size_t n = g.size();
  Matrix m(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t l = 0; l < n; ++l) {
      std::complex<double> acc{};
      for (long q = -static_cast<long>(n / 2) + 1; q < static_cast<long>(n / 2); ++q) {
        const double k = g.wavenumber(q);
        acc += symbol(k) * std::exp(std::complex<double>(0.0, k * (g.node(j) - g.node(l))));
      }
      m(j, l) = acc.real() / static_cast<double>(n);
    }
  return m;
}

Matrix hilbert_matrix(const Grid& g) {
  return multiplier_matrix(g, [](double k) { return std::complex<double>(0.0, k > 0 ? -1.0 : (k < 0 ? 1.0 : 0.0)); });
}

Matrix power_matrix(const Grid& g, double s) {
  return multiplier_matrix(g, [s](double k) { return std::complex<double>(k == 0.0 ? 0.0 : std::pow(std::abs(k), s), 0.0); });
}

Matrix diagonal(const RealField& f) {
  Vector v(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) v(j) = f[j];
  return v.asDiagonal();
}

Vector to_vector(const RealField& f) {
  Vector v(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) v(j) = f[j];
  return v;
}

double max_diff(const RealField& got, const Vector& want) { return (to_vector(got) - want).cwiseAbs().maxCoeff(); }

// Dense R_n built straight from the defining formula.
Matrix dense_R(const Grid& g, const RealField& f, const std::vector<RealField>& odd, double a, int n) {
  const Matrix hm = hilbert_matrix(g);
  const Matrix hd = hm * power_matrix(g, a);
  const Matrix fm = diagonal(f);
  const double mu = 0.5 * (a - 1.0);
  Matrix p = Matrix::Zero(g.size(), g.size());
  for (int j = 0; j <= n; ++j) {
    double c = 1.0;
    for (int k = 0; k < j; ++k) c *= a * a - (2 * k + 1) * (2 * k + 1);
    double fact = 1.0;
    for (int m = 1; m <= 2 * j + 1; ++m) fact *= m;
    const Matrix dm = power_matrix(g, mu - j);
    p += a * (c / fact) * std::pow(-0.25, j) * dm * diagonal(odd[j]) * dm;
  }
  return -(hd * fm - fm * hd) - 0.5 * (p - hm * p * hm);
}

RealField periodized_gaussian(const Grid& g, double width) {
  return RealField::from_function(g, [&g, width](double x) {
    double s = 0.0;
    for (int r = -3; r <= 3; ++r) s += std::exp(-std::pow((x + r * g.length()) / width, 2));
    return s;
  });
}

// phi_alpha(x/lambda) minus the linear ramp that makes it L-periodic.
RealField periodic_phi_lift(const Grid& g, double alpha, double lambda) {
  const double half = 0.5 * g.length();
  const double jump = weights::phi(half / lambda, alpha) - weights::phi(-half / lambda, alpha);
  return RealField::from_function(g, [=](double x) { return weights::phi(x / lambda, alpha) - jump * (x + half) / (2 * half); });
}

// Continuum (2 pi)^{-1/2} || (D^a e^{-x^2/w^2})^ ||_1 in closed form.
double gaussian_bound_rhs(double a, double w) {
  // Transform in e^{-2 pi i x xi}: w sqrt(pi) e^{-pi^2 w^2 xi^2}; integrate |2 pi xi|^a against it.
  const double beta = pi * pi * w * w;
  return w * std::sqrt(pi) * std::pow(2.0 * pi, a) * std::tgamma(0.5 * (a + 1.0)) / std::pow(beta, 0.5 * (a + 1.0));
}

}  // namespace

TEST(CommutatorCoefficientTest, Values) {
  EXPECT_EQ(commutator_coefficient(2.5, 0), 1.0);
  for (double a : {1.0, 2.5, 3.7}) EXPECT_NEAR(commutator_coefficient(a, 1), (a * a - 1.0) / 6.0, 1e-15);
  EXPECT_EQ(commutator_coefficient(1.0, 1), 0.0);
  EXPECT_NEAR(commutator_coefficient(4.2, 2), (4.2 * 4.2 - 1) * (4.2 * 4.2 - 9) / 120.0, 1e-13);
  EXPECT_THROW(commutator_coefficient(2.0, -1), InvalidArgument);
}

TEST(CommutatorSpecTest, Admissibility) {
  const Grid g(64, 20.0);
  const RealField f = periodized_gaussian(g, 2.0);
  EXPECT_THROW(CommutatorSpec::periodic(f, 0.5, 0), InvalidArgument);
  EXPECT_THROW(CommutatorSpec::periodic(f, 3.5, 0), InvalidArgument);
  EXPECT_THROW(CommutatorSpec::periodic(f, 2.5, 1), InvalidArgument);
  EXPECT_THROW(CommutatorSpec::periodic(f, 2.5, 0, -0.1), InvalidArgument);
  EXPECT_THROW(CommutatorSpec::periodic(f, 2.5, 0, 0.5), InvalidArgument);
  EXPECT_NO_THROW(CommutatorSpec::periodic(f, 2.5, 0, 0.25));
  EXPECT_NO_THROW(CommutatorSpec::periodic(f, 3.5, 1));
  EXPECT_NO_THROW(CommutatorSpec::periodic(f, 1.0, 0));
  EXPECT_THROW(CommutatorSpec::with_derivatives(f, {}, 2.5, 0), InvalidArgument);
}

TEST(CommutatorTest, ConstantWeightGivesZero) {
  const Grid g(64, 20.0);
  std::mt19937_64 rng(31);
  const RealField h = random_band_limited(g, 20, rng);
  const auto spec = CommutatorSpec::periodic(RealField::from_function(g, [](double) { return 1.7; }), 2.5, 0);
  EXPECT_LE(apply_P_n(spec, h).max_abs(), 1e-12);
  EXPECT_LE(apply_R_n(spec, h).max_abs(), 1e-10 * fractional_derivative(h, 2.5).max_abs());
}

TEST(CommutatorTest, RemainderMatchesDenseOracle) {
  const Grid g(64, 16.0);
  const RealField f = periodized_gaussian(g, 2.0);
  const auto spec = CommutatorSpec::periodic(f, 2.5, 0);
  const Matrix r = dense_R(g, f, {spec.odd_derivative(0)}, 2.5, 0);
  for (long m : {1L, 5L, 17L}) {
    const double k = g.wavenumber(m);
    const RealField h = RealField::from_function(g, [k](double x) { return std::cos(k * x); });
    EXPECT_LE(max_diff(apply_R_n(spec, h), r * to_vector(h)), 1e-10) << "mode " << m;
  }
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 5; ++trial) {
    const RealField h = random_band_limited(g, 31, rng);
    EXPECT_LE(max_diff(apply_R_n(spec, h), r * to_vector(h)), 1e-10);
  }
}

TEST(CommutatorTest, HigherIndexMatchesDenseOracle) {
  const Grid g(64, 16.0);
  const RealField f = periodized_gaussian(g, 2.5);
  const auto spec = CommutatorSpec::periodic(f, 3.5, 1);
  const Matrix r = dense_R(g, f, {spec.odd_derivative(0), spec.odd_derivative(1)}, 3.5, 1);
  std::mt19937_64 rng(41);
  const RealField h = random_band_limited(g, 31, rng);
  const Vector want = r * to_vector(h);
  EXPECT_LE(max_diff(apply_R_n(spec, h), want), 1e-13 * want.cwiseAbs().maxCoeff());
}

TEST(CommutatorTest, PZeroMatchesDenseOracleAndIsSymmetric) {
  const Grid g(64, 16.0);
  const RealField f = periodized_gaussian(g, 2.0);
  const auto spec = CommutatorSpec::periodic(f, 3.0, 0);
  const Matrix d1 = power_matrix(g, 1.0);
  const Matrix p = 3.0 * d1 * diagonal(spec.odd_derivative(0)) * d1;
  EXPECT_LE((p - p.transpose()).cwiseAbs().maxCoeff(), 1e-12 * p.cwiseAbs().maxCoeff());
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 5; ++trial) {
    const RealField h1 = random_band_limited(g, 31, rng), h2 = random_band_limited(g, 31, rng);
    EXPECT_LE(max_diff(apply_P_n(spec, h1), p * to_vector(h1)), 1e-10);
    const double a = inner(apply_P_n(spec, h1), h2), b = inner(h1, apply_P_n(spec, h2));
    EXPECT_LE(std::abs(a - b), 1e-10 * std::max(std::abs(a), 1.0));
  }
}

TEST(CommutatorTest, LinearInH) {
  const Grid g(128, 30.0);
  const auto spec = CommutatorSpec::periodic(periodized_gaussian(g, 3.0), 2.5, 0);
  std::mt19937_64 rng(47);
  const RealField h1 = random_band_limited(g, 40, rng), h2 = random_band_limited(g, 40, rng);
  const RealField lhs = apply_R_n(spec, h1 * 2.0 + h2 * -0.7);
  const RealField rhs = apply_R_n(spec, h1) * 2.0 + apply_R_n(spec, h2) * -0.7;
  // R is a difference of terms much larger than itself; round-off scales with the largest one.
  const double scale = hilbert_derivative(spec.f() * (h1 * 2.0 + h2 * -0.7), 2.5).max_abs();
  EXPECT_LE(max_diff(lhs, to_vector(rhs)), 1e-12 * scale);
}

TEST(CommutatorTest, ReassemblesCommutator) {
  const Grid g(256, 40.0);
  std::mt19937_64 rng(53);
  for (double a : {1.5, 2.25, 2.9}) {
    const auto spec = CommutatorSpec::periodic(periodized_gaussian(g, 3.0), a, 0);
    const RealField h = random_band_limited(g, 80, rng);
    const RealField direct = apply_commutator(spec, h) * -1.0;
    const RealField rebuilt =
        apply_R_n(spec, h) + (apply_P_n(spec, h) - hilbert(apply_P_n(spec, hilbert(h)))) * 0.5;
    EXPECT_LE(max_diff(rebuilt, to_vector(direct)), 1e-10 * direct.max_abs()) << a;
  }
}

TEST(CommutatorTest, GridBoundMatchesContinuumQuadrature) {
  const Grid g(1024, 200.0);
  for (double alpha : {0.25, 0.5, 0.75}) {
    const double a = alpha + 2.0;
    const auto gauss = CommutatorSpec::periodic(periodized_gaussian(g, 2.0), a, 0);
    // Riemann sum of |xi|^a e^{-c xi^2}: the kink at 0 leaves an O(L^{-(a+1)}) error.
    EXPECT_NEAR(commutator_bound_rhs(gauss) / gaussian_bound_rhs(a, 2.0), 1.0, 1e-6);
    for (double lambda : {2.0, 5.0}) {
      const auto lift = CommutatorSpec::periodic(periodic_phi_lift(g, alpha, lambda), a, 0);
      EXPECT_NEAR(commutator_bound_rhs(lift) / phi_weight_bound_rhs(alpha, lambda), 1.0, 1e-2) << alpha << " " << lambda;
    }
  }
}

// ||R_0(alpha+2) h|| <= (2 pi)^{-1/2} ||(D^{alpha+2} f)^||_1 ||h|| with the constant 1.
TEST(CommutatorTest, RemainderBoundWithUnitConstant) {
  const Grid g(1024, 200.0);
  std::mt19937_64 rng(59);
  for (double alpha : {0.25, 0.5, 0.75}) {
    const double a = alpha + 2.0;
    struct Case {
      RealField f;
      double rhs;
    };
    const Case cases[] = {{periodized_gaussian(g, 2.0), gaussian_bound_rhs(a, 2.0)},
                          {periodic_phi_lift(g, alpha, 2.0), phi_weight_bound_rhs(alpha, 2.0)},
                          {periodic_phi_lift(g, alpha, 5.0), phi_weight_bound_rhs(alpha, 5.0)}};
    for (const auto& c : cases) {
      const auto spec = CommutatorSpec::periodic(c.f, a, 0);
      double worst = 0.0;
      for (int trial = 0; trial < 100; ++trial) {
        const RealField h = random_band_limited(g, 340, rng);
        worst = std::max(worst, norm_l2(apply_R_n(spec, h)) / (c.rhs * norm_l2(h)));
      }
      EXPECT_LE(worst, 1.05) << "alpha=" << alpha;
      RecordProperty("worst_ratio", std::to_string(worst));
      EXPECT_GT(worst, 0.0);
    }
  }
}

TEST(A3DecompositionTest, ZeroField) {
  const Grid g(256, 100.0);
  const auto r = step2_A3_decomposition(RealField(g), weights::WeightSpec(0.5, 4.0), 0.5, 1.0);
  EXPECT_EQ(r.a31, 0.0);
  EXPECT_EQ(r.a32, 0.0);
  EXPECT_EQ(r.a33, 0.0);
}

TEST(A3DecompositionTest, ClosesAgainstDirectForms) {
  const Grid g(256, 100.0);
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> shift(-5.0, 5.0);
  for (double alpha : {0.25, 0.5, 0.75}) {
    // Smooth localized field: random low modes under a Gaussian envelope.
    const RealField noise = random_band_limited(g, 12, rng);
    const double x0 = shift(rng);
    const RealField env = RealField::from_function(g, [x0](double x) { return std::exp(-std::pow((x - x0) / 6.0, 2)); });
    const RealField u = noise * env;
    const weights::WeightSpec w(alpha, 3.0);
    const double pref = 0.37;
    const auto r = step2_A3_decomposition(u, w, alpha, pref);
    EXPECT_GE(r.a32, 0.0);
    EXPECT_GE(r.a33, 0.0);
    EXPECT_LE(std::abs(r.sum() - r.direct), 1e-8 * std::abs(r.direct)) << alpha;

    // Independent direct form: -pref <phi u, D^{alpha+1} d_x u>.
    const RealField phi = w.sample_antiderivative(g);
    const double a3 = -pref * inner(phi * u, fractional_derivative(derivative(u), alpha + 1.0));
    EXPECT_LE(std::abs(a3 - r.direct), 1e-9 * std::abs(a3)) << alpha;

    // A_{3,2} through apply_P_n: (pref/4) <u, P_0 u>.
    RealField fp = w.sample_density(g);
    fp *= 1.0 / w.scale;
    const auto spec = CommutatorSpec::with_derivatives(phi, {fp}, alpha + 2.0, 0);
    EXPECT_NEAR(0.25 * pref * inner(u, apply_P_n(spec, u)) / r.a32, 1.0, 1e-10);
    EXPECT_NEAR(-0.25 * pref * inner(u, hilbert(apply_P_n(spec, hilbert(u)))) / r.a33, 1.0, 1e-10);
  }
}
