#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "excursia/laplace.hpp"

namespace {

using excursia::CovarianceModel;
using excursia::LaplaceEvaluator;
constexpr double kPi = std::numbers::pi;

TEST(Laplace, ValueAtZeroIsHalfTheMeanExcursion) {
  EXPECT_NEAR(excursia::laplace_e0(CovarianceModel::diffusion(2), 0.0), kPi, 1e-8 * kPi);
  EXPECT_NEAR(excursia::laplace_e0(CovarianceModel::random_acceleration(), 0.0), kPi / std::sqrt(3.0), 1e-8);
  EXPECT_NEAR(excursia::laplace_e0(CovarianceModel::shifted_gaussian(0.0), 0.0), kPi / 2.0, 1e-8);
  for (const auto& m : excursia::builtin_models()) {
    if (m.kind() == excursia::ModelKind::generalized_laplace) continue;
    EXPECT_NEAR(excursia::laplace_e0(m, 0.0) / (0.5 * excursia::mean_excursion(m)), 1.0, 1e-8) << m.spec();
  }
}

TEST(Laplace, AgreesWithDirectQuadratureAwayFromTheBoundary) {
  const auto m = CovarianceModel::diffusion(2);
  for (double s : {-0.3, 0.5, 2.0}) {
    // E0 = sech(t/2) for d = 2; brute-force integral on [0, 200]
    const double direct = excursia::numerics::integrate(
        [s](double t) { return std::exp(-s * t) / std::cosh(0.5 * t); }, 0.0, 200.0, 1e-12);
    EXPECT_NEAR(excursia::laplace_e0(m, s) / direct, 1.0, 1e-8) << s;
  }
}

TEST(Laplace, RelativeErrorAgainstRefinement) {
  const auto m = CovarianceModel::matern(2.5);
  excursia::LaplaceOptions fine;
  fine.rel_tol = 1e-12;
  for (double s : {-0.8, -0.4, 0.0, 1.0}) {
    const double coarse = excursia::laplace_e0(m, s);
    const double refined = excursia::laplace_e0(m, s, fine);
    EXPECT_NEAR(coarse / refined, 1.0, 1e-8) << s;
  }
}

TEST(Laplace, DivergesBelowTheBoundary) {
  const LaplaceEvaluator L(excursia::divisor_of(CovarianceModel::diffusion(2)));
  EXPECT_NEAR(L.convergence_boundary(), -0.5, 1e-12);
  EXPECT_TRUE(L.converges_at(-0.49));
  EXPECT_FALSE(L.converges_at(-0.5));
  try {
    (void)L(-0.6);
    FAIL() << "expected DivergenceError";
  } catch (const excursia::DivergenceError& e) {
    EXPECT_NEAR(e.boundary(), -0.5, 1e-12);
  }
}

TEST(Laplace, DivisorTransform) {
  for (const auto& m : excursia::builtin_models()) EXPECT_NEAR(excursia::psi_divisor(m, 0.0), 1.0, 1e-15);
  EXPECT_NEAR(excursia::psi_divisor(CovarianceModel::diffusion(2), 1e3), 0.0, 1e-3);
}

TEST(Laplace, ExponentialFixture) {
  const LaplaceEvaluator L(excursia::exponential_divisor(1.0));
  EXPECT_NEAR(L(0.0), 1.0, 1e-10);
  EXPECT_NEAR(excursia::psi_divisor(L, 1.0), 0.5, 1e-10);
  EXPECT_NEAR(excursia::psi_excursion(L, 1.0), 1.0 / 3.0, 1e-10);
  for (double s : {-0.9, -0.45, 0.2, 3.0}) EXPECT_NEAR(L(s), 1.0 / (1.0 + s), 1e-9 / (1.0 + s)) << s;
  const auto pole = excursia::find_pole(excursia::exponential_divisor(1.0));
  EXPECT_NEAR(pole.theta, 0.5, 1e-8);
  for (double b : {0.3, 2.0, 7.0})
    EXPECT_NEAR(excursia::find_pole(excursia::exponential_divisor(b)).theta, b / 2.0, 1e-8 * b) << b;
}

TEST(Laplace, ExcursionTransformAtZeroAndMonotone) {
  const LaplaceEvaluator L(excursia::divisor_of(CovarianceModel::diffusion(2)));
  EXPECT_NEAR(excursia::psi_excursion(L, 0.0), 1.0, 1e-15);
  double prev = excursia::psi_excursion(L, 0.25);
  EXPECT_GT(prev, 0.0);
  EXPECT_LT(prev, 1.0);
  for (double s : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double v = excursia::psi_excursion(L, s);
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, prev) << s;
    prev = v;
  }
}

TEST(Laplace, ExcursionTransformIdentity) {
  for (const auto& m : {CovarianceModel::diffusion(2), CovarianceModel::random_acceleration(),
                        CovarianceModel::matern(2.5)}) {
    const LaplaceEvaluator L(excursia::divisor_of(m));
    for (double s : {-0.15, -0.05, 0.0, 0.3, 1.0, 5.0}) {
      const double pd = excursia::psi_divisor(L, s);
      EXPECT_NEAR(excursia::psi_excursion(L, s), pd / (2.0 - pd), 1e-12 * std::max(1.0, std::abs(pd)))
          << m.spec() << " s=" << s;
    }
  }
}

TEST(Laplace, ExcursionTransformRefusesThePole) {
  const LaplaceEvaluator L(excursia::exponential_divisor(1.0));
  EXPECT_THROW((void)excursia::psi_excursion(L, -0.5), excursia::PoleError);
}

TEST(Laplace, DecreasingAndConvex) {
  const LaplaceEvaluator L(excursia::divisor_of(CovarianceModel::diffusion(2)));
  const double h = 0.05;
  for (double s = -0.45; s < 3.0; s += h) {
    const double a = L(s);
    const double b = L(s + h);
    const double c = L(s + 2.0 * h);
    ASSERT_GT(a, b) << s;
    ASSERT_GT(a - 2.0 * b + c, 0.0) << s;
  }
}

TEST(Laplace, PoleExponents) {
  const auto d2 = excursia::find_pole(CovarianceModel::diffusion(2));
  EXPECT_NEAR(d2.theta, 0.1862, 5e-4);
  EXPECT_EQ(d2.method, excursia::ExponentEstimate::Method::pole);
  ASSERT_TRUE(d2.bracket.has_value());
  EXPECT_NEAR(d2.bracket->first, -0.475, 1e-12);
  EXPECT_EQ(d2.bracket->second, 0.0);
  ASSERT_TRUE(d2.residual.has_value());
  EXPECT_LE(std::abs(*d2.residual), 1e-10);
  EXPECT_NEAR(excursia::find_pole(CovarianceModel::random_acceleration()).theta, 0.2647, 5e-4);
  EXPECT_NEAR(excursia::find_pole(CovarianceModel::shifted_gaussian(0.0)).theta, 0.4115, 5e-4);
}

TEST(Laplace, PoleResidualVanishes) {
  for (const auto& m : {CovarianceModel::diffusion(1), CovarianceModel::diffusion(5),
                        CovarianceModel::matern(2.5), CovarianceModel::matern(4.5)}) {
    const auto est = excursia::find_pole(m);
    const double s = -est.theta;
    EXPECT_NEAR(1.0 + s * excursia::laplace_e0(m, s), 0.0, 1e-9) << m.spec();
    EXPECT_GT(est.theta, 0.0);
    EXPECT_LT(est.theta, m.tail_rate_hint().value) << m.spec();
  }
}

TEST(Laplace, DiffusionPolesIncreaseWithDimension) {
  double prev = 0.0;
  for (int d = 1; d <= 10; ++d) {
    const double theta = excursia::find_pole(CovarianceModel::diffusion(d)).theta;
    EXPECT_GT(theta, prev) << d;
    EXPECT_LT(theta, d / 4.0) << d;
    prev = theta;
  }
}

TEST(Laplace, PoleNotFoundReportsBothEnds) {
  // Light divisor with a small exponential component: the root of
  // 1 + s L(s) lies beyond the convergence boundary at -1.
  excursia::DivisorDistribution dist;
  dist.label = "mixture";
  dist.survival = [](double t) { return 0.01 * std::exp(-t) + 0.99 * std::exp(-100.0 * t); };
  dist.density = [](double t) { return 0.01 * std::exp(-t) + 99.0 * std::exp(-100.0 * t); };
  dist.mean = 0.01 + 0.0099;
  dist.tail = excursia::TailClass::exponential(1.0);
  try {
    (void)excursia::find_pole(dist);
    FAIL() << "expected PoleNotFound";
  } catch (const excursia::PoleNotFound& e) {
    EXPECT_NEAR(e.lo(), -0.95, 1e-12);
    EXPECT_EQ(e.hi(), 0.0);
    EXPECT_GT(e.h_lo(), 0.0);
    EXPECT_EQ(e.h_hi(), 1.0);
  }
}

TEST(Laplace, PoleRefusesInvalidModels) {
  EXPECT_THROW((void)excursia::find_pole(CovarianceModel::shifted_gaussian(2.0)), excursia::ValidityError);
  EXPECT_THROW((void)excursia::find_pole(CovarianceModel::generalized_laplace(1.0)), excursia::ValidityError);
}

}  // namespace
