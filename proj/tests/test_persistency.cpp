#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "excursia/persistency.hpp"
#include "excursia/samplers.hpp"

namespace {

using excursia::CovarianceModel;
using excursia::DivisorSampler;
using excursia::RngStream;
using excursia::SampleTarget;

std::vector<double> exponential_draws(double rate, std::size_t n, std::uint64_t seed) {
  RngStream rng(seed, 0);
  std::vector<double> x(n);
  for (auto& v : x) v = rng.exponential() / rate;
  return x;
}

TEST(Persistency, ExponentialTailRate) {
  const auto x = exponential_draws(0.5, 1000000, 3);
  EXPECT_NEAR(excursia::tail_exponent(x, 10000).theta, 0.5, 0.02);
}

TEST(Persistency, DiffusionDivisorTailRate) {
  const auto sampler = DivisorSampler::for_model(CovarianceModel::diffusion(2));
  const auto x = excursia::sample_many(sampler, SampleTarget::divisor, 1000000, 5, 8, 4);
  EXPECT_NEAR(excursia::tail_exponent(x, 20000).theta, 0.496, 0.01);
}

TEST(Persistency, RejectsBadInput) {
  const std::vector<double> same{1.0, 2.0, 2.0};
  EXPECT_THROW(excursia::tail_exponent(same, 2), excursia::DegenerateTail);
  const std::vector<double> x{0.1, 0.4, 0.2, 0.9};
  EXPECT_THROW(excursia::tail_exponent(x, 1), excursia::DomainError);
  EXPECT_THROW(excursia::tail_exponent(x, 4), excursia::DomainError);
  const std::vector<double> negative{0.1, -0.4, 0.2, 0.9};
  EXPECT_THROW(excursia::tail_exponent(negative, 2), excursia::DomainError);
}

TEST(Persistency, ScaleEquivariance) {
  auto x = exponential_draws(1.0, 20000, 7);
  const auto base = excursia::tail_exponent(x, 500);
  for (double c : {0.25, 3.0, 1e3}) {
    std::vector<double> y(x);
    for (auto& v : y) v *= c;
    const auto scaled = excursia::tail_exponent(y, 500);
    EXPECT_NEAR(scaled.theta * c / base.theta, 1.0, 1e-12) << c;
    EXPECT_NEAR(scaled.intercept, base.intercept, 1e-10) << c;
  }
}

TEST(Persistency, DefaultTailCount) {
  EXPECT_EQ(excursia::default_tail_count(10000), 1000u);
  EXPECT_EQ(excursia::default_tail_count(1000000), 10000u);
  EXPECT_EQ(excursia::default_tail_count(500), 499u);
}

TEST(Persistency, UnbiasedOnExponentialData) {
  for (double theta : {0.1, 0.5, 2.0}) {
    const auto est = excursia::tail_exponent_ci(
        [theta](RngStream& rng) { return rng.exponential() / theta; }, 100000, 1000, 10, 9, 4);
    ASSERT_TRUE(est.half_width.has_value());
    EXPECT_GT(*est.half_width, 0.0);
    EXPECT_NEAR(est.theta, theta, *est.half_width) << theta;
    EXPECT_EQ(est.method, excursia::ExponentEstimate::Method::tail_regression);
    EXPECT_EQ(est.replicates.size(), 10u);
  }
}

TEST(Persistency, ConfidenceIntervalNeedsTwoReplications) {
  auto draw = [](RngStream& rng) { return rng.exponential(); };
  EXPECT_THROW(excursia::tail_exponent_ci(draw, 1000, 100, 1, 1), excursia::DomainError);
}

TEST(Persistency, ReplicationFailureNamesTheIndex) {
  auto draw = [](RngStream&) { return 1.0; };
  try {
    (void)excursia::tail_exponent_ci(draw, 100, 10, 3, 1);
    FAIL() << "expected an error";
  } catch (const excursia::Error& e) {
    EXPECT_NE(std::string(e.what()).find("replication"), std::string::npos);
  }
}

TEST(Persistency, ConfidenceIntervalIsThreadIndependent) {
  auto draw = [](RngStream& rng) { return rng.exponential(); };
  const auto a = excursia::tail_exponent_ci(draw, 20000, 500, 6, 17, 1);
  const auto b = excursia::tail_exponent_ci(draw, 20000, 500, 6, 17, 3);
  EXPECT_EQ(a.replicates, b.replicates);
  EXPECT_EQ(a.theta, b.theta);
}

double excursion_exponent(const CovarianceModel& m, std::size_t n, std::size_t k, std::uint64_t seed) {
  const auto sampler = DivisorSampler::for_model(m);
  const auto est = excursia::tail_exponent_ci(
      [&sampler](RngStream& rng) { return excursia::sample_excursion(sampler, rng).value; }, n, k, 10,
      seed, 4);
  return est.theta;
}

TEST(Persistency, DiffusionExcursionExponent) {
  EXPECT_NEAR(excursion_exponent(CovarianceModel::diffusion(2), 100000, 10000, 19), 0.1858, 0.01);
}

TEST(Persistency, RandomAccelerationExcursionExponent) {
  EXPECT_NEAR(excursion_exponent(CovarianceModel::random_acceleration(), 1000000, 10000, 23), 0.2647, 0.005);
}

TEST(Persistency, MaternExcursionExponent) {
  EXPECT_NEAR(excursion_exponent(CovarianceModel::matern(2.5), 100000, 10000, 29), 0.2188, 0.01);
}

TEST(Persistency, DiffusionDivisorRates) {
  const double expected[] = {0.248, 0.496, 0.750, 0.995, 1.243};
  for (int d = 1; d <= 5; ++d) {
    const auto sampler = DivisorSampler::for_model(CovarianceModel::diffusion(d));
    // 2% tail, averaged over 10 replications; a single fit scatters by ~0.04 at d = 5
    const auto est = excursia::tail_exponent_ci(sampler, 100000, 2000, 10, 31 + d, 4);
    EXPECT_NEAR(est.theta, expected[d - 1], 0.02) << d;
  }
}

std::vector<double> uniform_grid(double lo, double hi, int steps) {
  std::vector<double> g;
  for (int i = 0; i <= steps; ++i) g.push_back(lo + (hi - lo) * i / steps);
  return g;
}

TEST(Persistency, TailBoundOnExponentialFixture) {
  const auto sampler = DivisorSampler::exponential(1.0);
  const auto x = excursia::sample_many(sampler, SampleTarget::excursion, 200000, 37, 4, 4);
  const auto grid = uniform_grid(0.0, 12.0, 24);
  for (auto dir : {excursia::BoundDirection::upper, excursia::BoundDirection::lower}) {
    const auto rep = excursia::tail_bound_check(1.0, x, grid, dir);
    EXPECT_EQ(rep.violations, 0u);
    ASSERT_EQ(rep.rows.size(), grid.size());
    EXPECT_EQ(rep.rows.front().empirical, 1.0);
    EXPECT_EQ(rep.rows.front().bound, 1.0);
  }
  EXPECT_THROW(excursia::tail_bound_check(0.0, x, grid, excursia::BoundDirection::upper),
               excursia::DomainError);
}

TEST(Persistency, TailBoundOnDiffusion) {
  const auto m = CovarianceModel::diffusion(2);
  // sech(t/2) >= e^{-t/2}: the divisor satisfies the lower bound only
  const auto dir = excursia::divisor_bound_direction([&m](double t) { return excursia::e0(m, t); }, 0.5,
                                                     uniform_grid(0.0, 60.0, 600));
  ASSERT_TRUE(dir.has_value());
  EXPECT_EQ(*dir, excursia::BoundDirection::lower);

  const auto sampler = DivisorSampler::for_model(m);
  const auto x = excursia::sample_many(sampler, SampleTarget::excursion, 1000000, 41, 8, 4);
  const auto rep = excursia::tail_bound_check(0.5, x, uniform_grid(5.0, 30.0, 25), *dir);
  EXPECT_EQ(rep.violations, 0u);
  for (const auto& row : rep.rows) EXPECT_GE(row.empirical, row.bound - 3.0 * row.se) << row.tau;
}

TEST(Persistency, BoundDirectionOnExactExponential) {
  const auto grid = uniform_grid(0.0, 20.0, 40);
  auto surv = [](double t) { return std::exp(-t); };
  // exactly on the bound: both hold, upper is reported
  EXPECT_EQ(excursia::divisor_bound_direction(surv, 1.0, grid), excursia::BoundDirection::upper);
  EXPECT_EQ(excursia::divisor_bound_direction(surv, 2.0, grid), excursia::BoundDirection::lower);
  auto crossing = [](double t) { return t < 5.0 ? std::exp(-2.0 * t) : std::exp(-0.5 * t); };
  EXPECT_FALSE(excursia::divisor_bound_direction(crossing, 1.0, grid).has_value());
}

}  // namespace
