#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "excursia/stats.hpp"
#include "excursia/switch_process.hpp"

namespace {

using excursia::CovarianceModel;
using excursia::RngStream;
using excursia::SwitchMode;

// Gamma(2, 1) switching: Psi(s) = (1 + s)^{-2}, mean 2, and inverting the
// Laplace relations gives closed forms for both functions.
double gamma2_expectation(double t) { return std::exp(-t) * (std::cos(t) + std::sin(t)); }
double gamma2_covariance(double t) { return std::exp(-t) * std::cos(t); }

TEST(SwitchProcess, ExponentialExpectationAtOne) {
  const auto dist = excursia::exponential_switching(1.0);
  const std::vector<double> lags{1.0};
  const auto est = excursia::estimate_switch(dist, SwitchMode::origin, lags, 100000, 11);
  EXPECT_NEAR(est.mean[0], std::exp(-2.0), 3.0 * est.mean_se[0]);
}

TEST(SwitchProcess, DeterministicSwitching) {
  const auto dist = excursia::point_mass_switching(1.0);
  RngStream rng(1, 0);
  const auto path = excursia::simulate_switch(dist, 3.5, rng);
  ASSERT_EQ(path.switch_instants, (std::vector<double>{1.0, 2.0, 3.0}));
  EXPECT_EQ(path.initial_state, 1);
  EXPECT_EQ(path.state_at(0.0), 1);
  EXPECT_EQ(path.state_at(0.5), 1);
  EXPECT_EQ(path.state_at(1.5), -1);
  EXPECT_EQ(path.state_at(2.5), 1);
  EXPECT_EQ(path.state_at(3.25), -1);
}

TEST(SwitchProcess, PathsStartAtPlusOneAndIncrease) {
  const auto dist = excursia::gamma_switching(2.0, 1.0);
  RngStream rng(5, 0);
  for (int i = 0; i < 1000; ++i) {
    const auto p = excursia::simulate_switch(dist, 20.0, rng);
    ASSERT_EQ(p.state_at(0.0), 1);
    for (std::size_t j = 1; j < p.switch_instants.size(); ++j)
      ASSERT_LT(p.switch_instants[j - 1], p.switch_instants[j]);
    if (!p.switch_instants.empty()) {
      ASSERT_GT(p.switch_instants.front(), 0.0);
      ASSERT_LE(p.switch_instants.back(), 20.0);
    }
  }
}

TEST(SwitchProcess, RejectsNonPositiveHorizon) {
  RngStream rng(1, 0);
  EXPECT_THROW(excursia::simulate_switch(excursia::exponential_switching(1.0), 0.0, rng),
               excursia::DomainError);
  EXPECT_THROW(excursia::simulate_stationary_switch(excursia::exponential_switching(1.0), -1.0, rng),
               excursia::DomainError);
}

TEST(SwitchProcess, PointMassHasNoStationaryConstruction) {
  RngStream rng(1, 0);
  EXPECT_THROW(excursia::sample_stationary_delay(excursia::point_mass_switching(1.0), rng),
               excursia::DomainError);
}

TEST(SwitchProcess, FixtureDensitiesIntegrateToOne) {
  for (const auto& dist : {excursia::exponential_switching(1.0), excursia::exponential_switching(3.0),
                           excursia::gamma_switching(2.0, 1.0), excursia::gamma_switching(1.5, 2.0)}) {
    EXPECT_EQ(dist.cdf(0.0), 0.0) << dist.label;
    const double total = excursia::numerics::integrate(dist.density, 0.0, 1.0, 1e-12) +
                         excursia::numerics::integrate(dist.density, 1.0, 200.0, 1e-12);
    EXPECT_NEAR(total, 1.0, 1e-8) << dist.label;
  }
}

struct DelaySample {
  std::vector<double> forward, total;
  double plus_fraction;
};

DelaySample draw_delays(const excursia::SwitchingTimeDistribution& dist, std::size_t n,
                        std::uint64_t seed) {
  RngStream rng(seed, 0);
  DelaySample s;
  std::size_t plus = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto d = excursia::sample_stationary_delay(dist, rng);
    EXPECT_GE(d.forward, 0.0);
    EXPECT_GE(d.backward, 0.0);
    s.forward.push_back(d.forward);
    s.total.push_back(d.forward + d.backward);
    plus += d.delta == 1 ? 1 : 0;
  }
  s.plus_fraction = static_cast<double>(plus) / static_cast<double>(n);
  return s;
}

TEST(SwitchProcess, ExponentialDelays) {
  const auto s = draw_delays(excursia::exponential_switching(1.0), 100000, 21);
  const auto gamma2_cdf = [](double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x) * (1.0 + x); };
  const auto exp_cdf = [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-x); };
  EXPECT_GT(excursia::stats::ks_pvalue(excursia::stats::ks_statistic(s.total, gamma2_cdf), s.total.size()),
            1e-3);
  EXPECT_GT(excursia::stats::ks_pvalue(excursia::stats::ks_statistic(s.forward, exp_cdf), s.forward.size()),
            1e-3);
  EXPECT_NEAR(excursia::stats::mean_se(s.total).mean, 2.0, 0.02);
  EXPECT_NEAR(s.plus_fraction, 0.5, 3.0 * std::sqrt(0.25 / 100000.0));
}

TEST(SwitchProcess, SizeBiasedMeanIsSecondMomentOverMean) {
  for (const auto& dist : {excursia::exponential_switching(1.0), excursia::gamma_switching(2.0, 1.0)}) {
    const auto s = draw_delays(dist, 200000, 23);
    const double target = dist.second_moment / dist.mean;
    EXPECT_NEAR(excursia::stats::mean_se(s.total).mean / target, 1.0, 0.01) << dist.label;
  }
}

TEST(SwitchProcess, ForwardDelayIsUniformWithinTheInterval) {
  const auto s = draw_delays(excursia::gamma_switching(2.0, 1.0), 100000, 29);
  std::vector<double> ratio;
  for (std::size_t i = 0; i < s.total.size(); ++i) ratio.push_back(s.forward[i] / s.total[i]);
  const auto uniform_cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
  EXPECT_GT(excursia::stats::ks_pvalue(excursia::stats::ks_statistic(ratio, uniform_cdf), ratio.size()),
            1e-3);
}

TEST(SwitchProcess, StationaryMeanVanishes) {
  const std::vector<double> lags{0.0, 0.5, 1.0, 2.0};
  const auto est =
      excursia::estimate_switch(excursia::exponential_switching(1.0), SwitchMode::stationary, lags, 100000, 31);
  for (std::size_t j = 0; j < lags.size(); ++j)
    EXPECT_NEAR(est.mean[j], 0.0, 3.0 * est.mean_se[j]) << lags[j];
  // state +1 at the origin in half the paths
  const double plus = 0.5 * (1.0 + est.mean[0]);
  EXPECT_NEAR(plus, 0.5, 3.0 * 0.5 * est.mean_se[0]);
}

TEST(SwitchProcess, StationaryCovarianceIsShiftInvariant) {
  const std::vector<double> lags{0.0, 1.0};
  for (double t0 : {0.0, 1.0, 5.0}) {
    const auto ex = excursia::estimate_switch(excursia::exponential_switching(1.0), SwitchMode::stationary,
                                              lags, 100000, 37, t0);
    EXPECT_EQ(ex.cov[0], 1.0);
    EXPECT_NEAR(ex.mean[1], 0.0, 3.0 * ex.mean_se[1]) << t0;
    EXPECT_NEAR(ex.cov[1], std::exp(-2.0), 3.0 * ex.cov_se[1]) << t0;

    const auto ga = excursia::estimate_switch(excursia::gamma_switching(2.0, 1.0), SwitchMode::stationary,
                                              lags, 100000, 41, t0);
    EXPECT_NEAR(ga.mean[1], 0.0, 3.0 * ga.mean_se[1]) << t0;
    EXPECT_NEAR(ga.cov[1], gamma2_covariance(1.0), 3.0 * ga.cov_se[1]) << t0;
  }
}

TEST(SwitchProcess, GammaExpectationClosedForm) {
  const std::vector<double> lags{0.5, 1.0, 2.0, 4.0};
  const auto est =
      excursia::estimate_switch(excursia::gamma_switching(2.0, 1.0), SwitchMode::origin, lags, 100000, 43);
  for (std::size_t j = 0; j < lags.size(); ++j)
    EXPECT_NEAR(est.mean[j], gamma2_expectation(lags[j]), 3.0 * est.mean_se[j]) << lags[j];
}

TEST(SwitchProcess, LaplaceExpectationExponential) {
  const std::function<double(double)> psi = [](double s) { return 1.0 / (1.0 + s); };
  EXPECT_NEAR(excursia::laplace_expectation(psi, 1.0), 1.0 / 3.0, 1e-15);
  for (double s : {0.1, 0.7, 3.0, 25.0}) EXPECT_NEAR(excursia::laplace_expectation(psi, s), 1.0 / (s + 2.0), 1e-14);
  EXPECT_LT(excursia::laplace_expectation(psi, 1e8), 1.01e-8);
  EXPECT_LT(1e-9 * excursia::laplace_expectation(psi, 1e-9), 1e-8);
}

TEST(SwitchProcess, LaplaceGammaMatchesClosedForms) {
  const auto dist = excursia::gamma_switching(2.0, 1.0);
  for (double s : {0.3, 1.0, 4.0}) {
    const double le = excursia::laplace_expectation(dist.laplace, s);
    const double lr = excursia::laplace_stationary_covariance(dist.laplace, dist.mean, s);
    // transforms of e^{-t}(cos t + sin t) and e^{-t} cos t
    const double q = (s + 1.0) * (s + 1.0) + 1.0;
    EXPECT_NEAR(le, (s + 2.0) / q, 1e-13) << s;
    EXPECT_NEAR(lr, (s + 1.0) / q, 1e-13) << s;
  }
}

TEST(SwitchProcess, LaplaceCovarianceIdentities) {
  const std::function<double(double)> psi = [](double s) { return 1.0 / (1.0 + s); };
  EXPECT_NEAR(excursia::laplace_stationary_covariance(psi, 1.0, 1.0), 1.0 / 3.0, 1e-15);
  for (const auto& dist : {excursia::exponential_switching(0.5), excursia::gamma_switching(3.0, 2.0),
                           excursia::iia_switching(CovarianceModel::diffusion(2))}) {
    for (double s : {0.05, 0.5, 1.0, 7.0}) {
      const double le = excursia::laplace_expectation(dist.laplace, s);
      const double lr = excursia::laplace_stationary_covariance(dist.laplace, dist.mean, s);
      EXPECT_NEAR(lr, 1.0 / s - 2.0 / dist.mean * le / s, 1e-12 / s) << dist.label << " s=" << s;
      const double p1 = excursia::laplace_state_probability(dist.laplace, dist.mean, s, 1);
      const double pm = excursia::laplace_state_probability(dist.laplace, dist.mean, s, -1);
      EXPECT_NEAR(p1 + pm, 1.0 / s, 1e-12 / s) << dist.label << " s=" << s;
    }
  }
}

TEST(SwitchProcess, CovarianceFromExponentialExpectation) {
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(0.1 * i);
  const auto rows = excursia::covariance_from_expectation([](double t) { return std::exp(-2.0 * t); }, 1.0, grid);
  ASSERT_EQ(rows.size(), grid.size());
  EXPECT_EQ(rows.front().second, 1.0);
  for (const auto& [t, r] : rows) EXPECT_NEAR(r, std::exp(-2.0 * t), 1e-8) << t;
  const std::vector<double> bad{0.0, 1.0, 0.5};
  EXPECT_THROW(excursia::covariance_from_expectation([](double) { return 0.0; }, 1.0, bad),
               excursia::DomainError);
}

TEST(SwitchProcess, CovarianceFromE0IsTheClippedCovariance) {
  const auto m = CovarianceModel::diffusion(2);
  const double mu = excursia::mean_excursion(m);
  EXPECT_NEAR(mu, 2.0 * std::numbers::pi, 1e-12);
  std::vector<double> grid;
  for (int i = 0; i <= 60; ++i) grid.push_back(0.25 * i);
  const auto rows = excursia::covariance_from_expectation([&m](double t) { return excursia::e0(m, t); }, mu, grid);
  for (const auto& [t, r] : rows) EXPECT_NEAR(r, excursia::clipped_autocovariance(m, t), 1e-6) << t;
}

TEST(SwitchProcess, IntegratedExpectationMatchesStationaryCovariance) {
  // (mu/2)(1 - R(t)) = int_0^t E(u) du, each side estimated by simulation.
  for (const auto& dist : {excursia::exponential_switching(1.0), excursia::gamma_switching(2.0, 1.0)}) {
    std::vector<double> lags;
    for (int i = 0; i <= 60; ++i) lags.push_back(0.05 * i);
    const auto origin = excursia::estimate_switch(dist, SwitchMode::origin, lags, 100000, 47);
    const auto stat = excursia::estimate_switch(dist, SwitchMode::stationary, lags, 100000, 53);
    double integral = 0.0;
    double se_sum = 0.0;
    for (std::size_t j = 1; j < lags.size(); ++j) {
      const double h = lags[j] - lags[j - 1];
      integral += 0.5 * h * (origin.mean[j - 1] + origin.mean[j]);
      se_sum += 0.5 * h * (origin.mean_se[j - 1] + origin.mean_se[j]);
      if (j % 10 != 0) continue;
      const double lhs = 0.5 * dist.mean * (1.0 - stat.cov[j]);
      // positively correlated errors along a path: the summed SE bounds the integral's SE
      const double tol = 3.0 * std::hypot(0.5 * dist.mean * stat.cov_se[j], se_sum) + 1e-3;
      EXPECT_NEAR(lhs, integral, tol) << dist.label << " t=" << lags[j];
    }
  }
}

TEST(SwitchProcess, IiaSwitchingReproducesE0) {
  const auto m = CovarianceModel::diffusion(2);
  const auto dist = excursia::iia_switching(m);
  EXPECT_EQ(dist.label, "iia:diffusion(d=2)");
  const std::vector<double> lags{0.5, 1.0, 3.0};
  const auto est = excursia::estimate_switch(dist, SwitchMode::origin, lags, 100000, 59);
  for (std::size_t j = 0; j < lags.size(); ++j)
    EXPECT_NEAR(est.mean[j], excursia::e0(m, lags[j]), 3.0 * est.mean_se[j]) << lags[j];
}

TEST(SwitchProcess, ParseSwitching) {
  EXPECT_EQ(excursia::parse_switching("exp:2").label, "exp:2");
  EXPECT_DOUBLE_EQ(excursia::parse_switching("exp:0.5").mean, 2.0);
  const auto g = excursia::parse_switching("gamma:2,1");
  EXPECT_EQ(g.label, "gamma:2,1");
  EXPECT_DOUBLE_EQ(g.mean, 2.0);
  EXPECT_DOUBLE_EQ(g.second_moment, 6.0);
  EXPECT_EQ(excursia::parse_switching("divisor:diffusion(d=3)").label, "iia:diffusion(d=3)");
  EXPECT_THROW(excursia::parse_switching("exp"), excursia::ModelError);
  EXPECT_THROW(excursia::parse_switching("gamma:2"), excursia::ModelError);
  EXPECT_THROW(excursia::parse_switching("weibull:1"), excursia::ModelError);
  EXPECT_THROW(excursia::parse_switching("exp:-1"), excursia::DomainError);
  EXPECT_THROW(excursia::parse_switching("divisor:shifted_gaussian(alpha=2)"), excursia::ValidityError);
}

TEST(SwitchProcess, EstimatesDoNotDependOnThreadCount) {
  const std::vector<double> lags{0.0, 0.3, 1.0, 2.5};
  const auto dist = excursia::gamma_switching(2.0, 1.0);
  const auto a = excursia::estimate_switch(dist, SwitchMode::stationary, lags, 20000, 61, 1.0, 1);
  const auto b = excursia::estimate_switch(dist, SwitchMode::stationary, lags, 20000, 61, 1.0, 4);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.cov, b.cov);
}

}  // namespace
