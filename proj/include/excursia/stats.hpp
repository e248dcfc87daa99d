#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "excursia/numerics.hpp"

namespace excursia::stats {

struct MeanSe {
  double mean;
  double se;
  double sd;
};

inline MeanSe mean_se(std::span<const double> x) {
  const auto n = static_cast<double>(x.size());
  numerics::CompensatedSum s;
  for (double v : x) s += v;
  const double m = s.value() / n;
  numerics::CompensatedSum ss;
  for (double v : x) ss += (v - m) * (v - m);
  const double sd = x.size() > 1 ? std::sqrt(ss.value() / (n - 1.0)) : 0.0;
  return {m, sd / std::sqrt(n), sd};
}

/// Two-sided Kolmogorov-Smirnov distance between a sample and a continuous
/// CDF.
inline double ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf) {
  std::vector<double> x(sample.begin(), sample.end());
  std::sort(x.begin(), x.end());
  const auto n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

/// Asymptotic p-value of the one-sample KS statistic, with Stephens'
/// finite-sample correction.
inline double ks_pvalue(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double x = d * (sn + 0.12 + 0.11 / sn);
  if (x < 0.2) return 1.0;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    p += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

/// Upper quantile t_{q, dof} of Student's t distribution.
inline double student_t_quantile(double q, double dof) {
  return boost::math::quantile(boost::math::students_t_distribution<double>(dof), q);
}

}  // namespace excursia::stats
