#pragma once

// Persistency exponent from samples: least-squares slope of the log
// empirical survival over the upper order statistics, replicated over
// independent streams for a Student-t bound; plus the exponential tail-bound
// check linking divisor and exceedance tails.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <optional>
#include <span>
#include <vector>

#include "excursia/estimate.hpp"
#include "excursia/numerics.hpp"
#include "excursia/parallel.hpp"
#include "excursia/rng.hpp"
#include "excursia/slepian.hpp"
#include "excursia/stats.hpp"

namespace excursia {

struct TailFit {
  double theta;
  double intercept;
};

/// Regresses ln((n - i + 1/2) / n) on the k largest order statistics x_(i)
/// and returns theta = -slope with the intercept.
inline TailFit tail_exponent(std::span<const double> samples, std::size_t k) {
  const std::size_t n = samples.size();
  if (k < 2 || k + 1 > n) throw DomainError("tail_exponent: need 2 <= k <= n - 1");
  std::vector<double> x(samples.begin(), samples.end());
  if (std::any_of(x.begin(), x.end(), [](double v) { return !(v >= 0.0); }))
    throw DomainError("tail_exponent: samples must be nonnegative");
  const auto first = x.begin() + static_cast<std::ptrdiff_t>(n - k);
  std::nth_element(x.begin(), first, x.end());
  std::sort(first, x.end());
  std::vector<double> tx(first, x.end());
  if (tx.front() == tx.back()) throw DegenerateTail("tail_exponent: fewer than 2 distinct tail values");

  std::vector<double> ly(k);
  const auto nn = static_cast<double>(n);
  for (std::size_t j = 0; j < k; ++j) {
    const auto i = static_cast<double>(n - k + 1 + j);  // 1-based rank
    ly[j] = std::log((nn - i + 0.5) / nn);
  }
  const auto line = numerics::least_squares(tx, ly);
  return {-line.slope, line.intercept};
}

/// Default tail count: max(1000, n / 100), capped at n - 1.
inline std::size_t default_tail_count(std::size_t n) {
  return std::min(std::max<std::size_t>(1000, n / 100), n > 1 ? n - 1 : 1);
}

/// Runs tail_exponent on `reps` replications of n draws; replication r uses
/// RngStream(seed, r). Reports the mean exponent with the half-width
/// t_{0.975, reps-1} sd / sqrt(reps).
template <class Draw>
ExponentEstimate tail_exponent_ci(Draw&& draw, std::size_t n, std::size_t k, std::size_t reps,
                                  std::uint64_t seed, std::size_t threads = 1) {
  if (reps < 2) throw DomainError("tail_exponent_ci: reps must be >= 2");
  std::vector<TailFit> fits(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    RngStream rng(seed, r);
    std::vector<double> xs(n);
    for (auto& v : xs) v = draw(rng);
    try {
      fits[r] = tail_exponent(xs, k);
    } catch (const Error& e) {
      throw Error("replication " + std::to_string(r) + ": " + e.what());
    }
  });

  ExponentEstimate est;
  est.method = ExponentEstimate::Method::tail_regression;
  est.n = n;
  est.k = k;
  est.reps = reps;
  est.seed = seed;
  std::vector<double> thetas, intercepts;
  for (const auto& f : fits) {
    thetas.push_back(f.theta);
    intercepts.push_back(f.intercept);
  }
  const auto ms = stats::mean_se(thetas);
  est.theta = ms.mean;
  est.intercept = stats::mean_se(intercepts).mean;
  est.half_width = stats::student_t_quantile(0.975, static_cast<double>(reps - 1)) * ms.se;
  est.replicates = std::move(thetas);
  return est;
}

// ---------------------------------------------------------------------------
// Exponential tail bounds
// ---------------------------------------------------------------------------

/// Which exponential bound the divisor survival satisfies:
/// upper means P(T~ > t) <= e^{-bt}, lower means >=.
enum class BoundDirection { upper, lower };

/// Direction of the divisor bound on the grid, or nullopt if neither holds.
inline std::optional<BoundDirection> divisor_bound_direction(
    const std::function<double(double)>& survival, double b, std::span<const double> grid) {
  bool upper = true;
  bool lower = true;
  for (const double t : grid) {
    const double e = survival(t);
    const double bound = std::exp(-b * t);
    const double slack = 1e-12 * bound;
    upper = upper && e <= bound + slack;
    lower = lower && e >= bound - slack;
  }
  if (upper) return BoundDirection::upper;
  if (lower) return BoundDirection::lower;
  return std::nullopt;
}

struct TailBoundRow {
  double tau;
  double empirical;
  double bound;
  double se;
  bool violation;
};

struct TailBoundReport {
  BoundDirection direction;
  std::vector<TailBoundRow> rows;
  std::size_t violations = 0;
};

/// Compares the empirical exceedance survival with e^{-b tau / 2}; a
/// violation is a departure beyond 3 binomial standard errors in the
/// direction the divisor bound forbids.
inline TailBoundReport tail_bound_check(double b, std::span<const double> excursion_samples,
                                        std::span<const double> grid, BoundDirection direction) {
  if (!(b > 0.0)) throw DomainError("tail_bound_check: rate must be > 0");
  std::vector<double> x(excursion_samples.begin(), excursion_samples.end());
  std::sort(x.begin(), x.end());
  const auto n = static_cast<double>(x.size());
  TailBoundReport rep{direction, {}, 0};
  for (const double tau : grid) {
    const auto above = x.end() - std::upper_bound(x.begin(), x.end(), tau);
    const double emp = static_cast<double>(above) / n;
    const double bound = std::exp(-0.5 * b * tau);
    const double se = std::sqrt(bound * (1.0 - bound) / n);
    const bool bad = direction == BoundDirection::upper ? emp > bound + 3.0 * se
                                                        : emp < bound - 3.0 * se;
    rep.rows.push_back({tau, emp, bound, se, bad});
    rep.violations += bad ? 1 : 0;
  }
  return rep;
}

}  // namespace excursia
