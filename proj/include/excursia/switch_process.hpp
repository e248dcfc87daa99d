#pragma once

// Switch process D(t) = (-1)^{N(t)} started with a switch at the origin, its
// stationary (delayed) version, and the Laplace-domain relations between the
// expectation E(t) = E D(t) and the stationary covariance R(t).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "excursia/laplace.hpp"
#include "excursia/numerics.hpp"
#include "excursia/parallel.hpp"
#include "excursia/rng.hpp"
#include "excursia/samplers.hpp"

namespace excursia {

/// Law of the iid in-between switching times.
///
/// `sample` is mandatory. `sample_size_biased` draws from x f(x) / mean and
/// is required for the stationary construction; the analytic members are
/// optional and only used by checks.
struct SwitchingTimeDistribution {
  std::string label;
  std::function<double(RngStream&)> sample;
  std::function<double(RngStream&)> sample_size_biased;
  std::function<double(double)> density;
  std::function<double(double)> cdf;
  std::function<double(double)> laplace;
  double mean = std::numeric_limits<double>::quiet_NaN();
  double second_moment = std::numeric_limits<double>::quiet_NaN();
};

inline SwitchingTimeDistribution exponential_switching(double rate) {
  if (!(rate > 0.0)) throw DomainError("exponential switching: rate must be > 0");
  SwitchingTimeDistribution d;
  d.label = "exp:" + detail::format_number(rate);
  d.sample = [rate](RngStream& rng) { return rng.exponential() / rate; };
  // size-biased exponential is Gamma(2, rate)
  d.sample_size_biased = [rate](RngStream& rng) {
    return (rng.exponential() + rng.exponential()) / rate;
  };
  d.density = [rate](double t) { return t < 0.0 ? 0.0 : rate * std::exp(-rate * t); };
  d.cdf = [rate](double t) { return t < 0.0 ? 0.0 : -std::expm1(-rate * t); };
  d.laplace = [rate](double s) { return rate / (rate + s); };
  d.mean = 1.0 / rate;
  d.second_moment = 2.0 / (rate * rate);
  return d;
}

inline SwitchingTimeDistribution gamma_switching(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw DomainError("gamma switching: shape and rate must be > 0");
  SwitchingTimeDistribution d;
  d.label = "gamma:" + detail::format_number(shape) + "," + detail::format_number(rate);
  d.sample = [shape, rate](RngStream& rng) { return rng.gamma(shape) / rate; };
  d.sample_size_biased = [shape, rate](RngStream& rng) { return rng.gamma(shape + 1.0) / rate; };
  d.density = [shape, rate](double t) {
    return t <= 0.0 ? 0.0 : rate * boost::math::gamma_p_derivative(shape, rate * t);
  };
  d.cdf = [shape, rate](double t) { return t <= 0.0 ? 0.0 : boost::math::gamma_p(shape, rate * t); };
  d.laplace = [shape, rate](double s) { return std::pow(rate / (rate + s), shape); };
  d.mean = shape / rate;
  d.second_moment = shape * (shape + 1.0) / (rate * rate);
  return d;
}

/// Deterministic switching time; usable with simulate_switch only.
inline SwitchingTimeDistribution point_mass_switching(double at) {
  if (!(at > 0.0)) throw DomainError("point mass switching: location must be > 0");
  SwitchingTimeDistribution d;
  d.label = "point:" + detail::format_number(at);
  d.sample = [at](RngStream&) { return at; };
  d.cdf = [at](double t) { return t < at ? 0.0 : 1.0; };
  d.laplace = [at](double s) { return std::exp(-s * at); };
  d.mean = at;
  d.second_moment = at * at;
  return d;
}

/// Switching times drawn from the IIA exceedance law of a covariance model,
/// i.e. geometric compounds of its divisor.
///
/// Size-biased draws use rejection with acceptance x / cap, cap = 40 mean;
/// draws above the cap are always accepted, which truncates the weight
/// where the exceedance survival is far below double precision for the
/// light-tailed models.
inline SwitchingTimeDistribution iia_switching(const CovarianceModel& m) {
  const auto divisor = std::make_shared<DivisorSampler>(DivisorSampler::for_model(m));
  const double mu = mean_excursion(m);
  const double cap = 40.0 * mu;
  SwitchingTimeDistribution d;
  d.label = "iia:" + m.spec();
  d.sample = [divisor](RngStream& rng) { return sample_excursion(*divisor, rng).value; };
  d.sample_size_biased = [divisor, cap](RngStream& rng) {
    for (;;) {
      const double x = sample_excursion(*divisor, rng).value;
      if (rng.uniform() * cap <= x) return x;
    }
  };
  const auto evaluator = std::make_shared<LaplaceEvaluator>(divisor->distribution());
  d.laplace = [evaluator](double s) { return psi_excursion(*evaluator, s); };
  d.mean = mu;
  return d;
}

/// Parses `exp:lambda`, `gamma:k,lambda` or `divisor:<model spec>`; the last
/// uses the IIA exceedance law built on the model's divisor.
inline SwitchingTimeDistribution parse_switching(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw ModelError("switching distribution must be exp:<rate>, gamma:<k>,<rate> or divisor:<model>");
  const auto kind = text.substr(0, colon);
  const auto rest = text.substr(colon + 1);
  if (kind == "exp") return exponential_switching(detail::parse_number(rest, "rate"));
  if (kind == "gamma") {
    const auto comma = rest.find(',');
    if (comma == std::string_view::npos) throw ModelError("gamma switching needs gamma:<k>,<rate>");
    return gamma_switching(detail::parse_number(rest.substr(0, comma), "shape"),
                           detail::parse_number(rest.substr(comma + 1), "rate"));
  }
  if (kind == "point") return point_mass_switching(detail::parse_number(rest, "location"));
  if (kind == "divisor" || kind == "iia") return iia_switching(parse_model(rest));
  throw ModelError("unknown switching distribution '" + std::string(kind) + "'");
}

/// Forward delay A, backward delay B and sign delta of the stationary
/// construction.
struct StationaryDelay {
  double forward;
  double backward;
  int delta;
};

/// A piecewise-constant +-1 trajectory on (0, horizon].
struct SwitchPath {
  int initial_state = 1;
  std::vector<double> switch_instants;
  double horizon = 0.0;
  std::optional<StationaryDelay> delay;

  /// State at time t: initial state flipped once per instant in (0, t].
  [[nodiscard]] int state_at(double t) const {
    const auto flips = std::upper_bound(switch_instants.begin(), switch_instants.end(), t) -
                       switch_instants.begin();
    return (flips % 2 == 0) ? initial_state : -initial_state;
  }
};

inline SwitchPath simulate_switch(const SwitchingTimeDistribution& dist, double horizon,
                                  RngStream& rng) {
  if (!(horizon > 0.0)) throw DomainError("simulate_switch: horizon must be > 0");
  SwitchPath p;
  p.initial_state = 1;
  p.horizon = horizon;
  double t = 0.0;
  for (;;) {
    t += dist.sample(rng);
    if (t > horizon) break;
    p.switch_instants.push_back(t);
  }
  return p;
}

/// S = A + B from the size-biased law, A | S uniform on (0, S),
/// P(delta = 1) = 1/2.
inline StationaryDelay sample_stationary_delay(const SwitchingTimeDistribution& dist,
                                               RngStream& rng) {
  if (!dist.sample_size_biased)
    throw DomainError("stationary delay: " + dist.label + " has no size-biased sampler");
  const double s = dist.sample_size_biased(rng);
  const double a = rng.uniform() * s;
  const int delta = rng.uniform() < 0.5 ? 1 : -1;
  return {a, s - a, delta};
}

/// Forward half of the stationary switch process: state -delta on [0, A),
/// then delta D_+(t - A).
inline SwitchPath simulate_stationary_switch(const SwitchingTimeDistribution& dist,
                                             double horizon, RngStream& rng) {
  if (!(horizon > 0.0)) throw DomainError("simulate_stationary_switch: horizon must be > 0");
  const auto delay = sample_stationary_delay(dist, rng);
  SwitchPath p;
  p.initial_state = -delay.delta;
  p.horizon = horizon;
  p.delay = delay;
  double t = delay.forward;
  while (t <= horizon) {
    p.switch_instants.push_back(t);
    t += dist.sample(rng);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Laplace-domain relations
// ---------------------------------------------------------------------------

/// L E(s) = (1/s) (1 - Psi(s)) / (1 + Psi(s)).
inline double laplace_expectation(const std::function<double(double)>& psi, double s) {
  const double p = psi(s);
  return (1.0 - p) / ((1.0 + p) * s);
}

/// Laplace transform of P_delta(t) = P(D_s(t) = 1 | D_s(0) = delta).
inline double laplace_state_probability(const std::function<double(double)>& psi, double mu,
                                        double s, int delta) {
  const double p = psi(s);
  const double x = (1.0 - p) / ((1.0 + p) * mu * s);
  return delta == 1 ? (1.0 - x) / s : x / s;
}

/// L R(s) = (2 / (s mu)) (mu/2 - (1/s) (1 - Psi) / (1 + Psi)).
inline double laplace_stationary_covariance(const std::function<double(double)>& psi, double mu,
                                            double s) {
  const double p = psi(s);
  return 2.0 / (s * mu) * (0.5 * mu - (1.0 - p) / ((1.0 + p) * s));
}

/// R(t) = 1 - (2/mu) int_0^t E(u) du on an increasing grid starting at 0.
inline std::vector<std::pair<double, double>> covariance_from_expectation(
    const std::function<double(double)>& E, double mu, std::span<const double> grid) {
  std::vector<std::pair<double, double>> out;
  out.reserve(grid.size());
  numerics::CompensatedSum integral;
  double prev = 0.0;
  for (const double t : grid) {
    if (t < prev) throw DomainError("covariance_from_expectation: grid must be increasing from 0");
    integral += numerics::integrate(E, prev, t, 1e-12);
    prev = t;
    out.emplace_back(t, 1.0 - 2.0 / mu * integral.value());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ensemble estimators
// ---------------------------------------------------------------------------

enum class SwitchMode { origin, stationary };

/// Ensemble means of D(t0 + t) and D(t0) D(t0 + t) over n paths.
struct SwitchEstimate {
  double t0 = 0.0;
  std::vector<double> lags;
  std::vector<double> mean;
  std::vector<double> mean_se;
  std::vector<double> cov;
  std::vector<double> cov_se;
  std::size_t n = 0;
};

/// Paths are split into fixed chunks with one RNG stream each; partial sums
/// are combined in chunk order, so results do not depend on `threads`.
inline SwitchEstimate estimate_switch(const SwitchingTimeDistribution& dist, SwitchMode mode,
                                      std::span<const double> lags, std::size_t n,
                                      std::uint64_t seed, double t0 = 0.0,
                                      std::size_t threads = 1) {
  const double horizon = t0 + *std::max_element(lags.begin(), lags.end()) + 1e-9;
  const std::size_t chunks = std::min<std::size_t>(64, std::max<std::size_t>(1, n));
  const std::size_t m = lags.size();
  struct Partial {
    std::vector<numerics::CompensatedSum> d, dd;
  };
  std::vector<Partial> parts(chunks, Partial{std::vector<numerics::CompensatedSum>(m),
                                             std::vector<numerics::CompensatedSum>(m)});
  parallel_for(chunks, threads, [&](std::size_t c) {
    RngStream rng(seed, c);
    const std::size_t begin = n * c / chunks;
    const std::size_t end = n * (c + 1) / chunks;
    for (std::size_t i = begin; i < end; ++i) {
      const auto path = mode == SwitchMode::origin ? simulate_switch(dist, horizon, rng)
                                                   : simulate_stationary_switch(dist, horizon, rng);
      const int base = path.state_at(t0);
      for (std::size_t j = 0; j < m; ++j) {
        const int v = path.state_at(t0 + lags[j]);
        parts[c].d[j] += v;
        parts[c].dd[j] += base * v;
      }
    }
  });

  SwitchEstimate est;
  est.t0 = t0;
  est.n = n;
  est.lags.assign(lags.begin(), lags.end());
  const auto nn = static_cast<double>(n);
  for (std::size_t j = 0; j < m; ++j) {
    numerics::CompensatedSum sd, sdd;
    for (const auto& p : parts) {
      sd += p.d[j].value();
      sdd += p.dd[j].value();
    }
    const double md = sd.value() / nn;
    const double mdd = sdd.value() / nn;
    // +-1 variables: sample variance is n/(n-1) (1 - mean^2)
    est.mean.push_back(md);
    est.mean_se.push_back(std::sqrt(std::max(0.0, 1.0 - md * md) / (nn - 1.0)));
    est.cov.push_back(mdd);
    est.cov_se.push_back(std::sqrt(std::max(0.0, 1.0 - mdd * mdd) / (nn - 1.0)));
  }
  return est;
}

}  // namespace excursia
