#pragma once

// Exact samplers for the geometric divisor of each covariance model and the
// geometric-compound sampler of the IIA exceedance time
//
//   T_a = sum_{i=1}^{nu_geo} T~_i,   P(nu_geo = k) = 2^{-k},
//
// where the divisors T~_i are iid with survival function E0.
//
// Two closed-form inverses differ from the commonly printed versions:
//  * random acceleration: E0(t)^2 = 3 / (4 e^t - 1) inverts to
//    T = ln(3/U^2 + 1) - 2 ln 2 (a coefficient 2 instead of 3 maps U = 1 to
//    ln 3 - 2 ln 2 != 0 and fails the round trip E0(T(U)) = U);
//  * diffusion d = 1: with y = sech(T/2), E0^2 = (y + y^2)/2, so y solves
//    y^2 + y - 2U^2 = 0 and T = 2 arccosh(1/y).
// Both are checked by the round-trip tests.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "excursia/numerics.hpp"
#include "excursia/parallel.hpp"
#include "excursia/rng.hpp"
#include "excursia/slepian.hpp"

namespace excursia {

namespace detail {

/// arccosh(1 + x) for x >= 0, accurate for small x.
inline double acosh1p(double x) { return std::log1p(x + std::sqrt(x * (x + 2.0))); }

}  // namespace detail

// ---------------------------------------------------------------------------
// Diffusion
// ---------------------------------------------------------------------------

/// Inverse of E0 for diffusion(d=2): E0(t) = sech(t/2).
inline double diffusion_d2_inverse(double u) {
  // 2 ln(1 + sqrt(1 - U^2)) - 2 ln U, written as 2 arccosh(1/U)
  return 2.0 * detail::acosh1p((1.0 - u) / u);
}

/// Inverse of E0 for diffusion(d=1): E0(t)^2 = (sech(t/2) + sech^2(t/2)) / 2.
inline double diffusion_d1_inverse(double u) {
  const double u2 = u * u;
  const double root = std::sqrt(1.0 + 8.0 * u2);
  const double y = 0.5 * (root - 1.0);
  // 1/y - 1 = (1 - y)/y with 1 - y = 4 (1 - U^2) / (3 + root)
  const double one_minus_y = 4.0 * (1.0 - u) * (1.0 + u) / (3.0 + root);
  return 2.0 * detail::acosh1p(one_minus_y / y);
}

/// Root b > 0 of 1 + b + ... + b^{d-1} = a, for a >= 1.
inline double poly_inverse_b(int d, double a) {
  if (d < 2) throw DomainError("poly_inverse_b: d must be >= 2");
  if (!(a >= 1.0)) throw DomainError("poly_inverse_b: a must be >= 1");
  if (a == 1.0) return 0.0;
  auto eval = [d](double b, double& deriv) {
    double p = 0.0;
    double dp = 0.0;
    for (int i = d - 1; i >= 0; --i) {
      dp = dp * b + p;
      p = p * b + 1.0;
    }
    deriv = dp;
    return p;
  };
  // (a-1)/(d-1) lies left of the root when b < 1 and both guesses bound it
  // from the right when b > 1; by convexity every iterate after the first
  // lies right of the root and decreases monotonically.
  double b = std::min((a - 1.0) / (d - 1.0), std::pow(a, 1.0 / (d - 1.0)));
  for (int it = 0; it < 200; ++it) {
    double dp = 0.0;
    const double p = eval(b, dp);
    const double resid = p - a;
    if (std::fabs(resid) <= 1e-13 * a) break;
    double next = b - resid / dp;
    if (!(next > 0.0)) next = 0.5 * b;
    if (next == b) break;
    b = next;
  }
  return b;
}

/// G_d(t) = d (cosh^{d-1}(t/2) - 1) / ((d - 1)(cosh^d(t/2) - 1)), the ratio
/// E0_d^2 / E0_{d-1}^2 of consecutive diffusion survivals.
inline double g_survival(int d, double t) {
  if (t == 0.0) return 1.0;
  const double lc = detail::log_cosh(0.5 * t);
  return d * std::expm1((d - 1) * lc) / ((d - 1) * std::expm1(d * lc));
}

/// Inverse of G_d on (0, 1).
inline double g_inverse(int d, double g) {
  if (d < 3) throw DomainError("g_inverse: d must be >= 3");
  if (!(g > 0.0 && g < 1.0)) throw DomainError("g_inverse: g must lie in (0, 1)");
  const double a = d / (d - g * (d - 1.0));
  const double b = poly_inverse_b(d, a);
  return 2.0 * detail::acosh1p((1.0 - b) / b);
}

/// Divisor draw for diffusion(d): closed forms for d <= 2, recursive minimum
/// T_d = min(T_{d-1}, G_d^{-1}(U^2)) above.
inline double sample_divisor_diffusion(int d, RngStream& rng) {
  if (d < 1) throw DomainError("sample_divisor_diffusion: d must be >= 1");
  if (d == 1) return diffusion_d1_inverse(rng.uniform());
  double t = diffusion_d2_inverse(rng.uniform());
  for (int j = 3; j <= d; ++j) {
    const double u = rng.uniform();
    t = std::min(t, g_inverse(j, u * u));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Random acceleration
// ---------------------------------------------------------------------------

/// Inverse of E0(t) = sqrt(3 / (4 e^t - 1)): ln(3/U^2 + 1) - 2 ln 2.
inline double random_acceleration_inverse(double u) {
  // = log1p(3 (1 - U^2) / (4 U^2)), exact at U = 1
  return std::log1p(3.0 * (1.0 - u) * (1.0 + u) / (4.0 * u * u));
}

inline double sample_divisor_random_acceleration(RngStream& rng) {
  return random_acceleration_inverse(rng.uniform());
}

// ---------------------------------------------------------------------------
// Gaussian covariance (shifted_gaussian with alpha = 0): rejection sampling
// ---------------------------------------------------------------------------

/// Rejection sampler for the density -E0' of the Gaussian covariance,
/// f(t) = (e^{t^2}(t^2 - 1) + 1) / (e^{t^2} - 1)^{3/2}, with a Rayleigh
/// proposal and a fixed envelope constant.
class GaussianDivisorSampler {
 public:
  static constexpr double kSigma = 1.3;
  static constexpr double kEnvelope = 1.18;

  /// Verifies f <= envelope * g on [1e-4, 20] before any draw is made.
  GaussianDivisorSampler() {
    for (double t = 1e-4; t <= 20.0; t += 1e-3) {
      if (density(t) > kEnvelope * proposal_density(t))
        throw ConfigurationError("gaussian divisor: envelope 1.18 * Rayleigh(1.3) fails at t = " +
                                 std::to_string(t));
    }
  }

  static double density(double t) {
    t = std::fabs(t);
    if (t > 40.0) return 0.0;  // e^{-t^2/2} underflows
    const double t2 = t * t;
    if (t2 < 1e-100) return 0.5 * t;  // leading term; avoids 0/0
    double num = 0.0;
    if (t2 < 1e-2) {
      // t^2 + expm1(-t^2) by its series
      num = t2 * t2 * (0.5 - t2 / 6.0 + t2 * t2 / 24.0 - t2 * t2 * t2 / 120.0);
    } else {
      num = t2 + std::expm1(-t2);
    }
    const double den = -std::expm1(-t2);
    return num * std::exp(-0.5 * t2) / (den * std::sqrt(den));
  }

  static double proposal_density(double t) {
    constexpr double s2 = kSigma * kSigma;
    return t / s2 * std::exp(-t * t / (2.0 * s2));
  }

  /// One accepted draw; `proposals`, when given, is incremented per proposal.
  double operator()(RngStream& rng, std::uint64_t* proposals = nullptr) const {
    for (;;) {
      const double x = kSigma * std::sqrt(-2.0 * std::log(rng.uniform()));
      if (proposals) ++*proposals;
      const double u = rng.uniform();
      if (u * kEnvelope * proposal_density(x) <= density(x)) return x;
    }
  }
};

inline double sample_divisor_gaussian(RngStream& rng) {
  static const GaussianDivisorSampler sampler;
  return sampler(rng);
}

// ---------------------------------------------------------------------------
// Matérn and generic numerical inversion
// ---------------------------------------------------------------------------

namespace detail {

/// Smallest power-of-two multiple of `start` with survival below u.
template <class S>
double upper_bracket(S&& survival, double u, double start = 1.0) {
  double hi = start;
  while (survival(hi) >= u) {
    hi *= 2.0;
    if (hi > 1e12) throw DomainError("inverse: survival does not fall below u");
  }
  return hi;
}

/// E0 and E0' for the Matérn nu = 5/2 covariance in explicit form:
///   E0(t)  = sqrt(3) (t^2 + t) / sqrt(9 e^{2t} - (t^2 + 3t + 3)^2),
///   E0'(t) = E0(t) ((2t + 1)/(t^2 + t)
///            + ((t^2 + 3t + 3)(2t + 3) - 9 e^{2t}) / (9 e^{2t} - (t^2 + 3t + 3)^2)).
/// Differences of the form 9e^{2t} - P^2 are evaluated as 9e^{2t}(1 - r^2).
struct Matern52 {
  CovarianceModel model = CovarianceModel::matern(2.5);

  [[nodiscard]] double one_minus_r2(double t) const {
    const double omr = model.one_minus_r(t);
    return omr * (2.0 - omr);
  }
  [[nodiscard]] double e0(double t) const {
    if (t < 1e-8) return 1.0;
    return (t * t + t) * std::exp(-t) / (std::sqrt(3.0) * std::sqrt(one_minus_r2(t)));
  }
  [[nodiscard]] double de0(double t) const {
    if (t < 1e-6) return excursia::e0_derivative(model, t);
    const double p = t * t + 3.0 * t + 3.0;
    const double q = one_minus_r2(t);
    const double ratio = (p * (2.0 * t + 3.0) * std::exp(-2.0 * t) / 9.0 - 1.0) / q;
    return e0(t) * ((2.0 * t + 1.0) / (t * t + t) + ratio);
  }
};

}  // namespace detail

/// Solves E0(T) = u for the Matérn divisor by Newton iteration kept inside a
/// shrinking bracket (bisection whenever a step would leave it).
inline double matern_inverse(const CovarianceModel& m, double u) {
  if (m.kind() != ModelKind::matern) throw DomainError("matern_inverse: not a Matérn model");
  if (!(u > 0.0 && u < 1.0)) throw DomainError("matern_inverse: u must lie in (0, 1)");
  const bool explicit52 = m.param() == 2.5;
  static const detail::Matern52 m52;
  auto f = [&](double t) { return (explicit52 ? m52.e0(t) : e0(m, t)) - u; };
  auto df = [&](double t) { return explicit52 ? m52.de0(t) : e0_derivative(m, t); };
  const double hi = detail::upper_bracket([&](double t) { return f(t) + u; }, u);
  const double lo = 0.0;
  const double x0 = 0.5 * hi;
  return numerics::safeguarded_newton(f, df, x0, lo, hi, 1e-14).x;
}

inline double sample_divisor_matern(const CovarianceModel& m, RngStream& rng) {
  return matern_inverse(m, rng.uniform());
}

/// Solves survival(T) = u by bracketed false position / bisection.
template <class S>
double generic_inverse(S&& survival, double u) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("generic_inverse: u must lie in (0, 1)");
  const double hi = detail::upper_bracket(survival, u);
  auto f = [&](double t) { return survival(t) - u; };
  return numerics::bracketed_root(f, 0.0, hi, 1.0 - u, f(hi), 1e-13, 0.0).x;
}

// ---------------------------------------------------------------------------
// Strategy selection
// ---------------------------------------------------------------------------

/// Draws from the geometric divisor of a validated model (or an analytic
/// fixture) using the best available method.
class DivisorSampler {
 public:
  enum class Strategy {
    diffusion_closed_form,
    random_acceleration_closed_form,
    gaussian_rejection,
    matern_newton,
    generic_inversion,
    exponential
  };

  /// Validates the model; refuses (ValidityError) unless E0 is a survival
  /// function with finite mean.
  static DivisorSampler for_model(const CovarianceModel& m) {
    const auto report = validate_iia(m);
    return for_model(m, report);
  }

  static DivisorSampler for_model(const CovarianceModel& m, const ValidityReport& report) {
    if (!samplable(report.verdict))
      throw ValidityError("sampler: " + m.spec() + " failed IIA validation (" +
                              std::string(to_string(report.verdict)) + ")",
                          std::string(to_string(report.verdict)));
    DivisorSampler s(divisor_of(m));
    switch (m.kind()) {
      case ModelKind::diffusion:
        s.strategy_ = Strategy::diffusion_closed_form;
        break;
      case ModelKind::random_acceleration:
        s.strategy_ = Strategy::random_acceleration_closed_form;
        break;
      case ModelKind::shifted_gaussian:
        s.strategy_ = m.param() == 0.0 ? Strategy::gaussian_rejection : Strategy::generic_inversion;
        if (s.strategy_ == Strategy::gaussian_rejection) s.gaussian_.emplace();
        break;
      case ModelKind::matern:
        s.strategy_ = Strategy::matern_newton;
        break;
      default:
        s.strategy_ = Strategy::generic_inversion;
    }
    return s;
  }

  /// Numerical inversion only, regardless of available closed forms.
  static DivisorSampler generic(const CovarianceModel& m) {
    auto s = for_model(m);
    s.strategy_ = Strategy::generic_inversion;
    return s;
  }

  static DivisorSampler exponential(double rate) {
    DivisorSampler s(exponential_divisor(rate));
    s.strategy_ = Strategy::exponential;
    s.rate_ = rate;
    return s;
  }

  [[nodiscard]] Strategy strategy() const { return strategy_; }
  [[nodiscard]] const DivisorDistribution& distribution() const { return dist_; }

  double operator()(RngStream& rng) const {
    switch (strategy_) {
      case Strategy::diffusion_closed_form:
        return sample_divisor_diffusion(dist_.model->dimension(), rng);
      case Strategy::random_acceleration_closed_form:
        return sample_divisor_random_acceleration(rng);
      case Strategy::gaussian_rejection:
        return (*gaussian_)(rng);
      case Strategy::matern_newton:
        return sample_divisor_matern(*dist_.model, rng);
      case Strategy::exponential:
        return rng.exponential() / rate_;
      default:
        return generic_inverse(dist_.survival, rng.uniform());
    }
  }

 private:
  explicit DivisorSampler(DivisorDistribution d) : dist_(std::move(d)) {}

  DivisorDistribution dist_;
  Strategy strategy_ = Strategy::generic_inversion;
  std::optional<GaussianDivisorSampler> gaussian_;
  double rate_ = 1.0;
};

inline double sample_divisor_generic(const CovarianceModel& m, RngStream& rng) {
  const auto report = validate_iia(m);
  if (!samplable(report.verdict))
    throw ValidityError("sampler: " + m.spec() + " failed IIA validation",
                        std::string(to_string(report.verdict)));
  return generic_inverse([&m](double t) { return e0(m, t); }, rng.uniform());
}

// ---------------------------------------------------------------------------
// Geometric compound
// ---------------------------------------------------------------------------

struct ExcursionSample {
  double value;
  std::uint32_t divisor_count;
};

/// Geometric(1/2) count on {1, 2, ...} by inversion: ceil(-log2 U).
inline std::uint32_t sample_geometric_half(RngStream& rng) {
  const double k = std::ceil(-std::log2(rng.uniform()));
  return static_cast<std::uint32_t>(std::max(1.0, k));
}

inline ExcursionSample sample_excursion(const DivisorSampler& divisor, RngStream& rng) {
  const std::uint32_t count = sample_geometric_half(rng);
  numerics::CompensatedSum sum;
  for (std::uint32_t i = 0; i < count; ++i) sum += divisor(rng);
  return {sum.value(), count};
}

enum class SampleTarget { divisor, excursion };

/// n draws split into `streams` contiguous chunks; chunk j uses stream j of
/// `seed`, so the output depends only on (n, seed, streams).
inline std::vector<double> sample_many(const DivisorSampler& divisor, SampleTarget target,
                                       std::size_t n, std::uint64_t seed, std::size_t streams = 1,
                                       std::size_t threads = 1, std::uint64_t stream_offset = 0) {
  streams = std::max<std::size_t>(1, std::min(streams, std::max<std::size_t>(n, 1)));
  std::vector<double> out(n);
  parallel_for(streams, threads, [&](std::size_t j) {
    const std::size_t begin = n * j / streams;
    const std::size_t end = n * (j + 1) / streams;
    RngStream rng(seed, stream_offset + j);
    for (std::size_t i = begin; i < end; ++i)
      out[i] = target == SampleTarget::divisor ? divisor(rng) : sample_excursion(divisor, rng).value;
  });
  return out;
}

}  // namespace excursia
