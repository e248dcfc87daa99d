#pragma once

// Expectation of the clipped-at-zero Slepian process, crossing statistics,
// and the grid certificate that decides whether E0 is a valid survival
// function for the geometric-compound representation of the IIA.

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "excursia/covariance.hpp"
#include "excursia/numerics.hpp"

namespace excursia {

/// E0(t) = -r'(t) / (sqrt(-r''(0)) sqrt(1 - r(t)^2)), with E0(0) = 1.
inline double e0(const CovarianceModel& m, double t) {
  t = std::fabs(t);
  if (t < 1e-8) return 1.0;  // limit value; the correction is O(t^2)
  if (t == std::numeric_limits<double>::infinity()) return 0.0;
  const double dr = m.dr(t);
  if (dr == 0.0) return 0.0;
  const double omr = m.one_minus_r(t);
  const double one_minus_r2 = omr * (2.0 - omr);
  return -dr / (std::sqrt(-m.d2r0()) * std::sqrt(one_minus_r2));
}

/// dE0/dt, i.e. minus the divisor density.
inline double e0_derivative(const CovarianceModel& m, double t) {
  t = std::fabs(t);
  if (t < 1e-6) {
    // E0(t) = 1 - c t^2 + ...; estimate c from a point where cancellation is mild
    const double h = 1e-3;
    return -2.0 * (1.0 - e0(m, h)) / (h * h) * t;
  }
  if (t == std::numeric_limits<double>::infinity()) return 0.0;
  const double r = m.r(t);
  const double dr = m.dr(t);
  const double omr = m.one_minus_r(t);
  const double q = omr * (2.0 - omr);
  return -(m.d2r(t) * q + r * dr * dr) / (std::sqrt(-m.d2r0()) * q * std::sqrt(q));
}

/// Mean length of an excursion above zero: mu = pi sqrt(r(0) / -r''(0)).
inline double mean_excursion(const CovarianceModel& m) {
  return std::numbers::pi * std::sqrt(m.r0() / -m.d2r0());
}

/// Rice intensity of zero crossings: (1/pi) sqrt(-r''(0) / r(0)).
inline double crossing_intensity(const CovarianceModel& m) {
  return std::sqrt(-m.d2r0() / m.r0()) / std::numbers::pi;
}

/// The geometric divisor of the IIA exceedance distribution.
///
/// Holds the survival function E0, its density -E0', the mean mu/2 and the
/// tail class. Built either from a covariance model or from an analytic
/// fixture (used to test the transform and sampling machinery).
struct DivisorDistribution {
  std::string label;
  std::function<double(double)> survival;
  std::function<double(double)> density;
  double mean = std::numeric_limits<double>::quiet_NaN();
  TailClass tail;
  std::optional<CovarianceModel> model;
};

inline DivisorDistribution divisor_of(const CovarianceModel& m) {
  DivisorDistribution d;
  d.label = m.spec();
  d.survival = [m](double t) { return e0(m, t); };
  d.density = [m](double t) { return -e0_derivative(m, t); };
  d.mean = 0.5 * mean_excursion(m);
  d.tail = m.tail_rate_hint();
  d.model = m;
  return d;
}

/// Exponential divisor with survival e^{-b t}.
inline DivisorDistribution exponential_divisor(double rate) {
  if (!(rate > 0.0)) throw DomainError("exponential_divisor: rate must be > 0");
  DivisorDistribution d;
  d.label = "exponential(b=" + detail::format_number(rate) + ")";
  d.survival = [rate](double t) { return std::exp(-rate * t); };
  d.density = [rate](double t) { return rate * std::exp(-rate * t); };
  d.mean = 1.0 / rate;
  d.tail = TailClass::exponential(rate);
  return d;
}

// ---------------------------------------------------------------------------
// Validity certificate
// ---------------------------------------------------------------------------

enum class Verdict {
  valid,
  invalid_oscillating,
  invalid_nonintegrable,
  valid_but_power_tail_warning,
  inconclusive
};

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::valid:
      return "valid";
    case Verdict::invalid_oscillating:
      return "invalid_oscillating";
    case Verdict::invalid_nonintegrable:
      return "invalid_nonintegrable";
    case Verdict::valid_but_power_tail_warning:
      return "valid_but_power_tail_warning";
    default:
      return "inconclusive";
  }
}

/// True when the geometric-compound sampler may be used.
inline bool samplable(Verdict v) {
  return v == Verdict::valid || v == Verdict::valid_but_power_tail_warning;
}

struct ValidityReport {
  bool monotone_nonincreasing = true;
  std::optional<double> first_monotone_violation;
  bool nonnegative = true;
  std::optional<double> first_negative;
  bool integrable = false;
  TailClass tail_class;
  bool classification_inconclusive = false;
  Verdict verdict = Verdict::inconclusive;
  double t_max = 0.0;
  double step = 0.0;

  /// Earliest grid point violating either shape condition.
  [[nodiscard]] std::optional<double> first_violation() const {
    if (first_monotone_violation && first_negative)
      return std::min(*first_monotone_violation, *first_negative);
    return first_monotone_violation ? first_monotone_violation : first_negative;
  }
};

struct ValidationGrid {
  double t_max = 50.0;
  double step = 0.01;
  /// Fraction of the representable range used for tail classification.
  double tail_fraction = 0.2;
  /// E0(t_{i+1}) > E0(t_i) + monotone_tol counts as an increase.
  double monotone_tol = 1e-12;
};

namespace detail {

/// Classifies the tail from log E0 on a window of strictly positive values.
///
/// The local decay rate -d log E0 / dt behaves like t^k with k = -1 for a
/// power law, 0 for an exponential and 1 for a Gaussian-type tail; k is
/// estimated from linear fits on the two halves of the window.
inline TailClass classify_tail(std::span<const double> t, std::span<const double> log_e) {
  const std::size_t n = t.size();
  const std::size_t half = n / 2;
  const auto left = numerics::least_squares(t.first(half), log_e.first(half));
  const auto right = numerics::least_squares(t.subspan(half), log_e.subspan(half));
  if (!(left.slope < 0.0) || !(right.slope < 0.0)) return TailClass::undetermined();
  const double m1 = 0.5 * (t[0] + t[half - 1]);
  const double m2 = 0.5 * (t[half] + t[n - 1]);
  const double k = std::log(right.slope / left.slope) / std::log(m2 / m1);
  if (k < -0.5) {
    std::vector<double> log_t(n);
    for (std::size_t i = 0; i < n; ++i) log_t[i] = std::log(t[i]);
    return TailClass::power_law(numerics::least_squares(log_t, log_e).slope);
  }
  if (k < 0.5) return TailClass::exponential(-numerics::least_squares(t, log_e).slope);
  return TailClass::superexponential();
}

}  // namespace detail

/// Checks monotonicity, nonnegativity, tail class and integrability of a
/// candidate divisor survival function on a uniform grid.
///
/// The result is a finite certificate over [0, t_max], not a proof.
inline ValidityReport validate_survival(const std::function<double(double)>& survival,
                                        const ValidationGrid& grid = {}) {
  if (!(grid.t_max > 0.0) || !(grid.step > 0.0) || !(grid.step < grid.t_max))
    throw DomainError("validate_iia: need t_max > 0 and 0 < step < t_max");

  ValidityReport rep;
  rep.t_max = grid.t_max;
  rep.step = grid.step;

  const auto n = static_cast<std::size_t>(std::floor(grid.t_max / grid.step + 1e-9)) + 1;
  std::vector<double> ts(n), es(n);
  for (std::size_t i = 0; i < n; ++i) {
    ts[i] = static_cast<double>(i) * grid.step;
    es[i] = survival(ts[i]);
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (rep.nonnegative && es[i] < 0.0) {
      rep.nonnegative = false;
      rep.first_negative = ts[i];
    }
    if (i + 1 < n && rep.monotone_nonincreasing && es[i + 1] > es[i] + grid.monotone_tol) {
      rep.monotone_nonincreasing = false;
      rep.first_monotone_violation = ts[i + 1];
    }
  }

  // tail window: final fraction of the range where E0 is representable
  constexpr double kTiny = 1e-280;
  std::size_t last = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (es[i] > kTiny) last = i;
  const auto first = static_cast<std::size_t>(
      std::ceil((1.0 - grid.tail_fraction) * static_cast<double>(last)));
  std::vector<double> wt, wl;
  for (std::size_t i = std::max<std::size_t>(first, 1); i <= last; ++i) {
    if (es[i] > kTiny) {
      wt.push_back(ts[i]);
      wl.push_back(std::log(es[i]));
    }
  }
  if (wt.size() < 50) {
    rep.classification_inconclusive = true;
    rep.tail_class = TailClass::undetermined();
  } else {
    rep.tail_class = detail::classify_tail(wt, wl);
    rep.classification_inconclusive = rep.tail_class.kind == TailClass::Kind::undetermined;
  }
  rep.integrable = rep.tail_class.integrable();

  if (!rep.monotone_nonincreasing || !rep.nonnegative) {
    rep.verdict = Verdict::invalid_oscillating;
  } else if (rep.classification_inconclusive) {
    rep.verdict = Verdict::inconclusive;
  } else if (rep.tail_class.kind == TailClass::Kind::power_law) {
    rep.verdict = rep.integrable ? Verdict::valid_but_power_tail_warning
                                 : Verdict::invalid_nonintegrable;
  } else {
    rep.verdict = Verdict::valid;
  }
  return rep;
}

inline ValidityReport validate_iia(const CovarianceModel& m, double t_max = 50.0,
                                   double step = 0.01) {
  ValidationGrid g;
  g.t_max = t_max;
  g.step = step;
  return validate_survival([&m](double t) { return e0(m, t); }, g);
}

/// max over the grid of |R_cl'(t) + (2/mu) E0(t)|, with R_cl' by central
/// differences.
inline double check_equivalence(const CovarianceModel& m, std::span<const double> grid) {
  constexpr double h = 1e-5;
  const double scale = 2.0 / mean_excursion(m);
  double worst = 0.0;
  for (const double t : grid) {
    const double d = (clipped_autocovariance(m, t + h) - clipped_autocovariance(m, t - h)) /
                     (2.0 * h);
    worst = std::max(worst, std::fabs(d + scale * e0(m, t)));
  }
  return worst;
}

/// Uniform grid lo, lo + step, ..., up to and including hi (within rounding).
inline std::vector<double> uniform_grid(double lo, double hi, double step) {
  std::vector<double> g;
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  g.reserve(n);
  for (std::size_t i = 0; i < n; ++i) g.push_back(lo + static_cast<double>(i) * step);
  return g;
}

}  // namespace excursia
