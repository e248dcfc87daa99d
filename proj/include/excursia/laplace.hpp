#pragma once

// Numerical Laplace transform of the divisor survival E0, the divisor and
// excursion-time transforms derived from it, and the pole-based exponent.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "excursia/estimate.hpp"
#include "excursia/numerics.hpp"
#include "excursia/slepian.hpp"

namespace excursia {

struct LaplaceOptions {
  /// Relative tolerance of each quadrature panel.
  double rel_tol = 1e-9;
  /// Hard truncation point for slowly decaying integrands.
  double t_cap = 1e5;
};

struct LaplaceValue {
  double value;
  /// Where panel quadrature stopped and the analytic tail took over.
  double t_max;
  double tail_term;
};

/// Laplace transform s -> int_0^inf E0(t) e^{-st} dt of a divisor survival.
///
/// Quadrature runs over geometrically growing panels until their
/// contribution is negligible; the remainder beyond the last panel is
/// integrated analytically from a fit of log E0 over the final decade
/// (exponential form, or power form for power-law tails).
class LaplaceEvaluator {
 public:
  explicit LaplaceEvaluator(DivisorDistribution dist, LaplaceOptions opts = {})
      : dist_(std::move(dist)), opts_(opts) {}

  [[nodiscard]] const DivisorDistribution& distribution() const { return dist_; }
  [[nodiscard]] const LaplaceOptions& options() const { return opts_; }

  /// Infimum of the s for which the transform converges.
  [[nodiscard]] double convergence_boundary() const {
    switch (dist_.tail.kind) {
      case TailClass::Kind::exponential:
        return -dist_.tail.value;
      case TailClass::Kind::superexponential:
        return -std::numeric_limits<double>::infinity();
      default:
        return 0.0;
    }
  }

  /// Power-law tails converge at s = 0 itself when integrable.
  [[nodiscard]] bool converges_at(double s) const {
    const double b = convergence_boundary();
    if (dist_.tail.kind == TailClass::Kind::power_law) return s > 0.0 || (s == 0.0 && dist_.tail.integrable());
    if (dist_.tail.kind == TailClass::Kind::undetermined) return s > 0.0;
    return s > b;
  }

  [[nodiscard]] LaplaceValue evaluate(double s) const {
    if (!converges_at(s))
      throw DivergenceError("Laplace transform of " + dist_.label + " diverges at s = " +
                                std::to_string(s) + " (convergence boundary " +
                                std::to_string(convergence_boundary()) + ")",
                            convergence_boundary());
    const auto& E = dist_.survival;
    auto integrand = [&](double t) {
      const double e = E(t);
      return e == 0.0 ? 0.0 : e * std::exp(-s * t);
    };

    numerics::CompensatedSum total;
    double a = 0.0;
    int quiet_panels = 0;
    constexpr double kTiny = 1e-290;
    while (true) {
      const double width = std::max(0.5, 0.1 * a);
      const double b = std::min(a + width, opts_.t_cap);
      const double part = numerics::integrate(integrand, a, b, opts_.rel_tol * 0.1);
      total += part;
      a = b;
      if (a >= opts_.t_cap) break;
      const double ea = E(a);
      if (ea <= kTiny) break;
      const bool decaying = integrand(a) <= integrand(0.95 * a);
      if (decaying && std::fabs(part) <= 1e-3 * opts_.rel_tol * std::fabs(total.value())) {
        if (++quiet_panels >= 3) break;
      } else {
        quiet_panels = 0;
      }
    }
    const double tail = tail_completion(s, a);
    total += tail;
    return {total.value(), a, tail};
  }

  double operator()(double s) const { return evaluate(s).value; }

 private:
  double tail_completion(double s, double t_end) const {
    constexpr int kPts = 11;
    std::vector<double> xs, ys;
    for (int i = 0; i < kPts; ++i) {
      const double t = t_end * (0.9 + 0.1 * i / (kPts - 1));
      const double e = dist_.survival(t);
      if (!(e > 0.0)) return 0.0;
      xs.push_back(dist_.tail.kind == TailClass::Kind::power_law ? std::log(t) : t);
      ys.push_back(std::log(e));
    }
    const auto fit = numerics::least_squares(xs, ys);
    if (dist_.tail.kind == TailClass::Kind::power_law) {
      const double p = fit.slope;
      const double denom = s * t_end - p - 1.0;
      if (!(denom > 0.0)) return 0.0;
      return std::exp(fit.intercept + (p + 1.0) * std::log(t_end) - s * t_end) / denom;
    }
    const double kappa = -fit.slope + s;
    if (!(kappa > 0.0)) return 0.0;
    return std::exp(fit.intercept - kappa * t_end) / kappa;
  }

  DivisorDistribution dist_;
  LaplaceOptions opts_;
};

inline double laplace_e0(const CovarianceModel& m, double s, LaplaceOptions opts = {}) {
  return LaplaceEvaluator(divisor_of(m), opts)(s);
}

/// Laplace transform of the divisor law: 1 - s L E0(s).
inline double psi_divisor(const LaplaceEvaluator& L, double s) { return 1.0 - s * L(s); }

/// Laplace transform of the IIA excursion time:
/// (1 - s L E0(s)) / (1 + s L E0(s)).
inline double psi_excursion(const LaplaceEvaluator& L, double s) {
  const double sl = s * L(s);
  if (std::fabs(1.0 + sl) < 1e-12)
    throw PoleError("psi_excursion: s = " + std::to_string(s) + " is at a pole");
  return (1.0 - sl) / (1.0 + sl);
}

inline double psi_divisor(const CovarianceModel& m, double s) {
  return psi_divisor(LaplaceEvaluator(divisor_of(m)), s);
}
inline double psi_excursion(const CovarianceModel& m, double s) {
  return psi_excursion(LaplaceEvaluator(divisor_of(m)), s);
}

struct PoleOptions {
  /// Lower bracket end as a fraction of the convergence boundary.
  double boundary_margin = 0.95;
  /// Most negative s tried for superexponential tails.
  double superexponential_limit = -16.0;
  double h_tol = 1e-10;
  LaplaceOptions laplace;
};

/// Largest real root s* < 0 of h(s) = 1 + s L E0(s); returns theta = -s*.
///
/// The divisor must have an exponential or superexponential tail.
inline ExponentEstimate find_pole(const DivisorDistribution& dist, const PoleOptions& opts = {}) {
  const auto kind = dist.tail.kind;
  if (kind != TailClass::Kind::exponential && kind != TailClass::Kind::superexponential)
    throw ValidityError("find_pole: " + dist.label + " has no exponential tail",
                        std::string(to_string(kind)));

  const LaplaceEvaluator L(dist, opts.laplace);
  auto h = [&](double s) { return 1.0 + s * L(s); };

  const double hi = 0.0;
  const double h_hi = 1.0;
  double lo = 0.0;
  double h_lo = 0.0;
  if (kind == TailClass::Kind::exponential) {
    lo = -opts.boundary_margin * dist.tail.value;
    h_lo = h(lo);
  } else {
    lo = -1.0;
    h_lo = h(lo);
    while (h_lo >= 0.0 && lo > opts.superexponential_limit) {
      lo *= 2.0;
      h_lo = h(lo);
    }
  }
  if (!(h_lo < 0.0))
    throw PoleNotFound("find_pole: no sign change of 1 + s L E0(s) on [" + std::to_string(lo) +
                           ", 0] for " + dist.label,
                       lo, hi, h_lo, h_hi);

  const auto root = numerics::bracketed_root(h, lo, hi, h_lo, h_hi, opts.h_tol, 1e-13);

  ExponentEstimate est;
  est.theta = -root.x;
  est.method = ExponentEstimate::Method::pole;
  est.bracket = std::pair{lo, hi};
  est.residual = root.fx;
  est.boundary_margin = opts.boundary_margin;
  return est;
}

/// Validates the model first and refuses when E0 is not a proper survival
/// function with a light tail.
inline ExponentEstimate find_pole(const CovarianceModel& m, const PoleOptions& opts = {}) {
  const auto report = validate_iia(m);
  if (report.verdict != Verdict::valid)
    throw ValidityError("find_pole: " + m.spec() + " failed IIA validation",
                        std::string(to_string(report.verdict)));
  return find_pole(divisor_of(m), opts);
}

}  // namespace excursia
