#pragma once

// Small numerical building blocks shared by the modules: bracketed root
// finding, panel quadrature on long intervals, compensated summation and
// least squares lines.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "excursia/error.hpp"

namespace excursia::numerics {

/// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  [[nodiscard]] double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct RootResult {
  double x;
  double fx;
  int iterations;
};

/// Root of a continuous f on [lo, hi] with f(lo), f(hi) of opposite sign.
///
/// Illinois-modified false position; falls back to bisection whenever the
/// interpolated point fails to shrink the bracket by half every two steps.
/// Stops when |f| <= f_tol or the bracket is narrower than x_tol.
template <class F>
RootResult bracketed_root(F&& f, double lo, double hi, double f_lo, double f_hi,
                          double f_tol, double x_tol = 0.0, int max_iter = 400) {
  if (f_lo == 0.0) return {lo, 0.0, 0};
  if (f_hi == 0.0) return {hi, 0.0, 0};
  if ((f_lo > 0.0) == (f_hi > 0.0))
    throw DomainError("bracketed_root: no sign change in bracket");

  int side = 0;
  double width = std::fabs(hi - lo);
  double width_before = 2.0 * width;
  double x = lo;
  double fx = f_lo;
  for (int it = 1; it <= max_iter; ++it) {
    double cand = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
    const bool slow = it % 2 == 0 && width > 0.5 * width_before;
    if (it % 2 == 0) width_before = width;
    if (slow || !(cand > std::min(lo, hi) && cand < std::max(lo, hi)))
      cand = 0.5 * (lo + hi);
    x = cand;
    fx = f(x);
    if (std::fabs(fx) <= f_tol) return {x, fx, it};
    if ((fx > 0.0) == (f_hi > 0.0)) {
      hi = x;
      f_hi = fx;
      if (side == -1) f_lo *= 0.5;
      side = -1;
    } else {
      lo = x;
      f_lo = fx;
      if (side == 1) f_hi *= 0.5;
      side = 1;
    }
    width = std::fabs(hi - lo);
    if (width <= x_tol || width <= 4.0 * std::numeric_limits<double>::epsilon() * std::fabs(x))
      return {x, fx, it};
  }
  return {x, fx, max_iter};
}

/// Newton iteration kept inside a bracket [lo, hi] with f(lo), f(hi) of
/// opposite sign; steps leaving the bracket are replaced by bisection.
template <class F, class DF>
RootResult safeguarded_newton(F&& f, DF&& df, double x0, double lo, double hi,
                              double f_tol, int max_iter = 200) {
  double f_lo = f(lo);
  double x = x0;
  double fx = f(x);
  for (int it = 1; it <= max_iter; ++it) {
    if (std::fabs(fx) <= f_tol) return {x, fx, it};
    if ((fx > 0.0) == (f_lo > 0.0)) {
      lo = x;
      f_lo = fx;
    } else {
      hi = x;
    }
    const double d = df(x);
    double next = x - fx / d;
    if (!std::isfinite(next) || !(next > std::min(lo, hi) && next < std::max(lo, hi)))
      next = 0.5 * (lo + hi);
    if (next == x) return {x, fx, it};
    x = next;
    fx = f(x);
    if (std::fabs(hi - lo) <= 4.0 * std::numeric_limits<double>::epsilon() * std::fabs(x))
      return {x, fx, it};
  }
  return {x, fx, max_iter};
}

/// Adaptive Gauss-Kronrod integral over [a, b].
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-10) {
  if (a == b) return 0.0;
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, rel_tol,
                                                                       &err);
}

struct Line {
  double intercept;
  double slope;
};

/// Ordinary least squares fit y = intercept + slope * x.
inline Line least_squares(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  CompensatedSum sx, sy;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx.value() / static_cast<double>(n);
  const double my = sy.value() / static_cast<double>(n);
  CompensatedSum sxx, sxy;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    sxx += dx * dx;
    sxy += dx * (y[i] - my);
  }
  const double slope = sxy.value() / sxx.value();
  return {my - slope * mx, slope};
}

}  // namespace excursia::numerics
