#pragma once

// Analytic stationary autocovariance models, normalized to r(0) = 1.

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "excursia/error.hpp"

namespace excursia {

/// Tail behaviour of a survival function.
struct TailClass {
  enum class Kind { exponential, power_law, superexponential, undetermined };

  Kind kind = Kind::undetermined;
  /// Decay rate for exponential tails, log-log slope for power-law tails.
  double value = 0.0;

  static TailClass exponential(double rate) { return {Kind::exponential, rate}; }
  static TailClass power_law(double exponent) {
    return {Kind::power_law, exponent};
  }
  static TailClass superexponential() { return {Kind::superexponential, 0.0}; }
  static TailClass undetermined() { return {Kind::undetermined, 0.0}; }

  [[nodiscard]] bool integrable() const {
    switch (kind) {
      case Kind::exponential:
      case Kind::superexponential:
        return true;
      case Kind::power_law:
        return value < -1.0;
      default:
        return false;
    }
  }
};

inline std::string_view to_string(TailClass::Kind k) {
  switch (k) {
    case TailClass::Kind::exponential:
      return "exponential";
    case TailClass::Kind::power_law:
      return "power_law";
    case TailClass::Kind::superexponential:
      return "superexponential";
    default:
      return "undetermined";
  }
}

enum class ModelKind {
  diffusion,
  random_acceleration,
  shifted_gaussian,
  matern,
  generalized_laplace
};

namespace detail {

/// log(cosh(x)) without overflow or loss of precision near zero.
/// Shortest decimal form that reads back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

inline double log_cosh(double x) {
  x = std::fabs(x);
  if (x > 20.0) return x - std::numbers::ln2 + std::log1p(std::exp(-2.0 * x));
  const double s = std::sinh(0.5 * x);
  return std::log1p(2.0 * s * s);
}

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

/// Coefficients (ascending powers) of the polynomial P_k with
/// t^{k+1/2} K_{k+1/2}(t) = sqrt(pi/2) e^{-t} P_k(t).
inline std::vector<double> half_integer_bessel_poly(int k) {
  std::vector<double> c(static_cast<std::size_t>(k) + 1, 0.0);
  for (int j = 0; j <= k; ++j) {
    // term j of the finite sum contributes to power t^{k-j}
    c[static_cast<std::size_t>(k - j)] =
        factorial(k + j) / (factorial(k - j) * factorial(j) * std::ldexp(1.0, j));
  }
  return c;
}

inline double polyval(const std::vector<double>& c, double t) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
  return acc;
}

}  // namespace detail

/// A named stationary autocovariance with analytic r, r', r'' and r''(0).
///
/// Built-in models are normalized so that r(0) = 1. Parameters are validated
/// on construction; evaluation never throws.
class CovarianceModel {
 public:
  static CovarianceModel diffusion(int d) {
    if (d < 1 || d > 64)
      throw ModelError("diffusion: dimension d must be an integer in [1, 64]");
    CovarianceModel m(ModelKind::diffusion);
    m.param_ = d;
    return m;
  }

  static CovarianceModel random_acceleration() {
    return CovarianceModel(ModelKind::random_acceleration);
  }

  static CovarianceModel shifted_gaussian(double alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
      throw ModelError("shifted_gaussian: shift alpha must be finite and >= 0");
    CovarianceModel m(ModelKind::shifted_gaussian);
    m.param_ = alpha;
    return m;
  }

  /// Matérn covariance C_nu t^nu K_nu(t) for nu in {5/2, 7/2, 9/2}.
  static CovarianceModel matern(double nu) {
    const double k = nu - 0.5;
    if (!(k == 2.0 || k == 3.0 || k == 4.0))
      throw ModelError("matern: smoothness nu must be one of 2.5, 3.5, 4.5");
    CovarianceModel m(ModelKind::matern);
    m.param_ = nu;
    const int order = static_cast<int>(k);
    m.poly_ = detail::half_integer_bessel_poly(order);
    m.poly_lower_ = detail::half_integer_bessel_poly(order - 1);
    m.build_matern_series();
    return m;
  }

  /// r(t) = (1 + t^2/2)^{-alpha}.
  static CovarianceModel generalized_laplace(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
      throw ModelError("generalized_laplace: exponent alpha must be > 0");
    CovarianceModel m(ModelKind::generalized_laplace);
    m.param_ = alpha;
    return m;
  }

  [[nodiscard]] ModelKind kind() const noexcept { return kind_; }
  /// The single model parameter (d, alpha, nu or alpha_L); 0 when unused.
  [[nodiscard]] double param() const noexcept { return param_; }
  [[nodiscard]] int dimension() const noexcept { return static_cast<int>(param_); }

  [[nodiscard]] std::string name() const {
    switch (kind_) {
      case ModelKind::diffusion:
        return "diffusion";
      case ModelKind::random_acceleration:
        return "random_acceleration";
      case ModelKind::shifted_gaussian:
        return "shifted_gaussian";
      case ModelKind::matern:
        return "matern";
      default:
        return "generalized_laplace";
    }
  }

  /// Canonical specification string, parseable by parse_model().
  [[nodiscard]] std::string spec() const {
    switch (kind_) {
      case ModelKind::diffusion:
        return "diffusion(d=" + std::to_string(dimension()) + ")";
      case ModelKind::random_acceleration:
        return "random_acceleration()";
      case ModelKind::shifted_gaussian:
        return "shifted_gaussian(alpha=" + format_param(param_) + ")";
      case ModelKind::matern:
        return "matern(nu=" + format_param(param_) + ")";
      default:
        return "generalized_laplace(alpha=" + format_param(param_) + ")";
    }
  }

  [[nodiscard]] double r0() const noexcept { return 1.0; }

  [[nodiscard]] double r(double t) const {
    t = std::fabs(t);
    switch (kind_) {
      case ModelKind::diffusion:
        return std::exp(-0.5 * param_ * detail::log_cosh(0.5 * t));
      case ModelKind::random_acceleration: {
        const double x = std::exp(-0.5 * t);
        return 0.5 * x * (3.0 - x * x);
      }
      case ModelKind::shifted_gaussian:
        if (t > kUnderflowCutoff) return 0.0;
        return std::cos(param_ * t) * std::exp(-0.5 * t * t);
      case ModelKind::matern:
        if (t > kUnderflowCutoff) return 0.0;
        return std::exp(-t) * detail::polyval(poly_, t) / poly_[0];
      default:
        return std::exp(-param_ * std::log1p(0.5 * t * t));
    }
  }

  /// 1 - r(t), accurate to full relative precision as t -> 0.
  [[nodiscard]] double one_minus_r(double t) const {
    t = std::fabs(t);
    switch (kind_) {
      case ModelKind::diffusion:
        return -std::expm1(-0.5 * param_ * detail::log_cosh(0.5 * t));
      case ModelKind::random_acceleration: {
        // 1 - (3x - x^3)/2 = (x - 1)^2 (x + 2) / 2 with x = e^{-t/2}
        const double xm1 = std::expm1(-0.5 * t);
        return 0.5 * xm1 * xm1 * (xm1 + 3.0);
      }
      case ModelKind::shifted_gaussian: {
        if (t > kUnderflowCutoff) return 1.0;
        const double s = std::sin(0.5 * param_ * t);
        return 2.0 * s * s - std::cos(param_ * t) * std::expm1(-0.5 * t * t);
      }
      case ModelKind::matern: {
        if (t >= 1.0) return 1.0 - r(t);
        // Taylor series of e^{-t} P(t) / P(0); constant and linear terms cancel.
        double acc = 0.0;
        double tn = t;
        for (std::size_t n = 2; n < matern_series_.size(); ++n) {
          tn *= t;
          acc += matern_series_[n] * tn;
        }
        return -acc;
      }
      default:
        return -std::expm1(-param_ * std::log1p(0.5 * t * t));
    }
  }

  /// r'(t) for t >= 0.
  [[nodiscard]] double dr(double t) const {
    switch (kind_) {
      case ModelKind::diffusion:
        return -0.25 * param_ * r(t) * std::tanh(0.5 * t);
      case ModelKind::random_acceleration:
        return 0.75 * std::exp(-0.5 * t) * std::expm1(-t);
      case ModelKind::shifted_gaussian: {
        if (t > kUnderflowCutoff) return 0.0;
        const double a = param_;
        return -(a * std::sin(a * t) + t * std::cos(a * t)) * std::exp(-0.5 * t * t);
      }
      case ModelKind::matern:
        if (t > kUnderflowCutoff) return 0.0;
        return -t * std::exp(-t) * detail::polyval(poly_lower_, t) / poly_[0];
      default: {
        const double u = 1.0 + 0.5 * t * t;
        return -param_ * t * std::pow(u, -param_ - 1.0);
      }
    }
  }

  /// r''(t) for t >= 0.
  [[nodiscard]] double d2r(double t) const {
    switch (kind_) {
      case ModelKind::diffusion: {
        const double th = std::tanh(0.5 * t);
        const double q = 0.25 * param_;
        return q * r(t) * (q * th * th - 0.5 * (1.0 - th * th));
      }
      case ModelKind::random_acceleration: {
        const double x = std::exp(-0.5 * t);
        return 0.375 * x - 1.125 * x * x * x;
      }
      case ModelKind::shifted_gaussian: {
        if (t > kUnderflowCutoff) return 0.0;
        const double a = param_;
        return ((t * t - 1.0 - a * a) * std::cos(a * t) + 2.0 * a * t * std::sin(a * t)) *
               std::exp(-0.5 * t * t);
      }
      case ModelKind::matern: {
        // d/dt [ t Q(t) e^{-t} ] = e^{-t} [ (1 - t) Q + t Q' ]
        if (t > kUnderflowCutoff) return 0.0;
        double dq = 0.0;
        for (std::size_t j = poly_lower_.size() - 1; j >= 1; --j)
          dq = dq * t + static_cast<double>(j) * poly_lower_[j];
        const double q = detail::polyval(poly_lower_, t);
        return -std::exp(-t) * ((1.0 - t) * q + t * dq) / poly_[0];
      }
      default: {
        const double u = 1.0 + 0.5 * t * t;
        const double a = param_;
        return -a * std::pow(u, -a - 1.0) + a * (a + 1.0) * t * t * std::pow(u, -a - 2.0);
      }
    }
  }

  /// Analytic r''(0); strictly negative for every constructible model.
  [[nodiscard]] double d2r0() const {
    switch (kind_) {
      case ModelKind::diffusion:
        return -param_ / 8.0;
      case ModelKind::random_acceleration:
        return -0.75;
      case ModelKind::shifted_gaussian:
        return -(1.0 + param_ * param_);
      case ModelKind::matern:
        return -1.0 / (2.0 * (param_ - 1.0));
      default:
        return -param_;
    }
  }

  /// Known tail of the divisor survival function E0, used for Laplace
  /// truncation and pole bracketing.
  [[nodiscard]] TailClass tail_rate_hint() const {
    switch (kind_) {
      case ModelKind::diffusion:
        return TailClass::exponential(param_ / 4.0);
      case ModelKind::random_acceleration:
        return TailClass::exponential(0.5);
      case ModelKind::shifted_gaussian:
        return TailClass::superexponential();
      case ModelKind::matern:
        return TailClass::exponential(1.0);
      default:
        return TailClass::power_law(-(1.0 + 2.0 * param_));
    }
  }

 private:
  // Beyond this lag the exponential factors of the Matern and shifted
  // Gaussian models underflow; returning the limit avoids 0 * inf = NaN.
  static constexpr double kUnderflowCutoff = 1000.0;

  explicit CovarianceModel(ModelKind k) : kind_(k) {}

  static std::string format_param(double v) { return detail::format_number(v); }

  void build_matern_series() {
    // coefficients of e^{-t} P(t) / P(0) around t = 0
    constexpr std::size_t kTerms = 40;
    matern_series_.assign(kTerms, 0.0);
    for (std::size_t n = 0; n < kTerms; ++n) {
      double c = 0.0;
      for (std::size_t j = 0; j < poly_.size() && j <= n; ++j) {
        const double sign = ((n - j) % 2 == 0) ? 1.0 : -1.0;
        c += poly_[j] * sign / detail::factorial(static_cast<int>(n - j));
      }
      matern_series_[n] = c / poly_[0];
    }
  }

  ModelKind kind_;
  double param_ = 0.0;
  std::vector<double> poly_;
  std::vector<double> poly_lower_;
  std::vector<double> matern_series_;
};

inline double eval_r(const CovarianceModel& m, double t) { return m.r(t); }
inline double eval_dr(const CovarianceModel& m, double t) { return m.dr(t); }
inline double second_derivative_at_zero(const CovarianceModel& m) { return m.d2r0(); }

/// Autocovariance of the clipped process sign(X(t)): (2/pi) arcsin(r(t)).
inline double clipped_autocovariance(const CovarianceModel& m, double t) {
  // arcsin(1 - x) = pi/2 - 2 arcsin(sqrt(x/2)) keeps precision when r ~ 1
  const double omr = m.one_minus_r(t);
  if (omr < 0.5) return 1.0 - (4.0 / std::numbers::pi) * std::asin(std::sqrt(0.5 * omr));
  return (2.0 / std::numbers::pi) * std::asin(m.r(t));
}

// ---------------------------------------------------------------------------
// Model specification strings: name(param=value,...)
// ---------------------------------------------------------------------------

inline constexpr std::string_view kModelHelp =
    "valid models: diffusion(d=1..64), random_acceleration(), "
    "shifted_gaussian(alpha>=0), matern(nu=2.5|3.5|4.5), "
    "generalized_laplace(alpha>0)";

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline double parse_number(std::string_view text, std::string_view what) {
  text = trim(text);
  const auto slash = text.find('/');
  if (slash != std::string_view::npos) {
    return parse_number(text.substr(0, slash), what) /
           parse_number(text.substr(slash + 1), what);
  }
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw ModelError("cannot parse value '" + std::string(text) + "' for " +
                     std::string(what) + "; " + std::string(kModelHelp));
  return v;
}

}  // namespace detail

/// Parses `name(param=value,...)`; the parentheses may be omitted for
/// parameter-free or default-parameter models.
inline CovarianceModel parse_model(std::string_view text) {
  text = detail::trim(text);
  std::string_view name = text;
  std::string_view args;
  const auto open = text.find('(');
  if (open != std::string_view::npos) {
    if (text.back() != ')')
      throw ModelError("model spec '" + std::string(text) + "' lacks closing ')'; " +
                       std::string(kModelHelp));
    name = detail::trim(text.substr(0, open));
    args = text.substr(open + 1, text.size() - open - 2);
  }

  std::vector<std::pair<std::string, double>> kv;
  while (!detail::trim(args).empty()) {
    const auto comma = args.find(',');
    const std::string_view item = detail::trim(args.substr(0, comma));
    const auto eq = item.find('=');
    if (eq == std::string_view::npos)
      throw ModelError("expected key=value in '" + std::string(item) + "'; " +
                       std::string(kModelHelp));
    const std::string key(detail::trim(item.substr(0, eq)));
    kv.emplace_back(key, detail::parse_number(item.substr(eq + 1), key));
    if (comma == std::string_view::npos) break;
    args.remove_prefix(comma + 1);
  }

  auto take = [&](std::initializer_list<std::string_view> keys, double fallback) {
    double v = fallback;
    for (auto it = kv.begin(); it != kv.end();) {
      bool hit = false;
      for (auto k : keys) hit = hit || it->first == k;
      if (hit) {
        v = it->second;
        it = kv.erase(it);
      } else {
        ++it;
      }
    }
    return v;
  };

  auto finish = [&](CovarianceModel m) {
    if (!kv.empty())
      throw ModelError("unknown parameter '" + kv.front().first + "' for model " +
                       m.name() + "; " + std::string(kModelHelp));
    return m;
  };

  if (name == "diffusion") {
    const double d = take({"d"}, 2.0);
    if (d != std::floor(d)) throw ModelError("diffusion: d must be an integer in [1, 64]");
    return finish(CovarianceModel::diffusion(static_cast<int>(d)));
  }
  if (name == "random_acceleration") return finish(CovarianceModel::random_acceleration());
  if (name == "shifted_gaussian")
    return finish(CovarianceModel::shifted_gaussian(take({"alpha", "a"}, 0.0)));
  if (name == "matern") return finish(CovarianceModel::matern(take({"nu"}, 2.5)));
  if (name == "generalized_laplace")
    return finish(CovarianceModel::generalized_laplace(take({"alpha", "a"}, 1.0)));
  throw ModelError("unknown model '" + std::string(name) + "'; " + std::string(kModelHelp));
}

/// One instance of every built-in model family with its reference parameter.
inline std::vector<CovarianceModel> builtin_models() {
  return {CovarianceModel::diffusion(2), CovarianceModel::random_acceleration(),
          CovarianceModel::shifted_gaussian(0.0), CovarianceModel::matern(2.5),
          CovarianceModel::generalized_laplace(1.0)};
}

}  // namespace excursia
