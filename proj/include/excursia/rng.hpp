#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace excursia {

/// Reproducible random stream identified by (seed, stream_index).
///
/// Each stream is an mt19937_64 whose state is derived from both identifiers
/// through splitmix64 and seed_seq, so replications and worker chunks draw
/// from independent sequences that do not depend on thread scheduling.
/// Uniform variates are built from the top 53 bits and never equal 0 or 1.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_index)
      : seed_(seed), stream_(stream_index), engine_(make_engine(seed, stream_index)) {}

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::uint64_t stream_index() const noexcept { return stream_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard exponential by inversion.
  double exponential() { return -std::log(uniform()); }

  /// Standard normal by Box-Muller; the second variate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Gamma(shape, 1) via Marsaglia-Tsang; shape < 1 uses the boost trick.
  double gamma(double shape) {
    if (shape < 1.0) return gamma(shape + 1.0) * std::pow(uniform(), 1.0 / shape);
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = 0.0;
      double v = 0.0;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

 private:
  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream) {
    // the first splitmix output is a bijection of its input, so distinct
    // (seed, stream) pairs never share a seed sequence
    std::uint64_t a = seed;
    std::uint64_t b = stream ^ 0xd1b54a32d192ed03ULL;
    std::uint32_t words[8];
    for (int i = 0; i < 2; ++i) {
      const std::uint64_t za = splitmix64(a);
      const std::uint64_t zb = splitmix64(b);
      words[4 * i] = static_cast<std::uint32_t>(za);
      words[4 * i + 1] = static_cast<std::uint32_t>(za >> 32);
      words[4 * i + 2] = static_cast<std::uint32_t>(zb);
      words[4 * i + 3] = static_cast<std::uint32_t>(zb >> 32);
    }
    std::seed_seq seq(std::begin(words), std::end(words));
    return std::mt19937_64(seq);
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace excursia
