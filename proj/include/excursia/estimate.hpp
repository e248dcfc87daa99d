#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace excursia {

/// A persistency exponent with its provenance.
struct ExponentEstimate {
  enum class Method { pole, tail_regression };

  double theta = 0.0;
  Method method = Method::pole;

  // tail regression
  std::optional<double> intercept;
  std::optional<double> half_width;  // 95% Student-t bound over replications
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  std::vector<double> replicates;

  // pole search
  std::optional<std::pair<double, double>> bracket;
  std::optional<double> residual;
  std::optional<double> boundary_margin;
};

inline std::string_view to_string(ExponentEstimate::Method m) {
  return m == ExponentEstimate::Method::pole ? "pole" : "tail_regression";
}

}  // namespace excursia
