#pragma once

// Published reference values, compiled in so that reproduction runs can print
// them next to computed numbers. None of these are computed here.

#include <array>
#include <optional>

namespace excursia::reference {

struct ValueBound {
  double value;
  double half_width;
};

/// Monte Carlo exponents for diffusion in dimension d = 1..10.
struct DiffusionRow {
  int d;
  ValueBound divisor;
  ValueBound iia;
};

inline constexpr std::array<DiffusionRow, 10> kDiffusionTable{{
    {1, {0.248, 0.002}, {0.1360, 0.0012}},
    {2, {0.496, 0.004}, {0.1858, 0.0017}},
    {3, {0.750, 0.005}, {0.2441, 0.0014}},
    {4, {0.995, 0.005}, {0.2901, 0.0011}},
    {5, {1.243, 0.005}, {0.3286, 0.0016}},
    {6, {1.478, 0.008}, {0.3618, 0.0025}},
    {7, {1.709, 0.011}, {0.3915, 0.0033}},
    {8, {1.950, 0.009}, {0.4195, 0.0034}},
    {9, {2.168, 0.013}, {0.4446, 0.0030}},
    {10, {2.380, 0.011}, {0.4668, 0.0034}},
}};

/// Exponents of the diffusion process itself from two independent numerical
/// studies, available for d = 1..5 and 10.
struct DiffusionBaseline {
  int d;
  double first;
  double second;
};

inline constexpr std::array<DiffusionBaseline, 6> kDiffusionBaselines{{
    {1, 0.1206, 0.1205},
    {2, 0.1874, 0.1875},
    {3, 0.2382, 0.2382},
    {4, 0.2805, 0.2806},
    {5, 0.3171, 0.3173},
    {10, 0.4589, 0.4587},
}};

/// Exact diffusion exponents: 0.1203 (d = 1) and 3/16 (d = 2).
inline constexpr double kDiffusionExactD1 = 0.1203;
inline constexpr double kDiffusionExactD2 = 0.1875;

// IIA pole exponents.
inline constexpr double kPoleDiffusion2 = 0.1862;
inline constexpr double kPoleRandomAcceleration = 0.2647;
inline constexpr double kPoleShiftedGaussian0 = 0.4115;
inline constexpr double kPoleShiftedGaussian2 = 2.3522;

// IIA Monte Carlo exponents at large sample size.
inline constexpr ValueBound kMcRandomAcceleration{0.2647, 0.00083};
inline constexpr ValueBound kMcShiftedGaussian0{0.4116, 0.00017};
inline constexpr ValueBound kMcMatern52{0.2188, 0.0011};

// Exponents estimated from simulated Gaussian trajectories.
inline constexpr ValueBound kTrajectoryShiftedGaussian0{0.4199, 0.00058};
inline constexpr ValueBound kTrajectoryShiftedGaussian2{1.3795, 0.0012};
inline constexpr ValueBound kTrajectoryMatern52{0.2184, 0.00026};

inline std::optional<DiffusionRow> diffusion_row(int d) {
  for (const auto& row : kDiffusionTable)
    if (row.d == d) return row;
  return std::nullopt;
}

}  // namespace excursia::reference
