#pragma once

#include <numbers>
#include <span>
#include <utility>

namespace nlspin {

/// ⁸⁷Rb f=1 ground state: |γ_F|/2π = 7.024 Hz/nT, negative sign (g_F = -1/2).
inline constexpr double kRb87F1GyromagneticRatio = -2.0 * std::numbers::pi * 7.024e9;

/// Free Larmor precession of a J_x-aligned state between preparation and probe.
struct FieldScenario {
  double b_z_tesla = 0.0;
  double gyromagnetic_ratio = kRb87F1GyromagneticRatio;  // rad s⁻¹ T⁻¹
  double evolution_time_s = 7.5e-6;
  double j_x = 2.8e5;

  void validate() const;
  /// ω_L = -γ_F B_z.
  double larmor_frequency() const { return -gyromagnetic_ratio * b_z_tesla; }
};

/// Alignment rotates at 2ω_L: J_y = sin(2 ω_L t) J_x.
double larmor_jy(const FieldScenario& scenario);

struct FieldFit {
  double b_z_tesla = 0.0;
  double std_error = 0.0;
  /// Fitted J_y/J_x slope through the origin.
  double slope = 0.0;
};

/// Through-origin least squares of J_y on J_x, inverted through the forward
/// model. Needs >= 2 pairs with at least two distinct nonzero J_x.
FieldFit fit_bz(std::span<const std::pair<double, double>> pairs, double evolution_time_s,
                double gyromagnetic_ratio = kRb87F1GyromagneticRatio);

}  // namespace nlspin
