#include "nlspin/magnetometry.hpp"

#include <cmath>

#include "nlspin/errors.hpp"

namespace nlspin {

void FieldScenario::validate() const {
  if (!std::isfinite(b_z_tesla)) throw ValidationError("b_z must be finite");
  if (!std::isfinite(gyromagnetic_ratio) || gyromagnetic_ratio == 0.0) {
    throw ValidationError("gyromagnetic_ratio must be finite and nonzero");
  }
  if (!(evolution_time_s >= 0.0)) throw ValidationError("evolution_time must be >= 0");
  if (!(j_x > 0.0)) throw ValidationError("j_x must be > 0");
}

double larmor_jy(const FieldScenario& scenario) {
  scenario.validate();
  return std::sin(2.0 * scenario.larmor_frequency() * scenario.evolution_time_s) * scenario.j_x;
}

FieldFit fit_bz(std::span<const std::pair<double, double>> pairs, double evolution_time_s,
                double gyromagnetic_ratio) {
  if (pairs.size() < 2) throw ValidationError("field fit needs at least 2 (J_x, J_y) pairs");
  if (!(evolution_time_s > 0.0)) throw ValidationError("evolution_time must be > 0");
  if (!std::isfinite(gyromagnetic_ratio) || gyromagnetic_ratio == 0.0) {
    throw ValidationError("gyromagnetic_ratio must be finite and nonzero");
  }
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& [jx, jy] : pairs) {
    if (!std::isfinite(jx) || !std::isfinite(jy)) throw ValidationError("non-finite pair");
    sxx += jx * jx;
    sxy += jx * jy;
  }
  bool distinct = false;
  for (const auto& [jx, jy] : pairs) distinct = distinct || jx != pairs.front().first;
  if (!distinct || sxx == 0.0) throw ValidationError("field fit: degenerate J_x values");

  const double slope = sxy / sxx;
  double ssr = 0.0;
  for (const auto& [jx, jy] : pairs) {
    const double r = jy - slope * jx;
    ssr += r * r;
  }
  const double slope_err = std::sqrt(ssr / static_cast<double>(pairs.size() - 1) / sxx);
  if (std::abs(slope) > 1.0) {
    throw NumericalError("field fit: |J_y/J_x| > 1 is outside the precession model");
  }

  // slope = sin(2ω_L t) with ω_L = -γ_F B_z.
  const double rate = -2.0 * gyromagnetic_ratio * evolution_time_s;
  FieldFit fit;
  fit.slope = slope;
  fit.b_z_tesla = std::asin(slope) / rate;
  fit.std_error = slope_err / (std::sqrt(1.0 - slope * slope) * std::abs(rate));
  return fit;
}

}  // namespace nlspin
