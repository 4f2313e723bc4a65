#include "nlspin/spectro.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nlspin/errors.hpp"

namespace nlspin {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError("coupling model: " + what);
}

// Common prefactor σ0/A shared by κ1, κ2 and η_γ.
double geometric_factor(const CouplingModel& model) {
  return model.cross_section_m2() / model.interaction_area_m2;
}

}  // namespace

void CouplingModel::validate() const {
  require(std::isfinite(gamma_mhz) && gamma_mhz > 0.0, "gamma_mhz must be > 0");
  require(std::isfinite(wavelength_m) && wavelength_m > 0.0, "wavelength_m must be > 0");
  require(std::isfinite(interaction_area_m2) && interaction_area_m2 > 0.0,
          "interaction_area_m2 must be > 0");
  require(line_offsets_mhz[0] == 0.0, "line_offset_0_mhz must be 0 (detuning origin is F'=0)");
  require(std::isfinite(line_offsets_mhz[1]) && std::isfinite(line_offsets_mhz[2]) &&
              line_offsets_mhz[0] < line_offsets_mhz[1] &&
              line_offsets_mhz[1] < line_offsets_mhz[2],
          "line offsets must be strictly increasing");
  require(k_correction > 0.0 && k_correction <= 1.0, "k_correction must lie in (0, 1]");
}

double CouplingModel::cross_section_m2() const {
  return wavelength_m * wavelength_m / std::numbers::pi;
}

double CouplingModel::optical_depth(double n_atoms) const {
  return n_atoms * cross_section_m2() / interaction_area_m2;
}

double CouplingModel::atoms_for_optical_depth(double optical_depth) const {
  return optical_depth * interaction_area_m2 / cross_section_m2();
}

double lorentz_delta(const CouplingModel& model, double detuning_mhz, int line_index) {
  if (line_index < 0 || line_index > 2) {
    throw ValidationError("line_index must be 0, 1 or 2");
  }
  const double offset = detuning_mhz - model.line_offsets_mhz[static_cast<std::size_t>(line_index)];
  return 1.0 / std::hypot(model.gamma_mhz, offset);
}

double kappa1(const CouplingModel& model, double detuning_mhz) {
  const double d0 = lorentz_delta(model, detuning_mhz, 0);
  const double d1 = lorentz_delta(model, detuning_mhz, 1);
  const double d2 = lorentz_delta(model, detuning_mhz, 2);
  return geometric_factor(model) * (model.gamma_mhz / 16.0) * (-4.0 * d0 - 5.0 * d1 + 5.0 * d2);
}

double kappa2(const CouplingModel& model, double detuning_mhz) {
  const double d0 = lorentz_delta(model, detuning_mhz, 0);
  const double d1 = lorentz_delta(model, detuning_mhz, 1);
  const double d2 = lorentz_delta(model, detuning_mhz, 2);
  return geometric_factor(model) * (model.gamma_mhz / 16.0) * (4.0 * d0 - 5.0 * d1 + d2);
}

double eta_gamma(const CouplingModel& model, double detuning_mhz) {
  const double d0 = lorentz_delta(model, detuning_mhz, 0);
  const double d1 = lorentz_delta(model, detuning_mhz, 1);
  const double d2 = lorentz_delta(model, detuning_mhz, 2);
  const double g2 = model.gamma_mhz * model.gamma_mhz;
  return geometric_factor(model) * (g2 / 64.0) * (4.0 * d0 * d0 + 5.0 * d1 * d1 + 7.0 * d2 * d2);
}

CouplingValues couplings_at(const CouplingModel& model, double detuning_mhz) {
  return {kappa1(model, detuning_mhz), kappa2(model, detuning_mhz),
          eta_gamma(model, detuning_mhz)};
}

ScatteringDamage scattering_damage(double k_correction, double eta_gamma, double photons) {
  if (!(photons >= 0.0)) throw ValidationError("photons must be >= 0");
  ScatteringDamage out;
  out.value = k_correction * eta_gamma * photons;
  out.out_of_validity = out.value > 0.5;
  out.unphysical = out.value > 1.0;
  return out;
}

ScatteringDamage eta_sc(const CouplingModel& model, double detuning_mhz, double photons) {
  return scattering_damage(model.k_correction, eta_gamma(model, detuning_mhz), photons);
}

}  // namespace nlspin
