#pragma once

#include <array>

namespace nlspin {

/// Atomic line data and beam geometry for a probe on the f=1 -> F'={0,1,2}
/// manifold. All frequencies are linear (Γ/2π, Δ/2π) in MHz; only their
/// ratios enter the couplings.
struct CouplingModel {
  double gamma_mhz = 6.1;
  /// Resonance positions of F'=0,1,2 measured from the F'=0 line.
  std::array<double, 3> line_offsets_mhz{0.0, 72.218, 229.165};
  double wavelength_m = 780.241e-9;
  double interaction_area_m2 = 4.1e-9;
  /// Fraction of scattering events that damage the state. Constant in Δ.
  double k_correction = 0.4;

  /// Throws ValidationError naming the first violated field.
  void validate() const;

  /// Resonant cross section σ0 = λ²/π.
  double cross_section_m2() const;

  /// OD = N_A σ0 / A and its inverse.
  double optical_depth(double n_atoms) const;
  double atoms_for_optical_depth(double optical_depth) const;
};

struct CouplingValues {
  double kappa1 = 0.0;     // rad/spin
  double kappa2 = 0.0;     // rad/spin
  double eta_gamma = 0.0;  // scattering probability per photon
};

double lorentz_delta(const CouplingModel& model, double detuning_mhz, int line_index);

/// Vector (Faraday) coupling. Sign is preserved.
double kappa1(const CouplingModel& model, double detuning_mhz);

/// Tensor coupling. Sign is preserved.
double kappa2(const CouplingModel& model, double detuning_mhz);

double eta_gamma(const CouplingModel& model, double detuning_mhz);

CouplingValues couplings_at(const CouplingModel& model, double detuning_mhz);

struct ScatteringDamage {
  double value = 0.0;
  /// η_sc > 0.5: the small-damage squeezing estimates no longer apply.
  bool out_of_validity = false;
  /// η_sc > 1: more scattering than atoms can absorb.
  bool unphysical = false;
};

ScatteringDamage scattering_damage(double k_correction, double eta_gamma, double photons);
ScatteringDamage eta_sc(const CouplingModel& model, double detuning_mhz, double photons);

}  // namespace nlspin
