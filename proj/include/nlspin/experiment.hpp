#pragma once

namespace nlspin {

enum class Strategy { aoc, lte };

const char* to_string(Strategy strategy);
/// Accepts "aoc" or "lte"; throws ValidationError otherwise.
Strategy parse_strategy(const char* text);

/// One measurement scenario. Defaults are the cold-atom experiment's
/// operating point (5.6e5 atoms probed 600 MHz red of F'=0).
struct ExperimentConfig {
  double n_atoms = 5.6e5;
  double n_photons = 2e8;
  double detuning_mhz = -600.0;
  /// Detector noise referred to the interferometer input, photons².
  double electronic_noise = 9.2e5;
  /// Depolarization from sources other than probe scattering.
  double eta_dep = 0.034;
  double j_y_mean = 0.0;
  double j_z_mean = 0.0;

  void validate() const;

  /// Probe Stokes component ⟨S_x⟩ = N_L/2 and atomic alignment ⟨J_x⟩ = N_A/2.
  double s_x() const { return n_photons / 2.0; }
  double j_x() const { return n_atoms / 2.0; }
};

}  // namespace nlspin
