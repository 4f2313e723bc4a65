#pragma once

#include <span>
#include <utility>

#include "nlspin/experiment.hpp"
#include "nlspin/regression.hpp"
#include "nlspin/spectro.hpp"

namespace nlspin {

/// Variance budget for an estimate of ⟨J_y⟩, referred to the atomic input.
/// delta_jy² = var_readout_shot + var_readout_projection + var_electronic;
/// the J_y signal variance N_A/4 is reported but not included.
struct SensitivityReport {
  Strategy strategy = Strategy::aoc;
  double var_readout_shot = 0.0;
  /// AOC: J_z noise mixed into S_y. LTE: J_x-weighted S_y noise, N_A²/(4N_L).
  double var_readout_projection = 0.0;
  double var_electronic = 0.0;
  double var_signal_subtracted = 0.0;
  double delta_jy = 0.0;
};

struct LteOptions {
  /// Keep only the optical shot-noise term 1/(κ2² N_L).
  bool ideal = false;
  /// Detector noise for the S_z readout. The reference comparison uses 0.
  double electronic_noise = 0.0;
};

/// Linear (S_z) readout of J_y. Throws NumericalError when N_L = 0 or κ2 = 0.
SensitivityReport var_jy_lte(const ExperimentConfig& config, const CouplingValues& couplings,
                             LteOptions options = {});

/// Nonlinear (S_y) readout via alignment-to-orientation conversion, including
/// config.electronic_noise. Throws NumericalError when N_L = 0 or κ1κ2 = 0.
SensitivityReport var_jy_aoc(const ExperimentConfig& config, const CouplingValues& couplings);

enum class CrossoverMode {
  /// Compare against the shot-noise-only LTE budget.
  ideal_lte,
  /// Compare against the LTE budget including the N_A²/(4N_L) term.
  full_budget,
};

/// Photon number above which the AOC readout (without detector noise) beats
/// LTE. For ideal_lte this is the positive root of N² - 4 N_A N - 16/κ1² = 0.
double crossover_photons(double n_atoms, const CouplingValues& couplings,
                         CrossoverMode mode = CrossoverMode::ideal_lte);

/// Log-log slope of ΔJ_y against N_L.
PowerLawFit fit_scaling_exponent(std::span<const std::pair<double, double>> points);

}  // namespace nlspin
