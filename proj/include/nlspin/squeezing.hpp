#pragma once

#include <span>

#include "nlspin/experiment.hpp"
#include "nlspin/spectro.hpp"

namespace nlspin {

struct SqueezingReport {
  double zeta = 0.0;
  double xi2 = 1.0;
  double xi2_m = 1.0;
  double eta_sc = 0.0;
  /// False once η_sc > 0.5, where the single-pass estimate stops applying.
  bool valid = true;
};

/// Ratio of atomic to optical noise power in the detected variance.
/// AOC: (κ1² N_L N_A / 4)(1 + κ2² N_L² / 16); LTE: κ1² N_L N_A / 4.
double snr_zeta(double n_atoms, double n_photons, const CouplingValues& couplings,
                Strategy strategy);
double snr_zeta(const ExperimentConfig& config, const CouplingValues& couplings,
                Strategy strategy);

struct NoiseReduction {
  double xi2 = 1.0;
  bool valid = true;
};

/// Single-pass noise reduction 1/(1+ζ) + 2η_sc.
NoiseReduction xi2_single_pass(double zeta, double eta_sc);

/// ξ²/(1-η_sc)². Throws ValidationError for η_sc outside [0, 1).
double xi2_metrological(double xi2, double eta_sc);

/// Full chain ζ -> ξ² -> ξ_m² at one operating point. η_sc = k η_γ N_L.
SqueezingReport squeezing_report(double n_atoms, double n_photons,
                                 const CouplingValues& couplings, double k_correction,
                                 Strategy strategy);

/// Wineland parameter from a measured conditional variance:
/// 2 var(K) J_x / J_x_out², with J_x_out = (1-η_sc)(1-η_dep) J_x.
double wineland_from_measurement(double var_k_out, double j_x_in, double eta_sc, double eta_dep);

struct ConditionalEstimate {
  /// Regression gain cov(Φ1,Φ2)/var(Φ1), floored at 0.
  double chi = 0.0;
  /// var(Φ2 - χΦ1) - var_readout, floored at 0.
  double var_conditional = 0.0;
  double var_readout_subtracted = 0.0;
};

ConditionalEstimate conditional_variance(std::span<const double> phi1,
                                         std::span<const double> phi2, double var_readout);

/// Optical shot noise plus detector noise on Φ, in spins²:
/// cos²θ (N_L/4 + EN) / (κ1 S_x)².
double subtracted_readout_variance(const ExperimentConfig& config,
                                   const CouplingValues& couplings);

}  // namespace nlspin
