#include "nlspin/sensitivity.hpp"

#include <cmath>

#include "nlspin/errors.hpp"

namespace nlspin {

namespace {

void require_photons(const ExperimentConfig& config) {
  config.validate();
  if (config.n_photons == 0.0) {
    throw NumericalError("no photons: J_y variance is infinite");
  }
}

double finish(SensitivityReport& r) {
  r.delta_jy = std::sqrt(r.var_readout_shot + r.var_readout_projection + r.var_electronic);
  return r.delta_jy;
}

}  // namespace

SensitivityReport var_jy_lte(const ExperimentConfig& config, const CouplingValues& couplings,
                             LteOptions options) {
  require_photons(config);
  if (couplings.kappa2 == 0.0) throw NumericalError("κ2 = 0: LTE signal vanishes");
  if (!(options.electronic_noise >= 0.0)) throw ValidationError("electronic_noise must be >= 0");

  const double nl = config.n_photons;
  const double na = config.n_atoms;
  const double k2sq = couplings.kappa2 * couplings.kappa2;

  SensitivityReport r;
  r.strategy = Strategy::lte;
  r.var_readout_shot = 1.0 / (k2sq * nl);
  if (!options.ideal) {
    r.var_readout_projection = na * na / (4.0 * nl);
    // Slope ∂S_z/∂J_y = κ2 S_x = κ2 N_L / 2.
    r.var_electronic = 4.0 * options.electronic_noise / (k2sq * nl * nl);
  }
  r.var_signal_subtracted = na / 4.0;
  finish(r);
  return r;
}

SensitivityReport var_jy_aoc(const ExperimentConfig& config, const CouplingValues& couplings) {
  require_photons(config);
  const double k1sq = couplings.kappa1 * couplings.kappa1;
  const double k2sq = couplings.kappa2 * couplings.kappa2;
  if (k1sq * k2sq == 0.0) throw NumericalError("κ1κ2 = 0: AOC signal vanishes");

  const double nl = config.n_photons;
  const double na = config.n_atoms;

  SensitivityReport r;
  r.strategy = Strategy::aoc;
  r.var_readout_shot = 16.0 / (k1sq * k2sq * nl * nl * nl);
  r.var_readout_projection = 4.0 * na / (k2sq * nl * nl);
  r.var_electronic = config.electronic_noise * 64.0 / (k1sq * k2sq * nl * nl * nl * nl);
  r.var_signal_subtracted = na / 4.0;
  finish(r);
  return r;
}

double crossover_photons(double n_atoms, const CouplingValues& couplings, CrossoverMode mode) {
  if (!(n_atoms >= 0.0)) throw ValidationError("n_atoms must be >= 0");
  if (couplings.kappa1 == 0.0) throw NumericalError("κ1 = 0: AOC never surpasses LTE");
  const double c = 16.0 / (couplings.kappa1 * couplings.kappa1);
  if (mode == CrossoverMode::ideal_lte) {
    return 2.0 * n_atoms + std::sqrt(4.0 * n_atoms * n_atoms + c);
  }
  // (1 + q) N² - 4 N_A N - 16/κ1² = 0 with q = κ2² N_A² / 4.
  const double a = 1.0 + couplings.kappa2 * couplings.kappa2 * n_atoms * n_atoms / 4.0;
  return (2.0 * n_atoms + std::sqrt(4.0 * n_atoms * n_atoms + a * c)) / a;
}

PowerLawFit fit_scaling_exponent(std::span<const std::pair<double, double>> points) {
  return fit_power_law(points);
}

}  // namespace nlspin
