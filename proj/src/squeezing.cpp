#include "nlspin/squeezing.hpp"

#include <algorithm>
#include <cmath>

#include "nlspin/dynamics.hpp"
#include "nlspin/errors.hpp"

namespace nlspin {

double snr_zeta(double n_atoms, double n_photons, const CouplingValues& couplings,
                Strategy strategy) {
  const double linear = couplings.kappa1 * couplings.kappa1 * n_photons * n_atoms / 4.0;
  if (strategy == Strategy::lte) return linear;
  const double k2nl = couplings.kappa2 * n_photons;
  return linear * (1.0 + k2nl * k2nl / 16.0);
}

double snr_zeta(const ExperimentConfig& config, const CouplingValues& couplings,
                Strategy strategy) {
  config.validate();
  return snr_zeta(config.n_atoms, config.n_photons, couplings, strategy);
}

NoiseReduction xi2_single_pass(double zeta, double eta_sc) {
  if (!(zeta >= 0.0)) throw ValidationError("zeta must be >= 0");
  if (!(eta_sc >= 0.0)) throw ValidationError("eta_sc must be >= 0");
  return {1.0 / (1.0 + zeta) + 2.0 * eta_sc, eta_sc <= 0.5};
}

double xi2_metrological(double xi2, double eta_sc) {
  if (!(eta_sc >= 0.0 && eta_sc < 1.0)) {
    throw ValidationError("eta_sc must lie in [0, 1); the spin state is destroyed");
  }
  const double keep = 1.0 - eta_sc;
  return xi2 / (keep * keep);
}

SqueezingReport squeezing_report(double n_atoms, double n_photons,
                                 const CouplingValues& couplings, double k_correction,
                                 Strategy strategy) {
  SqueezingReport r;
  r.zeta = snr_zeta(n_atoms, n_photons, couplings, strategy);
  r.eta_sc = scattering_damage(k_correction, couplings.eta_gamma, n_photons).value;
  const NoiseReduction nr = xi2_single_pass(r.zeta, r.eta_sc);
  r.xi2 = nr.xi2;
  r.valid = nr.valid;
  r.xi2_m = xi2_metrological(r.xi2, r.eta_sc);
  return r;
}

double wineland_from_measurement(double var_k_out, double j_x_in, double eta_sc, double eta_dep) {
  if (!(j_x_in > 0.0) || !std::isfinite(j_x_in)) throw ValidationError("J_x must be > 0");
  if (!(var_k_out >= 0.0)) throw ValidationError("var(K) must be >= 0");
  if (!(eta_sc >= 0.0 && eta_sc < 1.0) || !(eta_dep >= 0.0 && eta_dep < 1.0)) {
    throw ValidationError("damage factors must lie in [0, 1)");
  }
  const double j_x_out = (1.0 - eta_sc) * (1.0 - eta_dep) * j_x_in;
  return 2.0 * var_k_out * j_x_in / (j_x_out * j_x_out);
}

ConditionalEstimate conditional_variance(std::span<const double> phi1,
                                         std::span<const double> phi2, double var_readout) {
  if (phi1.size() != phi2.size()) throw ValidationError("Φ1 and Φ2 must be paired");
  if (phi1.size() < 2) throw ValidationError("conditional variance needs >= 2 pairs");
  if (!(var_readout >= 0.0)) throw ValidationError("var_readout must be >= 0");

  const double n = static_cast<double>(phi1.size());
  double m1 = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < phi1.size(); ++i) {
    m1 += phi1[i];
    m2 += phi2[i];
  }
  m1 /= n;
  m2 /= n;
  double v11 = 0.0;
  double v12 = 0.0;
  double v22 = 0.0;
  for (std::size_t i = 0; i < phi1.size(); ++i) {
    const double a = phi1[i] - m1;
    const double b = phi2[i] - m2;
    v11 += a * a;
    v12 += a * b;
    v22 += b * b;
  }
  if (v11 == 0.0) throw ValidationError("var(Φ1) = 0: regression gain undefined");

  ConditionalEstimate est;
  est.chi = std::max(0.0, v12 / v11);
  // var(Φ2 - χΦ1) expanded in sample moments.
  const double residual = (v22 - 2.0 * est.chi * v12 + est.chi * est.chi * v11) / (n - 1.0);
  est.var_readout_subtracted = var_readout;
  est.var_conditional = std::max(0.0, residual - var_readout);
  return est;
}

double subtracted_readout_variance(const ExperimentConfig& config,
                                   const CouplingValues& couplings) {
  config.validate();
  if (config.n_photons == 0.0) throw NumericalError("no photons: readout variance undefined");
  const double scale = couplings.kappa1 * config.s_x();
  if (scale == 0.0) throw NumericalError("κ1 = 0: Faraday signal vanishes");
  const double c = std::cos(mixing_angle(couplings.kappa2, config.s_x()));
  return c * c * (config.n_photons / 4.0 + config.electronic_noise) / (scale * scale);
}

}  // namespace nlspin
