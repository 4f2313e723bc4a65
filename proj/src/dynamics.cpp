#include "nlspin/dynamics.hpp"

#include <cmath>
#include <random>

#include "nlspin/errors.hpp"
#include "nlspin/parallel.hpp"

namespace nlspin {

namespace {

constexpr std::size_t kBlockSize = 1 << 16;

// Running mean and co-moment (sum of outer products of deviations).
struct Accumulator {
  std::size_t count = 0;
  ObservableVector mean = ObservableVector::Zero();
  ObservableMatrix comoment = ObservableMatrix::Zero();

  void add(const ObservableVector& x) {
    ++count;
    const ObservableVector delta = x - mean;
    mean += delta / static_cast<double>(count);
    comoment += delta * (x - mean).transpose();
  }

  void merge(const Accumulator& other) {
    if (other.count == 0) return;
    if (count == 0) {
      *this = other;
      return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(other.count);
    const double n = na + nb;
    const ObservableVector delta = other.mean - mean;
    mean += delta * (nb / n);
    comoment += other.comoment + delta * delta.transpose() * (na * nb / n);
    count += other.count;
  }
};

// Maps i.i.d. standard normals onto the input distribution.
Eigen::Matrix4d input_factor(const Eigen::Matrix4d& cov) {
  const Eigen::Matrix4d off = cov - Eigen::Matrix4d(cov.diagonal().asDiagonal());
  if (off.isZero(0.0)) {
    return Eigen::Matrix4d(cov.diagonal().cwiseMax(0.0).cwiseSqrt().asDiagonal());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(cov);
  return solver.eigenvectors() * solver.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

void require_signal_scale(double kappa1, double s_x) {
  if (kappa1 * s_x == 0.0) {
    throw NumericalError("Faraday signal scale κ1·S_x is zero; Φ is undefined");
  }
}

}  // namespace

GaussianJointState coherent_input(const ExperimentConfig& config) {
  GaussianJointState state;
  state.s_x = config.s_x();
  state.j_x = config.j_x();
  state.mean << 0.0, 0.0, config.j_y_mean, config.j_z_mean;
  state.cov.diagonal() << config.n_photons / 4.0, config.n_photons / 4.0,
      config.n_atoms / 4.0, config.n_atoms / 4.0;
  return state;
}

void validate_covariance(const Eigen::Matrix4d& cov) {
  if (!cov.allFinite()) throw ValidationError("covariance has non-finite entries");
  const double scale = cov.cwiseAbs().maxCoeff();
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1.0)) {
    throw ValidationError("covariance is not symmetric");
  }
  if (scale == 0.0) return;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(cov, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -1e-12 * scale) {
    throw ValidationError("covariance is not positive semidefinite");
  }
}

Eigen::Matrix4d pulse_transfer_matrix(const GaussianJointState& state,
                                      const CouplingValues& couplings) {
  const double k1 = couplings.kappa1;
  const double k2 = couplings.kappa2;
  const double sx = state.s_x;
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m(axis::s_y, axis::j_y) = 0.5 * k1 * k2 * sx * sx;
  m(axis::s_y, axis::j_z) = k1 * sx;
  m(axis::s_z, axis::s_y) = k2 * state.j_x;
  m(axis::s_z, axis::j_y) = -k2 * sx;
  return m;
}

Eigen::Vector4d pulse_output_means(const GaussianJointState& state,
                                   const CouplingValues& couplings) {
  return pulse_transfer_matrix(state, couplings) * state.mean;
}

Eigen::Matrix4d pulse_output_cov(const GaussianJointState& state,
                                 const CouplingValues& couplings) {
  validate_covariance(state.cov);
  const Eigen::Matrix4d m = pulse_transfer_matrix(state, couplings);
  const Eigen::Matrix4d out = m * state.cov * m.transpose();
  return 0.5 * (out + out.transpose());
}

GaussianJointState propagate_pulse(const GaussianJointState& state,
                                   const CouplingValues& couplings) {
  GaussianJointState out = state;
  out.mean = pulse_output_means(state, couplings);
  out.cov = pulse_output_cov(state, couplings);
  return out;
}

double mixing_angle(double kappa2, double s_x) { return std::atan(0.5 * kappa2 * s_x); }

MixedVariable mixed_variable(const GaussianJointState& state, const CouplingValues& couplings) {
  MixedVariable k;
  k.theta = mixing_angle(couplings.kappa2, state.s_x);
  const double c = std::cos(k.theta);
  const double s = std::sin(k.theta);
  k.value_mean = c * state.mean[axis::j_z] + s * state.mean[axis::j_y];
  k.value_var = c * c * state.cov(axis::j_z, axis::j_z) + s * s * state.cov(axis::j_y, axis::j_y) +
                2.0 * c * s * state.cov(axis::j_y, axis::j_z);
  return k;
}

double scaled_rotation_signal(double s_y_out, double theta, double kappa1, double s_x) {
  if (!(s_x > 0.0)) throw ValidationError("scaled_rotation_signal: s_x must be > 0");
  require_signal_scale(kappa1, s_x);
  return std::cos(theta) * s_y_out / (kappa1 * s_x);
}

ObservableMoments analytic_observables(const GaussianJointState& state,
                                       const CouplingValues& couplings) {
  validate_covariance(state.cov);
  require_signal_scale(couplings.kappa1, state.s_x);
  const double theta = mixing_angle(couplings.kappa2, state.s_x);
  const Eigen::Matrix4d m = pulse_transfer_matrix(state, couplings);

  Eigen::Matrix<double, observable::count, 4> lin;
  lin.topRows<4>() = m;
  lin.row(observable::phi) = m.row(axis::s_y) * (std::cos(theta) / (couplings.kappa1 * state.s_x));
  lin.row(observable::k_theta) << 0.0, 0.0, std::sin(theta), std::cos(theta);

  ObservableMoments out;
  out.mean = lin * state.mean;
  const ObservableMatrix cov = lin * state.cov * lin.transpose();
  out.cov = 0.5 * (cov + cov.transpose());
  return out;
}

SampleMoments mc_sample_pulse(const GaussianJointState& input, const CouplingValues& couplings,
                              std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < 2) throw ValidationError("mc_sample_pulse: n_samples must be >= 2");
  validate_covariance(input.cov);
  require_signal_scale(couplings.kappa1, input.s_x);

  const Eigen::Matrix4d factor = input_factor(input.cov);
  const double k1 = couplings.kappa1;
  const double k2 = couplings.kappa2;
  const double sx = input.s_x;
  const double jx = input.j_x;
  const double theta = mixing_angle(k2, sx);
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);

  const std::size_t blocks = (n_samples + kBlockSize - 1) / kBlockSize;
  std::vector<Accumulator> partial(blocks);
  parallel_for(blocks, [&](std::size_t b) {
    std::mt19937_64 rng(derive_seed(seed, b));
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t begin = b * kBlockSize;
    const std::size_t end = std::min(n_samples, begin + kBlockSize);
    Accumulator acc;
    for (std::size_t i = begin; i < end; ++i) {
      Eigen::Vector4d z;
      for (int k = 0; k < 4; ++k) z[k] = normal(rng);
      const Eigen::Vector4d x = input.mean + factor * z;
      const double sy = x[axis::s_y];
      const double sz = x[axis::s_z];
      const double jy = x[axis::j_y];
      const double jz = x[axis::j_z];

      const double sy_out = sy + k1 * sx * jz + 0.5 * k1 * k2 * sx * sx * jy;
      const double sz_out = sz + k2 * sy * jx - k2 * sx * jy;
      ObservableVector obs;
      obs << sy_out, sz_out, jy, jz, cos_t * sy_out / (k1 * sx), jz * cos_t + jy * sin_t;
      acc.add(obs);
    }
    partial[b] = acc;
  });

  Accumulator total;
  for (const auto& p : partial) total.merge(p);
  SampleMoments out;
  out.count = total.count;
  out.mean = total.mean;
  out.cov = total.comoment / static_cast<double>(total.count - 1);
  return out;
}

SampleMoments mc_sample_pulse(const ExperimentConfig& config, const CouplingModel& model,
                              std::size_t n_samples, std::uint64_t seed) {
  config.validate();
  model.validate();
  return mc_sample_pulse(coherent_input(config), couplings_at(model, config.detuning_mhz),
                         n_samples, seed);
}

TwoPulseSamples mc_two_pulse(const GaussianJointState& input, const CouplingValues& couplings,
                             double electronic_noise, std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < 2) throw ValidationError("mc_two_pulse: n_samples must be >= 2");
  if (!(electronic_noise >= 0.0)) throw ValidationError("electronic_noise must be >= 0");
  validate_covariance(input.cov);
  require_signal_scale(couplings.kappa1, input.s_x);

  const Eigen::Matrix4d factor = input_factor(input.cov);
  const double k1 = couplings.kappa1;
  const double k2 = couplings.kappa2;
  const double sx = input.s_x;
  const double cos_t = std::cos(mixing_angle(k2, sx));
  const double en_sd = std::sqrt(electronic_noise);
  const double sy_sd = std::sqrt(input.cov(axis::s_y, axis::s_y));

  TwoPulseSamples out;
  out.phi1.resize(n_samples);
  out.phi2.resize(n_samples);
  const std::size_t blocks = (n_samples + kBlockSize - 1) / kBlockSize;
  parallel_for(blocks, [&](std::size_t b) {
    std::mt19937_64 rng(derive_seed(seed, b));
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t begin = b * kBlockSize;
    const std::size_t end = std::min(n_samples, begin + kBlockSize);
    for (std::size_t i = begin; i < end; ++i) {
      // One atomic draw shared by both pulses; optical inputs are fresh.
      Eigen::Vector4d z;
      for (int k = 0; k < 4; ++k) z[k] = normal(rng);
      const Eigen::Vector4d atoms = input.mean + factor * z;
      const double jy = atoms[axis::j_y];
      const double jz = atoms[axis::j_z];
      const double sy1 = atoms[axis::s_y];
      const double sy2 = input.mean[axis::s_y] + sy_sd * normal(rng);
      const double det1 = en_sd * normal(rng);
      const double det2 = en_sd * normal(rng);

      const double atomic = k1 * sx * jz + 0.5 * k1 * k2 * sx * sx * jy;
      out.phi1[i] = cos_t * (sy1 + atomic + det1) / (k1 * sx);
      out.phi2[i] = cos_t * (sy2 + atomic + det2) / (k1 * sx);
    }
  });
  return out;
}

}  // namespace nlspin
