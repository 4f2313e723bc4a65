#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "nlspin/experiment.hpp"
#include "nlspin/spectro.hpp"

namespace nlspin {

/// Component order of the fluctuating part of the joint atom-light state.
namespace axis {
inline constexpr int s_y = 0;
inline constexpr int s_z = 1;
inline constexpr int j_y = 2;
inline constexpr int j_z = 3;
}  // namespace axis

/// Gaussian description of probe and atoms around one pulse. S_x and J_x are
/// large and enter only as classical numbers; the remaining four operators
/// carry means and a full covariance (order given by `axis`).
struct GaussianJointState {
  double s_x = 0.0;
  double j_x = 0.0;
  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
  Eigen::Matrix4d cov = Eigen::Matrix4d::Zero();
};

/// Coherent probe and coherent spin state: diag(N_L/4, N_L/4, N_A/4, N_A/4).
GaussianJointState coherent_input(const ExperimentConfig& config);

/// Throws ValidationError unless cov is symmetric positive semidefinite.
void validate_covariance(const Eigen::Matrix4d& cov);

/// Linear input-output map at fixed S_x, J_x, acting on (S_y, S_z, J_y, J_z):
///   S_z' = S_z + κ2 J_x S_y - κ2 S_x J_y
///   S_y' = S_y + κ1 S_x J_z + (κ1 κ2 / 2) S_x² J_y
/// Atomic components pass through unchanged. Higher orders in S_x are dropped.
Eigen::Matrix4d pulse_transfer_matrix(const GaussianJointState& state,
                                      const CouplingValues& couplings);

Eigen::Vector4d pulse_output_means(const GaussianJointState& state,
                                   const CouplingValues& couplings);

/// Covariance of (S_y', S_z', J_y, J_z). Rejects a non-PSD input.
Eigen::Matrix4d pulse_output_cov(const GaussianJointState& state,
                                 const CouplingValues& couplings);

/// Means and covariance propagated together.
GaussianJointState propagate_pulse(const GaussianJointState& state,
                                   const CouplingValues& couplings);

/// K_θ = J_z cosθ + J_y sinθ with tanθ = κ2 S_x / 2.
struct MixedVariable {
  double theta = 0.0;
  double value_mean = 0.0;
  double value_var = 0.0;
};

double mixing_angle(double kappa2, double s_x);
MixedVariable mixed_variable(const GaussianJointState& state, const CouplingValues& couplings);

/// Faraday signal scaled to spin units, Φ = cosθ S_y' / (κ1 S_x).
double scaled_rotation_signal(double s_y_out, double theta, double kappa1, double s_x);

/// Extended observable vector (S_y', S_z', J_y, J_z, Φ, K_θ).
namespace observable {
inline constexpr int s_y_out = 0;
inline constexpr int s_z_out = 1;
inline constexpr int j_y = 2;
inline constexpr int j_z = 3;
inline constexpr int phi = 4;
inline constexpr int k_theta = 5;
inline constexpr int count = 6;
}  // namespace observable

using ObservableVector = Eigen::Matrix<double, observable::count, 1>;
using ObservableMatrix = Eigen::Matrix<double, observable::count, observable::count>;

/// Closed-form means and covariance of the extended observable vector.
struct ObservableMoments {
  ObservableVector mean = ObservableVector::Zero();
  ObservableMatrix cov = ObservableMatrix::Zero();
};

ObservableMoments analytic_observables(const GaussianJointState& state,
                                       const CouplingValues& couplings);

/// Sample statistics of the extended observables (covariance uses n-1).
struct SampleMoments {
  std::size_t count = 0;
  ObservableVector mean = ObservableVector::Zero();
  ObservableMatrix cov = ObservableMatrix::Zero();
};

/// Monte-Carlo oracle: draws the input Gaussian, pushes every sample through
/// the pulse equations and accumulates moments. Samples are generated in
/// fixed-size blocks with per-block seeds, so the result depends only on
/// (seed, n_samples), not on thread count.
SampleMoments mc_sample_pulse(const GaussianJointState& input, const CouplingValues& couplings,
                              std::size_t n_samples, std::uint64_t seed);

SampleMoments mc_sample_pulse(const ExperimentConfig& config, const CouplingModel& model,
                              std::size_t n_samples, std::uint64_t seed);

/// Paired Faraday signals from two pulses that see the same atomic draw
/// (J_y, J_z) but independent optical shot noise and detector noise.
struct TwoPulseSamples {
  std::vector<double> phi1;
  std::vector<double> phi2;
};

TwoPulseSamples mc_two_pulse(const GaussianJointState& input, const CouplingValues& couplings,
                             double electronic_noise, std::size_t n_samples, std::uint64_t seed);

}  // namespace nlspin
