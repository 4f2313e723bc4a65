#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nlspin/experiment.hpp"
#include "nlspin/regression.hpp"
#include "nlspin/spectro.hpp"

namespace nlspin {

/// Log-spaced photon-number search interval.
struct PhotonRange {
  double min = 1e2;
  double max = 1e13;
  std::size_t coarse_points = 256;
  /// Relative N_L tolerance of the golden-section refinement.
  double rel_tolerance = 1e-4;

  void validate() const;
};

/// Detuning scan: fine_step inside ±fine_window of every resonance,
/// coarse_step elsewhere. Points sit on integer multiples of the steps.
struct DetuningRange {
  double min = -1000.0;
  double max = 1000.0;
  double fine_step = 0.5;
  double coarse_step = 5.0;
  double fine_window = 125.0;

  void validate() const;
};

struct OptimumPoint {
  double detuning_mhz = 0.0;
  double n_photons = 0.0;
  double xi2_m = 1.0;
  double eta_sc = 0.0;
  double zeta = 0.0;
  Strategy strategy = Strategy::aoc;
  /// The minimum sits on the edge of the photon range.
  bool at_boundary = false;
};

/// N_L at which the retained readout variance equals the projection noise N_A/4.
/// LTE: (4/κ2² + N_A²)/N_A. AOC: root of 16/(κ1²κ2²N³) + 4N_A/(κ2²N²) = N_A/4.
double photons_for_projection_noise(double n_atoms, const CouplingValues& couplings,
                                    Strategy strategy);

/// AOC root with separate atom numbers for the target N_A/4 and for the J_z
/// noise term, so either term can be switched off in tests.
double aoc_projection_root(double n_atoms_target, double n_atoms_noise,
                           const CouplingValues& couplings);

/// ξ_m²(N_L) at one detuning; +inf once η_sc >= 1.
double squeezing_objective(double n_photons, double n_atoms, const CouplingValues& couplings,
                           double k_correction, Strategy strategy);

/// Minimizes ξ_m² over N_L: coarse log grid, then golden-section refinement
/// inside the best coarse bracket. Ties go to the smaller N_L.
OptimumPoint optimize_photons(const CouplingValues& couplings, double k_correction,
                              double n_atoms, const PhotonRange& photons, Strategy strategy,
                              double detuning_mhz = 0.0);

std::vector<double> detuning_grid(const CouplingModel& model, const DetuningRange& range);

/// optimize_photons at each detuning, in grid order.
std::vector<OptimumPoint> optimize_per_detuning(const CouplingModel& model, double n_atoms,
                                                std::span<const double> detunings,
                                                const PhotonRange& photons, Strategy strategy);

/// Global optimum over the detuning grid and N_L. Ties go to the first grid point.
OptimumPoint optimize_detuning_and_photons(const CouplingModel& model, double n_atoms,
                                           const DetuningRange& detunings,
                                           const PhotonRange& photons, Strategy strategy);

struct ScanGrid {
  std::vector<double> detunings;
  std::vector<double> optical_depths;
  PhotonRange photons;

  void validate() const;
};

/// Minimum ξ_m² over N_L for every (OD, Δ) cell; row-major, rows = OD.
struct ScanResult {
  Strategy strategy = Strategy::aoc;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> xi2_m;

  double at(std::size_t od_index, std::size_t detuning_index) const {
    return xi2_m[od_index * cols + detuning_index];
  }
};

/// OD maps to atoms through N_A = OD·A/σ0.
ScanResult scan_od_detuning(const CouplingModel& model, const ScanGrid& grid, Strategy strategy);

/// Log-log slope of optimized ξ_m² against OD.
PowerLawFit fit_od_scaling(std::span<const double> optical_depths,
                           std::span<const double> xi2_values);

}  // namespace nlspin
