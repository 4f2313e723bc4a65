#include "nlspin/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

#include <boost/math/tools/roots.hpp>

#include "nlspin/errors.hpp"
#include "nlspin/numeric.hpp"
#include "nlspin/parallel.hpp"
#include "nlspin/squeezing.hpp"

namespace nlspin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

void PhotonRange::validate() const {
  if (!(min > 0.0) || !std::isfinite(max) || !(max > min)) {
    throw ValidationError("photon range must satisfy 0 < min < max");
  }
  if (coarse_points < 200) throw ValidationError("photon range needs >= 200 coarse points");
  if (!(rel_tolerance > 0.0 && rel_tolerance <= 1e-4)) {
    throw ValidationError("photon rel_tolerance must lie in (0, 1e-4]");
  }
}

void DetuningRange::validate() const {
  if (!std::isfinite(min) || !std::isfinite(max) || !(max >= min)) {
    throw ValidationError("detuning range must satisfy min <= max");
  }
  if (!(fine_step > 0.0 && fine_step <= 1.0) || !(coarse_step > 0.0 && coarse_step <= 5.0) ||
      !(fine_window >= 0.0)) {
    throw ValidationError("detuning steps must satisfy 0 < fine <= 1, 0 < coarse <= 5 MHz");
  }
}

void ScanGrid::validate() const {
  auto increasing = [](const std::vector<double>& v) {
    return !v.empty() && std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
  };
  if (!increasing(detunings)) throw ValidationError("scan detunings must be nonempty, increasing");
  if (!increasing(optical_depths) || !(optical_depths.front() > 0.0)) {
    throw ValidationError("scan optical depths must be nonempty, increasing and > 0");
  }
  photons.validate();
}

double aoc_projection_root(double n_atoms_target, double n_atoms_noise,
                           const CouplingValues& couplings) {
  if (!(n_atoms_target > 0.0) || !(n_atoms_noise >= 0.0)) {
    throw ValidationError("atom numbers must be positive");
  }
  const double k1sq = couplings.kappa1 * couplings.kappa1;
  const double k2sq = couplings.kappa2 * couplings.kappa2;
  if (k1sq * k2sq == 0.0 || !std::isfinite(k1sq * k2sq)) {
    throw NumericalError("AOC projection-noise photon number: κ1κ2 = 0, no finite solution");
  }
  const double target = n_atoms_target / 4.0;
  // Strictly decreasing in N; work in log N so the bracket spans decades cheaply.
  auto excess = [&](double log_n) {
    const double n = std::exp(log_n);
    return 16.0 / (k1sq * k2sq * n * n * n) + 4.0 * n_atoms_noise / (k2sq * n * n) - target;
  };
  double lo = 0.0;
  double hi = 1.0;
  while (excess(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 4000.0) throw NumericalError("AOC projection-noise root: bracket expansion failed");
  }
  while (excess(lo) < 0.0) {
    hi = lo;
    lo -= 8.0;
    if (lo < -4000.0) throw NumericalError("AOC projection-noise root: bracket expansion failed");
  }
  // |Δ log N| <= 1e-10 keeps the relative root error well inside 1e-9.
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-10; };
  std::uintmax_t max_iter = 200;
  const auto [a, b] = boost::math::tools::bisect(excess, lo, hi, tol, max_iter);
  return std::exp(0.5 * (a + b));
}

double photons_for_projection_noise(double n_atoms, const CouplingValues& couplings,
                                    Strategy strategy) {
  if (!(n_atoms > 0.0)) throw ValidationError("n_atoms must be > 0");
  if (strategy == Strategy::lte) {
    if (couplings.kappa2 == 0.0) {
      throw NumericalError("LTE projection-noise photon number: κ2 = 0, no finite solution");
    }
    return (4.0 / (couplings.kappa2 * couplings.kappa2) + n_atoms * n_atoms) / n_atoms;
  }
  return aoc_projection_root(n_atoms, n_atoms, couplings);
}

double squeezing_objective(double n_photons, double n_atoms, const CouplingValues& couplings,
                           double k_correction, Strategy strategy) {
  const double eta = k_correction * couplings.eta_gamma * n_photons;
  if (!(eta < 1.0)) return kInf;
  const double zeta = snr_zeta(n_atoms, n_photons, couplings, strategy);
  const double keep = 1.0 - eta;
  return (1.0 / (1.0 + zeta) + 2.0 * eta) / (keep * keep);
}

OptimumPoint optimize_photons(const CouplingValues& couplings, double k_correction,
                              double n_atoms, const PhotonRange& photons, Strategy strategy,
                              double detuning_mhz) {
  photons.validate();
  if (!(n_atoms >= 0.0)) throw ValidationError("n_atoms must be >= 0");

  const double log_min = std::log(photons.min);
  const double log_max = std::log(photons.max);
  const std::size_t n = photons.coarse_points;
  const double step = (log_max - log_min) / static_cast<double>(n - 1);
  auto objective = [&](double log_n) {
    return squeezing_objective(std::exp(log_n), n_atoms, couplings, k_correction, strategy);
  };
  auto grid_point = [&](std::size_t i) {
    return i + 1 == n ? log_max : log_min + step * static_cast<double>(i);
  };

  std::size_t best = 0;
  double best_value = objective(grid_point(0));
  for (std::size_t i = 1; i < n; ++i) {
    const double v = objective(grid_point(i));
    if (v < best_value) {
      best = i;
      best_value = v;
    }
  }
  if (!std::isfinite(best_value)) {
    throw NumericalError("photon optimization: every N_L in range destroys the state");
  }

  double best_log = grid_point(best);
  const double lo = grid_point(best == 0 ? 0 : best - 1);
  const double hi = grid_point(std::min(best + 1, n - 1));
  const auto [x, fx] = golden_section_minimize(objective, lo, hi, photons.rel_tolerance);
  if (fx < best_value) {
    best_log = x;
    best_value = fx;
  }

  OptimumPoint opt;
  opt.detuning_mhz = detuning_mhz;
  opt.n_photons = std::clamp(std::exp(best_log), photons.min, photons.max);
  opt.xi2_m = best_value;
  opt.eta_sc = k_correction * couplings.eta_gamma * opt.n_photons;
  opt.zeta = snr_zeta(n_atoms, opt.n_photons, couplings, strategy);
  opt.strategy = strategy;
  opt.at_boundary = best_log - log_min <= 2.0 * photons.rel_tolerance ||
                    log_max - best_log <= 2.0 * photons.rel_tolerance;
  return opt;
}

std::vector<double> detuning_grid(const CouplingModel& model, const DetuningRange& range) {
  range.validate();
  std::vector<double> grid;
  auto add_lattice = [&](double lo, double hi, double step) {
    const auto first = static_cast<long long>(std::ceil(lo / step - 1e-9));
    const auto last = static_cast<long long>(std::floor(hi / step + 1e-9));
    for (long long k = first; k <= last; ++k) grid.push_back(static_cast<double>(k) * step);
  };
  add_lattice(range.min, range.max, range.coarse_step);
  for (const double line : model.line_offsets_mhz) {
    const double lo = std::max(range.min, line - range.fine_window);
    const double hi = std::min(range.max, line + range.fine_window);
    if (lo <= hi) add_lattice(lo, hi, range.fine_step);
  }
  grid.push_back(range.min);
  grid.push_back(range.max);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-9; }),
             grid.end());
  return grid;
}

std::vector<OptimumPoint> optimize_per_detuning(const CouplingModel& model, double n_atoms,
                                                std::span<const double> detunings,
                                                const PhotonRange& photons, Strategy strategy) {
  model.validate();
  photons.validate();
  std::vector<OptimumPoint> out(detunings.size());
  parallel_for(detunings.size(), [&](std::size_t i) {
    out[i] = optimize_photons(couplings_at(model, detunings[i]), model.k_correction, n_atoms,
                              photons, strategy, detunings[i]);
  });
  return out;
}

OptimumPoint optimize_detuning_and_photons(const CouplingModel& model, double n_atoms,
                                           const DetuningRange& detunings,
                                           const PhotonRange& photons, Strategy strategy) {
  const std::vector<double> grid = detuning_grid(model, detunings);
  const std::vector<OptimumPoint> per = optimize_per_detuning(model, n_atoms, grid, photons,
                                                              strategy);
  const auto best = std::min_element(per.begin(), per.end(), [](const auto& a, const auto& b) {
    return a.xi2_m < b.xi2_m;
  });
  return *best;
}

ScanResult scan_od_detuning(const CouplingModel& model, const ScanGrid& grid, Strategy strategy) {
  model.validate();
  grid.validate();
  ScanResult result;
  result.strategy = strategy;
  result.rows = grid.optical_depths.size();
  result.cols = grid.detunings.size();
  result.xi2_m.assign(result.rows * result.cols, 0.0);

  std::vector<CouplingValues> per_detuning(result.cols);
  for (std::size_t j = 0; j < result.cols; ++j) {
    per_detuning[j] = couplings_at(model, grid.detunings[j]);
  }
  parallel_for(result.rows * result.cols, [&](std::size_t cell) {
    const std::size_t i = cell / result.cols;
    const std::size_t j = cell % result.cols;
    const double n_atoms = model.atoms_for_optical_depth(grid.optical_depths[i]);
    result.xi2_m[cell] = optimize_photons(per_detuning[j], model.k_correction, n_atoms,
                                          grid.photons, strategy, grid.detunings[j])
                             .xi2_m;
  });
  return result;
}

PowerLawFit fit_od_scaling(std::span<const double> optical_depths,
                           std::span<const double> xi2_values) {
  if (optical_depths.size() != xi2_values.size()) {
    throw ValidationError("OD and ξ² series must have equal length");
  }
  std::vector<std::pair<double, double>> points;
  points.reserve(optical_depths.size());
  for (std::size_t i = 0; i < optical_depths.size(); ++i) {
    points.emplace_back(optical_depths[i], xi2_values[i]);
  }
  return fit_power_law(points);
}

}  // namespace nlspin
