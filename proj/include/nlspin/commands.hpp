#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nlspin/config.hpp"
#include "nlspin/dynamics.hpp"

namespace nlspin {

struct CommandOptions {
  bool allow_boundary = false;  // optimize: accept an optimum on the photon-range edge
  bool conditional = false;     // mc-verify: two-pulse conditional-variance sweep
  std::filesystem::path input;  // fit-field: CSV with j_x, j_y columns
};

struct CommandOutput {
  std::string stdout_text;
  std::vector<std::filesystem::path> files;
  /// Set when results were written but count as a numerical failure
  /// (boundary optimum, failed bracketing). The CLI exits with status 2.
  std::string failure;
};

/// Subcommand names accepted by run_command.
const std::vector<std::string>& command_names();

/// Runs one subcommand, writing its files under config.run.out_dir.
/// ValidationError/IoError and NumericalError propagate to the caller.
CommandOutput run_command(const std::string& name, const RunConfig& config,
                          const CommandOptions& options = {});

/// `count` values from lo to hi inclusive, geometric spacing.
std::vector<double> log_space(double lo, double hi, std::size_t count);
std::vector<double> lin_space(double lo, double hi, std::size_t count);

/// Couplings used by the scaling table: line data at the configured
/// detuning unless the config supplies measured κ values.
CouplingValues scaling_couplings(const RunConfig& config);

/// Randomized single-pulse scenarios for the sampling check. Detunings stay
/// more than 3Γ from every line.
std::vector<ExperimentConfig> random_mc_configs(const CouplingModel& model, std::uint64_t seed,
                                                std::size_t count);

struct McComparison {
  ExperimentConfig config;
  ObservableMatrix analytic = ObservableMatrix::Zero();
  ObservableMatrix sampled = ObservableMatrix::Zero();
  /// Largest |sampled/analytic − 1| over entries with nonzero analytic value.
  double max_rel_err = 0.0;
};

/// Entries below this fraction of sqrt(C_ii C_jj) count as analytic zeros.
inline constexpr double kZeroCorrelation = 1e-12;

McComparison compare_mc(const ExperimentConfig& config, const CouplingModel& model,
                        std::size_t n_samples, std::uint64_t seed);

/// A R/(A + R): A = var(K_θ) of the input, R the per-pulse readout variance.
double conditional_variance_expected(const ExperimentConfig& config,
                                     const CouplingValues& couplings);

struct ConditionalRow {
  std::size_t n_samples = 0;
  double chi = 0.0;
  double var_cond_mc = 0.0;
  double var_cond_analytic = 0.0;
  double rel_err = 0.0;
};

std::vector<ConditionalRow> conditional_sweep(const ExperimentConfig& config,
                                              const CouplingModel& model,
                                              std::span<const std::size_t> sizes,
                                              std::uint64_t seed);

}  // namespace nlspin
