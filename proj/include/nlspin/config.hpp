#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "nlspin/errors.hpp"
#include "nlspin/experiment.hpp"
#include "nlspin/magnetometry.hpp"
#include "nlspin/optimizer.hpp"
#include "nlspin/sensitivity.hpp"
#include "nlspin/spectro.hpp"
#include "nlspin/table.hpp"

namespace nlspin {

/// Configuration failure. `key` is "section.name" when one key is at fault.
class ConfigError : public ValidationError {
 public:
  enum class Kind { missing_file, parse_error, unknown_key, constraint };

  ConfigError(Kind kind, std::string key, const std::string& message);

  Kind kind() const { return kind_; }
  const std::string& key() const { return key_; }

 private:
  Kind kind_;
  std::string key_;
};

const char* to_string(ConfigError::Kind kind);

/// Log-spaced N_L grid for the ΔJ_y scaling table.
struct ScalingSettings {
  double photon_min = 1e6;
  double photon_max = 1e9;
  std::size_t points = 50;
  /// Measured couplings replace the line-data values when set.
  std::optional<double> kappa1;
  std::optional<double> kappa2;
};

/// (Δ, OD) landscape grid. OD is log-spaced, Δ linear.
struct ScanSettings {
  double od_min = 10.0;
  double od_max = 1000.0;
  std::size_t od_points = 31;
  double detuning_min_mhz = -400.0;
  double detuning_max_mhz = 400.0;
  std::size_t detuning_points = 161;
};

struct MonteCarloSettings {
  std::size_t samples = 1000000;
  std::size_t configs = 20;
};

struct RunSettings {
  std::uint64_t seed = 20140117;
  Strategy strategy = Strategy::aoc;
  CrossoverMode crossover_mode = CrossoverMode::ideal_lte;
  bool lte_ideal = true;
  std::string out_dir = ".";
  OutputFormat format = OutputFormat::csv;
};

struct RunConfig {
  CouplingModel coupling;
  ExperimentConfig experiment;
  FieldScenario field;
  PhotonRange photons;
  DetuningRange detunings;
  ScalingSettings scaling;
  ScanSettings scan;
  MonteCarloSettings monte_carlo;
  RunSettings run;

  /// Throws ConfigError(constraint) naming the first offending key.
  void validate() const;
};

/// Parses "key = value" lines under [section] headers. '#' and ';' start
/// comments. Unknown sections or keys and duplicates are rejected.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Every key with its current value, full precision; parse_config(dump) == config.
std::string dump_config(const RunConfig& config);

}  // namespace nlspin
