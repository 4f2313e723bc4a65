#include "nlspin/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string_view>
#include <vector>

namespace nlspin {

ConfigError::ConfigError(Kind kind, std::string key, const std::string& message)
    : ValidationError(std::string("config ") + to_string(kind) +
                      (key.empty() ? "" : " [" + key + "]") + ": " + message),
      kind_(kind),
      key_(std::move(key)) {}

const char* to_string(ConfigError::Kind kind) {
  switch (kind) {
    case ConfigError::Kind::missing_file: return "missing_file";
    case ConfigError::Kind::parse_error: return "parse_error";
    case ConfigError::Kind::unknown_key: return "unknown_key";
    case ConfigError::Kind::constraint: return "constraint";
  }
  return "unknown";
}

namespace {

using Setter = std::function<void(RunConfig&, std::string_view)>;
using Getter = std::function<std::string(const RunConfig&)>;

struct Field {
  std::string section;
  std::string key;
  Setter set;
  Getter get;

  std::string name() const { return section + "." + key; }
};

[[noreturn]] void bad_value(std::string_view text, const char* expected) {
  throw std::invalid_argument("expected " + std::string(expected) + ", got '" +
                              std::string(text) + "'");
}

double parse_number(std::string_view text) {
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) bad_value(text, "a number");
  return value;
}

std::size_t parse_count(std::string_view text) {
  const double v = parse_number(text);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) bad_value(text, "a non-negative integer");
  return static_cast<std::size_t>(v);
}

std::uint64_t parse_seed(std::string_view text) {
  std::uint64_t value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    bad_value(text, "an unsigned 64-bit integer");
  }
  return value;
}

bool parse_bool(std::string_view text) {
  if (text == "true") return true;
  if (text == "false") return false;
  bad_value(text, "true or false");
}

template <typename Member>
Field number(std::string section, std::string key, Member member) {
  return {std::move(section), std::move(key),
          [member](RunConfig& c, std::string_view v) { member(c) = parse_number(v); },
          [member](const RunConfig& c) {
            return format_double(member(const_cast<RunConfig&>(c)));
          }};
}

template <typename Member>
Field count(std::string section, std::string key, Member member) {
  return {std::move(section), std::move(key),
          [member](RunConfig& c, std::string_view v) { member(c) = parse_count(v); },
          [member](const RunConfig& c) {
            return std::to_string(member(const_cast<RunConfig&>(c)));
          }};
}

template <typename Member>
Field optional_number(std::string section, std::string key, Member member) {
  return {std::move(section), std::move(key),
          [member](RunConfig& c, std::string_view v) {
            if (v == "none") {
              member(c).reset();
            } else {
              member(c) = parse_number(v);
            }
          },
          [member](const RunConfig& c) {
            const auto& v = member(const_cast<RunConfig&>(c));
            return v ? format_double(*v) : std::string("none");
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> all = [] {
    std::vector<Field> f;
    // [coupling]
    f.push_back(number("coupling", "gamma_mhz", [](RunConfig& c) -> double& { return c.coupling.gamma_mhz; }));
    for (int i = 0; i < 3; ++i) {
      f.push_back(number("coupling", "line_offset_" + std::to_string(i) + "_mhz",
                         [i](RunConfig& c) -> double& {
                           return c.coupling.line_offsets_mhz[static_cast<std::size_t>(i)];
                         }));
    }
    f.push_back(number("coupling", "wavelength_m", [](RunConfig& c) -> double& { return c.coupling.wavelength_m; }));
    f.push_back(number("coupling", "interaction_area_m2", [](RunConfig& c) -> double& { return c.coupling.interaction_area_m2; }));
    f.push_back(number("coupling", "k_correction", [](RunConfig& c) -> double& { return c.coupling.k_correction; }));
    // [experiment]
    f.push_back(number("experiment", "n_atoms", [](RunConfig& c) -> double& { return c.experiment.n_atoms; }));
    f.push_back(number("experiment", "n_photons", [](RunConfig& c) -> double& { return c.experiment.n_photons; }));
    f.push_back(number("experiment", "detuning_mhz", [](RunConfig& c) -> double& { return c.experiment.detuning_mhz; }));
    f.push_back(number("experiment", "electronic_noise", [](RunConfig& c) -> double& { return c.experiment.electronic_noise; }));
    f.push_back(number("experiment", "eta_dep", [](RunConfig& c) -> double& { return c.experiment.eta_dep; }));
    f.push_back(number("experiment", "j_y_mean", [](RunConfig& c) -> double& { return c.experiment.j_y_mean; }));
    f.push_back(number("experiment", "j_z_mean", [](RunConfig& c) -> double& { return c.experiment.j_z_mean; }));
    // [magnetometry]
    f.push_back(number("magnetometry", "gyromagnetic_ratio", [](RunConfig& c) -> double& { return c.field.gyromagnetic_ratio; }));
    f.push_back(number("magnetometry", "evolution_time_s", [](RunConfig& c) -> double& { return c.field.evolution_time_s; }));
    f.push_back(number("magnetometry", "b_z_tesla", [](RunConfig& c) -> double& { return c.field.b_z_tesla; }));
    f.push_back(number("magnetometry", "j_x", [](RunConfig& c) -> double& { return c.field.j_x; }));
    // [photons]
    f.push_back(number("photons", "min", [](RunConfig& c) -> double& { return c.photons.min; }));
    f.push_back(number("photons", "max", [](RunConfig& c) -> double& { return c.photons.max; }));
    f.push_back(count("photons", "coarse_points", [](RunConfig& c) -> std::size_t& { return c.photons.coarse_points; }));
    f.push_back(number("photons", "rel_tolerance", [](RunConfig& c) -> double& { return c.photons.rel_tolerance; }));
    // [detuning]
    f.push_back(number("detuning", "min_mhz", [](RunConfig& c) -> double& { return c.detunings.min; }));
    f.push_back(number("detuning", "max_mhz", [](RunConfig& c) -> double& { return c.detunings.max; }));
    f.push_back(number("detuning", "fine_step_mhz", [](RunConfig& c) -> double& { return c.detunings.fine_step; }));
    f.push_back(number("detuning", "coarse_step_mhz", [](RunConfig& c) -> double& { return c.detunings.coarse_step; }));
    f.push_back(number("detuning", "fine_window_mhz", [](RunConfig& c) -> double& { return c.detunings.fine_window; }));
    // [scaling]
    f.push_back(number("scaling", "photon_min", [](RunConfig& c) -> double& { return c.scaling.photon_min; }));
    f.push_back(number("scaling", "photon_max", [](RunConfig& c) -> double& { return c.scaling.photon_max; }));
    f.push_back(count("scaling", "points", [](RunConfig& c) -> std::size_t& { return c.scaling.points; }));
    f.push_back(optional_number("scaling", "kappa1", [](RunConfig& c) -> std::optional<double>& { return c.scaling.kappa1; }));
    f.push_back(optional_number("scaling", "kappa2", [](RunConfig& c) -> std::optional<double>& { return c.scaling.kappa2; }));
    // [scan]
    f.push_back(number("scan", "od_min", [](RunConfig& c) -> double& { return c.scan.od_min; }));
    f.push_back(number("scan", "od_max", [](RunConfig& c) -> double& { return c.scan.od_max; }));
    f.push_back(count("scan", "od_points", [](RunConfig& c) -> std::size_t& { return c.scan.od_points; }));
    f.push_back(number("scan", "detuning_min_mhz", [](RunConfig& c) -> double& { return c.scan.detuning_min_mhz; }));
    f.push_back(number("scan", "detuning_max_mhz", [](RunConfig& c) -> double& { return c.scan.detuning_max_mhz; }));
    f.push_back(count("scan", "detuning_points", [](RunConfig& c) -> std::size_t& { return c.scan.detuning_points; }));
    // [monte_carlo]
    f.push_back(count("monte_carlo", "samples", [](RunConfig& c) -> std::size_t& { return c.monte_carlo.samples; }));
    f.push_back(count("monte_carlo", "configs", [](RunConfig& c) -> std::size_t& { return c.monte_carlo.configs; }));
    // [run]
    f.push_back({"run", "seed",
                 [](RunConfig& c, std::string_view v) { c.run.seed = parse_seed(v); },
                 [](const RunConfig& c) { return std::to_string(c.run.seed); }});
    f.push_back({"run", "strategy",
                 [](RunConfig& c, std::string_view v) {
                   c.run.strategy = parse_strategy(std::string(v).c_str());
                 },
                 [](const RunConfig& c) { return std::string(to_string(c.run.strategy)); }});
    f.push_back({"run", "crossover_mode",
                 [](RunConfig& c, std::string_view v) {
                   if (v == "ideal_lte") {
                     c.run.crossover_mode = CrossoverMode::ideal_lte;
                   } else if (v == "full_budget") {
                     c.run.crossover_mode = CrossoverMode::full_budget;
                   } else {
                     bad_value(v, "ideal_lte or full_budget");
                   }
                 },
                 [](const RunConfig& c) {
                   return std::string(c.run.crossover_mode == CrossoverMode::ideal_lte
                                          ? "ideal_lte"
                                          : "full_budget");
                 }});
    f.push_back({"run", "lte_ideal",
                 [](RunConfig& c, std::string_view v) { c.run.lte_ideal = parse_bool(v); },
                 [](const RunConfig& c) { return std::string(c.run.lte_ideal ? "true" : "false"); }});
    f.push_back({"run", "out_dir",
                 [](RunConfig& c, std::string_view v) {
                   if (v.empty()) bad_value(v, "a directory path");
                   c.run.out_dir = std::string(v);
                 },
                 [](const RunConfig& c) { return c.run.out_dir; }});
    f.push_back({"run", "format",
                 [](RunConfig& c, std::string_view v) {
                   c.run.format = parse_output_format(std::string(v));
                 },
                 [](const RunConfig& c) {
                   return std::string(c.run.format == OutputFormat::csv ? "csv" : "json");
                 }});
    return f;
  }();
  return all;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

void check(bool ok, const char* key, const std::string& message) {
  if (!ok) throw ConfigError(ConfigError::Kind::constraint, key, message);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void RunConfig::validate() const {
  const auto& c = coupling;
  check(finite_positive(c.gamma_mhz), "coupling.gamma_mhz", "must be > 0");
  check(c.line_offsets_mhz[0] == 0.0, "coupling.line_offset_0_mhz",
        "must be 0 (detunings are measured from the F'=0 line)");
  check(std::isfinite(c.line_offsets_mhz[1]) && c.line_offsets_mhz[1] > c.line_offsets_mhz[0],
        "coupling.line_offset_1_mhz", "must exceed line_offset_0_mhz");
  check(std::isfinite(c.line_offsets_mhz[2]) && c.line_offsets_mhz[2] > c.line_offsets_mhz[1],
        "coupling.line_offset_2_mhz", "must exceed line_offset_1_mhz");
  check(finite_positive(c.wavelength_m), "coupling.wavelength_m", "must be > 0");
  check(finite_positive(c.interaction_area_m2), "coupling.interaction_area_m2", "must be > 0");
  check(c.k_correction > 0.0 && c.k_correction <= 1.0, "coupling.k_correction",
        "must lie in (0, 1]");

  const auto& e = experiment;
  check(finite_positive(e.n_atoms), "experiment.n_atoms", "must be > 0");
  check(std::isfinite(e.n_photons) && e.n_photons >= 0.0, "experiment.n_photons", "must be >= 0");
  check(std::isfinite(e.detuning_mhz), "experiment.detuning_mhz", "must be finite");
  check(std::isfinite(e.electronic_noise) && e.electronic_noise >= 0.0,
        "experiment.electronic_noise", "must be >= 0");
  check(e.eta_dep >= 0.0 && e.eta_dep < 1.0, "experiment.eta_dep", "must lie in [0, 1)");
  check(std::isfinite(e.j_y_mean), "experiment.j_y_mean", "must be finite");
  check(std::isfinite(e.j_z_mean), "experiment.j_z_mean", "must be finite");

  check(std::isfinite(field.gyromagnetic_ratio) && field.gyromagnetic_ratio != 0.0,
        "magnetometry.gyromagnetic_ratio", "must be finite and nonzero");
  check(std::isfinite(field.evolution_time_s) && field.evolution_time_s > 0.0,
        "magnetometry.evolution_time_s", "must be > 0");
  check(std::isfinite(field.b_z_tesla), "magnetometry.b_z_tesla", "must be finite");
  check(finite_positive(field.j_x), "magnetometry.j_x", "must be > 0");

  check(finite_positive(photons.min), "photons.min", "must be > 0");
  check(std::isfinite(photons.max) && photons.max > photons.min, "photons.max",
        "must exceed photons.min");
  check(photons.coarse_points >= 200, "photons.coarse_points", "must be >= 200");
  check(photons.rel_tolerance > 0.0 && photons.rel_tolerance <= 1e-4, "photons.rel_tolerance",
        "must lie in (0, 1e-4]");

  check(std::isfinite(detunings.min), "detuning.min_mhz", "must be finite");
  check(std::isfinite(detunings.max) && detunings.max >= detunings.min, "detuning.max_mhz",
        "must be >= detuning.min_mhz");
  check(detunings.fine_step > 0.0 && detunings.fine_step <= 1.0, "detuning.fine_step_mhz",
        "must lie in (0, 1]");
  check(detunings.coarse_step > 0.0 && detunings.coarse_step <= 5.0, "detuning.coarse_step_mhz",
        "must lie in (0, 5]");
  check(std::isfinite(detunings.fine_window) && detunings.fine_window >= 0.0,
        "detuning.fine_window_mhz", "must be >= 0");

  check(finite_positive(scaling.photon_min), "scaling.photon_min", "must be > 0");
  check(std::isfinite(scaling.photon_max) && scaling.photon_max > scaling.photon_min,
        "scaling.photon_max", "must exceed scaling.photon_min");
  check(scaling.points >= 2, "scaling.points", "must be >= 2");
  check(!scaling.kappa1 || (std::isfinite(*scaling.kappa1) && *scaling.kappa1 != 0.0),
        "scaling.kappa1", "must be nonzero or none");
  check(!scaling.kappa2 || (std::isfinite(*scaling.kappa2) && *scaling.kappa2 != 0.0),
        "scaling.kappa2", "must be nonzero or none");

  check(finite_positive(scan.od_min), "scan.od_min", "must be > 0");
  check(std::isfinite(scan.od_max) && scan.od_max >= scan.od_min, "scan.od_max",
        "must be >= scan.od_min");
  check(scan.od_points >= 1 && (scan.od_points == 1 || scan.od_max > scan.od_min),
        "scan.od_points", "must be >= 1, and 1 when od_min == od_max");
  check(std::isfinite(scan.detuning_min_mhz), "scan.detuning_min_mhz", "must be finite");
  check(std::isfinite(scan.detuning_max_mhz) && scan.detuning_max_mhz >= scan.detuning_min_mhz,
        "scan.detuning_max_mhz", "must be >= scan.detuning_min_mhz");
  check(scan.detuning_points >= 1 &&
            (scan.detuning_points == 1 || scan.detuning_max_mhz > scan.detuning_min_mhz),
        "scan.detuning_points", "must be >= 1, and 1 when the range is a single point");

  check(monte_carlo.samples >= 2, "monte_carlo.samples", "must be >= 2");
  check(monte_carlo.configs >= 1, "monte_carlo.configs", "must be >= 1");
}

RunConfig parse_config(const std::string& text) {
  RunConfig config;
  std::set<std::string> sections;
  for (const auto& f : fields()) sections.insert(f.section);

  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string where = "line " + std::to_string(line_no);
    std::string_view line = raw;
    if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(ConfigError::Kind::parse_error, "", where + ": unterminated section");
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!sections.count(section)) {
        throw ConfigError(ConfigError::Kind::unknown_key, section,
                          where + ": unknown section [" + section + "]");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(ConfigError::Kind::parse_error, "", where + ": expected key = value");
    }
    if (section.empty()) {
      throw ConfigError(ConfigError::Kind::parse_error, "",
                        where + ": key outside of any [section]");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const std::string full = section + "." + key;

    const Field* field = nullptr;
    for (const auto& f : fields()) {
      if (f.section == section && f.key == key) field = &f;
    }
    if (!field) throw ConfigError(ConfigError::Kind::unknown_key, full, where + ": unknown key");
    if (!seen.insert(full).second) {
      throw ConfigError(ConfigError::Kind::parse_error, full, where + ": duplicate key");
    }
    try {
      field->set(config, value);
    } catch (const std::invalid_argument& err) {
      throw ConfigError(ConfigError::Kind::parse_error, full, where + ": " + err.what());
    } catch (const ValidationError& err) {
      throw ConfigError(ConfigError::Kind::parse_error, full, where + ": " + err.what());
    }
  }
  config.validate();
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError(ConfigError::Kind::missing_file, "", "cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string dump_config(const RunConfig& config) {
  std::string out;
  std::string section;
  for (const auto& f : fields()) {
    if (f.section != section) {
      if (!section.empty()) out += '\n';
      section = f.section;
      out += "[" + section + "]\n";
    }
    out += f.key + " = " + f.get(config) + "\n";
  }
  return out;
}

}  // namespace nlspin
