#include "nlspin/commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>

#include "json.hpp"

#include "nlspin/errors.hpp"
#include "nlspin/magnetometry.hpp"
#include "nlspin/optimizer.hpp"
#include "nlspin/parallel.hpp"
#include "nlspin/sensitivity.hpp"
#include "nlspin/squeezing.hpp"
#include "nlspin/table.hpp"

namespace nlspin {

using ordered_json = nlohmann::ordered_json;

std::vector<double> log_space(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi >= lo) || count == 0) {
    throw ValidationError("log_space needs 0 < lo <= hi and count >= 1");
  }
  if (count == 1) return {lo};
  std::vector<double> out(count);
  const double a = std::log(lo);
  const double step = (std::log(hi) - a) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = std::exp(a + step * static_cast<double>(i));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> lin_space(double lo, double hi, std::size_t count) {
  if (!(hi >= lo) || count == 0) throw ValidationError("lin_space needs lo <= hi and count >= 1");
  if (count == 1) return {lo};
  std::vector<double> out(count);
  const double step = (hi - lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out[i] = lo + step * static_cast<double>(i);
  out.back() = hi;
  return out;
}

CouplingValues scaling_couplings(const RunConfig& config) {
  CouplingValues c = couplings_at(config.coupling, config.experiment.detuning_mhz);
  if (config.scaling.kappa1) c.kappa1 = *config.scaling.kappa1;
  if (config.scaling.kappa2) c.kappa2 = *config.scaling.kappa2;
  return c;
}

std::vector<ExperimentConfig> random_mc_configs(const CouplingModel& model, std::uint64_t seed,
                                                std::size_t count) {
  model.validate();
  std::mt19937_64 rng(derive_seed(seed, 0x6d63));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double margin = 3.0 * model.gamma_mhz;
  std::vector<ExperimentConfig> out;
  out.reserve(count);
  while (out.size() < count) {
    ExperimentConfig e;
    e.n_atoms = std::pow(10.0, 4.0 + 3.0 * unit(rng));
    e.n_photons = std::pow(10.0, 6.0 + 3.0 * unit(rng));
    e.detuning_mhz = -1000.0 + 2000.0 * unit(rng);
    e.j_y_mean = (unit(rng) - 0.5) * 0.2 * e.j_x();
    e.j_z_mean = (unit(rng) - 0.5) * 0.2 * e.j_x();
    const bool near_line =
        std::any_of(model.line_offsets_mhz.begin(), model.line_offsets_mhz.end(),
                    [&](double line) { return std::abs(e.detuning_mhz - line) <= margin; });
    if (near_line) continue;
    out.push_back(e);
  }
  return out;
}

McComparison compare_mc(const ExperimentConfig& config, const CouplingModel& model,
                        std::size_t n_samples, std::uint64_t seed) {
  const CouplingValues c = couplings_at(model, config.detuning_mhz);
  McComparison out;
  out.config = config;
  out.analytic = analytic_observables(coherent_input(config), c).cov;
  out.sampled = mc_sample_pulse(config, model, n_samples, seed).cov;
  for (int i = 0; i < observable::count; ++i) {
    for (int j = i; j < observable::count; ++j) {
      const double a = out.analytic(i, j);
      const double scale = std::sqrt(std::abs(out.analytic(i, i) * out.analytic(j, j)));
      if (std::abs(a) <= kZeroCorrelation * scale || a == 0.0) continue;
      out.max_rel_err = std::max(out.max_rel_err, std::abs(out.sampled(i, j) / a - 1.0));
    }
  }
  return out;
}

double conditional_variance_expected(const ExperimentConfig& config,
                                     const CouplingValues& couplings) {
  const GaussianJointState input = coherent_input(config);
  const double a = mixed_variable(input, couplings).value_var;
  const double r = subtracted_readout_variance(config, couplings);
  return a * r / (a + r);
}

std::vector<ConditionalRow> conditional_sweep(const ExperimentConfig& config,
                                              const CouplingModel& model,
                                              std::span<const std::size_t> sizes,
                                              std::uint64_t seed) {
  const CouplingValues c = couplings_at(model, config.detuning_mhz);
  const GaussianJointState input = coherent_input(config);
  const double expected = conditional_variance_expected(config, c);
  const double readout = subtracted_readout_variance(config, c);
  std::vector<ConditionalRow> rows;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    const TwoPulseSamples s =
        mc_two_pulse(input, c, config.electronic_noise, sizes[k], derive_seed(seed, k));
    const ConditionalEstimate est = conditional_variance(s.phi1, s.phi2, readout);
    rows.push_back({sizes[k], est.chi, est.var_conditional, expected,
                    std::abs(est.var_conditional / expected - 1.0)});
  }
  return rows;
}

namespace {

std::filesystem::path output_path(const RunConfig& config, const std::string& stem) {
  const char* ext = config.run.format == OutputFormat::csv ? ".csv" : ".json";
  return std::filesystem::path(config.run.out_dir) / (stem + ext);
}

void emit(CommandOutput& out, const RunConfig& config, const std::string& stem,
          const Table& table) {
  const auto path = output_path(config, stem);
  emit_table(table, path, config.run.format);
  out.files.push_back(path);
}

ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(); }

CommandOutput scaling(const RunConfig& config, const CommandOptions&) {
  const CouplingValues c = scaling_couplings(config);
  Table t{{"n_photons", "var_term1", "var_term2", "var_en", "delta_jy_aoc", "delta_jy_lte_ideal"},
          {}};
  std::vector<std::pair<double, double>> fit_points;
  for (double nl : log_space(config.scaling.photon_min, config.scaling.photon_max,
                             config.scaling.points)) {
    ExperimentConfig e = config.experiment;
    e.n_photons = nl;
    const SensitivityReport aoc = var_jy_aoc(e, c);
    const SensitivityReport lte = var_jy_lte(e, c, {.ideal = true, .electronic_noise = 0.0});
    t.rows.push_back({nl, aoc.var_readout_shot, aoc.var_readout_projection, aoc.var_electronic,
                      aoc.delta_jy, lte.delta_jy});
    fit_points.emplace_back(nl, aoc.delta_jy);
  }
  CommandOutput out;
  emit(out, config, "scaling", t);
  const PowerLawFit fit = fit_scaling_exponent(fit_points);
  ordered_json j;
  j["kappa1"] = c.kappa1;
  j["kappa2"] = c.kappa2;
  j["exponent"] = fit.exponent;
  j["exponent_std_error"] = fit.std_error;
  out.stdout_text = j.dump(2) + "\n";
  return out;
}

CommandOutput crossover(const RunConfig& config, const CommandOptions&) {
  const CouplingValues c = scaling_couplings(config);
  const double na = config.experiment.n_atoms;
  const double n_star = crossover_photons(na, c, config.run.crossover_mode);

  // Compare the two budgets without detector noise on either side of N*.
  auto ratio = [&](double nl) {
    ExperimentConfig e = config.experiment;
    e.n_photons = nl;
    e.electronic_noise = 0.0;
    const bool ideal = config.run.crossover_mode == CrossoverMode::ideal_lte;
    return var_jy_aoc(e, c).delta_jy /
           var_jy_lte(e, c, {.ideal = ideal, .electronic_noise = 0.0}).delta_jy;
  };
  const double below = ratio(0.5 * n_star);
  const double at = ratio(n_star);
  const double above = ratio(2.0 * n_star);
  const bool bracket = below > 1.0 && above < 1.0;

  Table t{{"n_atoms", "kappa1", "kappa2", "n_photons_crossover", "ratio_below", "ratio_at",
           "ratio_above", "bracket_ok"},
          {{na, c.kappa1, c.kappa2, n_star, below, at, above, bracket ? 1.0 : 0.0}}};
  CommandOutput out;
  emit(out, config, "crossover", t);
  ordered_json j;
  j["mode"] = config.run.crossover_mode == CrossoverMode::ideal_lte ? "ideal_lte" : "full_budget";
  j["n_atoms"] = na;
  j["kappa1"] = c.kappa1;
  j["kappa2"] = c.kappa2;
  j["n_photons_crossover"] = n_star;
  j["aoc_over_lte_at_half"] = below;
  j["aoc_over_lte_at_double"] = above;
  j["bracket_ok"] = bracket;
  out.stdout_text = j.dump(2) + "\n";
  if (!bracket) out.failure = "crossover bracketing failed";
  return out;
}

ordered_json optimum_json(const OptimumPoint& p) {
  ordered_json j;
  j["strategy"] = to_string(p.strategy);
  j["detuning_mhz"] = p.detuning_mhz;
  j["n_photons"] = p.n_photons;
  j["xi2_m"] = number(p.xi2_m);
  j["eta_sc"] = p.eta_sc;
  j["zeta"] = p.zeta;
  j["at_boundary"] = p.at_boundary;
  return j;
}

CommandOutput optimize(const RunConfig& config, const CommandOptions& options) {
  const OptimumPoint p = optimize_detuning_and_photons(
      config.coupling, config.experiment.n_atoms, config.detunings, config.photons,
      config.run.strategy);
  CommandOutput out;
  Table t{{"detuning_mhz", "n_photons", "xi2_m", "eta_sc", "zeta", "at_boundary"},
          {{p.detuning_mhz, p.n_photons, p.xi2_m, p.eta_sc, p.zeta, p.at_boundary ? 1.0 : 0.0}}};
  emit(out, config, std::string("optimum_") + to_string(p.strategy), t);
  out.stdout_text = optimum_json(p).dump(2) + "\n";
  if (p.at_boundary && !options.allow_boundary) {
    out.failure = "optimum lies on the photon-range boundary (N_L = " +
                  format_double(p.n_photons) + "); rerun with --allow-boundary";
  }
  return out;
}

double photons_or_nan(double n_atoms, const CouplingValues& c, Strategy s) {
  try {
    return photons_for_projection_noise(n_atoms, c, s);
  } catch (const NumericalError&) {
    return std::nan("");
  }
}

CommandOutput budget(const RunConfig& config, const CommandOptions&) {
  const CouplingModel& model = config.coupling;
  const double na = config.experiment.n_atoms;
  const std::vector<double> grid = detuning_grid(model, config.detunings);
  const auto aoc = optimize_per_detuning(model, na, grid, config.photons, Strategy::aoc);
  const auto lte = optimize_per_detuning(model, na, grid, config.photons, Strategy::lte);

  Table t{{"detuning_mhz", "kappa1", "kappa2", "eta_gamma", "photons_aoc", "photons_lte",
           "photons_eta_sc_0.1", "photons_eta_sc_0.5", "eta_sc_aoc", "eta_sc_lte", "xi2_m_aoc",
           "n_photons_aoc", "at_boundary_aoc", "xi2_m_lte", "n_photons_lte", "at_boundary_lte"},
          {}};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const CouplingValues c = couplings_at(model, grid[i]);
    const double per_photon = model.k_correction * c.eta_gamma;
    const double pa = photons_or_nan(na, c, Strategy::aoc);
    const double pl = photons_or_nan(na, c, Strategy::lte);
    t.rows.push_back({grid[i], c.kappa1, c.kappa2, c.eta_gamma, pa, pl, 0.1 / per_photon,
                      0.5 / per_photon, per_photon * pa, per_photon * pl, aoc[i].xi2_m,
                      aoc[i].n_photons, aoc[i].at_boundary ? 1.0 : 0.0, lte[i].xi2_m,
                      lte[i].n_photons, lte[i].at_boundary ? 1.0 : 0.0});
  }
  CommandOutput out;
  emit(out, config, "budget", t);
  out.stdout_text = "budget: " + std::to_string(grid.size()) + " detunings\n";
  return out;
}

CommandOutput scan(const RunConfig& config, const CommandOptions&) {
  const CouplingModel& model = config.coupling;
  const Strategy s = config.run.strategy;
  ScanGrid grid;
  grid.optical_depths = log_space(config.scan.od_min, config.scan.od_max, config.scan.od_points);
  grid.detunings =
      lin_space(config.scan.detuning_min_mhz, config.scan.detuning_max_mhz,
                config.scan.detuning_points);
  grid.photons = config.photons;
  const ScanResult r = scan_od_detuning(model, grid, s);

  const std::string tag = to_string(s);
  CommandOutput out;

  Table matrix{{"optical_depth"}, {}};
  for (double d : grid.detunings) matrix.columns.push_back(format_double(d));
  for (std::size_t i = 0; i < r.rows; ++i) {
    std::vector<double> row{grid.optical_depths[i]};
    for (std::size_t j = 0; j < r.cols; ++j) row.push_back(r.at(i, j));
    matrix.rows.push_back(std::move(row));
  }
  emit(out, config, "scan_" + tag + "_matrix", matrix);

  Table contour{{"optical_depth", "detuning_mhz", "xi2_m"}, {}};
  for (std::size_t i = 0; i < r.rows; ++i) {
    for (std::size_t j = 0; j < r.cols; ++j) {
      contour.rows.push_back({grid.optical_depths[i], grid.detunings[j], r.at(i, j)});
    }
  }
  emit(out, config, "scan_" + tag + "_contour", contour);

  Table summary{{"optical_depth", "n_atoms", "detuning_mhz", "n_photons", "xi2_m", "eta_sc",
                 "at_boundary"},
                {}};
  std::vector<double> xi2(grid.optical_depths.size());
  std::vector<OptimumPoint> best(grid.optical_depths.size());
  for (std::size_t i = 0; i < grid.optical_depths.size(); ++i) {
    const double na = model.atoms_for_optical_depth(grid.optical_depths[i]);
    best[i] = optimize_detuning_and_photons(model, na, config.detunings, config.photons, s);
    xi2[i] = best[i].xi2_m;
    summary.rows.push_back({grid.optical_depths[i], na, best[i].detuning_mhz, best[i].n_photons,
                            best[i].xi2_m, best[i].eta_sc, best[i].at_boundary ? 1.0 : 0.0});
  }
  emit(out, config, "scan_" + tag + "_summary", summary);

  ordered_json j;
  j["strategy"] = tag;
  if (grid.optical_depths.size() >= 3) {
    const PowerLawFit fit = fit_od_scaling(grid.optical_depths, xi2);
    j["od_exponent"] = fit.exponent;
    j["od_exponent_std_error"] = fit.std_error;
  }
  j["cells"] = r.rows * r.cols;
  out.stdout_text = j.dump(2) + "\n";
  return out;
}

CommandOutput mc_verify(const RunConfig& config, const CommandOptions& options) {
  CommandOutput out;
  const std::uint64_t seed = config.run.seed;
  const std::size_t n = config.monte_carlo.samples;

  if (options.conditional) {
    std::vector<std::size_t> sizes;
    for (std::size_t m = 1000; m <= n; m *= 4) sizes.push_back(m);
    if (sizes.empty() || sizes.back() != n) sizes.push_back(n);
    const auto rows = conditional_sweep(config.experiment, config.coupling, sizes, seed);
    Table t{{"n_samples", "chi", "var_cond_mc", "var_cond_analytic", "rel_err"}, {}};
    for (const auto& r : rows) {
      t.rows.push_back({static_cast<double>(r.n_samples), r.chi, r.var_cond_mc,
                        r.var_cond_analytic, r.rel_err});
    }
    emit(out, config, "mc_conditional", t);
    ordered_json j;
    j["n_samples"] = rows.back().n_samples;
    j["rel_err"] = rows.back().rel_err;
    out.stdout_text = j.dump(2) + "\n";
    return out;
  }

  static const char* names[] = {"s_y_out", "s_z_out", "j_y", "j_z", "phi", "k_theta"};
  Table t{{"config", "n_atoms", "n_photons", "detuning_mhz", "j_y_mean", "j_z_mean"}, {}};
  for (int i = 0; i < observable::count; ++i) {
    for (int k = i; k < observable::count; ++k) {
      const std::string pair = std::string(names[i]) + "__" + names[k];
      t.columns.push_back("analytic_" + pair);
      t.columns.push_back("mc_" + pair);
      t.columns.push_back("rel_err_" + pair);
    }
  }
  t.columns.push_back("max_rel_err");

  const auto cases = random_mc_configs(config.coupling, seed, config.monte_carlo.configs);
  double worst = 0.0;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const McComparison cmp = compare_mc(cases[c], config.coupling, n, derive_seed(seed, c + 1));
    std::vector<double> row{static_cast<double>(c), cases[c].n_atoms, cases[c].n_photons,
                            cases[c].detuning_mhz, cases[c].j_y_mean, cases[c].j_z_mean};
    for (int i = 0; i < observable::count; ++i) {
      for (int k = i; k < observable::count; ++k) {
        const double a = cmp.analytic(i, k);
        const double scale = std::sqrt(std::abs(cmp.analytic(i, i) * cmp.analytic(k, k)));
        const bool zero = a == 0.0 || std::abs(a) <= kZeroCorrelation * scale;
        row.push_back(a);
        row.push_back(cmp.sampled(i, k));
        row.push_back(zero ? std::nan("") : std::abs(cmp.sampled(i, k) / a - 1.0));
      }
    }
    row.push_back(cmp.max_rel_err);
    worst = std::max(worst, cmp.max_rel_err);
    t.rows.push_back(std::move(row));
  }
  emit(out, config, "mc_verify", t);
  ordered_json j;
  j["configs"] = cases.size();
  j["n_samples"] = n;
  j["max_rel_err"] = worst;
  out.stdout_text = j.dump(2) + "\n";
  return out;
}

CommandOutput fit_field(const RunConfig& config, const CommandOptions& options) {
  if (options.input.empty()) throw ValidationError("fit-field requires --input <csv>");
  const Table in = read_csv(options.input);
  const auto col = [&](const char* name) {
    const auto it = std::find(in.columns.begin(), in.columns.end(), name);
    if (it == in.columns.end()) {
      throw ValidationError(options.input.string() + ": missing column '" + name + "'");
    }
    return static_cast<std::size_t>(it - in.columns.begin());
  };
  const std::size_t cx = col("j_x");
  const std::size_t cy = col("j_y");
  std::vector<std::pair<double, double>> pairs;
  for (const auto& row : in.rows) pairs.emplace_back(row[cx], row[cy]);

  const FieldFit fit =
      fit_bz(pairs, config.field.evolution_time_s, config.field.gyromagnetic_ratio);
  CommandOutput out;
  Table t{{"b_z_tesla", "std_error_tesla", "slope", "points"},
          {{fit.b_z_tesla, fit.std_error, fit.slope, static_cast<double>(pairs.size())}}};
  emit(out, config, "field_fit", t);
  ordered_json j;
  j["b_z_tesla"] = fit.b_z_tesla;
  j["std_error_tesla"] = fit.std_error;
  j["b_z_nt"] = fit.b_z_tesla * 1e9;
  j["std_error_nt"] = fit.std_error * 1e9;
  j["slope"] = fit.slope;
  j["points"] = pairs.size();
  out.stdout_text = j.dump(2) + "\n";
  return out;
}

using Runner = std::function<CommandOutput(const RunConfig&, const CommandOptions&)>;

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> all{
      {"scaling", scaling}, {"crossover", crossover}, {"optimize", optimize},
      {"budget", budget},   {"scan", scan},           {"mc-verify", mc_verify},
      {"fit-field", fit_field}};
  return all;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"scaling", "crossover", "optimize", "budget",
                                              "scan",    "mc-verify", "fit-field"};
  return names;
}

CommandOutput run_command(const std::string& name, const RunConfig& config,
                          const CommandOptions& options) {
  const auto it = runners().find(name);
  if (it == runners().end()) throw ValidationError("unknown subcommand '" + name + "'");
  config.validate();
  return it->second(config, options);
}

}  // namespace nlspin
