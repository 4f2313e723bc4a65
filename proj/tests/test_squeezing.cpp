#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "nlspin/commands.hpp"
#include "nlspin/errors.hpp"
#include "nlspin/squeezing.hpp"
#include "oracle.hpp"

using namespace nlspin;

TEST_CASE("frozen chain at -59 MHz") {
  const auto c = couplings_at(CouplingModel{}, -59.0);
  const auto r = squeezing_report(5.6e5, 5.4e6, c, 0.4, Strategy::aoc);
  CHECK(r.zeta == doctest::Approx(3.125068083682335).epsilon(1e-12));
  CHECK(r.eta_sc == doctest::Approx(0.08968340622973044).epsilon(1e-12));
  CHECK(r.xi2 == doctest::Approx(0.4217870537048678).epsilon(1e-12));
  CHECK(r.xi2_m == doctest::Approx(0.5089889179286088).epsilon(1e-12));
  CHECK(r.valid);
  // the quoted optimum 0.47 with 15 % slack
  CHECK(r.xi2_m == doctest::Approx(0.47).epsilon(0.15));
}

TEST_CASE("formula arithmetic") {
  CHECK(xi2_single_pass(0, 0).xi2 == 1.0);
  CHECK(xi2_single_pass(3, 0).xi2 == 0.25);
  CHECK(xi2_single_pass(3.128, 0.0897).xi2 == doctest::Approx(0.422).epsilon(1e-3));
  CHECK(xi2_metrological(0.422, 0.0897) == doctest::Approx(0.51).epsilon(0.01));
  CHECK(xi2_metrological(1.0, 0.5) == 4.0);
  CHECK(xi2_metrological(0.3, 0.0) == 0.3);
  CHECK_FALSE(xi2_single_pass(1.0, 0.6).valid);
  CHECK_THROWS_AS(xi2_metrological(1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(xi2_single_pass(-1.0, 0.0), ValidationError);
}

TEST_CASE("zeta properties") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const double na = std::pow(10.0, 3 + 4 * u(rng));
    const double nl = std::pow(10.0, 4 + 6 * u(rng));
    const CouplingValues c{(u(rng) - 0.5) * 1e-5, (u(rng) - 0.5) * 1e-6, 0};
    const double a = snr_zeta(na, nl, c, Strategy::aoc);
    const double l = snr_zeta(na, nl, c, Strategy::lte);
    CHECK(a >= l);
    CHECK(a / l == doctest::Approx(1 + c.kappa2 * c.kappa2 * nl * nl / 16).epsilon(1e-13));
    CHECK(a == doctest::Approx(oracle::zeta_aoc(c.kappa1, c.kappa2, nl, na)).epsilon(1e-13));
  }
  const CouplingValues c{1e-6, 0.0, 0.0};
  CHECK(snr_zeta(1e5, 1e7, c, Strategy::aoc) == snr_zeta(1e5, 1e7, c, Strategy::lte));
  CHECK(snr_zeta(1e5, 0.0, {1e-6, 1e-7, 0}, Strategy::aoc) == 0.0);
}

TEST_CASE("noise reduction below unity iff the direct inequality holds") {
  for (double z = 0; z < 10; z += 0.37) {
    for (double e = 0; e < 0.5; e += 0.013) {
      const bool squeezed = xi2_single_pass(z, e).xi2 < 1.0;
      CHECK(squeezed == (1 / (1 + z) + 2 * e < 1));
      CHECK(xi2_metrological(xi2_single_pass(z, e).xi2, e) >= xi2_single_pass(z, e).xi2);
    }
  }
}

TEST_CASE("Wineland parameter") {
  CHECK(wineland_from_measurement(1e5 / 2, 1e5, 0, 0) == doctest::Approx(1.0));
  CHECK(wineland_from_measurement(0, 1e5, 0.1, 0.1) == 0.0);
  // consistency with the metrological form at zero damage
  const double na = 5.6e5, x = 0.37;
  CHECK(wineland_from_measurement(na / 4 * x, na / 2, 0, 0) ==
        doctest::Approx(xi2_metrological(x, 0)).epsilon(1e-14));
  // 2.3 dB below projection noise with the measured damages
  const double w = wineland_from_measurement(na / 4 * std::pow(10.0, -0.23), na / 2, 0.093, 0.034);
  CHECK(w == doctest::Approx(0.7670).epsilon(1e-3));
  CHECK(w >= 0.5);
  CHECK(w <= 0.9);
  CHECK_THROWS_AS(wineland_from_measurement(1, 0, 0, 0), ValidationError);
  CHECK_THROWS_AS(wineland_from_measurement(1, 1, 1.0, 0), ValidationError);
}

TEST_CASE("conditional variance estimator basics") {
  std::vector<double> p{1, 2, 3, 4, 5};
  const auto same = conditional_variance(p, p, 0.0);
  CHECK(same.chi == doctest::Approx(1.0));
  CHECK(same.var_conditional == doctest::Approx(0.0));

  std::mt19937_64 rng(31);
  std::normal_distribution<double> n(0, 1);
  std::vector<double> a(200000), b(200000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = n(rng);
    b[i] = 2 * n(rng);
  }
  const auto ind = conditional_variance(a, b, 1.0);
  CHECK(ind.chi < 0.02);
  CHECK(ind.var_conditional == doctest::Approx(3.0).epsilon(0.02));
  std::vector<double> flat(10, 1.0);
  CHECK_THROWS_AS(conditional_variance(flat, p, 0.0), ValidationError);
}

TEST_CASE("two-pulse conditional variance converges to A/(1+zeta)") {
  ExperimentConfig e;
  const CouplingModel model;
  const auto c = couplings_at(model, e.detuning_mhz);
  const double expected = conditional_variance_expected(e, c);
  const double a = e.n_atoms / 4;
  const double r = subtracted_readout_variance(e, c);
  CHECK(expected == doctest::Approx(a / (1 + a / r)).epsilon(1e-14));

  const std::vector<std::size_t> sizes{1u << 20};
  const auto rows = conditional_sweep(e, model, sizes, 2024);
  CHECK(rows[0].rel_err < 0.02);
  CHECK(rows[0].chi == doctest::Approx(a / (a + r)).epsilon(0.02));
}

TEST_CASE("error of the conditional estimate falls with sample count") {
  ExperimentConfig e;
  const CouplingModel model;
  const std::vector<std::size_t> small{4000}, large{256000};
  double es = 0, el = 0;
  for (std::uint64_t s = 1; s <= 12; ++s) {
    es += conditional_sweep(e, model, small, s)[0].rel_err;
    el += conditional_sweep(e, model, large, s)[0].rel_err;
  }
  // 64x the samples: error about 8x smaller; ask for 3x
  CHECK(el * 3 < es);
}

TEST_CASE("subtracted readout variance") {
  ExperimentConfig e;
  e.electronic_noise = 0.0;
  const CouplingValues unit{2.0, 0.0, 0.0};
  e.n_photons = 1.0;  // κ1 S_x = 1
  CHECK(subtracted_readout_variance(e, unit) == doctest::Approx(0.25));

  const auto c = couplings_at(CouplingModel{}, -600);
  e.n_photons = 1e6;  // tanθ ~ 0.002
  const double v1 = subtracted_readout_variance(e, c);
  e.n_photons = 2e6;
  const double v2 = subtracted_readout_variance(e, c);
  CHECK(v2 / v1 == doctest::Approx(0.5).epsilon(1e-4));

  ExperimentConfig def;
  const double tan_t = c.kappa2 * 1e8 / 2;
  const double want = (5e7 + 9.2e5) / (1 + tan_t * tan_t) / std::pow(c.kappa1 * 1e8, 2);
  CHECK(subtracted_readout_variance(def, c) == doctest::Approx(want).epsilon(1e-12));
  CHECK(subtracted_readout_variance(def, c) == doctest::Approx(208591).epsilon(1e-5));
  def.n_photons = 0;
  CHECK_THROWS_AS(subtracted_readout_variance(def, c), NumericalError);
}

TEST_CASE("readout variance against the quoted 1.3e5" * doctest::should_fail()) {
  // the first-principles value lands near 2.1e5; kept visible as a known gap
  ExperimentConfig def;
  const auto c = couplings_at(CouplingModel{}, -600);
  // relative to the quoted value; Approx would scale by the larger side
  CHECK(std::abs(subtracted_readout_variance(def, c) / 1.3e5 - 1) <= 0.5);
}
