#include <cmath>
#include <complex>

#include "doctest.h"
#include "l2field/errors.hpp"
#include "l2field/spectral.hpp"
#include "oracles.hpp"

using namespace l2field;

namespace {

std::vector<Vec> integer_design(int n) {
  std::vector<Vec> d;
  for (int i = 0; i < n; ++i) d.push_back(Vec::Constant(1, i));
  return d;
}

double oracle_schoenberg_min(double alpha, double t, int n) {
  Mat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = std::exp(-t * std::pow(std::abs(i - j), alpha));
  return oracle::jacobi_min_eig(g);
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("schoenberg with the zero variogram") {
    const auto design = integer_design(5);
    const std::vector<double> ts{0.5, 2.0};
    const Report r = schoenberg_check(Variogram::zero(), design, ts);
    CHECK(r.pass);
    CHECK(std::abs(r.stats["min_eig"].get<double>()) <= 1e-14);
  }

  TEST_CASE("schoenberg power variograms against the eigenvalue oracle") {
    const auto design = integer_design(8);
    const std::vector<double> ts{0.1, 1.0, 10.0};
    const Report one = schoenberg_check(Variogram::power(1.0), design, ts);
    CHECK(one.pass);
    const Report three = schoenberg_check(Variogram::power(3.0), design, ts);
    CHECK_FALSE(three.pass);
    double oracle_worst = 0.0;
    for (double t : ts) oracle_worst = std::min(oracle_worst, oracle_schoenberg_min(3.0, t, 8));
    CHECK(oracle_worst < -1e-6);
    CHECK(three.stats["min_eig"].get<double>() == doctest::Approx(oracle_worst).epsilon(1e-8));
    for (std::size_t i = 0; i < ts.size(); ++i)
      CHECK(three.details[i]["min_eig"].get<double>() ==
            doctest::Approx(oracle_schoenberg_min(3.0, ts[i], 8)).epsilon(1e-8).scale(1e-12));
    CHECK_THROWS_AS(schoenberg_check(Variogram::power(1.0), design, std::vector<double>{-1.0}), ArgumentError);
  }

  TEST_CASE("schoenberg accepts kernel variograms") {
    const Variogram v = Variogram::from_kernel(Kernel::levy(0.4));
    CHECK(v.alpha == doctest::Approx(0.8));
    const std::vector<double> ts{0.3, 3.0};
    CHECK(schoenberg_check(v, integer_design(10), ts).pass);
    CHECK_THROWS_AS(Variogram::from_kernel(Kernel::mpfbm(0.3)), ArgumentError);
  }

  TEST_CASE("levy-khintchine integral: closed form and the second quadrature") {
    CHECK(lk_closed_form(1.0, 1.0) == doctest::Approx(2.0 * M_PI).epsilon(1e-15));
    for (double alpha : {0.3, 0.5, 1.0, 1.5, 1.8})
      for (double xi : {0.25, 1.0, 4.0}) {
        CAPTURE(alpha);
        CAPTURE(xi);
        const double a = lk_integral(alpha, xi);
        const double b = lk_integral_reference(alpha, xi);
        const double c = lk_closed_form(alpha, xi);
        CHECK(std::abs(a - b) <= 1e-8 * std::abs(b));
        CHECK(std::abs(a - c) <= 1e-9 * std::abs(c));
      }
  }

  TEST_CASE("levy-khintchine near alpha = 2 keeps (2 - alpha) I bounded") {
    // (2 - alpha) I(xi) -> 2 xi^2 as alpha -> 2.
    for (double alpha : {1.9, 1.99, 1.999}) {
      const double v = (2.0 - alpha) * lk_integral(alpha, 1.0);
      CAPTURE(alpha);
      CHECK(v == doctest::Approx(2.0).epsilon(0.15));
    }
  }

  TEST_CASE("lk_scaling_check") {
    const std::vector<double> xs{0.25, 0.5, 1.0, 2.0, 4.0};
    for (double alpha : {0.5, 1.0, 1.5}) {
      const Report r = lk_scaling_check(alpha, xs);
      CHECK(r.pass);
      CHECK(r.stats["dual_rel_diff"].get<double>() <= 1e-8);
    }
    CHECK_THROWS_AS(lk_scaling_check(2.5, xs), ArgumentError);
  }

  TEST_CASE("frequency grid masses sum to the control measure") {
    const FreqGrid g = FreqGrid::log_spaced(1e-3, 1e3, 500, 0.8);
    double total = 0.0;
    for (double m : g.masses) total += m;
    const double exact = (std::pow(1e-3, -0.8) - std::pow(1e3, -0.8)) / 0.8;
    CHECK(total == doctest::Approx(exact).epsilon(1e-12));
    CHECK_THROWS_AS(FreqGrid::log_spaced(1.0, 0.5, 10, 1.0), ArgumentError);
    CHECK_THROWS_AS(FreqGrid::log_spaced(1e-3, 1e3, 10, 2.0), ArgumentError);
  }

  TEST_CASE("grid covariance approaches the fBm covariance") {
    for (double H : {0.3, 0.5, 0.7}) {
      const FreqGrid g = FreqGrid::log_spaced(1e-4, 1e4, 4096, 2 * H);
      CHECK(spectral_grid_covariance(g, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
      double worst = 0.0;
      for (double s : {0.1, 0.4, 0.8})
        for (double t : {0.2, 0.5, 1.0}) worst = std::max(worst, std::abs(spectral_grid_covariance(g, s, t) - oracle::fbm_cov(H, s, t)));
      CAPTURE(H);
      CHECK(worst <= 5e-3);
    }
  }

  TEST_CASE("spectral synthesis") {
    const FreqGrid g = FreqGrid::log_spaced(1e-4, 1e4, 1024, 1.0);
    std::vector<double> t;
    for (int i = 0; i < 16; ++i) t.push_back(i / 15.0);
    const SamplePaths p = synth_fbm_spectral(0.5, t, g, 2048, 8);
    CHECK((p.values.col(0).array() == 0.0).all());
    CHECK(spectral_increment_check(p, t, g).stats.contains("max_abs_z"));
    for (int threads : {1, 4}) {
      set_worker_threads(threads);
      CHECK(synth_fbm_spectral(0.5, t, g, 2048, 8).values == synth_fbm_spectral(0.5, t, g, 2048, 8, Exec::serial).values);
    }
    set_worker_threads(0);

    CHECK_THROWS_AS(synth_fbm_spectral(0.3, t, g, 10, 1), ArgumentError);  // alpha mismatch
    const FreqGrid narrow = FreqGrid::log_spaced(1e-1, 1e1, 64, 1.0);
    CHECK_THROWS_AS(synth_fbm_spectral(0.5, t, narrow, 10, 1), ArgumentError);  // resolution guard
  }

  TEST_CASE("random measure realisations") {
    Partition p{{0.5, 1.0, 2.0}, {0.7, 0.2}};
    const DiscreteRandomMeasure m(p, 3);
    CHECK(m.cell(2) == std::conj(m.cell(0)));
    CHECK(m.cell(3) == std::conj(m.cell(1)));
    CHECK(m({0, 1}) == m.cell(0) + m.cell(1));
    CHECK(control_mass(p, {0, 3}) == doctest::Approx(0.9));
    CHECK(control_overlap(p, {0, 1}, {1, 2}) == doctest::Approx(0.2));
    CHECK_THROWS_AS(m({7}), ArgumentError);
    CHECK_THROWS_AS((Partition{{1.0, 0.5}, {1.0}}.validate()), ArgumentError);
  }

  TEST_CASE("disjoint cells are uncorrelated") {
    Partition p{{0.5, 1.0, 2.0}, {1.0, 1.0}};
    const int n = 10000;
    std::complex<double> acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const DiscreteRandomMeasure m(p, mix_seed(123, static_cast<std::uint64_t>(i)));
      acc += m.cell(0) * std::conj(m.cell(1));
    }
    acc /= n;
    // Each product has E|.|^2 = 1; 3/sqrt(n) per component.
    CHECK(std::abs(acc.real()) <= 3.0 / std::sqrt(n));
    CHECK(std::abs(acc.imag()) <= 3.0 / std::sqrt(n));
  }

  TEST_CASE("random measure moment suite") {
    Partition p;
    p.edges = {0.1, 0.2, 0.4, 0.8, 1.6, 3.2};
    for (std::size_t i = 0; i + 1 < p.edges.size(); ++i) p.masses.push_back(1 / p.edges[i] - 1 / p.edges[i + 1]);
    const Report r = simulate_random_measure(p, 10000, 2);
    CHECK(r.stats["additivity_rel_residual"].get<double>() <= 1e-14);
    CHECK(r.stats["max_abs_z"].get<double>() < 4.5);
    set_worker_threads(3);
    const Report again = simulate_random_measure(p, 10000, 2);
    set_worker_threads(0);
    CHECK(again.to_json() == r.to_json());
    CHECK_THROWS_AS(simulate_random_measure(p, 10, 2), ArgumentError);
  }
}
