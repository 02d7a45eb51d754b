#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <cmath>

#include "doctest.h"
#include "l2field/errors.hpp"
#include "l2field/set_models.hpp"

using namespace l2field;

namespace {

struct SectionParams {
  double H, t, s;
};

// Symmetric-difference r-mass at x in d = 1, written out independently.
double section_1d(double x, void* p) {
  const auto* q = static_cast<const SectionParams*>(p);
  const double a = std::abs(x - q->t), b = std::abs(x - q->s);
  const double lo = std::min(a, b), hi = std::max(a, b);
  const double e = 2.0 * q->H - 1.0;
  if (lo == hi || lo == 0.0) return 0.0;  // measure-zero points
  return (std::pow(lo, e) - std::pow(hi, e)) / (1.0 - 2.0 * q->H);
}

// GSL reference for the d = 1 Takenaka mass: integrable singularities at t and s,
// algebraic decay |x|^{2H-3} at infinity.
double takenaka_reference_1d(double H, double t, double s) {
  gsl_set_error_handler_off();
  SectionParams p{H, t, s};
  gsl_function f{&section_1d, &p};
  gsl_integration_workspace* w = gsl_integration_workspace_alloc(2000);
  const double lo = std::min(t, s), hi = std::max(t, s);
  double total = 0.0, part = 0.0, err = 0.0;
  double pts[] = {lo, hi};
  gsl_integration_qagp(&f, pts, 2, 0.0, 1e-10, 2000, w, &part, &err);
  total += part;
  gsl_integration_qagiu(&f, hi, 0.0, 1e-10, 2000, w, &part, &err);
  total += part;
  gsl_integration_qagil(&f, lo, 0.0, 1e-10, 2000, w, &part, &err);
  total += part;
  gsl_integration_workspace_free(w);
  return total;
}

}  // namespace

TEST_SUITE("set_models") {
  TEST_CASE("chentsov exact cases") {
    McConfig cfg;
    cfg.seed = 1;
    const Estimate same = chentsov_symdiff_measure(3, Vec{{1.0, 2.0, 3.0}}, Vec{{1.0, 2.0, 3.0}}, cfg);
    CHECK(same.value == 0.0);
    CHECK(same.std_error == 0.0);
    const Estimate one = chentsov_symdiff_measure(1, Vec{{2.5}}, Vec{{-0.75}}, cfg);
    CHECK(one.value == 3.25);
    CHECK(one.std_error == 0.0);
  }

  TEST_CASE("chentsov calibration in d = 2") {
    McConfig cfg;
    cfg.n_samples = 100000;
    cfg.seed = 2024;
    const Estimate e = chentsov_symdiff_measure(2, Vec{{1.0, 0.0}}, Vec{{0.0, 0.0}}, cfg);
    CHECK(e.std_error <= 0.01);
    CHECK(std::abs(e.value - 1.0) <= 3.0 * e.std_error);
    // c_2 = 1 / E|cos U| = pi / 2.
    CHECK(chentsov_constant(2) == doctest::Approx(M_PI / 2.0).epsilon(1e-14));
    CHECK(chentsov_constant(3) == doctest::Approx(2.0).epsilon(1e-14));
  }

  TEST_CASE("monte-carlo argument errors") {
    McConfig cfg;
    cfg.n_samples = 10;
    CHECK_THROWS_AS(chentsov_symdiff_measure(2, Vec{{1.0, 0.0}}, Vec{{0.0, 0.0}}, cfg), ArgumentError);
    cfg.n_samples = 5000;
    CHECK_THROWS_AS(chentsov_symdiff_measure(2, Vec{{1.0}}, Vec{{0.0, 0.0}}, cfg), ArgumentError);
    CHECK_THROWS_AS(takenaka_symdiff_measure(2, 0.5, Vec{{1.0, 0.0}}, Vec{{0.0, 0.0}}, cfg), ArgumentError);
    CHECK_THROWS_AS(takenaka_symdiff_measure(2, 0.0, Vec{{1.0, 0.0}}, Vec{{0.0, 0.0}}, cfg), ArgumentError);
  }

  TEST_CASE("takenaka exact and scaling cases") {
    McConfig cfg;
    cfg.n_samples = 200000;
    cfg.seed = 77;
    const Estimate zero = takenaka_symdiff_measure(2, 0.25, Vec{{0.3, 0.3}}, Vec{{0.3, 0.3}}, cfg);
    CHECK(zero.value == 0.0);

    const double H = 0.3;
    const Estimate e1 = takenaka_symdiff_measure(2, H, Vec{{0.6, 0.8}}, Vec::Zero(2), cfg);
    cfg.seed = 78;
    const Estimate e2 = takenaka_symdiff_measure(2, H, Vec{{1.2, 1.6}}, Vec::Zero(2), cfg);
    const double ratio = e2.value / e1.value;
    const double rel_se = std::hypot(e1.std_error / e1.value, e2.std_error / e2.value);
    CHECK(std::abs(ratio - std::pow(2.0, 2 * H)) <= 3.0 * rel_se * ratio);
  }

  TEST_CASE("takenaka estimate against a quadrature oracle in d = 1") {
    McConfig cfg;
    cfg.n_samples = 400000;
    cfg.seed = 5;
    for (double H : {0.15, 0.35}) {
      const double ref = takenaka_reference_1d(H, 1.0, -0.5);
      const Estimate e = takenaka_symdiff_measure(1, H, Vec{{1.0}}, Vec{{-0.5}}, cfg);
      CAPTURE(H);
      CAPTURE(ref);
      CAPTURE(e.value);
      CHECK(std::abs(e.value - ref) <= 4.0 * e.std_error);
      CHECK(e.std_error < 0.02 * ref);
    }
  }

  TEST_CASE("section mass matches the independent formula") {
    SectionParams p{0.2, 0.4, -0.7};
    for (double x : {-3.0, -0.1, 0.2, 2.5}) {
      CHECK(takenaka_section_mass(1, 0.2, Vec{{x}}, Vec{{0.4}}, Vec{{-0.7}}) ==
            doctest::Approx(section_1d(x, &p)).epsilon(1e-13));
    }
  }

  TEST_CASE("exponent_fit") {
    std::vector<double> x{0.5, 1.0, 2.0, 4.0}, y;
    for (double v : x) y.push_back(std::sqrt(v));
    const PowerFit f = exponent_fit(x, y);
    CHECK(std::abs(f.slope - 0.5) <= 1e-12);
    CHECK(std::abs(f.r2 - 1.0) <= 1e-12);
    const std::vector<double> c(4, 3.0);
    CHECK(std::abs(exponent_fit(x, c).slope) <= 1e-15);
    CHECK_THROWS_AS(exponent_fit(x, std::vector<double>{1.0, -1.0, 2.0, 3.0}), ArgumentError);
  }

  TEST_CASE("monte-carlo estimates are identical across thread counts") {
    McConfig cfg;
    cfg.n_samples = 30000;
    cfg.seed = 31;
    const Estimate a = takenaka_symdiff_measure(2, 0.25, Vec{{0.6, 0.8}}, Vec::Zero(2), cfg, Exec::serial);
    const Estimate c = chentsov_symdiff_measure(3, Vec{{1.0, -1.0, 0.5}}, Vec::Zero(3), cfg, Exec::serial);
    for (int threads : {1, 3, 8}) {
      set_worker_threads(threads);
      const Estimate b = takenaka_symdiff_measure(2, 0.25, Vec{{0.6, 0.8}}, Vec::Zero(2), cfg);
      CHECK(b.value == a.value);
      CHECK(b.std_error == a.std_error);
      CHECK(chentsov_symdiff_measure(3, Vec{{1.0, -1.0, 0.5}}, Vec::Zero(3), cfg).value == c.value);
    }
    set_worker_threads(0);
  }
}
