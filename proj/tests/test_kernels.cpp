#include <random>

#include "doctest.h"
#include "l2field/errors.hpp"
#include "l2field/kernels.hpp"
#include "oracles.hpp"

using namespace l2field;

TEST_SUITE("kernels") {
  TEST_CASE("l2fbm closed forms") {
    const SpacePtr s = make_grid_space(1, 4, 2.0);
    const L2Vec f = indicator_rect(s, Rect(Vec{{1.0}}));
    const L2Vec g = indicator_rect(s, Rect(Vec{{2.0}}));
    for (double H : {0.1, 0.3, 0.5}) CHECK(cov_l2fbm(*s, H, f, f) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cov_l2fbm(*s, 0.5, f, g) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cov_l2fbm(*s, 0.25, f, g) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK_THROWS_AS(cov_l2fbm(*s, 0.7, f, g), ArgumentError);
    CHECK_NOTHROW(cov_l2fbm(*s, 0.7, f, g, true));
    CHECK_THROWS_AS(cov_l2fbm(*s, 0.0, f, g), ArgumentError);
  }

  TEST_CASE("levy closed forms") {
    CHECK(cov_levy(0.3, Vec{{3.0, 4.0}}, Vec{{3.0, 4.0}}) == doctest::Approx(std::pow(5.0, 0.6)).epsilon(1e-14));
    CHECK(cov_levy(0.5, Vec{{1.0, 0.0}}, Vec{{0.0, 1.0}}) ==
          doctest::Approx(0.5 * (2.0 - std::sqrt(2.0))).epsilon(1e-15));
    const Kernel k = Kernel::levy(0.3);
    CHECK(increment_variance(k, Vec{{3.0, 4.0}}, Vec{{0.0, 0.0}}) ==
          doctest::Approx(2.6265278044).epsilon(1e-10));
    CHECK_THROWS_AS(cov_levy(0.3, Vec{{1.0}}, Vec{{1.0, 2.0}}), ArgumentError);
    CHECK_THROWS_AS(Kernel::levy(1.0), ArgumentError);
  }

  TEST_CASE("sheet closed forms") {
    const std::vector<double> half{0.5, 0.5};
    CHECK(cov_sheet(half, Vec{{0.0, 2.0}}, Vec{{1.0, 1.0}}) == 0.0);
    CHECK(cov_sheet(half, Vec{{1.0, 2.0}}, Vec{{2.0, 1.0}}) == doctest::Approx(1.0).epsilon(1e-15));
    const std::vector<double> hv{0.3, 0.7};
    const Vec s{{0.4, 1.3}}, t{{1.1, 0.6}};
    CHECK(cov_sheet(hv, s, t) ==
          doctest::Approx(oracle::fbm_cov(0.3, 0.4, 1.1) * oracle::fbm_cov(0.7, 1.3, 0.6)).epsilon(1e-14));
    CHECK_THROWS_AS(cov_sheet(hv, Vec{{-0.1, 1.0}}, t), ArgumentError);
    CHECK_THROWS_AS(cov_sheet({0.5}, s, t), ArgumentError);
  }

  TEST_CASE("mpfbm closed forms") {
    CHECK(cov_mpfbm(0.5, Vec{{1.0, 2.0}}, Vec{{2.0, 1.0}}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cov_mpfbm(0.25, Vec{{1.0, 1.0}}, Vec{{1.0, 1.0}}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cov_mpfbm(0.5, Vec{{1.0, 1.0}}, Vec{{2.0, 2.0}}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(cov_mpfbm(0.6, Vec{{1.0}}, Vec{{1.0}}), ArgumentError);
  }

  TEST_CASE("H = 1/2 sheet and mpfbm both equal the product of minima") {
    Rng rng(3);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int d = 1; d <= 3; ++d) {
      const Kernel sheet = Kernel::sheet(std::vector<double>(static_cast<std::size_t>(d), 0.5));
      const Kernel mp = Kernel::mpfbm(0.5);
      for (int i = 0; i < 50; ++i) {
        Vec s(d), t(d);
        double prod = 1.0;
        for (int k = 0; k < d; ++k) {
          s[k] = u(rng);
          t[k] = u(rng);
          prod *= std::min(s[k], t[k]);
        }
        CHECK(std::abs(sheet(s, t) - prod) <= 1e-12);
        CHECK(std::abs(mp(s, t) - prod) <= 1e-12);
      }
    }
  }

  TEST_CASE("kernel families agree with their free functions") {
    const SpacePtr sp = make_grid_space(1, 8, 1.0);
    const Kernel k = Kernel::l2fbm(sp, 0.35);
    Vec f = Vec::LinSpaced(8, -1.0, 1.0), g = Vec::LinSpaced(8, 0.5, 2.0);
    CHECK(k(f, g) == cov_l2fbm(*sp, 0.35, L2Vec(sp, f), L2Vec(sp, g)));
    // l2fbm variogram is ||u||^{4H}.
    const double n2 = (f - g).cwiseProduct(f - g).dot(sp->weights());
    CHECK(k.variogram(f - g) == doctest::Approx(std::pow(n2, 2 * 0.35)).epsilon(1e-14));
    CHECK(Kernel::fbm1d(0.3)(Vec{{0.2}}, Vec{{0.9}}) == doctest::Approx(oracle::fbm_cov(0.3, 0.2, 0.9)).epsilon(1e-15));
    CHECK(family_from_string("levy") == Family::levy);
    CHECK_THROWS_AS(family_from_string("brownian"), ArgumentError);
    CHECK_THROWS_AS(Kernel::l2fbm(sp, 0.35)(Vec::Zero(3), Vec::Zero(3)), ArgumentError);
    CHECK_THROWS_AS(Kernel::custom_variogram(-1.0), ArgumentError);
  }

  TEST_CASE("gram basics") {
    const Gram one = gram(Kernel::fbm1d(0.3), std::vector<Vec>{Vec{{0.7}}});
    CHECK(one.matrix.rows() == 1);
    CHECK(one.min_eig == doctest::Approx(std::pow(0.7, 0.6)).epsilon(1e-14));

    // Orthogonal unit-norm indicators at H = 1/2: identity.
    const SpacePtr sp = make_grid_space(1, 4, 4.0);
    std::vector<Vec> design;
    for (int i = 0; i < 4; ++i) design.push_back(Vec(Vec::Unit(4, i)));
    const Gram g = gram(Kernel::l2fbm(sp, 0.5), design);
    CHECK((g.matrix - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK_THROWS_AS(gram(Kernel::fbm1d(0.3), std::vector<Vec>{}), ArgumentError);
  }

  TEST_CASE("gram min_eig matches the Jacobi oracle") {
    Rng rng(5);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    std::vector<Vec> design;
    for (int i = 0; i < 24; ++i) design.push_back(Vec{{u(rng), u(rng)}});
    for (const Kernel& k : {Kernel::levy(0.2), Kernel::mpfbm(0.4), Kernel::sheet({0.3, 0.8})}) {
      const Gram g = gram(k, design);
      CHECK(g.min_eig == doctest::Approx(oracle::jacobi_min_eig(g.matrix)).epsilon(1e-9).scale(g.trace()));
      CHECK(is_psd(g));
    }
  }

  TEST_CASE("custom variogram with exponent 2.5 is not PSD") {
    std::vector<Vec> design;
    for (int i = 0; i < 4; ++i) design.push_back(Vec::Constant(1, i));
    const Gram g = gram(Kernel::custom_variogram(2.5), design);
    const double oracle_min = oracle::jacobi_min_eig(g.matrix);
    CHECK(oracle_min < 0.0);
    CHECK(g.min_eig == doctest::Approx(oracle_min).epsilon(1e-12));
    CHECK_FALSE(is_psd(g));
  }

  TEST_CASE("serial and parallel grams are bit-identical") {
    Rng rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Vec> design;
    for (int i = 0; i < 70; ++i) design.push_back(Vec{{u(rng), u(rng), u(rng)}});
    const Kernel k = Kernel::levy(0.4);
    const Mat a = gram_matrix(k, design, Exec::serial);
    for (int threads : {1, 2, 4}) {
      set_worker_threads(threads);
      CHECK(gram_matrix(k, design, Exec::parallel) == a);
    }
    set_worker_threads(0);
  }
}
