#include <algorithm>

#include "doctest.h"
#include "l2field/errors.hpp"
#include "l2field/measure_space.hpp"
#include "l2field/parallel.hpp"
#include "oracles.hpp"

using namespace l2field;

TEST_SUITE("measure_space") {
  TEST_CASE("grid space atoms and weights") {
    const SpacePtr s = make_grid_space(1, 4, 2.0);
    REQUIRE(s->size() == 4);
    const double centres[] = {0.25, 0.75, 1.25, 1.75};
    for (int i = 0; i < 4; ++i) {
      CHECK(s->atoms()(i, 0) == doctest::Approx(centres[i]).epsilon(1e-15));
      CHECK(s->weights()(i) == 0.5);
    }
    CHECK(s->total_mass() == doctest::Approx(2.0).epsilon(1e-15));

    const SpacePtr s2 = make_grid_space(2, 2, 1.0);
    CHECK(s2->size() == 4);
    CHECK(s2->dim() == 2);
    for (int i = 0; i < 4; ++i) CHECK(s2->weights()(i) == 0.25);
    CHECK(s2->total_mass() == doctest::Approx(1.0).epsilon(1e-15));
    // First axis varies slowest.
    CHECK(s2->atoms()(0, 0) == 0.25);
    CHECK(s2->atoms()(1, 0) == 0.25);
    CHECK(s2->atoms()(1, 1) == 0.75);
  }

  TEST_CASE("grid space argument and budget errors") {
    CHECK_THROWS_AS(make_grid_space(1, 1000000000LL, 1.0), ResourceError);
    CHECK_THROWS_AS(make_grid_space(3, 1024, 1.0), ResourceError);
    CHECK_THROWS_AS(make_grid_space(0, 4, 1.0), ArgumentError);
    CHECK_THROWS_AS(make_grid_space(1, 0, 1.0), ArgumentError);
    CHECK_THROWS_AS(make_grid_space(1, 4, -1.0), ArgumentError);
    CHECK_THROWS_AS(make_grid_space(2, 8, 1.0, 63), ResourceError);
  }

  TEST_CASE("explicit spaces validate weights") {
    Mat atoms(2, 1);
    atoms << 0.0, 1.0;
    CHECK_THROWS_AS(MeasureSpace(atoms, Vec{{1.0, 0.0}}), ArgumentError);
    CHECK_THROWS_AS(MeasureSpace(atoms, Vec{{1.0}}), ArgumentError);
    CHECK_NOTHROW(MeasureSpace(atoms, Vec{{1.0, 3.0}}));
  }

  TEST_CASE("l2_dot") {
    const SpacePtr s = make_grid_space(1, 4, 2.0);
    const L2Vec ones(s, Vec::Ones(4));
    CHECK(l2_dot(*s, ones, ones) == doctest::Approx(2.0).epsilon(1e-15));
    const L2Vec a(s, Vec{{1.0, 1.0, 0.0, 0.0}});
    const L2Vec b(s, Vec{{0.0, 0.0, 3.0, -1.0}});
    CHECK(l2_dot(a, b) == 0.0);
    CHECK(l2_dot(a, a) == 1.0);

    const SpacePtr other = make_grid_space(1, 4, 2.0);
    CHECK_THROWS_AS(l2_dot(*s, a, L2Vec(other, Vec::Ones(4))), ArgumentError);
    CHECK_THROWS_AS(L2Vec(s, Vec::Ones(3)), ArgumentError);
  }

  TEST_CASE("l2 vector arithmetic stays bound to its space") {
    const SpacePtr s = make_grid_space(1, 3, 1.0);
    const L2Vec f(s, Vec{{1.0, 2.0, 3.0}});
    const L2Vec g(s, Vec{{0.5, 0.5, 0.5}});
    CHECK((f + g).coeffs()(2) == 3.5);
    CHECK((f - g).coeffs()(0) == 0.5);
    CHECK((f * 2.0).coeffs()(1) == 4.0);
    CHECK_THROWS_AS(f + L2Vec(make_grid_space(1, 3, 1.0), Vec::Zero(3)), ArgumentError);
  }

  TEST_CASE("indicator_rect") {
    const SpacePtr s = make_grid_space(1, 4, 2.0);
    CHECK(indicator_rect(s, Rect(Vec{{0.0}})).coeffs().isZero());
    CHECK(indicator_rect(s, Rect(Vec{{2.0}})).coeffs() == Vec::Ones(4));
    CHECK(indicator_rect(s, Rect(Vec{{1.0}})).coeffs() == Vec{{1.0, 1.0, 0.0, 0.0}});
    CHECK_THROWS_AS(indicator_rect(s, Rect(Vec{{1.0, 1.0}})), ArgumentError);

    const SpacePtr s2 = make_grid_space(2, 4, 2.0);
    const Vec c = indicator_rect(s2, Rect(Vec{{1.0, 2.0}})).coeffs();
    CHECK(c.sum() == 8.0);
  }

  TEST_CASE("rect_measures") {
    const auto same = rect_measures(Rect(Vec{{1.5, 0.5}}), Rect(Vec{{1.5, 0.5}}));
    CHECK(same.lam_symdiff == 0.0);
    const auto m = rect_measures(Rect(Vec{{1.0, 2.0}}), Rect(Vec{{2.0, 1.0}}));
    CHECK(m.lam_s == 2.0);
    CHECK(m.lam_t == 2.0);
    CHECK(m.lam_inter == 1.0);
    CHECK(m.lam_symdiff == 2.0);
    CHECK(rect_measures(Rect(Vec{{1.0, 1.0}}), Rect(Vec{{2.0, 2.0}})).lam_tminus_s == 3.0);
    CHECK_THROWS_AS(rect_measures(Rect(Vec{{1.0}}), Rect(Vec{{1.0, 1.0}})), ArgumentError);
  }

  TEST_CASE("rect calculus against a counting oracle") {
    const Vec a{{0.7, 1.3}}, b{{1.1, 0.4}};
    const double counted = oracle::grid_symdiff_2d(a, b, 2.0, 2000);
    CHECK(rect_measures(Rect(a), Rect(b)).lam_symdiff == doctest::Approx(counted).epsilon(1e-3));
  }

  TEST_CASE("grid indicators converge to the Lebesgue overlap") {
    const SpacePtr s = make_grid_space(2, 256, 2.0);
    Rng rng(17);
    std::uniform_real_distribution<double> u(0.25, 2.0);
    const double h = 2.0 / 256;
    std::vector<double> rel;
    for (int i = 0; i < 100; ++i) {
      const Rect p(Vec{{u(rng), u(rng)}}), q(Vec{{u(rng), u(rng)}});
      const double dot = l2_dot(indicator_rect(s, p), indicator_rect(s, q));
      const double exact = rect_measures(p, q).lam_inter;
      // Each side of the counted box is off by at most half a cell.
      const Vec m = rect_meet(p.corner, q.corner);
      const double bound = (m[0] + h / 2) * (m[1] + h / 2) - m[0] * m[1];
      CHECK(std::abs(dot - exact) <= bound * (1 + 1e-12));
      rel.push_back(std::abs(dot - exact) / exact);
    }
    std::sort(rel.begin(), rel.end());
    CHECK(rel[50] <= 0.02);
  }
}
