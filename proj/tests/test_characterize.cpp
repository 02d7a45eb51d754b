#include <cmath>
#include <random>

#include "doctest.h"
#include "l2field/characterize.hpp"
#include "l2field/errors.hpp"

using namespace l2field;

namespace {

std::vector<Vec> fbm_design() {
  std::vector<Vec> d;
  for (int i = 1; i <= 8; ++i) d.push_back(Vec::Constant(1, i / 8.0));
  return d;
}

struct Samples {
  std::vector<PhiSample> phi;
  std::vector<CovSample> cov;
};

// Samples of an l2fbm kernel with parameter H over a weighted space.
Samples l2fbm_samples(const Kernel& k, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> nd;
  const Eigen::Index n = k.space()->size();
  std::vector<Vec> elems;
  for (int i = 0; i < 8; ++i) {
    Vec v(n);
    for (auto& x : v) x = nd(rng) * (1.0 + i);
    elems.push_back(v);
  }
  Samples s;
  for (const Vec& v : elems) s.phi.push_back({v, k.variogram(v)});
  for (std::size_t i = 0; i + 1 < elems.size(); ++i) s.cov.push_back({elems[i], elems[i + 1], k(elems[i], elems[i + 1])});
  return s;
}

}  // namespace

TEST_SUITE("characterize") {
  TEST_CASE("rkhs basis element and zero") {
    const RkhsModel m = RkhsModel::build(Kernel::fbm1d(0.3), fbm_design());
    CHECK(m.rank == 8);
    const Report e1 = rkhs_check(m, Vec::Unit(8, 0));
    CHECK(e1.pass);
    CHECK(e1.max_abs_diff == 0.0);
    const Report z = rkhs_check(m, Vec::Zero(8));
    CHECK(z.pass);
    CHECK(z.stats["norm_squared"].get<double>() == 0.0);
  }

  TEST_CASE("rkhs random coefficients") {
    const RkhsModel m = RkhsModel::build(Kernel::fbm1d(0.3), fbm_design());
    Rng rng(3);
    std::normal_distribution<double> nd;
    for (int rep = 0; rep < 5; ++rep) {
      Vec a(8);
      for (auto& x : a) x = nd(rng);
      const Report r = rkhs_check(m, a);
      CHECK(r.pass);
      CHECK(r.max_abs_diff <= 1e-12);
      CHECK(r.stats["norm_squared"].get<double>() >= 0.0);
      // Norm against an independent evaluation through the kernel.
      double nsq = 0.0;
      for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) nsq += a[i] * a[j] * Kernel::fbm1d(0.3)(fbm_design()[i], fbm_design()[j]);
      CHECK(r.stats["norm_squared"].get<double>() == doctest::Approx(nsq).epsilon(1e-12));
    }
  }

  TEST_CASE("pseudo-inverse satisfies the Penrose identities") {
    Mat v(4, 2);
    v << 1, 0, 2, 1, -1, 3, 0.5, 0.5;
    const Mat c = v * v.transpose();
    Eigen::Index rank = 0;
    const Mat p = psd_pseudo_inverse(c, &rank);
    CHECK(rank == 2);
    CHECK((c * p * c - c).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((p * c * p - p).cwiseAbs().maxCoeff() <= 1e-12);
  }

  TEST_CASE("linear extension") {
    const RkhsModel m = RkhsModel::build(Kernel::fbm1d(0.3), fbm_design());
    for (int k = 0; k < 8; ++k) {
      const Vec a = linear_extend(m, m.gramC.col(k));
      CHECK((a - Vec::Unit(8, k)).cwiseAbs().maxCoeff() <= 1e-8);
    }
    Mat v(3, 1);
    v << 1.0, 2.0, 3.0;
    const RkhsModel r1 = RkhsModel::from_gram(v * v.transpose());
    CHECK(r1.rank == 1);
    CHECK_NOTHROW(linear_extend(r1, 7.0 * v.col(0)));
    CHECK_THROWS_WITH_AS(linear_extend(r1, Vec{{1.0, 0.0, 0.0}}), doctest::Contains("not representable"), ArgumentError);
    CHECK_THROWS_AS(RkhsModel::from_gram(-Mat::Identity(2, 2)), ArgumentError);
  }

  TEST_CASE("linear forms and SI2 of the extended process") {
    const LinearForm a = LinearForm::symbol(0), b = LinearForm::symbol(1);
    CHECK((a + b - a) == b);
    CHECK_FALSE((a + a) == a);
    const std::vector<Vec> basis{Vec{{1.0, 0.0}}, Vec{{0.0, 2.0}}};
    CHECK((a + a - b).evaluate(basis) == Vec{{2.0, -2.0}});

    const RkhsModel m = RkhsModel::build(Kernel::fbm1d(0.3), fbm_design());
    std::vector<Vec> elems;
    for (int k = 0; k < 4; ++k) elems.push_back(linear_extend(m, m.gramC.col(k) + 0.5 * m.gramC.col(7 - k)));
    const std::vector<std::pair<std::size_t, std::size_t>> pairs{{0, 1}, {2, 3}, {1, 3}};
    const std::vector<std::size_t> shifts{0, 2};
    const Report r = linear_si2_check(elems, pairs, shifts);
    CHECK(r.pass);
    CHECK(r.max_abs_diff == 0.0);
  }

  TEST_CASE("characterization round trip") {
    const SpacePtr sp = make_grid_space(1, 6, 1.5);
    for (double H : {0.05, 0.2, 0.35, 0.5}) {
      const Kernel k = Kernel::l2fbm(sp, H);
      const Samples s = l2fbm_samples(k, 77);
      for (CharMode mode : {CharMode::p31, CharMode::p32}) {
        const CharacterizeResult c = characterize_fractional(s.phi, s.cov, sp->weights(), mode);
        CAPTURE(H);
        CHECK(c.accept);
        CHECK(std::abs(c.kernel_H - H) <= 1e-10);
        CHECK(std::abs(c.norm_exponent - 4 * H) <= 1e-10);
        CHECK(std::abs(c.ss2_order - H) <= 1e-10);
        CHECK(c.report.verdict == "accept");
      }
    }
  }

  TEST_CASE("characterization counterexamples") {
    const SpacePtr sp = make_grid_space(1, 6, 1.5);
    const Kernel k = Kernel::l2fbm(sp, 0.3);
    Samples s = l2fbm_samples(k, 5);

    // Phi(f) = ||f||^2 + ||f||: log-log residual far above 1e-8.
    std::vector<PhiSample> bad = s.phi;
    for (auto& [f, v] : bad) {
      const double nrm = std::sqrt(f.cwiseProduct(f).dot(sp->weights()));
      v = nrm * nrm + nrm;
    }
    const CharacterizeResult r1 = characterize_fractional(bad, s.cov, sp->weights(), CharMode::p31);
    CHECK_FALSE(r1.accept);
    CHECK(r1.report.verdict == "reject");

    std::get<2>(s.cov[2]) += 0.01;
    const CharacterizeResult r2 = characterize_fractional(s.phi, s.cov, sp->weights(), CharMode::p32);
    CHECK_FALSE(r2.accept);

    CHECK_THROWS_AS(characterize_fractional(std::vector<PhiSample>(s.phi.begin(), s.phi.begin() + 2), s.cov,
                                            sp->weights(), CharMode::p31),
                    ArgumentError);
  }
}
