#include "doctest.h"
#include "l2field/errors.hpp"
#include "l2field/sampler.hpp"
#include "oracles.hpp"

using namespace l2field;

namespace {

std::vector<Vec> line_design(int n) {
  std::vector<Vec> d;
  for (int i = 1; i <= n; ++i) d.push_back(Vec::Constant(1, static_cast<double>(i) / n));
  return d;
}

}  // namespace

TEST_SUITE("sampler") {
  TEST_CASE("cholesky of identity and zero") {
    const CholeskyFactor id = cholesky_factor(make_gram(Mat::Identity(3, 3)));
    CHECK(id.lower == Mat::Identity(3, 3));
    CHECK(id.jitter_applied == 0.0);
    const CholeskyFactor z = cholesky_factor(make_gram(Mat::Zero(3, 3)));
    CHECK(z.lower.isZero());
    const SamplePaths p = sample_paths(z, 10, 1);
    CHECK(p.values.isZero());
  }

  TEST_CASE("cholesky reproduces the matrix") {
    const Gram g = gram(Kernel::fbm1d(0.3), line_design(12));
    const CholeskyFactor f = cholesky_factor(g);
    CHECK(f.jitter_applied == 0.0);
    CHECK((f.lower * f.lower.transpose() - g.matrix).cwiseAbs().maxCoeff() <= 1e-13);
  }

  TEST_CASE("rank-deficient PSD matrices factor without failure") {
    Mat v(4, 1);
    v << 1.0, 2.0, -1.0, 0.5;
    const Gram g = make_gram(v * v.transpose());
    const CholeskyFactor f = cholesky_factor(g);
    CHECK((f.lower * f.lower.transpose() - g.matrix).cwiseAbs().maxCoeff() <= 1e-6 * g.trace());
  }

  TEST_CASE("indefinite exponent-2.5 Gram raises a numeric error with min_eig") {
    std::vector<Vec> design;
    for (int i = 0; i < 4; ++i) design.push_back(Vec::Constant(1, i));
    const Gram g = gram(Kernel::custom_variogram(2.5), design);
    const double oracle_min = oracle::jacobi_min_eig(g.matrix);
    REQUIRE(oracle_min < -1e-6 * g.trace());
    try {
      (void)cholesky_factor(g);
      FAIL("expected NumericError");
    } catch (const NumericError& e) {
      CHECK(e.min_eig() == doctest::Approx(oracle_min).epsilon(1e-10));
    }
  }

  TEST_CASE("identity sampling moments") {
    const std::size_t n = 100000;
    const SamplePaths p = sample_paths(Mat(Mat::Identity(2, 2)), n, 42);
    const double sn = std::sqrt(static_cast<double>(n));
    for (int j = 0; j < 2; ++j) {
      const double mean = p.values.col(j).mean();
      const double var = p.values.col(j).squaredNorm() / static_cast<double>(n);
      CHECK(std::abs(mean) <= 3.0 / sn);
      CHECK(std::abs(var - 1.0) <= 3.0 * std::sqrt(2.0) / sn);
    }
    CHECK(p.seed == 42);
  }

  TEST_CASE("paths are bit-identical across thread counts") {
    const CholeskyFactor f = cholesky_factor(gram(Kernel::fbm1d(0.4), line_design(16)));
    const Mat ref = sample_paths(f, 3000, 99, Exec::serial).values;
    for (int threads : {1, 2, 4, 8}) {
      set_worker_threads(threads);
      CHECK(sample_paths(f, 3000, 99).values == ref);
    }
    set_worker_threads(0);
    // Path i depends only on (seed, i): a prefix run gives the same rows.
    CHECK(sample_paths(f, 10, 99).values == ref.topRows(10));
  }

  TEST_CASE("empirical comparison on correct samples") {
    const Gram g = gram(Kernel::fbm1d(0.3), line_design(8));
    const CholeskyFactor f = cholesky_factor(g);
    int passes = 0;
    for (std::uint64_t s = 0; s < 20; ++s)
      passes += empirical_cov_compare(sample_paths(f, 4096, 1000 + s), g).pass ? 1 : 0;
    // 36 entries per test at 3 sigma; each run passes with probability ~0.9.
    CHECK(passes >= 14);
    CHECK(empirical_mean_compare(sample_paths(f, 4096, 7), g).stats["max_abs_z"].get<double>() < 5.0);
  }

  TEST_CASE("misspecified covariance gives z near sqrt(n/2)") {
    const std::size_t n = 4096;
    const SamplePaths p = sample_paths(Mat(std::sqrt(2.0) * Mat::Identity(2, 2)), n, 11);
    const Report r = empirical_cov_compare(p, make_gram(Mat::Identity(2, 2)));
    CHECK_FALSE(r.pass);
    // Diagonal z = (chat - 1) / sqrt(2/n) with chat ~ 2 (sd 2 sqrt(2/n)).
    const double expected = std::sqrt(n / 2.0);
    CHECK(std::abs(r.stats["max_abs_z"].get<double>() - expected) <= 0.15 * expected);
  }

  TEST_CASE("comparison preconditions") {
    const SamplePaths p = sample_paths(Mat(Mat::Identity(2, 2)), 50, 1);
    CHECK_THROWS_AS(empirical_cov_compare(p, make_gram(Mat::Identity(2, 2))), ArgumentError);
    const SamplePaths q = sample_paths(Mat(Mat::Identity(2, 2)), 200, 1);
    CHECK_THROWS_AS(empirical_cov_compare(q, make_gram(Mat::Identity(3, 3))), ArgumentError);
  }
}
