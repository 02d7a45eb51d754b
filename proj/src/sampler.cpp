#include "l2field/sampler.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "l2field/errors.hpp"

namespace l2field {

std::optional<Mat> cholesky_psd(const Mat& a) {
  const Eigen::Index n = a.rows();
  Mat l = Mat::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = a(j, j);
    for (Eigen::Index k = 0; k < j; ++k) pivot -= l(j, k) * l(j, k);
    if (pivot > 0.0) {
      const double d = std::sqrt(pivot);
      l(j, j) = d;
      for (Eigen::Index i = j + 1; i < n; ++i) {
        double v = a(i, j);
        for (Eigen::Index k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
        l(i, j) = v / d;
      }
      continue;
    }
    if (pivot < 0.0 || !std::isfinite(pivot)) return std::nullopt;
    // Zero pivot: acceptable only if the rest of the column vanishes too.
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double v = a(i, j);
      for (Eigen::Index k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
      if (v != 0.0) return std::nullopt;
    }
  }
  return l;
}

CholeskyFactor cholesky_factor(const Gram& g) {
  const Mat& a = g.matrix;
  if (a.rows() != a.cols() || a.rows() == 0) throw ArgumentError("cholesky: matrix must be square");
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-14 * std::max(1.0, a.cwiseAbs().maxCoeff()))
    throw ArgumentError("cholesky: matrix is not symmetric");
  if (auto l = cholesky_psd(a)) return {std::move(*l), 0.0};

  const double scale = a.trace() / static_cast<double>(a.rows());
  if (scale > 0.0) {
    for (double eps : kJitterLadder) {
      const double jitter = eps * scale;
      Mat shifted = a;
      shifted.diagonal().array() += jitter;
      if (auto l = cholesky_psd(shifted)) return {std::move(*l), jitter};
    }
  }
  const double min_eig = std::isnan(g.min_eig) ? symmetric_min_eig(a) : g.min_eig;
  throw NumericError("cholesky: matrix is indefinite beyond the jitter ladder (min_eig = " +
                         std::to_string(min_eig) + ")",
                     min_eig);
}

SamplePaths sample_paths(const Mat& lower, std::size_t n_paths, std::uint64_t seed, Exec exec) {
  if (n_paths < 1) throw ArgumentError("sample_paths: n_paths must be >= 1");
  if (lower.rows() != lower.cols()) throw ArgumentError("sample_paths: factor must be square");
  const Eigen::Index n = lower.rows();
  SamplePaths out;
  out.values.resize(static_cast<Eigen::Index>(n_paths), n);
  out.seed = seed;
  out.design_size = n;

  auto draw = [&](Eigen::Index p) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(p)));
    std::normal_distribution<double> nd;
    Vec z(n);
    for (Eigen::Index j = 0; j < n; ++j) z[j] = nd(rng);
    for (Eigen::Index i = 0; i < n; ++i) {
      double acc = 0.0;
      for (Eigen::Index j = 0; j <= i; ++j) acc += lower(i, j) * z[j];
      out.values(p, i) = acc;
    }
  };
  const auto rows = static_cast<Eigen::Index>(n_paths);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (Eigen::Index p = 0; p < rows; ++p) draw(p);
  } else {
    for (Eigen::Index p = 0; p < rows; ++p) draw(p);
  }
  return out;
}

SamplePaths sample_paths(const CholeskyFactor& factor, std::size_t n_paths, std::uint64_t seed,
                         Exec exec) {
  return sample_paths(factor.lower, n_paths, seed, exec);
}

Mat empirical_covariance(const Mat& values) {
  const Eigen::Index n = values.rows();
  const Eigen::Index k = values.cols();
  Mat c = Mat::Zero(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = a; b < k; ++b) {
      double acc = 0.0;
      for (Eigen::Index p = 0; p < n; ++p) acc += values(p, a) * values(p, b);
      c(a, b) = acc / static_cast<double>(n);
      c(b, a) = c(a, b);
    }
  }
  return c;
}

namespace {

void check_compare_inputs(const SamplePaths& samples, const Gram& exact) {
  if (samples.values.cols() != exact.matrix.rows())
    throw ArgumentError("compare: samples have " + std::to_string(samples.values.cols()) +
                        " coordinates, Gram has " + std::to_string(exact.matrix.rows()));
  if (static_cast<std::size_t>(samples.n_paths()) < kMinComparePaths)
    throw ArgumentError("compare: needs at least " + std::to_string(kMinComparePaths) +
                        " paths, got " + std::to_string(samples.n_paths()));
}

double zscore(double diff, double se) {
  if (se > 0.0) return diff / se;
  return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace

Report empirical_cov_compare(const SamplePaths& samples, const Gram& exact, double z_threshold) {
  check_compare_inputs(samples, exact);
  const Mat& c = exact.matrix;
  const Mat chat = empirical_covariance(samples.values);
  const double n = static_cast<double>(samples.n_paths());

  Report r;
  r.check = "empirical_cov_compare";
  r.mode = "gaussian-fourth-moment";
  r.tolerance = z_threshold;
  r.seed = samples.seed;
  double max_z = 0.0;
  std::size_t failing = 0;
  std::size_t entries = 0;
  for (Eigen::Index j = 0; j < c.rows(); ++j) {
    for (Eigen::Index k = j; k < c.cols(); ++k) {
      ++entries;
      const double diff = chat(j, k) - c(j, k);
      const double se = std::sqrt((c(j, j) * c(k, k) + c(j, k) * c(j, k)) / n);
      const double z = zscore(diff, se);
      r.max_abs_diff = std::max(r.max_abs_diff, std::abs(diff));
      max_z = std::max(max_z, std::abs(z));
      if (!(std::abs(z) <= z_threshold)) {
        ++failing;
        if (r.details.size() < 32)
          r.details.push_back({{"j", j}, {"k", k}, {"empirical", chat(j, k)}, {"exact", c(j, k)},
                               {"z", number(z)}});
      }
    }
  }
  r.stats = {{"max_abs_z", number(max_z)}, {"n_paths", samples.n_paths()},
             {"entries", entries}, {"failing_entries", failing}};
  r.set_pass(failing == 0);
  return r;
}

Report empirical_mean_compare(const SamplePaths& samples, const Gram& exact, double z_threshold) {
  check_compare_inputs(samples, exact);
  const double n = static_cast<double>(samples.n_paths());
  const Vec mean = samples.values.colwise().mean().transpose();
  Report r;
  r.check = "empirical_mean_compare";
  r.mode = "centred";
  r.tolerance = z_threshold;
  r.seed = samples.seed;
  double max_z = 0.0;
  for (Eigen::Index j = 0; j < mean.size(); ++j) {
    const double z = zscore(mean[j], std::sqrt(exact.matrix(j, j) / n));
    r.max_abs_diff = std::max(r.max_abs_diff, std::abs(mean[j]));
    max_z = std::max(max_z, std::abs(z));
  }
  r.stats = {{"max_abs_z", number(max_z)}, {"n_paths", samples.n_paths()}};
  r.set_pass(max_z <= z_threshold);
  return r;
}

}  // namespace l2field
