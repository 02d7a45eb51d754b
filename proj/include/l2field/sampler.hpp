#pragma once

#include <cstdint>
#include <optional>

#include "l2field/kernels.hpp"
#include "l2field/parallel.hpp"
#include "l2field/report.hpp"

namespace l2field {

struct CholeskyFactor {
  Mat lower;
  double jitter_applied = 0.0;  // absolute amount added to the diagonal
};

/// Relative jitter ladder; rung k adds ladder[k] * trace / n to the diagonal.
inline constexpr double kJitterLadder[] = {1e-12, 1e-11, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6};

/// Lower Cholesky factor of a symmetric PSD matrix, or nullopt if a pivot is
/// negative (or zero with a nonzero remaining column).
std::optional<Mat> cholesky_psd(const Mat& a);

/// Factorizes g, climbing the jitter ladder on failure. Throws NumericError
/// (carrying g.min_eig) when even the top rung fails.
CholeskyFactor cholesky_factor(const Gram& g);

struct SamplePaths {
  Mat values;  // n_paths x design_size
  std::uint64_t seed = 0;
  Eigen::Index design_size = 0;

  Eigen::Index n_paths() const noexcept { return values.rows(); }
};

/// Path i is lower * z_i with z_i drawn from an Rng seeded by mix_seed(seed, i).
SamplePaths sample_paths(const Mat& lower, std::size_t n_paths, std::uint64_t seed,
                         Exec exec = Exec::parallel);
SamplePaths sample_paths(const CholeskyFactor& factor, std::size_t n_paths, std::uint64_t seed,
                         Exec exec = Exec::parallel);

inline constexpr std::size_t kMinComparePaths = 100;

/// Uncentred empirical covariance (1/n) sum x_j x_k against the exact Gram.
/// Entry (j,k) passes iff |C_hat - C| <= z_threshold * stderr_jk with
/// stderr_jk^2 = (C_jj C_kk + C_jk^2) / n; the report passes iff all entries do.
Report empirical_cov_compare(const SamplePaths& samples, const Gram& exact,
                             double z_threshold = 3.0);

/// Per-coordinate empirical mean against 0 with stderr sqrt(C_jj / n).
Report empirical_mean_compare(const SamplePaths& samples, const Gram& exact,
                              double z_threshold = 3.0);

/// (1/n) X^T X.
Mat empirical_covariance(const Mat& values);

}  // namespace l2field
