#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "l2field/kernels.hpp"
#include "l2field/report.hpp"
#include "l2field/stationarity.hpp"

namespace l2field {

/// H(C) restricted to span{C(t_n, .)} over a finite design.
struct RkhsModel {
  std::vector<Vec> design;
  Mat gramC;
  Mat pseudo_inverse;
  Eigen::Index rank = 0;
  CovarianceFn cov;  // optional; lets rkhs_check evaluate f(t) from the kernel

  static RkhsModel build(const Kernel& k, std::span<const Vec> design);
  /// From a precomputed Gram (design may be empty placeholders).
  static RkhsModel from_gram(Mat gramC, std::vector<Vec> design = {}, CovarianceFn cov = {});
};

/// Relative eigenvalue cut for the pseudo-inverse.
inline constexpr double kRankTol = 1e-12;

/// Minimal-norm pseudo-inverse of a symmetric PSD matrix (eigenvalues below
/// kRankTol * largest are dropped). Returns the rank through `rank`.
Mat psd_pseudo_inverse(const Mat& c, Eigen::Index* rank = nullptr);

/// For f = sum_n alpha_n C(t_n, .): (f, C(t_k, .))_H = (C alpha)_k against
/// f(t_k) evaluated pointwise, and ||f||_H^2 = alpha^T C alpha >= 0.
Report rkhs_check(const RkhsModel& model, const Vec& coeffs, double tol = 1e-12);

/// alpha = C^+ y. Throws ArgumentError("not representable on this design")
/// when ||C alpha - y||_inf > 1e-8 max(1, ||y||_inf).
Vec linear_extend(const RkhsModel& model, const Vec& target_values);

/// Formal integer combination of named elements; equality is exact.
class LinearForm {
 public:
  LinearForm() = default;
  static LinearForm symbol(std::size_t id);

  LinearForm operator+(const LinearForm& o) const;
  LinearForm operator-(const LinearForm& o) const;
  bool operator==(const LinearForm& o) const { return terms_ == o.terms_; }

  /// sum_k mult_k basis[k], accumulated in symbol order.
  Vec evaluate(std::span<const Vec> basis) const;
  const std::map<std::size_t, long long>& terms() const noexcept { return terms_; }

 private:
  std::map<std::size_t, long long> terms_;
};

/// Increment stationarity of the linear process X(f) = sum alpha_f,n X_t_n:
/// for every pair (f, g) and shift h among `elements`, the coefficient vectors
/// of X(f+h) - X(g+h) and X(f) - X(g) must coincide. Tolerance is zero.
Report linear_si2_check(std::span<const Vec> elements,
                        std::span<const std::pair<std::size_t, std::size_t>> pairs,
                        std::span<const std::size_t> shifts);

enum class CharMode { p31, p32 };
std::string to_string(CharMode m);

struct CharacterizeResult {
  bool accept = false;
  double fitted_order = 0.0;   // h with Phi = sigma^2 ||f||^{2h} (SS1 order)
  double norm_exponent = 0.0;  // 2h
  double kernel_H = 0.0;       // norm_exponent / 4
  double ss2_order = 0.0;      // kernel_H
  double sigma2 = 0.0;
  Report report;
};

using PhiSample = std::pair<Vec, double>;
using CovSample = std::tuple<Vec, Vec, double>;

/// (a) OLS fit of log Phi on log ||f|| (reject if the max log residual exceeds
/// 1e-8); (b) C(a,b) = 1/2 (Phi(a) + Phi(b) - Phi(a-b)) with the fitted Phi on
/// every cov sample, 1e-8 relative. The norm is weighted by `weights` (empty:
/// Euclidean).
CharacterizeResult characterize_fractional(std::span<const PhiSample> phi_samples,
                                           std::span<const CovSample> cov_samples,
                                           const Vec& weights, CharMode mode);

}  // namespace l2field
