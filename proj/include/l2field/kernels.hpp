#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "l2field/measure_space.hpp"
#include "l2field/parallel.hpp"

namespace l2field {

enum class Family { fbm1d, levy, sheet, mpfbm, l2fbm, custom_variogram };

std::string to_string(Family f);
Family family_from_string(const std::string& name);

/// Covariance of the fBm family over index elements stored as vectors: points
/// of R^d for the point families, coefficient vectors over `space()` for l2fbm.
///
/// Parameter conventions: l2fbm and mpfbm use the exponent 2H on m(.^2) and on
/// Lebesgue measure respectively, so the l2fbm variogram is ||u||_m^{4H}.
class Kernel {
 public:
  static Kernel fbm1d(double H);
  static Kernel levy(double H);
  static Kernel sheet(std::vector<double> Hvec);
  static Kernel mpfbm(double H, bool experimental = false);
  static Kernel l2fbm(SpacePtr space, double H, bool experimental = false);
  /// Phi(u) = ||u||^alpha, covariance 1/2 (Phi(s) + Phi(t) - Phi(s - t)).
  static Kernel custom_variogram(double alpha);

  Family family() const noexcept { return family_; }
  double H() const noexcept { return H_; }
  const std::vector<double>& Hvec() const noexcept { return Hvec_; }
  const SpacePtr& space() const noexcept { return space_; }
  double alpha() const noexcept { return alpha_; }
  bool experimental() const noexcept { return experimental_; }

  /// Required element length, or 0 when any (uniform) dimension is accepted.
  Eigen::Index index_dim() const noexcept;
  /// Throws ArgumentError if `x` cannot index this kernel.
  void validate_element(const Vec& x) const;

  double operator()(const Vec& a, const Vec& b) const;

  /// Phi(u) for the families whose covariance is 1/2 (Phi(a)+Phi(b)-Phi(a-b))
  /// over a vector-space index (l2fbm, levy, fbm1d, custom_variogram).
  bool has_variogram() const noexcept;
  double variogram(const Vec& u) const;

  std::string describe() const;

 private:
  Kernel() = default;

  Family family_ = Family::fbm1d;
  double H_ = 0.0;
  std::vector<double> Hvec_;
  SpacePtr space_;
  double alpha_ = 0.0;
  bool experimental_ = false;
};

double cov_l2fbm(const MeasureSpace& space, double H, const L2Vec& f, const L2Vec& g,
                 bool experimental = false);
double cov_levy(double H, const Vec& s, const Vec& t);
double cov_fbm1d(double H, double s, double t);
double cov_sheet(const std::vector<double>& Hvec, const Vec& s, const Vec& t);
double cov_mpfbm(double H, const Vec& s, const Vec& t, bool experimental = false);

/// E((X_a - X_b)^2) = C(a,a) + C(b,b) - 2 C(a,b).
double increment_variance(const Kernel& k, const Vec& a, const Vec& b);

/// Closed-form increment variance of the family (||a-b||^{2H}, lambda(sym.diff)^{2H},
/// m((a-b)^2)^{2H}, ||a-b||^alpha). Empty for the sheet, whose increments are
/// rectangular rather than pointwise.
std::optional<double> family_increment_variance(const Kernel& k, const Vec& a, const Vec& b);

/// Symmetric covariance matrix over a finite design, with eigen diagnostics.
struct Gram {
  Mat matrix;
  Eigen::Index design_size = 0;
  double min_eig = 0.0;         // smallest eigenvalue of `matrix` (pre-jitter)
  double jitter_applied = 0.0;  // set by the sampler's factorization

  double trace() const { return matrix.trace(); }
};

/// Pairwise covariances; upper triangle evaluated once and mirrored.
Mat gram_matrix(const Kernel& k, std::span<const Vec> design, Exec exec = Exec::parallel);

Gram gram(const Kernel& k, std::span<const Vec> design, Exec exec = Exec::parallel);
Gram gram(const Kernel& k, std::span<const L2Vec> design, Exec exec = Exec::parallel);

/// Wraps an externally built symmetric matrix (checks symmetry, computes min_eig).
Gram make_gram(Mat matrix);

/// Smallest eigenvalue of a symmetric matrix (full symmetric eigensolver).
double symmetric_min_eig(const Mat& m);

/// PSD verdict used throughout: min_eig >= -1e-8 * trace.
inline constexpr double kPsdRelTol = 1e-8;
bool is_psd(const Gram& g);

}  // namespace l2field
