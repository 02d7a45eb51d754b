#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "l2field/kernels.hpp"
#include "l2field/parallel.hpp"
#include "l2field/report.hpp"
#include "l2field/sampler.hpp"

namespace l2field {

/// Phi with C(a,b) = 1/2 (Phi(a) + Phi(b) - Phi(a - b)). `alpha` is the power
/// exponent when Phi(u) = ||u||^alpha, NaN otherwise.
struct Variogram {
  std::function<double(const Vec&)> phi;
  double alpha;
  std::string name;

  static Variogram power(double alpha);
  static Variogram zero();
  static Variogram from_kernel(const Kernel& k);

  double operator()(const Vec& u) const { return phi(u); }
};

inline constexpr std::size_t kMaxSchoenbergDesign = 128;

/// For each t builds exp(-t Phi(x_i - x_j)) and checks its smallest eigenvalue
/// against -1e-10 * n.
Report schoenberg_check(const Variogram& phi, std::span<const Vec> design,
                        std::span<const double> t_list);

// ---------------------------------------------------------------------------
// One-dimensional Levy-Khintchine: I(xi) = 2 int_R (1 - cos(xi x)) |x|^{-1-alpha} dx.

/// Adaptive Gauss-Kronrod in x, split at |x| = 1; the origin singularity is
/// removed by x = y^{1/(2-alpha)} and the oscillatory tail is integrated over
/// half-periods up to a cut-off, beyond which an integration-by-parts
/// expansion takes over. Throws NumericError on non-convergence.
double lk_integral(double alpha, double xi, double quad_tol = 1e-10);

/// Independent route: QUADPACK QAGS on [0, 1] and QAWF (Fourier tail) on [1, inf).
double lk_integral_reference(double alpha, double xi, double quad_tol = 1e-10);

/// 4 |xi|^alpha Gamma(1 - alpha) cos(pi alpha / 2) / alpha (2 pi |xi| at alpha = 1).
double lk_closed_form(double alpha, double xi);

/// Pass iff I(2 xi)/I(xi) = 2^alpha and I(xi)/|xi|^alpha is constant over
/// xi_list, both within 1e-6 relative. Dual-route and closed-form agreement
/// are reported in stats.
Report lk_scaling_check(double alpha, std::span<const double> xi_list, double quad_tol = 1e-10);

// ---------------------------------------------------------------------------
// Spectral synthesis of 1-D fBm.

/// Log-spaced positive frequency cells on [x_min, x_max] (mirrored to the
/// negative axis), each carrying the mass of |x|^{-1-alpha} dx over the cell.
struct FreqGrid {
  double x_min = 1e-4;
  double x_max = 1e4;
  std::size_t n = 4096;
  double alpha = 1.0;
  std::vector<double> nodes;   // geometric cell midpoints, positive side
  std::vector<double> masses;  // control-measure mass per positive cell

  static FreqGrid log_spaced(double x_min, double x_max, std::size_t n, double alpha);
};

/// Resolution guard: t_max * x_min <= 1e-2 and t_max * x_max >= 1e2.
inline constexpr double kResolutionLow = 1e-2;
inline constexpr double kResolutionHigh = 1e2;

/// B_t = c_H sum_{+-k} (e^{i t x_k} - 1) sqrt(m_k) Z_k with Hermitian complex
/// Gaussian weights Z_{-k} = conj(Z_k); c_H normalises the grid variance at
/// t = 1 to one. Path i draws from mix_seed(seed, i).
SamplePaths synth_fbm_spectral(double H, std::span<const double> tgrid, const FreqGrid& grid,
                               std::size_t n_paths, std::uint64_t seed,
                               Exec exec = Exec::parallel);

/// c_H^2 for the grid.
double spectral_norm_constant(const FreqGrid& grid);

/// Exact covariance of the discretised synthesis (what the sampler targets).
double spectral_grid_covariance(const FreqGrid& grid, double s, double t);

/// Target covariance 1/2 (s^{2H} + t^{2H} - |t - s|^{2H}) over the grid.
Gram fbm_target_gram(double H, std::span<const double> tgrid);

/// Empirical Var(B_t - B_s) for every pair of the tgrid against the grid-exact
/// lag variance, pass iff each lies within 3 stderr (stderr = v sqrt(2/n)).
Report spectral_increment_check(const SamplePaths& paths, std::span<const double> tgrid,
                                const FreqGrid& grid, double z_threshold = 3.0);

// ---------------------------------------------------------------------------
// Discrete symmetric random measures.

/// Cells [e_k, e_{k+1}) of the half-line with their control masses, mirrored
/// to (-e_{k+1}, -e_k]. Cell k < K is positive; cell K + k is the mirror of k.
struct Partition {
  std::vector<double> edges;
  std::vector<double> masses;

  std::size_t half_size() const noexcept { return masses.size(); }
  std::size_t size() const noexcept { return 2 * masses.size(); }
  std::size_t mirror(std::size_t cell) const noexcept {
    return cell < half_size() ? cell + half_size() : cell - half_size();
  }
  double mass(std::size_t cell) const { return masses[cell % half_size()]; }
  void validate() const;
};

/// Set of cells (indices into the mirrored partition).
using CellSet = std::vector<std::size_t>;

/// One realisation: M(cell k) = sqrt(m_k) Z_k with Z_k standard circular
/// complex Gaussian, M(-A) = conj(M(A)).
class DiscreteRandomMeasure {
 public:
  DiscreteRandomMeasure(const Partition& partition, std::uint64_t seed);

  std::complex<double> cell(std::size_t c) const { return values_[c]; }
  /// Sum over the cells of `set` in ascending order (finitely additive).
  std::complex<double> operator()(const CellSet& set) const;

 private:
  std::vector<std::complex<double>> values_;
};

/// Control measure m(A), and m(A n B) for cell sets.
double control_mass(const Partition& p, const CellSet& a);
double control_overlap(const Partition& p, const CellSet& a, const CellSet& b);

/// Statistical test of zero mean, exact finite additivity and
/// E(M(A) conj M(B)) = m(A n B) over n_reps independent realisations.
Report simulate_random_measure(const Partition& partition, std::size_t n_reps,
                               std::uint64_t seed, Exec exec = Exec::parallel);

}  // namespace l2field
