#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "l2field/measure_space.hpp"
#include "l2field/parallel.hpp"

namespace l2field {

struct McConfig {
  std::size_t n_samples = 100000;
  std::uint64_t seed = 0;
  /// Scale of the heavy-tailed proposal; defaults to ||t - s|| + 1.
  std::optional<double> proposal_scale;
};

/// Monte-Carlo estimate. `std_error` is the standard error of `value`.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
};

/// Minimum sample count accepted by the estimators.
inline constexpr std::size_t kMinMcSamples = 1000;

/// Measure of the hyperplanes separating s and t, normalised so that it
/// equals ||t - s||. Hyperplanes are (u, p) in S^{d-1} x R; those separating s
/// and t have p-measure |<u, t - s>|, averaged over uniform u and scaled by
/// c_d = 1 / E|u_1|. d = 1 and t = s are closed form.
Estimate chentsov_symdiff_measure(int d, const Vec& t, const Vec& s, const McConfig& cfg,
                                  Exec exec = Exec::parallel);

/// c_d = 1 / E|u_1| for u uniform on S^{d-1}.
double chentsov_constant(int d);

/// Unnormalised mass of S_t symdiff S_s under r^{2H-d-1} dx dr, where
/// S_t = {(x, r) : ||x - t|| <= r}. The r-integral is closed form; the
/// x-integral is importance sampled from a defensive mixture centred at the
/// midpoint, t and s (see takenaka_proposal_density).
Estimate takenaka_symdiff_measure(int d, double H, const Vec& t, const Vec& s,
                                  const McConfig& cfg, Exec exec = Exec::parallel);

/// r-section mass of the symmetric difference at x: (r_min^{2H-d} - r_max^{2H-d}) / (d - 2H).
double takenaka_section_mass(int d, double H, const Vec& x, const Vec& t, const Vec& s);

/// Proposal density at x for the Takenaka importance sampler.
double takenaka_proposal_density(int d, double H, const Vec& x, const Vec& t, const Vec& s,
                                 double scale);

struct PowerFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double max_residual = 0.0;
};

/// OLS of log(value) on log(distance).
PowerFit exponent_fit(std::span<const std::pair<double, Estimate>> pairs);
PowerFit exponent_fit(std::span<const double> x, std::span<const double> y);

/// Uniform direction on S^{d-1}.
Vec random_direction(int d, Rng& rng);

/// Surface area of S^{d-1}.
double sphere_area(int d);

}  // namespace l2field
