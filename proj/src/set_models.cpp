#include "l2field/set_models.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "l2field/errors.hpp"

namespace l2field {

namespace {

void validate_cfg(const McConfig& cfg) {
  if (cfg.n_samples < kMinMcSamples)
    throw ArgumentError("Monte-Carlo estimate needs at least " + std::to_string(kMinMcSamples) +
                        " samples, got " + std::to_string(cfg.n_samples));
  if (cfg.proposal_scale && !(*cfg.proposal_scale > 0.0 && std::isfinite(*cfg.proposal_scale)))
    throw ArgumentError("proposal_scale must be a positive real");
}

void validate_points(int d, const Vec& t, const Vec& s) {
  if (d < 1) throw ArgumentError("dimension must be >= 1");
  if (t.size() != d || s.size() != d)
    throw ArgumentError("points must have dimension " + std::to_string(d));
  if (!t.allFinite() || !s.allFinite()) throw ArgumentError("points must be finite");
}

Estimate exact(double value, const McConfig& cfg) { return {value, 0.0, cfg.n_samples, cfg.seed}; }

// Uniform on (0, 1].
double open_uniform(Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return 1.0 - u(rng);
}

}  // namespace

double sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

double chentsov_constant(int d) {
  if (d < 1) throw ArgumentError("dimension must be >= 1");
  return std::sqrt(std::numbers::pi) * std::exp(std::lgamma(0.5 * (d + 1)) - std::lgamma(0.5 * d));
}

Vec random_direction(int d, Rng& rng) {
  std::normal_distribution<double> nd;
  Vec u(d);
  double norm = 0.0;
  do {
    for (int k = 0; k < d; ++k) u[k] = nd(rng);
    norm = u.norm();
  } while (norm == 0.0);
  return u / norm;
}

Estimate chentsov_symdiff_measure(int d, const Vec& t, const Vec& s, const McConfig& cfg,
                                  Exec exec) {
  validate_cfg(cfg);
  validate_points(d, t, s);
  const Vec diff = t - s;
  if (diff.isZero(0.0)) return exact(0.0, cfg);
  if (d == 1) return exact(std::abs(diff[0]), cfg);

  const double c_d = chentsov_constant(d);
  const Moments m = chunked_moments(
      cfg.n_samples, cfg.seed,
      [&](Rng& rng) { return c_d * std::abs(random_direction(d, rng).dot(diff)); }, exec);
  return {m.mean, m.std_error(), cfg.n_samples, cfg.seed};
}

double takenaka_section_mass(int d, double H, const Vec& x, const Vec& t, const Vec& s) {
  const double a = (x - t).norm();
  const double b = (x - s).norm();
  const double r_min = std::min(a, b);
  const double r_max = std::max(a, b);
  if (r_min == r_max) return 0.0;
  const double e = 2.0 * H - d;
  return (std::pow(r_min, e) - std::pow(r_max, e)) / (d - 2.0 * H);
}

namespace {

// Mixture weights: midpoint component, then one component around each of t, s.
constexpr double kCentreWeight = 0.5;
constexpr double kPointWeight = 0.25;

// Radial Lomax law with tail index 1 - 2H: density alpha (1 + r/scale)^{-alpha-1} / scale.
double centre_density(int d, double H, double r, double scale) {
  const double alpha = 1.0 - 2.0 * H;
  const double radial = alpha * std::pow(1.0 + r / scale, -alpha - 1.0) / scale;
  return radial / (sphere_area(d) * std::pow(r, d - 1));
}

// Radial law on [0, reach] with density 2H r^{2H-1} / reach^{2H}; singular like r^{2H-d}.
double point_density(int d, double H, double r, double reach) {
  if (r > reach) return 0.0;
  const double radial = 2.0 * H * std::pow(r, 2.0 * H - 1.0) / std::pow(reach, 2.0 * H);
  return radial / (sphere_area(d) * std::pow(r, d - 1));
}

}  // namespace

double takenaka_proposal_density(int d, double H, const Vec& x, const Vec& t, const Vec& s,
                                 double scale) {
  const Vec centre = 0.5 * (t + s);
  const double reach = 0.5 * (t - s).norm();
  return kCentreWeight * centre_density(d, H, (x - centre).norm(), scale) +
         kPointWeight * point_density(d, H, (x - t).norm(), reach) +
         kPointWeight * point_density(d, H, (x - s).norm(), reach);
}

Estimate takenaka_symdiff_measure(int d, double H, const Vec& t, const Vec& s,
                                  const McConfig& cfg, Exec exec) {
  validate_cfg(cfg);
  validate_points(d, t, s);
  if (!(H > 0.0 && H < 0.5))
    throw ArgumentError("takenaka: H must lie in (0, 1/2); the r-tail is not integrable at H >= 1/2");
  const double dist = (t - s).norm();
  if (dist == 0.0) return exact(0.0, cfg);

  const double scale = cfg.proposal_scale.value_or(dist + 1.0);
  const double reach = 0.5 * dist;
  const double alpha = 1.0 - 2.0 * H;
  const Vec centre = 0.5 * (t + s);

  auto sample = [&](Rng& rng) {
    const double pick = open_uniform(rng);
    const Vec u = random_direction(d, rng);
    const double v = open_uniform(rng);
    Vec x;
    if (pick <= kCentreWeight)
      x = centre + (scale * (std::pow(v, -1.0 / alpha) - 1.0)) * u;
    else if (pick <= kCentreWeight + kPointWeight)
      x = t + (reach * std::pow(v, 0.5 / H)) * u;
    else
      x = s + (reach * std::pow(v, 0.5 / H)) * u;
    const double g = takenaka_section_mass(d, H, x, t, s);
    if (g == 0.0) return 0.0;
    const double q = takenaka_proposal_density(d, H, x, t, s, scale);
    return std::isfinite(q) ? g / q : 0.0;
  };
  const Moments m = chunked_moments(cfg.n_samples, cfg.seed, sample, exec);
  return {m.mean, m.std_error(), cfg.n_samples, cfg.seed};
}

PowerFit exponent_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ArgumentError("exponent_fit: x and y differ in length");
  if (x.size() < 3) throw ArgumentError("exponent_fit: needs at least 3 points");
  const auto n = static_cast<double>(x.size());
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(x[i]) || !std::isfinite(y[i]))
      throw ArgumentError("exponent_fit: distances and values must be positive and finite");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw ArgumentError("exponent_fit: distances must not all coincide");
  PowerFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss_res += r * r;
    fit.max_residual = std::max(fit.max_residual, std::abs(r));
  }
  fit.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

PowerFit exponent_fit(std::span<const std::pair<double, Estimate>> pairs) {
  std::vector<double> x, y;
  for (const auto& [dist, est] : pairs) {
    x.push_back(dist);
    y.push_back(est.value);
  }
  return exponent_fit(x, y);
}

}  // namespace l2field
