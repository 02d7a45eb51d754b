#include "l2field/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "l2field/errors.hpp"

namespace l2field {

Variogram Variogram::power(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ArgumentError("power variogram: alpha must be > 0");
  return {[alpha](const Vec& u) { return std::pow(u.norm(), alpha); }, alpha,
          "power(" + std::to_string(alpha) + ")"};
}

Variogram Variogram::zero() {
  return {[](const Vec&) { return 0.0; }, std::numeric_limits<double>::quiet_NaN(), "zero"};
}

Variogram Variogram::from_kernel(const Kernel& k) {
  if (!k.has_variogram())
    throw ArgumentError("kernel family " + to_string(k.family()) + " has no variogram form");
  double alpha = 0.0;
  switch (k.family()) {
    case Family::fbm1d:
    case Family::levy: alpha = 2.0 * k.H(); break;
    case Family::l2fbm: alpha = 4.0 * k.H(); break;
    case Family::custom_variogram: alpha = k.alpha(); break;
    default: break;
  }
  return {[k](const Vec& u) { return k.variogram(u); }, alpha, k.describe()};
}

Report schoenberg_check(const Variogram& phi, std::span<const Vec> design,
                        std::span<const double> t_list) {
  const std::size_t n = design.size();
  if (n == 0 || n > kMaxSchoenbergDesign)
    throw ArgumentError("schoenberg_check: design must have 1.." +
                        std::to_string(kMaxSchoenbergDesign) + " points");
  if (t_list.empty()) throw ArgumentError("schoenberg_check: t_list is empty");
  for (double t : t_list)
    if (!(t > 0.0) || !std::isfinite(t)) throw ArgumentError("schoenberg_check: t must be positive");

  const auto ni = static_cast<Eigen::Index>(n);
  Mat phis(ni, ni);
  double symmetry = 0.0;
  double negativity = 0.0;
  for (Eigen::Index i = 0; i < ni; ++i) {
    for (Eigen::Index j = 0; j < ni; ++j) {
      phis(i, j) = phi(design[i] - design[j]);
      negativity = std::max(negativity, -phis(i, j));
    }
  }
  for (Eigen::Index i = 0; i < ni; ++i)
    for (Eigen::Index j = 0; j < i; ++j) symmetry = std::max(symmetry, std::abs(phis(i, j) - phis(j, i)));
  const double at_zero = phi(Vec::Zero(design[0].size()));

  Report r;
  r.check = "schoenberg_check";
  r.mode = phi.name;
  r.tolerance = 1e-10 * static_cast<double>(n);
  double worst = std::numeric_limits<double>::infinity();
  bool ok = true;
  for (double t : t_list) {
    Mat g = (-t * phis.array()).exp().matrix();
    g = 0.5 * (g + g.transpose());
    const double me = symmetric_min_eig(g);
    worst = std::min(worst, me);
    const bool pass_t = me >= -r.tolerance;
    ok = ok && pass_t;
    r.details.push_back({{"t", t}, {"min_eig", number(me)}, {"pass", pass_t}});
  }
  r.max_abs_diff = std::max(0.0, -worst);
  r.stats = {{"design_size", n},
             {"min_eig", number(worst)},
             {"phi_at_zero", number(at_zero)},
             {"max_asymmetry", number(symmetry)},
             {"max_negative_phi", number(negativity)}};
  if (std::isfinite(phi.alpha)) r.stats["alpha"] = phi.alpha;
  r.set_pass(ok);
  return r;
}

Report lk_scaling_check(double alpha, std::span<const double> xi_list, double quad_tol) {
  if (xi_list.empty()) throw ArgumentError("lk_scaling_check: xi_list is empty");
  Report r;
  r.check = "lk_scaling_check";
  r.mode = "c=2";
  r.tolerance = 1e-6;

  const double target = std::pow(2.0, alpha);
  double ratio_err = 0.0;
  double dual_err = 0.0;
  double closed_err = 0.0;
  std::vector<double> normalised;
  for (double xi : xi_list) {
    const double i1 = lk_integral(alpha, xi, quad_tol);
    const double i2 = lk_integral(alpha, 2.0 * xi, quad_tol);
    const double ref = lk_integral_reference(alpha, xi, quad_tol);
    const double cf = lk_closed_form(alpha, xi);
    const double ratio = i2 / i1;
    ratio_err = std::max(ratio_err, std::abs(ratio / target - 1.0));
    dual_err = std::max(dual_err, std::abs(i1 - ref) / std::abs(ref));
    closed_err = std::max(closed_err, std::abs(i1 - cf) / std::abs(cf));
    normalised.push_back(i1 / std::pow(std::abs(xi), alpha));
    r.details.push_back({{"xi", xi}, {"I", i1}, {"I_2xi", i2}, {"ratio", ratio},
                         {"reference", ref}, {"closed_form", cf}});
  }
  const auto [lo, hi] = std::minmax_element(normalised.begin(), normalised.end());
  const double spread = (*hi - *lo) / std::abs(*lo);
  r.max_abs_diff = std::max(ratio_err, spread);
  r.stats = {{"alpha", alpha},
             {"max_ratio_rel_err", ratio_err},
             {"constant_rel_spread", spread},
             {"constant", normalised.front()},
             {"dual_rel_diff", dual_err},
             {"closed_form_rel_diff", closed_err},
             {"quad_tol", quad_tol}};
  r.set_pass(ratio_err <= r.tolerance && spread <= r.tolerance);
  return r;
}

FreqGrid FreqGrid::log_spaced(double x_min, double x_max, std::size_t n, double alpha) {
  if (!(x_min > 0.0) || !(x_max > x_min) || !std::isfinite(x_max))
    throw ArgumentError("FreqGrid: need 0 < x_min < x_max < inf");
  if (n < 1) throw ArgumentError("FreqGrid: need at least one node");
  if (!(alpha > 0.0 && alpha < 2.0)) throw ArgumentError("FreqGrid: alpha must lie in (0, 2)");
  FreqGrid g;
  g.x_min = x_min;
  g.x_max = x_max;
  g.n = n;
  g.alpha = alpha;
  const double step = std::log(x_max / x_min) / static_cast<double>(n);
  double lo = x_min;
  double lo_pow = std::pow(lo, -alpha);
  for (std::size_t k = 0; k < n; ++k) {
    const double hi = k + 1 == n ? x_max : x_min * std::exp(step * static_cast<double>(k + 1));
    const double hi_pow = std::pow(hi, -alpha);
    g.nodes.push_back(std::sqrt(lo * hi));
    g.masses.push_back((lo_pow - hi_pow) / alpha);
    lo = hi;
    lo_pow = hi_pow;
  }
  return g;
}

double spectral_norm_constant(const FreqGrid& grid) {
  double var1 = 0.0;
  for (std::size_t k = 0; k < grid.nodes.size(); ++k) {
    const double s = std::sin(0.5 * grid.nodes[k]);
    var1 += 4.0 * grid.masses[k] * 2.0 * s * s;
  }
  return 1.0 / var1;
}

double spectral_grid_covariance(const FreqGrid& grid, double s, double t) {
  const double c2 = spectral_norm_constant(grid);
  double acc = 0.0;
  for (std::size_t k = 0; k < grid.nodes.size(); ++k) {
    const double x = grid.nodes[k];
    const std::complex<double> a = std::polar(1.0, s * x) - 1.0;
    const std::complex<double> b = std::polar(1.0, t * x) - 1.0;
    acc += 2.0 * grid.masses[k] * (a * std::conj(b)).real();
  }
  return c2 * acc;
}

Gram fbm_target_gram(double H, std::span<const double> tgrid) {
  const Kernel k = Kernel::fbm1d(H);
  std::vector<Vec> design;
  for (double t : tgrid) design.push_back(Vec::Constant(1, t));
  return gram(k, design, Exec::serial);
}

namespace {

void check_tgrid(std::span<const double> tgrid, const FreqGrid& grid) {
  if (tgrid.empty()) throw ArgumentError("spectral synthesis: empty tgrid");
  if (grid.nodes.size() != grid.masses.size() || grid.nodes.empty())
    throw ArgumentError("spectral synthesis: malformed frequency grid");
  double t_max = 0.0;
  for (double t : tgrid) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw ArgumentError("spectral synthesis: t must be >= 0");
    t_max = std::max(t_max, t);
  }
  if (t_max * grid.x_min > kResolutionLow || t_max * grid.x_max < kResolutionHigh)
    throw ArgumentError("spectral synthesis: resolution guard violated (t_max * x_min = " +
                        std::to_string(t_max * grid.x_min) + ", t_max * x_max = " +
                        std::to_string(t_max * grid.x_max) + ")");
}

}  // namespace

SamplePaths synth_fbm_spectral(double H, std::span<const double> tgrid, const FreqGrid& grid,
                               std::size_t n_paths, std::uint64_t seed, Exec exec) {
  if (!(H > 0.0 && H < 1.0)) throw ArgumentError("spectral synthesis: H must lie in (0, 1)");
  if (std::abs(grid.alpha - 2.0 * H) > 1e-12)
    throw ArgumentError("spectral synthesis: grid alpha must equal 2H");
  if (n_paths < 1) throw ArgumentError("spectral synthesis: n_paths must be >= 1");
  check_tgrid(tgrid, grid);

  const std::size_t nk = grid.nodes.size();
  const auto nt = static_cast<Eigen::Index>(tgrid.size());
  const double c = std::sqrt(spectral_norm_constant(grid));

  // a(t, k) = (e^{i t x_k} - 1) sqrt(m_k); the mirrored node carries conj(a).
  std::vector<std::complex<double>> a(tgrid.size() * nk);
  for (std::size_t i = 0; i < tgrid.size(); ++i)
    for (std::size_t k = 0; k < nk; ++k)
      a[i * nk + k] = (std::polar(1.0, tgrid[i] * grid.nodes[k]) - 1.0) * std::sqrt(grid.masses[k]);

  SamplePaths out;
  out.values.resize(static_cast<Eigen::Index>(n_paths), nt);
  out.seed = seed;
  out.design_size = nt;
  bool residue_ok = true;

  auto draw = [&](Eigen::Index p) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(p)));
    std::normal_distribution<double> nd;
    std::vector<std::complex<double>> z(nk);
    for (auto& zk : z) {
      const double re = nd(rng);
      const double im = nd(rng);
      zk = {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
    }
    for (Eigen::Index i = 0; i < nt; ++i) {
      const std::complex<double>* row = &a[static_cast<std::size_t>(i) * nk];
      std::complex<double> pos = 0.0;
      std::complex<double> neg = 0.0;
      for (std::size_t k = 0; k < nk; ++k) {
        pos += row[k] * z[k];
        neg += std::conj(row[k]) * std::conj(z[k]);
      }
      const std::complex<double> total = pos + neg;
      if (std::abs(total.imag()) > 1e-12 * std::max(1.0, std::abs(total.real()))) residue_ok = false;
      out.values(p, i) = c * total.real();
    }
  };
  const auto rows = static_cast<Eigen::Index>(n_paths);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (Eigen::Index p = 0; p < rows; ++p) draw(p);
  } else {
    for (Eigen::Index p = 0; p < rows; ++p) draw(p);
  }
  if (!residue_ok) throw NumericError("spectral synthesis: imaginary residue above 1e-12");
  return out;
}

Report spectral_increment_check(const SamplePaths& paths, std::span<const double> tgrid,
                                const FreqGrid& grid, double z_threshold) {
  if (paths.values.cols() != static_cast<Eigen::Index>(tgrid.size()))
    throw ArgumentError("spectral_increment_check: paths do not match tgrid");
  const double n = static_cast<double>(paths.n_paths());
  const double c2 = spectral_norm_constant(grid);
  Report r;
  r.check = "spectral_increment_check";
  r.mode = "lag-variance";
  r.tolerance = z_threshold;
  r.seed = paths.seed;
  double max_z = 0.0;
  std::size_t failing = 0;
  for (std::size_t i = 0; i < tgrid.size(); ++i) {
    for (std::size_t j = i + 1; j < tgrid.size(); ++j) {
      const double lag = std::abs(tgrid[j] - tgrid[i]);
      double v = 0.0;
      for (std::size_t k = 0; k < grid.nodes.size(); ++k) {
        const double s = std::sin(0.5 * lag * grid.nodes[k]);
        v += 4.0 * grid.masses[k] * 2.0 * s * s;
      }
      v *= c2;
      const auto d = (paths.values.col(static_cast<Eigen::Index>(j)) -
                      paths.values.col(static_cast<Eigen::Index>(i))).array();
      const double emp = d.square().sum() / n;
      const double se = v * std::sqrt(2.0 / n);
      const double z = (emp - v) / se;
      r.max_abs_diff = std::max(r.max_abs_diff, std::abs(emp - v));
      max_z = std::max(max_z, std::abs(z));
      if (!(std::abs(z) <= z_threshold)) {
        ++failing;
        if (r.details.size() < 32)
          r.details.push_back({{"s", tgrid[i]}, {"t", tgrid[j]}, {"empirical", emp},
                               {"exact", v}, {"z", number(z)}});
      }
    }
  }
  r.stats = {{"max_abs_z", number(max_z)}, {"failing_pairs", failing}, {"n_paths", paths.n_paths()}};
  r.set_pass(failing == 0);
  return r;
}

// ---------------------------------------------------------------------------

void Partition::validate() const {
  if (masses.empty()) throw ArgumentError("partition: needs at least one cell per sign");
  if (edges.size() != masses.size() + 1)
    throw ArgumentError("partition: edges must have one more entry than masses");
  if (!(edges.front() >= 0.0)) throw ArgumentError("partition: edges must start at >= 0");
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    if (!(edges[i + 1] > edges[i]) || !std::isfinite(edges[i + 1]))
      throw ArgumentError("partition: edges must be finite and strictly increasing");
  for (double m : masses)
    if (!(m > 0.0) || !std::isfinite(m)) throw ArgumentError("partition: masses must be positive and finite");
}

DiscreteRandomMeasure::DiscreteRandomMeasure(const Partition& partition, std::uint64_t seed) {
  partition.validate();
  const std::size_t k = partition.half_size();
  values_.resize(2 * k);
  Rng rng(seed);
  std::normal_distribution<double> nd;
  for (std::size_t c = 0; c < k; ++c) {
    const double re = nd(rng);
    const double im = nd(rng);
    const double s = std::sqrt(partition.masses[c] / 2.0);
    values_[c] = {s * re, s * im};
    values_[c + k] = std::conj(values_[c]);
  }
}

std::complex<double> DiscreteRandomMeasure::operator()(const CellSet& set) const {
  std::complex<double> acc = 0.0;
  for (std::size_t c : set) {
    if (c >= values_.size()) throw ArgumentError("random measure: cell index out of range");
    acc += values_[c];
  }
  return acc;
}

double control_mass(const Partition& p, const CellSet& a) {
  double m = 0.0;
  for (std::size_t c : a) m += p.mass(c);
  return m;
}

double control_overlap(const Partition& p, const CellSet& a, const CellSet& b) {
  double m = 0.0;
  for (std::size_t c : a)
    if (std::find(b.begin(), b.end(), c) != b.end()) m += p.mass(c);
  return m;
}

namespace {

struct ComplexMoments {
  Moments re, im;
};

}  // namespace

Report simulate_random_measure(const Partition& partition, std::size_t n_reps, std::uint64_t seed,
                               Exec exec) {
  partition.validate();
  if (n_reps < 1000) throw ArgumentError("simulate_random_measure: n_reps must be >= 1000");
  const std::size_t k = partition.half_size();

  // Test sets: single cells, a union, a half-block, a symmetric pair and a mirror.
  std::vector<std::pair<std::string, CellSet>> sets;
  sets.push_back({"cell0", {0}});
  if (k > 1) {
    sets.push_back({"cell1", {1}});
    sets.push_back({"cell0+cell1", {0, 1}});
  }
  CellSet block;
  for (std::size_t c = 0; c < std::max<std::size_t>(1, k / 2); ++c) block.push_back(c);
  sets.push_back({"block", block});
  sets.push_back({"cell0+mirror0", {0, k}});
  sets.push_back({"mirror" + std::to_string(k > 1 ? 1 : 0), {k + (k > 1 ? 1 : 0)}});
  const std::size_t ns = sets.size();

  // Covariance pairs (i, j) over `sets`.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < ns; ++i) pairs.push_back({i, i});
  if (k > 1) {
    pairs.push_back({0, 1});  // disjoint
    pairs.push_back({2, 0});  // overlapping
    pairs.push_back({1, ns - 1});  // a cell against its own mirror
  }
  pairs.push_back({0, ns - 1});

  // Additivity pairs (disjoint unions); checked on every realisation.
  CellSet lower_half, upper_half, everything;
  for (std::size_t c = 0; c < 2 * k; ++c) {
    (c < k ? lower_half : upper_half).push_back(c);
    everything.push_back(c);
  }

  struct Acc {
    std::vector<ComplexMoments> mean;
    std::vector<ComplexMoments> cov;
    double additivity = 0.0;
  };
  const std::size_t n_chunks = (n_reps + kMcChunk - 1) / kMcChunk;
  std::vector<Acc> parts(n_chunks);
  auto run_chunk = [&](std::size_t ch) {
    Acc acc;
    acc.mean.resize(ns);
    acc.cov.resize(pairs.size());
    const std::size_t begin = ch * kMcChunk;
    const std::size_t end = std::min(n_reps, begin + kMcChunk);
    std::vector<std::complex<double>> v(ns);
    for (std::size_t rep = begin; rep < end; ++rep) {
      const DiscreteRandomMeasure m(partition, mix_seed(seed, rep));
      for (std::size_t i = 0; i < ns; ++i) {
        v[i] = m(sets[i].second);
        acc.mean[i].re.add(v[i].real());
        acc.mean[i].im.add(v[i].imag());
      }
      for (std::size_t q = 0; q < pairs.size(); ++q) {
        const auto prod = v[pairs[q].first] * std::conj(v[pairs[q].second]);
        acc.cov[q].re.add(prod.real());
        acc.cov[q].im.add(prod.imag());
      }
      const auto whole = m(everything);
      const auto split = m(lower_half) + m(upper_half);
      double scale = 0.0;
      for (std::size_t c = 0; c < 2 * k; ++c) scale += std::abs(m.cell(c));
      acc.additivity = std::max(acc.additivity, std::abs(whole - split) / std::max(scale, 1e-300));
      if (k > 1) {
        const auto u = m({0, 1}) - m({0}) - m({1});
        acc.additivity = std::max(acc.additivity, std::abs(u) / std::max(scale, 1e-300));
      }
    }
    parts[ch] = std::move(acc);
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(n_chunks); ++c)
      run_chunk(static_cast<std::size_t>(c));
  } else {
    for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
  }
  Acc total;
  total.mean.resize(ns);
  total.cov.resize(pairs.size());
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < ns; ++i) {
      total.mean[i].re.merge(p.mean[i].re);
      total.mean[i].im.merge(p.mean[i].im);
    }
    for (std::size_t q = 0; q < pairs.size(); ++q) {
      total.cov[q].re.merge(p.cov[q].re);
      total.cov[q].im.merge(p.cov[q].im);
    }
    total.additivity = std::max(total.additivity, p.additivity);
  }

  Report r;
  r.check = "simulate_random_measure";
  r.mode = "moments";
  r.tolerance = 3.0;
  r.seed = seed;
  double max_z = 0.0;
  std::size_t failing = 0;
  auto test = [&](const std::string& what, const Moments& mo, double expected) {
    const double diff = mo.mean - expected;
    const double se = mo.std_error();
    const double z = se > 0.0 ? diff / se : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    max_z = std::max(max_z, std::abs(z));
    r.max_abs_diff = std::max(r.max_abs_diff, std::abs(diff));
    const bool ok = std::abs(z) <= r.tolerance;
    if (!ok) ++failing;
    r.details.push_back({{"quantity", what}, {"empirical", mo.mean}, {"expected", expected},
                         {"stderr", se}, {"z", number(z)}, {"pass", ok}});
  };
  for (std::size_t i = 0; i < ns; ++i) {
    test("Re E M(" + sets[i].first + ")", total.mean[i].re, 0.0);
    test("Im E M(" + sets[i].first + ")", total.mean[i].im, 0.0);
  }
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    const auto& [i, j] = pairs[q];
    const std::string name = "E M(" + sets[i].first + ") conj M(" + sets[j].first + ")";
    test("Re " + name, total.cov[q].re, control_overlap(partition, sets[i].second, sets[j].second));
    test("Im " + name, total.cov[q].im, 0.0);
  }
  // Different summation orders of the same cells agree to rounding only.
  const double additivity_tol = 2.0 * static_cast<double>(2 * k) * std::numeric_limits<double>::epsilon();
  const bool additive = total.additivity <= additivity_tol;
  r.stats = {{"n_reps", n_reps},
             {"cells", partition.size()},
             {"max_abs_z", number(max_z)},
             {"failing_moments", failing},
             {"additivity_rel_residual", number(total.additivity)},
             {"additivity_tolerance", additivity_tol},
             {"additivity_exact", additive}};
  r.set_pass(failing == 0 && additive);
  return r;
}

}  // namespace l2field
