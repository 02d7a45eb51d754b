#include "l2field/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "l2field/acceptance.hpp"
#include "l2field/characterize.hpp"
#include "l2field/csv.hpp"
#include "l2field/errors.hpp"
#include "l2field/json_io.hpp"
#include "l2field/sampler.hpp"
#include "l2field/set_models.hpp"
#include "l2field/spectral.hpp"
#include "l2field/stationarity.hpp"

namespace l2field {

namespace fs = std::filesystem;

const std::vector<std::string>& cli_commands() {
  static const std::vector<std::string> names{
      "gram",           "sample",       "verify-kernel", "verify-si1",     "verify-si2",
      "verify-ss",      "verify-sheet", "verify-measure-si", "takenaka",   "chentsov",
      "spectral-synth", "spectral-lk",  "schoenberg",    "random-measure", "rkhs",
      "characterize",   "all"};
  return names;
}

namespace {

struct Run {
  json cfg;
  std::string command;
  std::optional<std::uint64_t> seed;
  std::vector<Report> reports;
  json extra = json::object();  // command-specific results
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
  std::ostream* log = nullptr;
  bool quiet = false;

  std::uint64_t require_seed() const {
    if (!seed) throw ArgumentError(command + ": a \"seed\" is required (config field or --seed)");
    return *seed;
  }
  void add(Report r) { reports.push_back(std::move(r)); }
};

SpacePtr config_space(const json& cfg) {
  if (cfg.contains("kernel") && cfg["kernel"].is_object() && cfg["kernel"].contains("space"))
    return space_from_json(cfg["kernel"]["space"]);
  if (cfg.contains("space")) return space_from_json(cfg["space"]);
  return make_grid_space(1, 16, 1.0);
}

Kernel config_kernel(const json& cfg) {
  return kernel_from_json(require_field(cfg, "kernel", "config"), config_space(cfg));
}

std::vector<Vec> random_elements(const Kernel& k, std::size_t n, Eigen::Index dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vec> out;
  if (k.family() == Family::l2fbm) {
    std::normal_distribution<double> nd;
    for (std::size_t i = 0; i < n; ++i) {
      Vec v(k.space()->size());
      for (auto& x : v) x = nd(rng);
      out.push_back(v);
    }
    return out;
  }
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    Vec v(dim);
    for (auto& x : v) x = u(rng);
    out.push_back(v);
  }
  return out;
}

Eigen::Index default_dim(const Kernel& k, const json& spec) {
  if (k.index_dim() != 0) return k.index_dim();
  return static_cast<Eigen::Index>(number_or(spec, "dim", 1, "design"));
}

/// "design": array of elements, {"linspace": {...}}, {"indicators": [...]} or {"random": {"n"}}.
std::vector<Vec> config_design(const json& cfg, const Kernel& k, Run& run, const std::string& key = "design") {
  const json& d = require_field(cfg, key, "config");
  if (d.is_array()) return vecs_from_json(d, key);
  if (!d.is_object()) throw ArgumentError(key + ": expected an array or an object");
  if (d.contains("linspace")) {
    const json& l = d["linspace"];
    const double a = require_number(l, "start", key + ".linspace");
    const double b = require_number(l, "stop", key + ".linspace");
    const double n = require_number(l, "n", key + ".linspace");
    if (n < 1 || n != std::floor(n)) throw ArgumentError(key + ".linspace.n: expected a positive integer");
    std::vector<Vec> out;
    for (int i = 0; i < static_cast<int>(n); ++i)
      out.push_back(Vec::Constant(1, n == 1 ? a : a + (b - a) * i / (n - 1)));
    return out;
  }
  if (d.contains("indicators")) {
    if (k.family() != Family::l2fbm) throw ArgumentError(key + ".indicators: only for the l2fbm family");
    std::vector<Vec> out;
    for (const Vec& c : vecs_from_json(d["indicators"], key + ".indicators"))
      out.push_back(indicator_rect(k.space(), Rect(c)).coeffs());
    return out;
  }
  if (d.contains("random")) {
    const json& r = d["random"];
    const double n = require_number(r, "n", key + ".random");
    if (n < 1 || n != std::floor(n)) throw ArgumentError(key + ".random.n: expected a positive integer");
    return random_elements(k, static_cast<std::size_t>(n), default_dim(k, r), mix_seed(run.require_seed(), 1));
  }
  throw ArgumentError(key + ": unknown design form");
}

std::vector<double> doubles_or(const json& cfg, const std::string& key, std::vector<double> fallback) {
  if (!cfg.contains(key)) return fallback;
  return doubles_from_json(cfg[key], key);
}

std::size_t count_or(const json& cfg, const std::string& key, std::size_t fallback) {
  const double v = number_or(cfg, key, static_cast<double>(fallback), "config");
  if (v < 0 || v != std::floor(v)) throw ArgumentError(key + ": expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

// --- commands ---------------------------------------------------------------

void cmd_gram(Run& run) {
  const Kernel k = config_kernel(run.cfg);
  const auto design = config_design(run.cfg, k, run);
  const Gram g = gram(k, design);
  Report r;
  r.check = "gram_psd";
  r.mode = k.describe();
  r.tolerance = kPsdRelTol;
  r.max_abs_diff = std::max(0.0, -g.min_eig);
  r.stats = {{"min_eig", number(g.min_eig)}, {"trace", g.trace()}, {"design_size", g.design_size},
             {"min_eig_negative", g.min_eig < 0.0}};
  r.set_pass(is_psd(g));
  run.add(r);
  run.files.push_back({"gram.csv", matrix_csv(g.matrix)});
  run.files.push_back({"gram.json", json{{"min_eig", number(g.min_eig)}, {"jitter_applied", g.jitter_applied}}.dump(2) + "\n"});
}

void cmd_sample(Run& run) {
  const Kernel k = config_kernel(run.cfg);
  const auto design = config_design(run.cfg, k, run);
  const std::size_t n_paths = count_or(run.cfg, "n_paths", 4096);
  const std::uint64_t seed = run.require_seed();
  Gram g = gram(k, design);
  const CholeskyFactor f = cholesky_factor(g);
  g.jitter_applied = f.jitter_applied;
  const SamplePaths paths = sample_paths(f, n_paths, seed);
  run.files.push_back({"paths.csv", paths_csv(paths)});
  run.files.push_back({"gram.json", json{{"min_eig", number(g.min_eig)}, {"jitter_applied", f.jitter_applied}}.dump(2) + "\n"});
  if (n_paths >= kMinComparePaths) {
    run.add(empirical_cov_compare(paths, g, number_or(run.cfg, "z", 3.0, "config")));
  } else {
    Report r;
    r.check = "sample";
    r.mode = "paths-only";
    r.seed = seed;
    r.set_pass(true);
    run.add(r);
  }
  run.extra["jitter_applied"] = f.jitter_applied;
}

void cmd_verify_kernel(Run& run) {
  const Kernel k = config_kernel(run.cfg);
  const auto design = config_design(run.cfg, k, run);
  const Gram g = gram(k, design);
  Report psd;
  psd.check = "kernel_psd";
  psd.mode = k.describe();
  psd.tolerance = kPsdRelTol;
  psd.max_abs_diff = std::max(0.0, -g.min_eig);
  psd.stats = {{"min_eig", number(g.min_eig)}, {"trace", g.trace()}};
  psd.set_pass(is_psd(g));
  run.add(psd);

  Report inc;
  inc.check = "increment_variance_closed_form";
  inc.mode = k.describe();
  inc.tolerance = number_or(run.cfg, "tol", 1e-10, "config");
  bool any = false;
  for (std::size_t i = 0; i < design.size(); ++i)
    for (std::size_t j = i + 1; j < design.size(); ++j) {
      const auto closed = family_increment_variance(k, design[i], design[j]);
      if (!closed) continue;
      any = true;
      inc.max_abs_diff = std::max(inc.max_abs_diff, std::abs(increment_variance(k, design[i], design[j]) - *closed));
    }
  inc.stats = {{"applicable", any}};
  inc.set_pass(inc.max_abs_diff <= inc.tolerance);
  run.add(inc);
}

IncrementSpec config_increments(Run& run, const Kernel& k) {
  IncrementSpec spec;
  if (run.cfg.contains("pairs")) {
    const json& p = run.cfg["pairs"];
    if (!p.is_array()) throw ArgumentError("pairs: expected an array of [f, g]");
    for (const auto& e : p) {
      if (!e.is_array() || e.size() != 2) throw ArgumentError("pairs: each entry must be [f, g]");
      spec.pairs.push_back({vec_from_json(e[0], "pairs"), vec_from_json(e[1], "pairs")});
    }
  } else {
    std::vector<Vec> d;
    if (run.cfg.contains("design")) {
      d = config_design(run.cfg, k, run);
    } else {
      d = random_elements(k, 16, default_dim(k, run.cfg), mix_seed(run.require_seed(), 1));
    }
    if (d.size() < 2) throw ArgumentError("design: needs at least two elements");
    for (std::size_t i = 0; i < d.size(); ++i) spec.pairs.push_back({d[i], d[(i + 1) % d.size()]});
  }
  if (run.cfg.contains("shift")) spec.shift = vec_from_json(run.cfg["shift"], "shift");
  return spec;
}

std::vector<L2Transform> config_translations(Run& run, Eigen::Index dim, std::size_t default_random) {
  std::vector<L2Transform> out;
  if (run.cfg.contains("shifts"))
    for (const Vec& h : vecs_from_json(run.cfg["shifts"], "shifts")) out.push_back(L2Transform::translation(h));
  const std::size_t n_random = count_or(run.cfg, "random_shifts", run.cfg.contains("shifts") ? 0 : default_random);
  if (n_random > 0) {
    Rng rng(mix_seed(run.require_seed(), 2));
    std::normal_distribution<double> nd;
    for (std::size_t i = 0; i < n_random; ++i) {
      Vec h(dim);
      for (auto& x : h) x = nd(rng);
      out.push_back(L2Transform::translation(h));
    }
  }
  return out;
}

void cmd_verify_si(Run& run, SiMode mode) {
  const Kernel k = config_kernel(run.cfg);
  const IncrementSpec spec = config_increments(run, k);
  const Eigen::Index dim = spec.pairs.front().first.size();
  const double tol = number_or(run.cfg, "tol", 1e-10, "config");
  std::vector<L2Transform> maps = config_translations(run, dim, 20);
  if (mode == SiMode::si1) {
    if (run.cfg.contains("orthogonal"))
      for (const auto& q : require_field(run.cfg, "orthogonal", "config")) {
        const auto rows = vecs_from_json(q, "orthogonal");
        Mat m(static_cast<Eigen::Index>(rows.size()), dim);
        for (std::size_t i = 0; i < rows.size(); ++i) {
          if (rows[i].size() != dim) throw ArgumentError("orthogonal: row length does not match the index");
          m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
        }
        maps.push_back(L2Transform::orthogonal(m));
      }
    const std::size_t n_orth = count_or(run.cfg, "random_orthogonal", run.cfg.contains("orthogonal") ? 0 : 20);
    if (n_orth > 0) {
      Rng rng(mix_seed(run.require_seed(), 3));
      const Vec w = index_weights(k, dim);
      for (std::size_t i = 0; i < n_orth; ++i) maps.push_back(L2Transform::orthogonal(random_orthogonal(w, rng)));
    }
  }
  Report r = check_si(k, spec, maps, mode, tol);
  if (run.seed) r.seed = run.seed;
  run.add(r);
}

void cmd_verify_ss(Run& run) {
  const Kernel k = config_kernel(run.cfg);
  const auto base = config_design(run.cfg, k, run);
  const std::string m = string_or(run.cfg, "mode", "SS1", "config");
  SsMode mode;
  if (m == "SS1" || m == "ss1") mode = SsMode::ss1;
  else if (m == "SS2" || m == "ss2") mode = SsMode::ss2;
  else if (m == "mp_dilation" || m == "mp-dilation") mode = SsMode::mp_dilation;
  else throw ArgumentError("mode: expected SS1, SS2 or mp_dilation");
  const auto scales = doubles_or(run.cfg, "scales", {0.5, 1.0, 2.0, 4.0});
  std::optional<Mat> q;
  if (mode == SsMode::ss2 && bool_or(run.cfg, "random_orthogonal", false, "config")) {
    Rng rng(mix_seed(run.require_seed(), 3));
    q = random_orthogonal(index_weights(k, base.front().size()), rng);
  }
  SsFit fit = fit_ss_order(k, base, mode, scales, q, number_or(run.cfg, "tol", 1e-10, "config"));
  if (run.cfg.contains("expected_order")) {
    const double want = require_number(run.cfg, "expected_order", "config");
    fit.report.stats["expected_order"] = want;
    if (std::abs(fit.order - want) > fit.report.tolerance) fit.report.set_pass(false);
  }
  run.extra["order"] = fit.order;
  run.add(fit.report);
}

void cmd_verify_sheet(Run& run) {
  const std::vector<double> hv = doubles_from_json(require_field(run.cfg, "Hvec", "config"), "Hvec");
  std::vector<Rectangle> rects;
  for (const auto& e : require_field(run.cfg, "rects", "config")) {
    if (!e.is_array() || e.size() != 2) throw ArgumentError("rects: each entry must be [u, v]");
    rects.push_back({vec_from_json(e[0], "rects"), vec_from_json(e[1], "rects")});
  }
  const auto shifts = vecs_from_json(require_field(run.cfg, "shifts", "config"), "shifts");
  (void)Kernel::sheet(hv);
  run.add(sheet_increment_check(hv, rects, shifts, number_or(run.cfg, "tol", 1e-10, "config")));
}

void cmd_verify_measure_si(Run& run) {
  const double H = require_number(run.cfg, "H", "config");
  if (run.cfg.contains("t_prime")) {
    run.add(measure_si_one_point(H, vec_from_json(require_field(run.cfg, "t", "config"), "t"),
                                 vec_from_json(run.cfg["t_prime"], "t_prime"),
                                 vec_from_json(require_field(run.cfg, "tau", "config"), "tau")));
    return;
  }
  run.add(measure_si_check(H, vec_from_json(require_field(run.cfg, "t0", "config"), "t0"),
                           vecs_from_json(require_field(run.cfg, "t_list", "config"), "t_list"),
                           vecs_from_json(require_field(run.cfg, "tau_list", "config"), "tau_list"),
                           number_or(run.cfg, "tol", 1e-10, "config")));
}

McConfig config_mc(Run& run) {
  McConfig mc;
  mc.n_samples = count_or(run.cfg, "n_samples", 100000);
  mc.seed = run.require_seed();
  if (run.cfg.contains("proposal_scale")) mc.proposal_scale = require_number(run.cfg, "proposal_scale", "config");
  return mc;
}

void cmd_chentsov(Run& run) {
  const int d = static_cast<int>(require_number(run.cfg, "d", "config"));
  const Vec t = vec_from_json(require_field(run.cfg, "t", "config"), "t");
  const Vec s = vec_from_json(require_field(run.cfg, "s", "config"), "s");
  const Estimate e = chentsov_symdiff_measure(d, t, s, config_mc(run));
  run.extra["estimate"] = estimate_to_json(e);
  Report r;
  r.check = "chentsov_calibration";
  r.mode = "d=" + std::to_string(d);
  r.seed = e.seed;
  r.tolerance = number_or(run.cfg, "tol", 0.01, "config");
  const double dist = (t - s).norm();
  const double ratio = dist > 0.0 ? e.value / dist : 1.0;
  r.max_abs_diff = dist > 0.0 ? std::abs(ratio - 1.0) : std::abs(e.value);
  r.stats = {{"ratio", ratio}, {"distance", dist}, {"stderr", e.std_error}};
  r.set_pass(r.max_abs_diff <= r.tolerance);
  run.add(r);
}

void cmd_takenaka(Run& run) {
  const int d = static_cast<int>(require_number(run.cfg, "d", "config"));
  const double H = require_number(run.cfg, "H", "config");
  McConfig mc = config_mc(run);
  if (run.cfg.contains("distances")) {
    const auto dists = doubles_from_json(run.cfg["distances"], "distances");
    Vec dir = run.cfg.contains("direction") ? vec_from_json(run.cfg["direction"], "direction") : Vec(Vec::Unit(d, 0));
    if (dir.size() != d || !(dir.norm() > 0.0)) throw ArgumentError("direction: expected a nonzero vector of length d");
    dir.normalize();
    const Vec origin = run.cfg.contains("s") ? vec_from_json(run.cfg["s"], "s") : Vec(Vec::Zero(d));
    std::vector<std::pair<double, Estimate>> pts;
    std::uint64_t k = 0;
    json ests = json::array();
    for (double r : dists) {
      McConfig c = mc;
      c.seed = mix_seed(mc.seed, k++);
      const Estimate e = takenaka_symdiff_measure(d, H, origin + r * dir, origin, c);
      pts.push_back({r, e});
      json je = estimate_to_json(e);
      je["distance"] = r;
      ests.push_back(je);
    }
    const PowerFit fit = exponent_fit(pts);
    run.extra["estimates"] = ests;
    Report rep;
    rep.check = "takenaka_scaling";
    rep.mode = "log-log slope";
    rep.seed = mc.seed;
    rep.tolerance = number_or(run.cfg, "tol", 0.03, "config");
    rep.max_abs_diff = std::abs(fit.slope - 2.0 * H);
    rep.stats = {{"slope", fit.slope}, {"expected", 2.0 * H}, {"r2", fit.r2}};
    rep.set_pass(rep.max_abs_diff <= rep.tolerance);
    run.add(rep);
    return;
  }
  const Vec t = vec_from_json(require_field(run.cfg, "t", "config"), "t");
  const Vec s = vec_from_json(require_field(run.cfg, "s", "config"), "s");
  const Estimate e = takenaka_symdiff_measure(d, H, t, s, mc);
  run.extra["estimate"] = estimate_to_json(e);
  Report rep;
  rep.check = "takenaka_estimate";
  rep.mode = "importance-sampling";
  rep.seed = e.seed;
  rep.stats = estimate_to_json(e);
  rep.set_pass(std::isfinite(e.value));
  run.add(rep);
}

std::vector<double> default_tgrid() {
  std::vector<double> t;
  for (int i = 0; i < 16; ++i) t.push_back(i / 15.0);
  return t;
}

void cmd_spectral_synth(Run& run) {
  const double H = require_number(run.cfg, "H", "config");
  if (!(H > 0.0 && H < 1.0)) throw ArgumentError("H must lie in (0, 1)");
  const auto tgrid = doubles_or(run.cfg, "tgrid", default_tgrid());
  const FreqGrid grid = grid_from_json(run.cfg.value("grid", json::object()), 2.0 * H);
  const std::size_t n_paths = count_or(run.cfg, "n_paths", 4096);
  const std::uint64_t seed = run.require_seed();
  const SamplePaths paths = synth_fbm_spectral(H, tgrid, grid, n_paths, seed);
  run.files.push_back({"paths.csv", paths_csv(paths)});
  const Gram target = fbm_target_gram(H, tgrid);
  Report cov;
  cov.check = "spectral_covariance";
  cov.mode = "max-abs-error";
  cov.seed = seed;
  cov.tolerance = number_or(run.cfg, "tol", 0.02, "config");
  cov.max_abs_diff = (empirical_covariance(paths.values) - target.matrix).cwiseAbs().maxCoeff();
  cov.stats = {{"grid", grid_to_json(grid)}, {"n_paths", n_paths}};
  cov.set_pass(cov.max_abs_diff <= cov.tolerance);
  run.add(cov);
  Report b0;
  b0.check = "spectral_origin";
  b0.mode = "B_0 == 0";
  b0.seed = seed;
  bool zero = true;
  for (std::size_t i = 0; i < tgrid.size(); ++i)
    if (tgrid[i] == 0.0) zero = zero && (paths.values.col(static_cast<Eigen::Index>(i)).array() == 0.0).all();
  b0.set_pass(zero);
  run.add(b0);
  if (n_paths >= 2) run.add(spectral_increment_check(paths, tgrid, grid));
}

void cmd_spectral_lk(Run& run) {
  const double alpha = require_number(run.cfg, "alpha", "config");
  const auto xis = doubles_or(run.cfg, "xi_list", {0.25, 0.5, 1.0, 2.0, 4.0});
  run.add(lk_scaling_check(alpha, xis, number_or(run.cfg, "quad_tol", 1e-10, "config")));
}

void cmd_schoenberg(Run& run) {
  Variogram phi = Variogram::zero();
  if (run.cfg.contains("kernel")) {
    phi = Variogram::from_kernel(config_kernel(run.cfg));
  } else if (run.cfg.contains("alpha")) {
    phi = Variogram::power(require_number(run.cfg, "alpha", "config"));
  } else if (string_or(run.cfg, "variogram", "", "config") != "zero") {
    throw ArgumentError("schoenberg: give \"alpha\", \"kernel\" or \"variogram\": \"zero\"");
  }
  const json& d = require_field(run.cfg, "design", "config");
  std::vector<Vec> design;
  if (d.is_object() && d.contains("linspace")) {
    design = config_design(run.cfg, Kernel::fbm1d(0.5), run);
  } else {
    design = vecs_from_json(d, "design");
  }
  const auto ts = doubles_or(run.cfg, "t_list", {0.1, 1.0, 10.0});
  run.add(schoenberg_check(phi, design, ts));
}

void cmd_random_measure(Run& run) {
  Partition p;
  const json& part = require_field(run.cfg, "partition", "config");
  p.edges = doubles_from_json(require_field(part, "edges", "partition"), "partition.edges");
  if (part.contains("masses")) {
    p.masses = doubles_from_json(part["masses"], "partition.masses");
  } else {
    // Control measure |x|^{-1-alpha} dx (alpha = 0 gives Lebesgue cell lengths).
    const double alpha = number_or(part, "alpha", 0.0, "partition");
    for (std::size_t i = 0; i + 1 < p.edges.size(); ++i)
      p.masses.push_back(alpha == 0.0 ? p.edges[i + 1] - p.edges[i]
                                      : (std::pow(p.edges[i], -alpha) - std::pow(p.edges[i + 1], -alpha)) / alpha);
  }
  run.add(simulate_random_measure(p, count_or(run.cfg, "n_reps", 10000), run.require_seed()));
}

void cmd_rkhs(Run& run) {
  const Kernel k = config_kernel(run.cfg);
  const auto design = config_design(run.cfg, k, run);
  const RkhsModel model = RkhsModel::build(k, design);
  run.extra["rank"] = model.rank;
  if (run.cfg.contains("coeffs"))
    for (const Vec& a : vecs_from_json(run.cfg["coeffs"], "coeffs")) run.add(rkhs_check(model, a));
  if (run.cfg.contains("targets")) {
    std::vector<Vec> elements;
    json coeffs = json::array();
    for (const Vec& y : vecs_from_json(run.cfg["targets"], "targets")) {
      elements.push_back(linear_extend(model, y));
      coeffs.push_back(vec_to_json(elements.back()));
    }
    run.extra["extended_coeffs"] = coeffs;
    if (elements.size() >= 2) {
      std::vector<std::pair<std::size_t, std::size_t>> pairs;
      std::vector<std::size_t> shifts;
      for (std::size_t i = 0; i < elements.size(); ++i) {
        pairs.push_back({i, (i + 1) % elements.size()});
        shifts.push_back(i);
      }
      run.add(linear_si2_check(elements, pairs, shifts));
    }
  }
  if (run.reports.empty()) throw ArgumentError("rkhs: give \"coeffs\" and/or \"targets\"");
}

Vec parse_inline_index(const std::string& field, const std::string& what) {
  json v;
  try {
    v = json::parse(field);
  } catch (const json::exception&) {
    throw ArgumentError(what + ": index column is not valid JSON");
  }
  return vec_from_json(v, what);
}

double parse_real(const std::string& field, const std::string& what) {
  try {
    std::size_t used = 0;
    const double x = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return x;
  } catch (const std::exception&) {
    throw ArgumentError(what + ": not a number: " + field);
  }
}

void cmd_characterize(Run& run) {
  std::vector<PhiSample> phis;
  std::vector<CovSample> covs;
  if (run.cfg.contains("phi_csv")) {
    for (const auto& row : read_csv(run.cfg["phi_csv"].get<std::string>()).rows) {
      if (row.size() != 2) throw ArgumentError("phi_csv: expected columns index,phi");
      phis.push_back({parse_inline_index(row[0], "phi_csv"), parse_real(row[1], "phi_csv")});
    }
  } else {
    for (const auto& e : require_field(run.cfg, "phi_samples", "config")) {
      if (!e.is_array() || e.size() != 2) throw ArgumentError("phi_samples: entries are [index, phi]");
      phis.push_back({vec_from_json(e[0], "phi_samples"), as_number(e[1], "phi_samples")});
    }
  }
  if (run.cfg.contains("cov_csv")) {
    for (const auto& row : read_csv(run.cfg["cov_csv"].get<std::string>()).rows) {
      if (row.size() != 3) throw ArgumentError("cov_csv: expected columns a,b,cov");
      covs.push_back({parse_inline_index(row[0], "cov_csv"), parse_inline_index(row[1], "cov_csv"),
                      parse_real(row[2], "cov_csv")});
    }
  } else {
    for (const auto& e : require_field(run.cfg, "cov_samples", "config")) {
      if (!e.is_array() || e.size() != 3) throw ArgumentError("cov_samples: entries are [a, b, cov]");
      covs.push_back({vec_from_json(e[0], "cov_samples"), vec_from_json(e[1], "cov_samples"),
                      as_number(e[2], "cov_samples")});
    }
  }
  Vec w;
  if (run.cfg.contains("weights")) w = vec_from_json(run.cfg["weights"], "weights");
  else if (run.cfg.contains("space")) w = space_from_json(run.cfg["space"])->weights();
  const std::string m = string_or(run.cfg, "mode", "P31", "config");
  if (m != "P31" && m != "P32") throw ArgumentError("mode: expected P31 or P32");
  const CharacterizeResult c = characterize_fractional(phis, covs, w, m == "P31" ? CharMode::p31 : CharMode::p32);
  run.extra["verdict"] = c.accept ? "accept" : "reject";
  run.add(c.report);
}

void cmd_all(Run& run) {
  AcceptanceOptions opt;
  if (run.seed) opt.seed = *run.seed;
  if (run.cfg.contains("only"))
    for (const auto& v : run.cfg["only"]) opt.only.push_back(static_cast<int>(as_number(v, "only")));
  json crit = json::array();
  for (int id = 1; id <= kCriterionCount; ++id) {
    if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), id) == opt.only.end()) continue;
    const CriterionResult c = run_criterion(id, opt);
    if (!run.quiet) *run.log << c.line() << "\n" << std::flush;
    crit.push_back(c.to_json(false));
    Report r;
    r.check = "criterion " + std::to_string(id);
    r.mode = c.name;
    r.stats = {{"summary", c.summary}};
    r.set_pass(c.pass);
    run.add(r);
  }
  run.extra["criteria"] = crit;
  run.extra["seed"] = opt.seed;
}

void dispatch(Run& run) {
  const std::string& c = run.command;
  if (c == "gram") cmd_gram(run);
  else if (c == "sample") cmd_sample(run);
  else if (c == "verify-kernel") cmd_verify_kernel(run);
  else if (c == "verify-si1") cmd_verify_si(run, SiMode::si1);
  else if (c == "verify-si2") cmd_verify_si(run, SiMode::si2);
  else if (c == "verify-ss") cmd_verify_ss(run);
  else if (c == "verify-sheet") cmd_verify_sheet(run);
  else if (c == "verify-measure-si") cmd_verify_measure_si(run);
  else if (c == "takenaka") cmd_takenaka(run);
  else if (c == "chentsov") cmd_chentsov(run);
  else if (c == "spectral-synth") cmd_spectral_synth(run);
  else if (c == "spectral-lk") cmd_spectral_lk(run);
  else if (c == "schoenberg") cmd_schoenberg(run);
  else if (c == "random-measure") cmd_random_measure(run);
  else if (c == "rkhs") cmd_rkhs(run);
  else if (c == "characterize") cmd_characterize(run);
  else if (c == "all") cmd_all(run);
  else throw ArgumentError("unknown command \"" + c + "\"");
}

json bundle_of(const Run& run) {
  json reports = json::array();
  bool pass = !run.reports.empty();
  for (const auto& r : run.reports) {
    reports.push_back(r.to_json());
    pass = pass && r.pass;
  }
  json b{{"command", run.command}, {"config", run.cfg}, {"reports", reports}, {"pass", pass}};
  if (!run.extra.empty()) b["results"] = run.extra;
  return b;
}

void write_artifacts(const Run& run, const json& bundle, const std::string& out_dir) {
  const fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());
  write_text(dir / "report.json", bundle.dump(2) + "\n");
  write_text(dir / "reports.csv", reports_csv(run.reports));
  write_text(dir / "config.json", run.cfg.dump(2) + "\n");
  for (const auto& [name, text] : run.files) write_text(dir / name, text);
}

}  // namespace

CliResult execute(const json& config, const std::string& out_dir, std::ostream& log, bool quiet) {
  CliResult res;
  Run run;
  run.cfg = config;
  run.log = &log;
  run.quiet = quiet;
  try {
    if (!config.is_object()) throw ArgumentError("config: expected a JSON object");
    run.command = string_or(config, "command", "", "config");
    if (run.command.empty()) throw ArgumentError("config: no command given");
    const auto& names = cli_commands();
    if (std::find(names.begin(), names.end(), run.command) == names.end())
      throw ArgumentError("unknown command \"" + run.command + "\"");
    if (config.contains("seed")) run.seed = uint_or(config, "seed", 0, "config");
    dispatch(run);
    res.bundle = bundle_of(run);
    res.exit_code = res.bundle["pass"].get<bool>() ? kExitPass : kExitFail;
  } catch (const NumericError& e) {
    // A numerical failure is a failed check, not a usage error.
    Report r;
    r.check = run.command.empty() ? "execute" : run.command;
    r.mode = "numeric-error";
    r.stats = {{"error", e.what()}, {"min_eig", number(e.min_eig())}};
    r.set_pass(false);
    run.reports.push_back(r);
    res.bundle = bundle_of(run);
    res.exit_code = kExitFail;
  } catch (const std::exception& e) {
    res.bundle = {{"command", run.command}, {"error", e.what()}};
    log << "error: " << e.what() << "\n";
    res.exit_code = kExitUsage;
    return res;
  }
  if (!out_dir.empty()) {
    try {
      write_artifacts(run, res.bundle, out_dir);
    } catch (const std::exception& e) {
      log << "error: " << e.what() << "\n";
      res.exit_code = kExitUsage;
    }
  }
  return res;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  apply_thread_env();
  CLI::App app{"Fractional Brownian field kernels, samplers and property checks"};
  std::string command, config_path, out_dir;
  std::uint64_t seed = 0;
  bool quiet = false;
  std::string cmd_help = "one of:";
  for (const auto& c : cli_commands()) cmd_help += " " + c;
  app.add_option("command", command, cmd_help);
  app.add_option("--config", config_path, "JSON run configuration");
  auto* seed_opt = app.add_option("--seed", seed, "seed override for stochastic commands");
  app.add_option("--out", out_dir, "directory for CSV/JSON artifacts");
  app.add_flag("--quiet", quiet, "suppress the report on stdout");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  json config = json::object();
  if (!config_path.empty()) {
    std::ifstream f(config_path);
    if (!f) {
      err << "error: cannot open config " << config_path << "\n";
      return kExitUsage;
    }
    try {
      config = json::parse(f);
    } catch (const json::exception& e) {
      err << "error: malformed config: " << e.what() << "\n";
      return kExitUsage;
    }
    if (!config.is_object()) {
      err << "error: config must be a JSON object\n";
      return kExitUsage;
    }
  }
  if (!command.empty()) {
    if (config.contains("command") && config["command"] != command) {
      err << "error: command line says " << command << " but the config says " << config["command"] << "\n";
      return kExitUsage;
    }
    config["command"] = command;
  }
  if (seed_opt->count() > 0) config["seed"] = seed;

  const CliResult res = execute(config, out_dir, err, quiet);
  if (res.exit_code == kExitUsage) return res.exit_code;
  if (!quiet) out << res.bundle.dump(2) << "\n";
  return res.exit_code;
}

}  // namespace l2field
