#include "l2field/characterize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "l2field/errors.hpp"
#include "l2field/set_models.hpp"

namespace l2field {

Mat psd_pseudo_inverse(const Mat& c, Eigen::Index* rank) {
  Eigen::SelfAdjointEigenSolver<Mat> es(c);
  if (es.info() != Eigen::Success) throw NumericError("pseudo-inverse: eigensolver failed");
  const Vec& ev = es.eigenvalues();
  const double largest = ev.cwiseAbs().maxCoeff();
  Vec inv = Vec::Zero(ev.size());
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (largest > 0.0 && ev[i] > kRankTol * largest) {
      inv[i] = 1.0 / ev[i];
      ++r;
    }
  if (rank) *rank = r;
  const Mat& v = es.eigenvectors();
  return v * inv.asDiagonal() * v.transpose();
}

RkhsModel RkhsModel::from_gram(Mat gramC, std::vector<Vec> design, CovarianceFn cov) {
  if (gramC.rows() != gramC.cols() || gramC.rows() == 0) throw ArgumentError("rkhs: Gram must be square");
  if (!design.empty() && static_cast<Eigen::Index>(design.size()) != gramC.rows())
    throw ArgumentError("rkhs: design size does not match the Gram");
  const Gram g = make_gram(gramC);
  if (g.min_eig < -1e-10 * std::abs(g.trace()))
    throw ArgumentError("rkhs: Gram is not positive semidefinite (min_eig = " + std::to_string(g.min_eig) + ")");
  RkhsModel m;
  m.gramC = g.matrix;
  m.pseudo_inverse = psd_pseudo_inverse(m.gramC, &m.rank);
  m.design = std::move(design);
  m.cov = std::move(cov);
  return m;
}

RkhsModel RkhsModel::build(const Kernel& k, std::span<const Vec> design) {
  const Gram g = gram(k, design, Exec::serial);
  return from_gram(g.matrix, std::vector<Vec>(design.begin(), design.end()),
                   [k](const Vec& a, const Vec& b) { return k(a, b); });
}

Report rkhs_check(const RkhsModel& model, const Vec& coeffs, double tol) {
  const Eigen::Index n = model.gramC.rows();
  if (coeffs.size() != n)
    throw ArgumentError("rkhs_check: " + std::to_string(coeffs.size()) + " coefficients for a design of " +
                        std::to_string(n));
  Report r;
  r.check = "rkhs_check";
  r.mode = model.cov ? "kernel-evaluation" : "gram";
  r.tolerance = tol;

  const Vec inner = model.gramC * coeffs;  // (f, C(t_k, .))_H
  Vec pointwise(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double c = model.cov ? model.cov(model.design[static_cast<std::size_t>(j)],
                                             model.design[static_cast<std::size_t>(k)])
                                 : model.gramC(j, k);
      acc += coeffs[j] * c;
    }
    pointwise[k] = acc;
  }
  const double scale = std::max(1.0, coeffs.cwiseAbs().sum() * model.gramC.cwiseAbs().maxCoeff());
  r.max_abs_diff = (inner - pointwise).cwiseAbs().maxCoeff();
  const double norm2 = coeffs.dot(inner);
  const bool norm_ok = norm2 >= -tol * scale;
  r.stats = {{"reproducing_residual", number(r.max_abs_diff)},
             {"residual_scale", scale},
             {"norm_squared", number(norm2)},
             {"rank", model.rank},
             {"design_size", n}};
  r.set_pass(r.max_abs_diff <= tol * scale && norm_ok);
  return r;
}

Vec linear_extend(const RkhsModel& model, const Vec& target_values) {
  if (target_values.size() != model.gramC.rows())
    throw ArgumentError("linear_extend: target has the wrong length");
  const Vec alpha = model.pseudo_inverse * target_values;
  const double residual = (model.gramC * alpha - target_values).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, target_values.cwiseAbs().maxCoeff());
  if (!(residual <= 1e-8 * scale))
    throw ArgumentError("not representable on this design (residual " + std::to_string(residual) + ")");
  return alpha;
}

// ---------------------------------------------------------------------------

LinearForm LinearForm::symbol(std::size_t id) {
  LinearForm f;
  f.terms_[id] = 1;
  return f;
}

LinearForm LinearForm::operator+(const LinearForm& o) const {
  LinearForm out = *this;
  for (const auto& [id, m] : o.terms_) {
    auto& slot = out.terms_[id];
    slot += m;
    if (slot == 0) out.terms_.erase(id);
  }
  return out;
}

LinearForm LinearForm::operator-(const LinearForm& o) const {
  LinearForm neg;
  for (const auto& [id, m] : o.terms_) neg.terms_[id] = -m;
  return *this + neg;
}

Vec LinearForm::evaluate(std::span<const Vec> basis) const {
  if (basis.empty()) throw ArgumentError("LinearForm: empty basis");
  Vec out = Vec::Zero(basis.front().size());
  for (const auto& [id, m] : terms_) {
    if (id >= basis.size()) throw ArgumentError("LinearForm: symbol out of range");
    out += static_cast<double>(m) * basis[id];
  }
  return out;
}

Report linear_si2_check(std::span<const Vec> elements,
                        std::span<const std::pair<std::size_t, std::size_t>> pairs,
                        std::span<const std::size_t> shifts) {
  if (elements.empty() || pairs.empty() || shifts.empty())
    throw ArgumentError("linear_si2_check: needs elements, pairs and shifts");
  Report r;
  r.check = "linear_si2_check";
  r.mode = "coefficient-level";
  r.tolerance = 0.0;
  bool forms_equal = true;
  for (std::size_t h : shifts) {
    for (const auto& [f, g] : pairs) {
      const auto sf = LinearForm::symbol(f), sg = LinearForm::symbol(g), sh = LinearForm::symbol(h);
      const LinearForm shifted = (sf + sh) - (sg + sh);
      const LinearForm plain = sf - sg;
      forms_equal = forms_equal && shifted == plain;
      const double d = (shifted.evaluate(elements) - plain.evaluate(elements)).cwiseAbs().maxCoeff();
      r.max_abs_diff = std::max(r.max_abs_diff, d);
    }
  }
  r.stats = {{"pairs", pairs.size()}, {"shifts", shifts.size()}, {"forms_equal", forms_equal}};
  r.set_pass(forms_equal && r.max_abs_diff == 0.0);
  return r;
}

// ---------------------------------------------------------------------------

std::string to_string(CharMode m) { return m == CharMode::p31 ? "P31" : "P32"; }

namespace {

double weighted_norm(const Vec& weights, const Vec& f) {
  if (weights.size() == 0) return f.norm();
  if (weights.size() != f.size()) throw ArgumentError("characterize: element length does not match weights");
  return std::sqrt(weighted_dot(weights, f, f));
}

}  // namespace

CharacterizeResult characterize_fractional(std::span<const PhiSample> phi_samples,
                                           std::span<const CovSample> cov_samples,
                                           const Vec& weights, CharMode mode) {
  if (phi_samples.size() < 4) throw ArgumentError("characterize: needs at least 4 phi samples");
  if (cov_samples.empty()) throw ArgumentError("characterize: needs at least one cov sample");
  const Eigen::Index dim = phi_samples.front().first.size();
  auto check_elem = [&](const Vec& v) {
    if (v.size() != dim || !v.allFinite()) throw ArgumentError("characterize: inconsistent index elements");
  };

  CharacterizeResult out;
  Report& r = out.report;
  r.check = "characterize_fractional";
  r.mode = to_string(mode);
  r.tolerance = 1e-8;

  std::vector<double> norms, phis;
  for (const auto& [f, phi] : phi_samples) {
    check_elem(f);
    const double n = weighted_norm(weights, f);
    if (!(n > 0.0)) throw ArgumentError("characterize: phi samples need nonzero elements");
    norms.push_back(n);
    phis.push_back(phi);
  }
  {
    std::vector<double> sorted = norms;
    std::sort(sorted.begin(), sorted.end());
    const auto distinct = std::unique(sorted.begin(), sorted.end(),
                                      [](double a, double b) { return std::abs(a - b) <= 1e-12 * b; }) -
                          sorted.begin();
    if (distinct < 4) throw ArgumentError("characterize: needs at least 4 distinct norms");
  }
  for (const auto& [a, b, c] : cov_samples) {
    check_elem(a);
    check_elem(b);
    if (!std::isfinite(c)) throw ArgumentError("characterize: non-finite covariance sample");
  }

  auto reject = [&](const std::string& why) {
    out.accept = false;
    r.pass = false;
    r.verdict = "reject";
    r.stats["reason"] = why;
    return out;
  };

  if (std::any_of(phis.begin(), phis.end(), [](double p) { return !(p > 0.0) || !std::isfinite(p); }))
    return reject("phi is not positive at nonzero elements");

  // (a) log Phi = log sigma^2 + 2h log ||f||.
  const PowerFit fit = exponent_fit(norms, phis);
  out.norm_exponent = fit.slope;
  out.fitted_order = fit.slope / 2.0;
  out.kernel_H = fit.slope / 4.0;
  out.ss2_order = out.kernel_H;
  out.sigma2 = std::exp(fit.intercept);
  r.stats = {{"fitted_order", out.fitted_order},
             {"norm_exponent", out.norm_exponent},
             {"kernel_H", out.kernel_H},
             {"ss1_order", out.fitted_order},
             {"ss2_order", out.ss2_order},
             {"sigma2", out.sigma2},
             {"log_fit_max_residual", number(fit.max_residual)}};
  r.details.push_back({{"convention", "Phi(f) = sigma2 * ||f||^norm_exponent"},
                       {"fitted_order", "h = norm_exponent / 2 (SS1 order)"},
                       {"kernel_H", "norm_exponent / 4, so Phi(u) = m(u^2)^{2 kernel_H}"},
                       {"ss2_order", "kernel_H"}});
  if (fit.max_residual > 1e-8) {
    r.max_abs_diff = fit.max_residual;
    return reject("phi is not a power of the norm (log residual above 1e-8)");
  }

  // (b) covariance structure with the fitted variogram.
  auto phi_model = [&](const Vec& u) {
    const double n = weighted_norm(weights, u);
    return n == 0.0 ? 0.0 : out.sigma2 * std::pow(n, out.norm_exponent);
  };
  double worst_rel = 0.0;
  for (const auto& [a, b, c] : cov_samples) {
    const double pa = phi_model(a), pb = phi_model(b), pab = phi_model(a - b);
    const double model = 0.5 * (pa + pb - pab);
    const double scale = std::max(0.5 * (std::abs(pa) + std::abs(pb) + std::abs(pab)),
                                  std::numeric_limits<double>::min());
    worst_rel = std::max(worst_rel, std::abs(c - model) / scale);
  }
  r.stats["cov_max_rel_residual"] = number(worst_rel);
  r.max_abs_diff = std::max(fit.max_residual, worst_rel);
  if (worst_rel > 1e-8) return reject("covariance is not 1/2 (Phi(a) + Phi(b) - Phi(a - b))");

  // Soundness diagnostic: model Gram over the phi sample elements.
  std::vector<Vec> pts;
  for (const auto& s : phi_samples) pts.push_back(s.first);
  const auto np = static_cast<Eigen::Index>(pts.size());
  Mat g(np, np);
  for (Eigen::Index i = 0; i < np; ++i)
    for (Eigen::Index j = 0; j < np; ++j) {
      const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
      g(i, j) = 0.5 * (phi_model(pts[ui]) + phi_model(pts[uj]) - phi_model(pts[ui] - pts[uj]));
    }
  const Gram sg = make_gram(0.5 * (g + g.transpose()));
  r.stats["sample_gram_min_eig"] = number(sg.min_eig);
  r.stats["sample_gram_psd"] = is_psd(sg);
  r.stats["kernel_H_in_valid_range"] = out.kernel_H > 0.0 && out.kernel_H <= 0.5;

  out.accept = true;
  r.pass = true;
  r.verdict = "accept";
  return out;
}

}  // namespace l2field
