#include "l2field/kernels.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "l2field/errors.hpp"

namespace l2field {

namespace {

void require_hurst(double H, double hi, bool hi_inclusive, const char* what) {
  const bool ok = H > 0.0 && (hi_inclusive ? H <= hi : H < hi) && std::isfinite(H);
  if (!ok) {
    std::ostringstream os;
    os << what << ": H=" << H << " outside (0, " << hi << (hi_inclusive ? "]" : ")");
    throw ArgumentError(os.str());
  }
}

// (0, 1/2] normally, (0, 1) behind the experimental flag.
void require_half_range(double H, bool experimental, const char* what) {
  if (experimental)
    require_hurst(H, 1.0, false, what);
  else
    require_hurst(H, 0.5, true, what);
}

void require_same_dim(const Vec& s, const Vec& t, const char* what) {
  if (s.size() != t.size())
    throw ArgumentError(std::string(what) + ": dimension mismatch " + std::to_string(s.size()) +
                        " vs " + std::to_string(t.size()));
}

void require_nonnegative(const Vec& s, const char* what) {
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (!(s[k] >= 0.0)) throw ArgumentError(std::string(what) + ": index points must lie in R_+^d");
  }
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::fbm1d: return "fbm1d";
    case Family::levy: return "levy";
    case Family::sheet: return "sheet";
    case Family::mpfbm: return "mpfbm";
    case Family::l2fbm: return "l2fbm";
    case Family::custom_variogram: return "custom_variogram";
  }
  return "?";
}

Family family_from_string(const std::string& name) {
  if (name == "fbm1d") return Family::fbm1d;
  if (name == "levy") return Family::levy;
  if (name == "sheet") return Family::sheet;
  if (name == "mpfbm") return Family::mpfbm;
  if (name == "l2fbm") return Family::l2fbm;
  if (name == "custom_variogram") return Family::custom_variogram;
  throw ArgumentError("unknown kernel family '" + name + "'");
}

Kernel Kernel::fbm1d(double H) {
  require_hurst(H, 1.0, false, "fbm1d");
  Kernel k;
  k.family_ = Family::fbm1d;
  k.H_ = H;
  return k;
}

Kernel Kernel::levy(double H) {
  require_hurst(H, 1.0, false, "levy");
  Kernel k;
  k.family_ = Family::levy;
  k.H_ = H;
  return k;
}

Kernel Kernel::sheet(std::vector<double> Hvec) {
  if (Hvec.empty()) throw ArgumentError("sheet: Hvec must be non-empty");
  for (double h : Hvec) require_hurst(h, 1.0, false, "sheet");
  Kernel k;
  k.family_ = Family::sheet;
  k.Hvec_ = std::move(Hvec);
  return k;
}

Kernel Kernel::mpfbm(double H, bool experimental) {
  require_half_range(H, experimental, "mpfbm");
  Kernel k;
  k.family_ = Family::mpfbm;
  k.H_ = H;
  k.experimental_ = experimental;
  return k;
}

Kernel Kernel::l2fbm(SpacePtr space, double H, bool experimental) {
  if (!space) throw ArgumentError("l2fbm: a measure space is required");
  require_half_range(H, experimental, "l2fbm");
  Kernel k;
  k.family_ = Family::l2fbm;
  k.H_ = H;
  k.space_ = std::move(space);
  k.experimental_ = experimental;
  return k;
}

Kernel Kernel::custom_variogram(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw ArgumentError("custom_variogram: alpha must be a positive real");
  Kernel k;
  k.family_ = Family::custom_variogram;
  k.alpha_ = alpha;
  return k;
}

Eigen::Index Kernel::index_dim() const noexcept {
  switch (family_) {
    case Family::fbm1d: return 1;
    case Family::sheet: return static_cast<Eigen::Index>(Hvec_.size());
    case Family::l2fbm: return space_->size();
    default: return 0;
  }
}

void Kernel::validate_element(const Vec& x) const {
  const Eigen::Index want = index_dim();
  if (x.size() == 0) throw ArgumentError(describe() + ": empty index element");
  if (want != 0 && x.size() != want)
    throw ArgumentError(describe() + ": index element of length " + std::to_string(x.size()) +
                        ", expected " + std::to_string(want));
  if (!x.allFinite()) throw ArgumentError(describe() + ": non-finite index element");
  if (family_ == Family::sheet || family_ == Family::mpfbm) require_nonnegative(x, "kernel");
}

double Kernel::operator()(const Vec& a, const Vec& b) const {
  switch (family_) {
    case Family::fbm1d:
      require_same_dim(a, b, "fbm1d");
      if (a.size() != 1) throw ArgumentError("fbm1d: index points must be scalars");
      return cov_fbm1d(H_, a[0], b[0]);
    case Family::levy: return cov_levy(H_, a, b);
    case Family::sheet: return cov_sheet(Hvec_, a, b);
    case Family::mpfbm: return cov_mpfbm(H_, a, b, experimental_);
    case Family::l2fbm: {
      require_same_dim(a, b, "l2fbm");
      if (a.size() != space_->size()) throw ArgumentError("l2fbm: element not bound to the kernel space");
      const Vec& w = space_->weights();
      const double e = 2.0 * H_;
      const Vec d = a - b;
      return 0.5 * (std::pow(weighted_dot(w, a, a), e) + std::pow(weighted_dot(w, b, b), e) -
                    std::pow(weighted_dot(w, d, d), e));
    }
    case Family::custom_variogram:
      require_same_dim(a, b, "custom_variogram");
      return 0.5 * (variogram(a) + variogram(b) - variogram(a - b));
  }
  return 0.0;
}

bool Kernel::has_variogram() const noexcept {
  return family_ == Family::l2fbm || family_ == Family::levy || family_ == Family::fbm1d ||
         family_ == Family::custom_variogram;
}

double Kernel::variogram(const Vec& u) const {
  switch (family_) {
    case Family::l2fbm: {
      if (u.size() != space_->size()) throw ArgumentError("l2fbm: element not bound to the kernel space");
      return std::pow(weighted_dot(space_->weights(), u, u), 2.0 * H_);
    }
    case Family::levy:
    case Family::fbm1d: return std::pow(u.norm(), 2.0 * H_);
    case Family::custom_variogram: return std::pow(u.norm(), alpha_);
    default: throw ArgumentError(describe() + " has no variogram over a vector-space index");
  }
}

std::string Kernel::describe() const {
  std::ostringstream os;
  os << to_string(family_);
  switch (family_) {
    case Family::sheet:
      os << "(Hvec=[";
      for (std::size_t i = 0; i < Hvec_.size(); ++i) os << (i ? "," : "") << Hvec_[i];
      os << "])";
      break;
    case Family::custom_variogram: os << "(alpha=" << alpha_ << ")"; break;
    default: os << "(H=" << H_ << (experimental_ ? ", experimental" : "") << ")"; break;
  }
  return os.str();
}

double cov_l2fbm(const MeasureSpace& space, double H, const L2Vec& f, const L2Vec& g,
                 bool experimental) {
  require_half_range(H, experimental, "cov_l2fbm");
  const double ff = l2_dot(space, f, f);
  const double gg = l2_dot(space, g, g);
  const L2Vec d = f - g;
  const double dd = l2_dot(space, d, d);
  const double e = 2.0 * H;
  return 0.5 * (std::pow(ff, e) + std::pow(gg, e) - std::pow(dd, e));
}

double cov_levy(double H, const Vec& s, const Vec& t) {
  require_hurst(H, 1.0, false, "cov_levy");
  require_same_dim(s, t, "cov_levy");
  const double e = 2.0 * H;
  return 0.5 * (std::pow(s.norm(), e) + std::pow(t.norm(), e) - std::pow((s - t).norm(), e));
}

double cov_fbm1d(double H, double s, double t) {
  require_hurst(H, 1.0, false, "cov_fbm1d");
  const double e = 2.0 * H;
  return 0.5 * (std::pow(std::abs(s), e) + std::pow(std::abs(t), e) - std::pow(std::abs(s - t), e));
}

double cov_sheet(const std::vector<double>& Hvec, const Vec& s, const Vec& t) {
  require_same_dim(s, t, "cov_sheet");
  if (static_cast<Eigen::Index>(Hvec.size()) != s.size())
    throw ArgumentError("cov_sheet: Hvec has " + std::to_string(Hvec.size()) +
                        " entries for points of dimension " + std::to_string(s.size()));
  require_nonnegative(s, "cov_sheet");
  require_nonnegative(t, "cov_sheet");
  double prod = 1.0;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    const double h = Hvec[static_cast<std::size_t>(k)];
    require_hurst(h, 1.0, false, "cov_sheet");
    const double e = 2.0 * h;
    prod *= 0.5 * (std::pow(s[k], e) + std::pow(t[k], e) - std::pow(std::abs(t[k] - s[k]), e));
  }
  return prod;
}

double cov_mpfbm(double H, const Vec& s, const Vec& t, bool experimental) {
  require_half_range(H, experimental, "cov_mpfbm");
  require_same_dim(s, t, "cov_mpfbm");
  const RectMeasures r = rect_measures(Rect(s), Rect(t));
  const double e = 2.0 * H;
  return 0.5 * (std::pow(r.lam_s, e) + std::pow(r.lam_t, e) - std::pow(r.lam_symdiff, e));
}

double increment_variance(const Kernel& k, const Vec& a, const Vec& b) {
  return k(a, a) + k(b, b) - 2.0 * k(a, b);
}

std::optional<double> family_increment_variance(const Kernel& k, const Vec& a, const Vec& b) {
  switch (k.family()) {
    case Family::sheet: return std::nullopt;
    case Family::mpfbm: {
      const RectMeasures r = rect_measures(Rect(a), Rect(b));
      return std::pow(r.lam_symdiff, 2.0 * k.H());
    }
    default: return k.variogram(a - b);
  }
}

Mat gram_matrix(const Kernel& k, std::span<const Vec> design, Exec exec) {
  if (design.empty()) throw ArgumentError("gram: design is empty");
  const Eigen::Index first_dim = design.front().size();
  for (const Vec& x : design) {
    k.validate_element(x);
    if (x.size() != first_dim) throw ArgumentError("gram: design elements of mixed dimension");
  }
  const auto n = static_cast<Eigen::Index>(design.size());
  Mat m(n, n);
  auto row = [&](Eigen::Index i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double c = k(design[static_cast<std::size_t>(i)], design[static_cast<std::size_t>(j)]);
      m(i, j) = c;
      m(j, i) = c;
    }
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 4)
    for (Eigen::Index i = 0; i < n; ++i) row(i);
  } else {
    for (Eigen::Index i = 0; i < n; ++i) row(i);
  }
  return m;
}

double symmetric_min_eig(const Mat& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericError("symmetric eigensolver did not converge");
  return es.eigenvalues().minCoeff();
}

Gram make_gram(Mat matrix) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0)
    throw ArgumentError("gram: matrix must be square and non-empty");
  if (!matrix.allFinite()) throw NumericError("gram: non-finite entries");
  const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
  if ((matrix - matrix.transpose()).cwiseAbs().maxCoeff() > 1e-14 * scale)
    throw ArgumentError("gram: matrix is not symmetric");
  Gram g;
  g.design_size = matrix.rows();
  g.min_eig = symmetric_min_eig(matrix);
  g.matrix = std::move(matrix);
  return g;
}

Gram gram(const Kernel& k, std::span<const Vec> design, Exec exec) {
  return make_gram(gram_matrix(k, design, exec));
}

Gram gram(const Kernel& k, std::span<const L2Vec> design, Exec exec) {
  if (k.family() != Family::l2fbm) throw ArgumentError("gram: L2 vector designs need an l2fbm kernel");
  std::vector<Vec> coeffs;
  coeffs.reserve(design.size());
  for (const L2Vec& f : design) {
    if (f.space() != k.space()) throw ArgumentError("gram: design vector bound to a different space");
    coeffs.push_back(f.coeffs());
  }
  return gram(k, std::span<const Vec>(coeffs), exec);
}

bool is_psd(const Gram& g) { return g.min_eig >= -kPsdRelTol * std::abs(g.trace()); }

}  // namespace l2field
