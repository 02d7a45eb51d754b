#include "l2field/measure_space.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "l2field/errors.hpp"

namespace l2field {

MeasureSpace::MeasureSpace(Mat atoms, Vec weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)), total_mass_(0.0) {
  if (atoms_.rows() == 0 || atoms_.cols() == 0)
    throw ArgumentError("measure space needs at least one atom of positive dimension");
  if (weights_.size() != atoms_.rows())
    throw ArgumentError("measure space: " + std::to_string(weights_.size()) + " weights for " +
                        std::to_string(atoms_.rows()) + " atoms");
  if (!atoms_.allFinite()) throw ArgumentError("measure space: non-finite atom coordinate");
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i]))
      throw ArgumentError("measure space: weights must be finite and strictly positive");
  }
  total_mass_ = weights_.sum();
  if (!std::isfinite(total_mass_)) throw ArgumentError("measure space: total mass is not finite");
}

SpacePtr make_grid_space(int d, long long n_per_axis, double extent, std::size_t atom_budget) {
  if (d < 1 || n_per_axis < 1 || !(extent > 0.0) || !std::isfinite(extent))
    throw ArgumentError("grid space: dimension, cells per axis and extent must be positive");
  const double atoms_wanted = std::pow(static_cast<double>(n_per_axis), d);
  if (atoms_wanted > static_cast<double>(atom_budget))
    throw ResourceError("grid space: " + std::to_string(n_per_axis) + "^" + std::to_string(d) +
                        " atoms exceeds the budget of " + std::to_string(atom_budget));
  const auto n_atoms = static_cast<Eigen::Index>(atoms_wanted);
  const double h = extent / static_cast<double>(n_per_axis);

  Mat atoms(n_atoms, d);
  for (Eigen::Index a = 0; a < n_atoms; ++a) {
    Eigen::Index rem = a;
    for (int k = d - 1; k >= 0; --k) {
      const Eigen::Index idx = rem % n_per_axis;
      rem /= n_per_axis;
      atoms(a, k) = (static_cast<double>(idx) + 0.5) * h;
    }
  }
  Vec weights = Vec::Constant(n_atoms, std::pow(h, d));
  return std::make_shared<const MeasureSpace>(std::move(atoms), std::move(weights));
}

L2Vec::L2Vec(SpacePtr space, Vec coeffs) : space_(std::move(space)), coeffs_(std::move(coeffs)) {
  if (!space_) throw ArgumentError("L2 vector without a measure space");
  if (coeffs_.size() != space_->size())
    throw ArgumentError("L2 vector has " + std::to_string(coeffs_.size()) +
                        " coefficients for a space of " + std::to_string(space_->size()) +
                        " atoms");
  if (!coeffs_.allFinite()) throw ArgumentError("L2 vector has non-finite coefficients");
}

namespace {
void require_same_space(const L2Vec& f, const L2Vec& g) {
  if (f.space() != g.space()) throw ArgumentError("L2 vectors are bound to different spaces");
}
}  // namespace

L2Vec L2Vec::operator+(const L2Vec& other) const {
  require_same_space(*this, other);
  return {space_, coeffs_ + other.coeffs_};
}

L2Vec L2Vec::operator-(const L2Vec& other) const {
  require_same_space(*this, other);
  return {space_, coeffs_ - other.coeffs_};
}

L2Vec L2Vec::operator*(double c) const { return {space_, coeffs_ * c}; }

double weighted_dot(const Vec& weights, const Vec& f, const Vec& g) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) acc += weights[i] * f[i] * g[i];
  return acc;
}

double l2_dot(const MeasureSpace& space, const L2Vec& f, const L2Vec& g) {
  if (f.space().get() != &space || g.space().get() != &space)
    throw ArgumentError("l2_dot: vectors are not bound to the given space");
  return weighted_dot(space.weights(), f.coeffs(), g.coeffs());
}

double l2_dot(const L2Vec& f, const L2Vec& g) {
  require_same_space(f, g);
  return l2_dot(*f.space(), f, g);
}

Rect::Rect(Vec c) : corner(std::move(c)) {
  if (corner.size() == 0) throw ArgumentError("rectangle corner has dimension 0");
  for (Eigen::Index i = 0; i < corner.size(); ++i) {
    if (!std::isfinite(corner[i]) || corner[i] < 0.0)
      throw ArgumentError("rectangle corner coordinates must be finite and nonnegative");
  }
}

L2Vec indicator_rect(const SpacePtr& space, const Rect& t) {
  if (!space) throw ArgumentError("indicator_rect: null space");
  if (t.dim() != space->dim())
    throw ArgumentError("indicator_rect: rectangle dimension " + std::to_string(t.dim()) +
                        " vs space dimension " + std::to_string(space->dim()));
  const Mat& atoms = space->atoms();
  Vec coeffs = Vec::Zero(space->size());
  for (Eigen::Index a = 0; a < atoms.rows(); ++a) {
    bool inside = true;
    for (int k = 0; k < t.dim() && inside; ++k) inside = atoms(a, k) < t.corner[k];
    if (inside) coeffs[a] = 1.0;
  }
  return {space, std::move(coeffs)};
}

double rect_volume(const Vec& t) {
  double v = 1.0;
  for (Eigen::Index k = 0; k < t.size(); ++k) v *= t[k];
  return v;
}

Vec rect_meet(const Vec& s, const Vec& t) { return s.cwiseMin(t); }

RectMeasures rect_measures(const Rect& s, const Rect& t) {
  if (s.dim() != t.dim())
    throw ArgumentError("rect_measures: dimension mismatch " + std::to_string(s.dim()) + " vs " +
                        std::to_string(t.dim()));
  RectMeasures r{};
  r.lam_s = rect_volume(s.corner);
  r.lam_t = rect_volume(t.corner);
  r.lam_inter = rect_volume(rect_meet(s.corner, t.corner));
  r.lam_symdiff = std::max(0.0, r.lam_s + r.lam_t - 2.0 * r.lam_inter);
  r.lam_tminus_s = std::max(0.0, r.lam_t - r.lam_inter);
  return r;
}

}  // namespace l2field
