#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <memory>

namespace l2field {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A finite weighted atom set (T, m). Atoms are the rows of an n x d matrix;
/// weights are the per-atom masses. Immutable after construction.
class MeasureSpace {
 public:
  MeasureSpace(Mat atoms, Vec weights);

  int dim() const noexcept { return static_cast<int>(atoms_.cols()); }
  Eigen::Index size() const noexcept { return atoms_.rows(); }
  const Mat& atoms() const noexcept { return atoms_; }
  const Vec& weights() const noexcept { return weights_; }
  double total_mass() const noexcept { return total_mass_; }

 private:
  Mat atoms_;
  Vec weights_;
  double total_mass_;
};

using SpacePtr = std::shared_ptr<const MeasureSpace>;

/// Default cap on the number of atoms a grid space may hold (2^26).
inline constexpr std::size_t kDefaultAtomBudget = std::size_t{1} << 26;

/// Uniform grid of cell centres on [0, extent]^d, weight (extent/n)^d per atom.
/// Atom ordering: the first axis varies slowest.
SpacePtr make_grid_space(int d, long long n_per_axis, double extent,
                         std::size_t atom_budget = kDefaultAtomBudget);

/// Element of L^2(T, m): one real coefficient per atom of its space.
class L2Vec {
 public:
  L2Vec(SpacePtr space, Vec coeffs);

  const SpacePtr& space() const noexcept { return space_; }
  const Vec& coeffs() const noexcept { return coeffs_; }
  Eigen::Index size() const noexcept { return coeffs_.size(); }

  L2Vec operator+(const L2Vec& other) const;
  L2Vec operator-(const L2Vec& other) const;
  L2Vec operator*(double c) const;

 private:
  SpacePtr space_;
  Vec coeffs_;
};

/// m(f g) = sum_i w_i f_i g_i.
double l2_dot(const MeasureSpace& space, const L2Vec& f, const L2Vec& g);
double l2_dot(const L2Vec& f, const L2Vec& g);

/// Raw-coefficient version used by the kernels: no binding checks.
double weighted_dot(const Vec& weights, const Vec& f, const Vec& g);

/// Anchored rectangle [0, corner] in R_+^d.
struct Rect {
  explicit Rect(Vec corner);
  Vec corner;
  int dim() const noexcept { return static_cast<int>(corner.size()); }
};

/// Indicator of [0, t]: coefficient 1 at atoms strictly below t in every
/// coordinate.
L2Vec indicator_rect(const SpacePtr& space, const Rect& t);

struct RectMeasures {
  double lam_s;
  double lam_t;
  double lam_inter;
  double lam_symdiff;
  double lam_tminus_s;
};

/// Exact Lebesgue calculus for two anchored rectangles.
RectMeasures rect_measures(const Rect& s, const Rect& t);

/// Lebesgue measure of [0, t].
double rect_volume(const Vec& t);

/// Componentwise minimum (corner of [0,s] n [0,t]).
Vec rect_meet(const Vec& s, const Vec& t);

}  // namespace l2field
