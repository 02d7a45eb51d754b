#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

/// Cyclic Jacobi rotations on a copy of a symmetric matrix; returns the
/// eigenvalues in ascending order.
inline std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a, int max_sweeps = 100) {
  const Eigen::Index n = a.rows();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30 * std::max(1.0, a.squaredNorm())) break;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

inline double jacobi_min_eig(const Eigen::MatrixXd& a) { return jacobi_eigenvalues(a).front(); }

/// Plain fBm covariance.
inline double fbm_cov(double H, double s, double t) {
  return 0.5 * (std::pow(std::abs(s), 2 * H) + std::pow(std::abs(t), 2 * H) - std::pow(std::abs(t - s), 2 * H));
}

/// Lebesgue measure of [0, a] symdiff [0, b] by counting on a fine midpoint
/// grid (d = 2), used to cross-check the exact rectangle calculus.
inline double grid_symdiff_2d(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double extent, int n) {
  const double h = extent / n;
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = (i + 0.5) * h, y = (j + 0.5) * h;
      const bool in_a = x < a(0) && y < a(1), in_b = x < b(0) && y < b(1);
      if (in_a != in_b) acc += h * h;
    }
  return acc;
}

}  // namespace oracle
