#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <queue>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include "l2field/errors.hpp"
#include "l2field/spectral.hpp"

namespace l2field {
namespace {

// 15-point Kronrod nodes (non-negative half) and weights with the embedded
// 7-point Gauss weights.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double s = f(c - dx) + f(c + dx);
    kron += kWgk[j] * s;
    if (j % 2 == 1) gauss += kWg[j / 2] * s;
  }
  return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

struct Quad {
  double value;
  double error;
};

// Global adaptive bisection: always split the segment with the largest error.
Quad adaptive_gk15(const std::function<double(double)>& f, double a, double b, double abs_tol,
                   double rel_tol, int max_segments = 4000) {
  std::priority_queue<Segment> heap;
  Segment first = gk15(f, a, b);
  heap.push(first);
  double value = first.value;
  double error = first.error;
  int count = 1;
  while (error > std::max(abs_tol, rel_tol * std::abs(value))) {
    if (count >= max_segments)
      throw NumericError("lk quadrature: no convergence after " + std::to_string(count) +
                         " segments");
    Segment s = heap.top();
    heap.pop();
    const double mid = 0.5 * (s.a + s.b);
    Segment l = gk15(f, s.a, mid);
    Segment r = gk15(f, mid, s.b);
    value += l.value + r.value - s.value;
    error += l.error + r.error - s.error;
    heap.push(l);
    heap.push(r);
    count += 2;
  }
  // Re-sum from the pieces to drop the accumulated update rounding.
  double sum = 0.0;
  double err = 0.0;
  std::vector<Segment> pieces;
  while (!heap.empty()) {
    pieces.push_back(heap.top());
    heap.pop();
  }
  std::sort(pieces.begin(), pieces.end(), [](const Segment& x, const Segment& y) { return x.a < y.a; });
  for (const auto& p : pieces) {
    sum += p.value;
    err += p.error;
  }
  return {sum, err};
}

void check_lk_args(double alpha, double xi, double quad_tol) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw ArgumentError("alpha must lie in (0, 2)");
  if (!std::isfinite(xi) || xi == 0.0) throw ArgumentError("xi must be finite and nonzero");
  if (!(quad_tol >= 1e-10)) throw ArgumentError("quad_tol must be >= 1e-10");
}

// Re int_{x0}^inf e^{i xi x} x^{-beta} dx by repeated integration by parts,
// valid when xi * x0 is large compared with beta + terms.
double fourier_tail(double xi, double beta, double x0, int terms) {
  const std::complex<double> ixi(0.0, xi);
  const std::complex<double> e = std::polar(1.0, xi * x0);
  std::complex<double> coef = -e / ixi;
  std::complex<double> sum = 0.0;
  double b = beta;
  for (int k = 0; k < terms; ++k) {
    sum += coef * std::pow(x0, -b);
    coef *= b / ixi;
    b += 1.0;
  }
  return sum.real();
}

}  // namespace

double lk_integral(double alpha, double xi, double quad_tol) {
  check_lk_args(alpha, xi, quad_tol);
  xi = std::abs(xi);
  const double tol = quad_tol * 1e-2;

  // Inner part, int_0^1 2 sin^2(xi x / 2) x^{-1-alpha} dx with x = y^p,
  // p = 1/(2 - alpha): the integrand becomes p * h(y^p), h(x) = 2 sin^2(xi x/2)/x^2.
  const double p = 1.0 / (2.0 - alpha);
  auto inner = [xi, p](double y) {
    const double x = std::pow(y, p);
    if (x == 0.0 || xi * x < 1e-8) return p * 0.5 * xi * xi;
    const double s = std::sin(0.5 * xi * x);
    return p * 2.0 * s * s / (x * x);
  };
  const Quad q_inner = adaptive_gk15(inner, 0.0, 1.0, 0.0, tol);

  // Tail: int_1^inf (1 - cos(xi x)) x^{-1-alpha} dx = 1/alpha - int_1^inf cos(xi x) x^{-1-alpha} dx.
  // Integrate between consecutive zeros of cos(xi x) up to X, then expand.
  const double beta = 1.0 + alpha;
  constexpr int kTerms = 8;
  const double x_cut = std::max(1.0, 60.0 * (beta + kTerms) / xi);
  const double half = std::numbers::pi / xi;
  auto osc = [xi, beta](double x) { return std::cos(xi * x) * std::pow(x, -beta); };
  double k0 = std::ceil(1.0 / half - 0.5);
  double left = 1.0;
  double tail = 0.0;
  double tail_err = 0.0;
  for (double k = k0;; k += 1.0) {
    double right = (k + 0.5) * half;
    if (right <= left) continue;
    const Quad piece = adaptive_gk15(osc, left, right, tol * 1e-2, tol);
    tail += piece.value;
    tail_err += piece.error;
    left = right;
    if (left >= x_cut) break;
  }
  tail += fourier_tail(xi, beta, left, kTerms);

  const double total = q_inner.value + 1.0 / alpha - tail;
  (void)tail_err;
  return 4.0 * total;
}

double lk_integral_reference(double alpha, double xi, double quad_tol) {
  check_lk_args(alpha, xi, quad_tol);
  xi = std::abs(xi);
  gsl_error_handler_t* old = gsl_set_error_handler_off();
  struct Params {
    double alpha, xi;
  } prm{alpha, xi};

  constexpr std::size_t kLimit = 2000;
  gsl_integration_workspace* ws = gsl_integration_workspace_alloc(kLimit);
  gsl_integration_workspace* cyc = gsl_integration_workspace_alloc(kLimit);
  gsl_integration_qawo_table* tab = gsl_integration_qawo_table_alloc(xi, 1.0, GSL_INTEG_COSINE, 50);

  gsl_function f_inner;
  f_inner.function = [](double x, void* v) {
    const auto* q = static_cast<Params*>(v);
    const double s = std::sin(0.5 * q->xi * x);
    return 2.0 * s * s * std::pow(x, -1.0 - q->alpha);
  };
  f_inner.params = &prm;
  gsl_function f_tail;
  f_tail.function = [](double x, void* v) {
    return std::pow(x, -1.0 - static_cast<Params*>(v)->alpha);
  };
  f_tail.params = &prm;

  double inner = 0.0, inner_err = 0.0, tail = 0.0, tail_err = 0.0;
  int s1 = gsl_integration_qags(&f_inner, 0.0, 1.0, 0.0, quad_tol, kLimit, ws, &inner, &inner_err);
  int s2 = gsl_integration_qawf(&f_tail, 1.0, quad_tol, kLimit, ws, cyc, tab, &tail, &tail_err);

  gsl_integration_qawo_table_free(tab);
  gsl_integration_workspace_free(cyc);
  gsl_integration_workspace_free(ws);
  gsl_set_error_handler(old);

  if (s1 != GSL_SUCCESS || s2 != GSL_SUCCESS)
    throw NumericError(std::string("reference quadrature: ") + gsl_strerror(s1 ? s1 : s2));
  return 4.0 * (inner + 1.0 / alpha - tail);
}

double lk_closed_form(double alpha, double xi) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw ArgumentError("alpha must lie in (0, 2)");
  const double scale = 4.0 * std::pow(std::abs(xi), alpha);
  if (alpha == 1.0) return scale * std::numbers::pi / 2.0;
  return scale * std::tgamma(1.0 - alpha) * std::cos(std::numbers::pi * alpha / 2.0) / alpha;
}

}  // namespace l2field
