#pragma once

// Shared numerical kernels: Gauss-Kronrod panels and adaptive quadrature on a
// real interval, an embedded Dormand-Prince 5(4) step, dense polynomial
// utilities with an Aberth-Ehrlich root finder, a pivoted determinant, and
// trigonometric interpolation of polynomial coefficients from circle samples.

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "specgraph/core.hpp"

namespace specgraph {

// ---------------------------------------------------------------------------
// Gauss-Kronrod 7/15.
// ---------------------------------------------------------------------------

namespace gk {

inline constexpr double xgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0};

inline constexpr double wgk[8] = {
    0.02293532201052922, 0.06309209262997855, 0.10479001032225018,
    0.14065325971552591, 0.16900472663926790, 0.19035057806478540,
    0.20443294007529889, 0.20948214108472783};

inline constexpr double wg[4] = {
    0.12948496616886969, 0.27970539148927666, 0.38183005050511894,
    0.41795918367346939};

struct Panel {
  Cx k15;      // 15-point Kronrod estimate
  Cx g7;       // embedded 7-point Gauss estimate
  double l1;   // Kronrod estimate of integral of |f|
};

// Evaluate one Kronrod panel of f over [a, b].
template <class F>
Panel eval_panel(F&& f, double a, double b) {
  const double h = 0.5 * (b - a);
  const double c = 0.5 * (a + b);
  Cx k15{}, g7{};
  double l1 = 0;
  for (int i = 0; i < 7; ++i) {
    Cx fp = f(c + h * xgk[i]);
    Cx fm = f(c - h * xgk[i]);
    k15 += wgk[i] * (fp + fm);
    l1 += wgk[i] * (std::abs(fp) + std::abs(fm));
    if (i % 2 == 1) g7 += wg[(i - 1) / 2] * (fp + fm);
  }
  Cx fc = f(c);
  k15 += wgk[7] * fc;
  l1 += wgk[7] * std::abs(fc);
  g7 += wg[3] * fc;
  return {k15 * h, g7 * h, l1 * std::abs(h)};
}

}  // namespace gk

struct QuadOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int max_depth = 30;
};

namespace detail {

template <class F>
void quad_recurse(F& f, double a, double b, const gk::Panel& p,
                  double tol_per_len, int depth, const QuadOptions& opt,
                  Cx& acc) {
  double err = std::abs(p.k15 - p.g7);
  if (!std::isfinite(err)) err = 1e300;
  double allow = tol_per_len * (b - a);
  if (err <= allow || depth >= opt.max_depth) {
    if (err > 64 * allow)
      throw QuadratureFailure("adaptive quadrature: tolerance not reached");
    acc += p.k15;
    return;
  }
  double m = 0.5 * (a + b);
  auto left = gk::eval_panel(f, a, m);
  auto right = gk::eval_panel(f, m, b);
  quad_recurse(f, a, m, left, tol_per_len, depth + 1, opt, acc);
  quad_recurse(f, m, b, right, tol_per_len, depth + 1, opt, acc);
}

}  // namespace detail

// Adaptive quadrature of a complex-valued integrand over [a, b].
template <class F>
Cx integrate_adaptive(F&& f, double a, double b, const QuadOptions& opt = {}) {
  if (a == b) return Cx{};
  auto first = gk::eval_panel(f, a, b);
  double scale =
      std::max({std::abs(first.k15), 1e-2 * first.l1, opt.abs_tol});
  if (!std::isfinite(scale)) scale = std::max(opt.abs_tol, 1.0);
  double tol_per_len = std::max(opt.abs_tol, opt.rel_tol * scale) /
                       std::abs(b - a);
  Cx acc{};
  detail::quad_recurse(f, a, b, first, tol_per_len, 0, opt, acc);
  return acc;
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4) embedded step on a fixed-size complex state.
// ---------------------------------------------------------------------------

// The element type C defaults to Cx; any type with +, -, and scaling by
// double works (the oracle substitutes a double-double complex).
template <std::size_t N, class C = Cx>
using CxN = std::array<C, N>;

namespace detail {

template <std::size_t N, class C>
CxN<N, C> axpy(const CxN<N, C>& y, double h,
               std::initializer_list<double> coef,
               const std::array<CxN<N, C>, 7>& k, int stages) {
  CxN<N, C> out = y;
  int s = 0;
  for (double c : coef) {
    if (s >= stages) break;
    if (c != 0.0)
      for (std::size_t i = 0; i < N; ++i) out[i] += (h * c) * k[s][i];
    ++s;
  }
  return out;
}

}  // namespace detail

template <std::size_t N, class C = Cx>
struct Dp5Step {
  CxN<N, C> y5;      // fifth-order solution at t + h
  CxN<N, C> err;     // y5 - y4 embedded error estimate
  CxN<N, C> k_last;  // derivative at (t + h, y5); next step's first stage
};

// One embedded step. k1 must hold f(t, y); the returned k_last can be fed
// back in as k1 of the following step.
template <std::size_t N, class C, class F>
Dp5Step<N, C> dp5_step(F&& f, double t, const CxN<N, C>& y,
                       const CxN<N, C>& k1, double h) {
  std::array<CxN<N, C>, 7> k;
  k[0] = k1;
  k[1] = f(t + 0.2 * h, detail::axpy<N>(y, h, {0.2}, k, 1));
  k[2] = f(t + 0.3 * h, detail::axpy<N>(y, h, {3.0 / 40, 9.0 / 40}, k, 2));
  k[3] = f(t + 0.8 * h,
           detail::axpy<N>(y, h, {44.0 / 45, -56.0 / 15, 32.0 / 9}, k, 3));
  k[4] = f(t + 8.0 / 9 * h,
           detail::axpy<N>(y, h,
                           {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561,
                            -212.0 / 729},
                           k, 4));
  k[5] = f(t + h, detail::axpy<N>(y, h,
                                  {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247,
                                   49.0 / 176, -5103.0 / 18656},
                                  k, 5));
  CxN<N, C> y5 = detail::axpy<N>(
      y, h, {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784,
             11.0 / 84},
      k, 6);
  k[6] = f(t + h, y5);

  static constexpr double b4[7] = {5179.0 / 57600,  0.0,
                                   7571.0 / 16695,  393.0 / 640,
                                   -92097.0 / 339200, 187.0 / 2100,
                                   1.0 / 40};
  CxN<N, C> y4 = y;
  for (int s = 0; s < 7; ++s)
    for (std::size_t i = 0; i < N; ++i) y4[i] += (h * b4[s]) * k[s][i];

  Dp5Step<N, C> out;
  out.y5 = y5;
  for (std::size_t i = 0; i < N; ++i) out.err[i] = y5[i] - y4[i];
  out.k_last = k[6];
  return out;
}

// ---------------------------------------------------------------------------
// Dense polynomials, coefficients ascending in the variable.
// ---------------------------------------------------------------------------

inline Cx poly_eval(const std::vector<Cx>& c, Cx x) {
  Cx v{};
  for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
  return v;
}

// Value and first derivative in one Horner pass.
inline std::pair<Cx, Cx> poly_eval_d(const std::vector<Cx>& c, Cx x) {
  Cx v{}, d{};
  for (std::size_t i = c.size(); i-- > 0;) {
    d = d * x + v;
    v = v * x + c[i];
  }
  return {v, d};
}

inline std::vector<Cx> poly_derivative(const std::vector<Cx>& c) {
  if (c.size() <= 1) return {Cx{}};
  std::vector<Cx> d(c.size() - 1);
  for (std::size_t i = 1; i < c.size(); ++i) d[i - 1] = double(i) * c[i];
  return d;
}

inline int poly_degree(const std::vector<Cx>& c, double drop_tol = 0.0) {
  double m = 0;
  for (const Cx& v : c) m = std::max(m, std::abs(v));
  int n = int(c.size()) - 1;
  while (n > 0 && std::abs(c[n]) <= drop_tol * m) --n;
  return n;
}

// Roots of the two lowest-degree cases, kept numerically tame.
namespace detail {

inline std::vector<Cx> quadratic_roots(Cx c0, Cx c1, Cx c2) {
  Cx sq = std::sqrt(c1 * c1 - 4.0 * c2 * c0);
  Cx q = (std::norm(c1 + sq) >= std::norm(c1 - sq)) ? -0.5 * (c1 + sq)
                                                    : -0.5 * (c1 - sq);
  if (q == Cx{}) return {Cx{}, Cx{}};
  return {q / c2, c0 / q};
}

}  // namespace detail

// All complex roots by Aberth-Ehrlich iteration with Newton polish.
// Exact multiple roots come out as clusters of nearly equal values; callers
// that care about multiplicity merge them.
inline std::vector<Cx> poly_roots(std::vector<Cx> c, double tol = 1e-13) {
  while (c.size() > 1 && c.back() == Cx{}) c.pop_back();
  int n = int(c.size()) - 1;
  if (n <= 0) return {};
  if (n == 1) return {-c[0] / c[1]};
  if (n == 2) return detail::quadratic_roots(c[0], c[1], c[2]);

  Cx lead = c.back();
  for (Cx& v : c) v /= lead;
  double bound = 0;
  for (int j = 0; j < n; ++j) bound = std::max(bound, std::abs(c[j]));
  double r0 = 1.0 + bound;

  std::vector<Cx> z(n);
  for (int i = 0; i < n; ++i) {
    double th = 2 * pi * i / n + 0.4;
    z[i] = 0.5 * r0 * Cx(std::cos(th), std::sin(th));
  }

  double best = 1e300;
  int stale = 0;
  for (int it = 0; it < 400; ++it) {
    double worst = 0;
    for (int i = 0; i < n; ++i) {
      auto [p, dp] = poly_eval_d(c, z[i]);
      if (p == Cx{}) continue;
      if (dp == Cx{}) {
        z[i] += Cx(1e-8, 1e-8) * (1.0 + std::abs(z[i]));
        worst = 1;
        continue;
      }
      Cx ratio = p / dp;
      Cx sum{};
      for (int j = 0; j < n; ++j)
        if (j != i) sum += 1.0 / (z[i] - z[j]);
      Cx denom = 1.0 - ratio * sum;
      Cx w = (denom == Cx{}) ? ratio : ratio / denom;
      z[i] -= w;
      worst = std::max(worst, std::abs(w) / (1.0 + std::abs(z[i])));
    }
    if (worst < tol) break;
    if (worst < 0.5 * best) {
      best = worst;
      stale = 0;
    } else if (++stale > 40) {
      break;  // stagnating cluster around a multiple root
    }
  }

  for (int i = 0; i < n; ++i) {
    for (int s = 0; s < 3; ++s) {
      auto [p, dp] = poly_eval_d(c, z[i]);
      if (dp == Cx{}) break;
      Cx w = p / dp;
      if (std::abs(w) > 0.1 * (1.0 + std::abs(z[i]))) break;
      z[i] -= w;
    }
  }
  return z;
}

// ---------------------------------------------------------------------------
// Determinant by Gaussian elimination with partial pivoting.
// ---------------------------------------------------------------------------

inline Cx matrix_det(std::vector<std::vector<Cx>> m) {
  std::size_t n = m.size();
  Cx det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    double best = std::abs(m[col][col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      double v = std::abs(m[r][col]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == 0.0) return Cx{};
    if (piv != col) {
      std::swap(m[piv], m[col]);
      det = -det;
    }
    det *= m[col][col];
    for (std::size_t r = col + 1; r < n; ++r) {
      Cx factor = m[r][col] / m[col][col];
      if (factor == Cx{}) continue;
      for (std::size_t k = col; k < n; ++k) m[r][k] -= factor * m[col][k];
    }
  }
  return det;
}

// ---------------------------------------------------------------------------
// Recover coefficients of a polynomial of known degree bound from samples on
// a circle of given radius, by a direct discrete Fourier sum.
// ---------------------------------------------------------------------------

template <class F>
std::vector<Cx> fit_poly_on_circle(F&& f, int degree_bound, double radius) {
  int m = 2 * (degree_bound + 1);
  std::vector<Cx> samples(m);
  for (int j = 0; j < m; ++j) {
    double th = 2 * pi * j / m;
    samples[j] = f(radius * Cx(std::cos(th), std::sin(th)));
  }
  std::vector<Cx> coef(degree_bound + 1);
  for (int k = 0; k <= degree_bound; ++k) {
    Cx acc{};
    for (int j = 0; j < m; ++j) {
      double th = -2 * pi * j * k / m;
      acc += samples[j] * Cx(std::cos(th), std::sin(th));
    }
    coef[k] = acc / (double(m) * std::pow(radius, k));
  }
  return coef;
}

}  // namespace specgraph
