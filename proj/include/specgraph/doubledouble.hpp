#pragma once

// Minimal double-double arithmetic (~32 significant digits) for the few
// places where plain double hits a cancellation floor: the two-sided
// shooting state whose subdominant component sits exponentially far below
// the dominant one. Only the operations the integrator needs are provided.
// Error-free transforms follow Dekker/Knuth; the product split avoids fma
// so it stays exact without hardware support.

#include <cmath>
#include <complex>

#include "specgraph/core.hpp"

namespace specgraph {

struct DD {
  double hi = 0, lo = 0;
};

namespace ddop {

inline DD two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

// Requires |a| >= |b| or a == 0.
inline DD fast_two_sum(double a, double b) {
  double s = a + b;
  return {s, b - (s - a)};
}

inline DD two_prod(double a, double b) {
  constexpr double split = 134217729.0;  // 2^27 + 1
  double p = a * b;
  double ca = split * a, ah = ca - (ca - a), al = a - ah;
  double cb = split * b, bh = cb - (cb - b), bl = b - bh;
  double e = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
  return {p, e};
}

inline DD add(DD a, DD b) {
  DD s = two_sum(a.hi, b.hi);
  return fast_two_sum(s.hi, s.lo + a.lo + b.lo);
}

inline DD neg(DD a) { return {-a.hi, -a.lo}; }

inline DD sub(DD a, DD b) { return add(a, neg(b)); }

inline DD mul_d(DD a, double b) {
  DD p = two_prod(a.hi, b);
  return fast_two_sum(p.hi, p.lo + a.lo * b);
}

inline DD mul(DD a, DD b) {
  DD p = two_prod(a.hi, b.hi);
  return fast_two_sum(p.hi, p.lo + a.hi * b.lo + a.lo * b.hi);
}

}  // namespace ddop

// Complex value with double-double components. Arithmetic is limited to
// what a linear ODE right-hand side needs: addition, subtraction, and
// scaling by double or Cx coefficients, plus the full product for the
// final Wronskian.
struct CDD {
  DD re{}, im{};

  CDD() = default;
  explicit CDD(double x) : re{x, 0} {}
  explicit CDD(Cx v) : re{v.real(), 0}, im{v.imag(), 0} {}
};

inline CDD operator+(const CDD& a, const CDD& b) {
  return {ddop::add(a.re, b.re), ddop::add(a.im, b.im)};
}

inline CDD& operator+=(CDD& a, const CDD& b) { return a = a + b; }

inline CDD operator-(const CDD& a, const CDD& b) {
  return {ddop::sub(a.re, b.re), ddop::sub(a.im, b.im)};
}

inline CDD operator*(double s, const CDD& a) {
  return {ddop::mul_d(a.re, s), ddop::mul_d(a.im, s)};
}

inline CDD operator*(const CDD& a, double s) { return s * a; }

inline CDD operator*(const Cx& c, const CDD& a) {
  return {ddop::sub(ddop::mul_d(a.re, c.real()), ddop::mul_d(a.im, c.imag())),
          ddop::add(ddop::mul_d(a.im, c.real()), ddop::mul_d(a.re, c.imag()))};
}

inline CDD operator*(const CDD& a, const CDD& b) {
  return {ddop::sub(ddop::mul(a.re, b.re), ddop::mul(a.im, b.im)),
          ddop::add(ddop::mul(a.re, b.im), ddop::mul(a.im, b.re))};
}

inline Cx to_cx(const CDD& a) { return {a.re.hi + a.re.lo, a.im.hi + a.im.lo}; }

// Down-converted magnitude helpers; full precision is never needed for
// step control or renormalization decisions.
inline double abs(const CDD& a) { return std::abs(to_cx(a)); }

inline double norm(const CDD& a) { return std::norm(to_cx(a)); }

}  // namespace specgraph
