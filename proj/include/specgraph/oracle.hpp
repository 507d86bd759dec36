#pragma once

// Direct numerical eigensolver used to validate the asymptotic machinery:
// the characteristic determinant Delta(lambda) is evaluated by shooting
// y'' = k^2 P(z, lambda) y from both endpoints with y = 0 there and taking
// the Wronskian of the two solutions where they meet. Eigenvalues are
// located by argument-principle winding counts over a cell grid, then
// polished by Newton on log Delta. The determinant grows like e^{k |Re B|},
// so values are carried in log-scaled form throughout.
//
// The two shots meet near the turning-point region: a single shot that
// crosses it loses relative accuracy like e^{k g} (g the exponential gap
// accumulated past the dominance flip), while each one-sided shot stays
// inside one dominance regime. The Wronskian of two solutions of the
// second-order equation is independent of the evaluation point, so the
// meeting point affects only the conditioning, never the value.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "specgraph/core.hpp"
#include "specgraph/numerics.hpp"
#include "specgraph/phase.hpp"
#include "specgraph/potential.hpp"

namespace specgraph {

struct ProblemInstance {
  BivariatePotential potential;
  BoundaryPoint a, b;
  double k = 1;
  // Truncation radius replacing infinite endpoints; 0 derives it from the
  // turning point spread at the evaluation parameter.
  double r_trunc = 0;
};

// value = mantissa * exp(log_factor), |mantissa| in [1, e) unless the
// value is exactly zero.
struct LogScaledValue {
  Cx mantissa{};
  double log_factor = 0;

  double log_abs() const {
    return std::log(std::abs(mantissa)) + log_factor;
  }
};

inline LogScaledValue log_scaled(Cx v, double log_factor = 0) {
  if (v == Cx{}) return {Cx{}, 0};
  double s = std::floor(std::log(std::abs(v)));
  return {v * std::exp(-s), log_factor + s};
}

struct OracleEigenvalue {
  Cx lambda;
  double k = 0;
  int winding_index = 1;
  double refine_residual = 0;  // Wronskian mismatch of the two shots, ~0 here
};

struct OracleOptions {
  double rtol = 1e-10;    // ODE relative tolerance
  double eps_orc = 1e-7;  // acceptance for the relative residual
  double eps_tp = 1e-6;   // proximity that flags a turning point warning
  int edge_samples = 16;  // uniform base samples per cell edge
  int edge_depth = 10;    // halvings per edge interval during unwrapping
  int max_subdiv = 10;    // cell isolation depth
  int max_newton = 40;
};

struct OracleDiagnostics {
  long det_evals = 0;
  int unresolved_cells = 0;
  int newton_failures = 0;
  bool segment_near_turning_point = false;
};

namespace detail {

template <class C>
struct ShotT {
  C y{}, yp{};        // renormalized state at the far endpoint
  double growth = 0;  // accumulated rescaling, natural log
};

inline double norm_d(const Cx& v) { return std::norm(v); }
inline double norm_d(const CDD& v) { return norm(v); }
inline double abs_d(const Cx& v) { return std::abs(v); }
inline double abs_d(const CDD& v) { return abs(v); }

// Integrate y'' = k^2 P(z, lambda) y along the straight segment [za, zb]
// with y = 0, y' = 1 at za, renormalizing the state whenever its magnitude
// leaves [e^{-2}, e^2]. The state type C is Cx or, when the Wronskian
// cancellation exceeds double precision, the double-double CDD; step
// control and renormalization always run in double, which only rescales
// the state and cannot mix its dominant part into the subdominant one.
template <class C>
ShotT<C> shoot(const BivariatePotential& pot, Cx lambda, double k, Cx za,
               Cx zb, double rtol) {
  double len = std::abs(zb - za);
  Cx dir = (zb - za) / len;
  Cx d2k2 = dir * dir * k * k;
  auto f = [&](double t, const CxN<2, C>& u) -> CxN<2, C> {
    Cx z = za + t * dir;
    return {u[1], (d2k2 * pot.eval(z, lambda)) * u[0]};
  };

  CxN<2, C> u = {C{}, C{1.0}};
  double growth = 0;
  double t = 0;
  double h = len * std::min(1e-2, 1.0 / (1.0 + k));
  CxN<2, C> k1 = f(t, u);
  while (len - t > len * 1e-14) {
    h = std::min(h, len - t);
    if (h < len * 1e-14)
      throw StepCollapse("determinant integration step collapsed");
    auto step = dp5_step<2>(f, t, u, k1, h);
    double err = 0;
    for (int i = 0; i < 2; ++i)
      err = std::max(err, abs_d(step.err[i]) /
                              (rtol * (1.0 + abs_d(step.y5[i]))));
    if (err <= 1.0) {
      t += h;
      u = step.y5;
      k1 = step.k_last;
      double n2 = norm_d(u[0]) + norm_d(u[1]);
      if (n2 > std::exp(4.0) || (n2 > 0 && n2 < std::exp(-4.0))) {
        double s = 1.0 / std::sqrt(n2);
        u[0] = u[0] * s;
        u[1] = u[1] * s;
        k1[0] = k1[0] * s;
        k1[1] = k1[1] * s;
        growth -= std::log(s);
      }
    }
    double grow = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
    h *= std::clamp(grow, 0.2, 5.0);
  }
  return {u[0], u[1], growth};
}

// Meeting point for the two shots: the mean orthogonal projection of the
// turning points onto [za, zb], kept away from the endpoints. The choice
// only affects conditioning; the Wronskian value is the same for any
// interior point.
inline Cx match_point(const BivariatePotential& pot, Cx lambda, Cx za,
                      Cx zb, double eps_tp) {
  double sum = 0;
  int n = 0;
  try {
    for (const auto& tp : turning_points(pot, lambda, eps_tp).points) {
      sum += std::clamp(((tp.z - za) / (zb - za)).real(), 0.0, 1.0);
      ++n;
    }
  } catch (const Error&) {
  }
  double t = n ? sum / n : 0.5;
  return za + std::clamp(t, 0.1, 0.9) * (zb - za);
}

template <class C>
struct TwoSidedShotT {
  ShotT<C> left, right;

  // With both shots parametrized by arc length toward the meeting point,
  // the segment directions are opposite, so the z-Wronskian
  // yL yR' - yL' yR picks up one sign flip and becomes a symmetric sum.
  // The result is a unit-modulus multiple of the Wronskian of the
  // solutions vanishing at a and at b: zero exactly at the eigenvalues.
  Cx det() const { return to_cx_d(left.y * right.yp + left.yp * right.y); }
  double growth() const { return left.growth + right.growth; }

  // Wronskian magnitude against the product of the state magnitudes;
  // ~0 at an eigenvalue. Its ambient scale away from eigenvalues is
  // e^{-G} with G the dominance exponent of the two paths, which is why
  // acceptance thresholds must be read against the conditioning floor.
  double rel_residual() const {
    return std::abs(det()) /
           std::sqrt((norm_d(left.y) + norm_d(left.yp)) *
                     (norm_d(right.y) + norm_d(right.yp)));
  }

 private:
  static Cx to_cx_d(const Cx& v) { return v; }
  static Cx to_cx_d(const CDD& v) { return to_cx(v); }
};

template <class C>
TwoSidedShotT<C> shoot_both(const BivariatePotential& pot, Cx lambda,
                            double k, Cx za, Cx zm, Cx zb, double rtol) {
  return {shoot<C>(pot, lambda, k, za, zm, rtol),
          shoot<C>(pot, lambda, k, zb, zm, rtol)};
}

// Exponential excursion of Re int sqrt(P) along the straight path
// [z0, z1], with the square-root branch kept continuous (carried in
// w_prev across consecutive calls). The dominance exponent of a shot is
// 2k times this value; it bounds how far the subdominant component falls
// below the dominant one, hence the cancellation depth of the Wronskian.
inline double side_excursion(const BivariatePotential& pot, Cx lambda,
                             Cx z0, Cx z1, Cx& w_prev) {
  static constexpr double gx[4] = {-0.8611363115940526, -0.3399810435848563,
                                   0.3399810435848563, 0.8611363115940526};
  static constexpr double gw[4] = {0.3478548451374538, 0.6521451548625461,
                                   0.6521451548625461, 0.3478548451374538};
  const int panels = 12;
  Cx dz = (z1 - z0) / double(panels);
  double g = 0, g_lo = 0, g_hi = 0;
  for (int p = 0; p < panels; ++p) {
    Cx pa = z0 + double(p) * dz;
    Cx acc{};
    for (int i = 0; i < 4; ++i) {
      Cx z = pa + (0.5 + 0.5 * gx[i]) * dz;
      Cx w = std::sqrt(pot.eval(z, lambda));
      if (std::abs(w + w_prev) < std::abs(w - w_prev)) w = -w;
      if (w != Cx{}) w_prev = w;
      acc += (0.5 * gw[i]) * w;
    }
    g += (acc * dz).real();
    g_lo = std::min(g_lo, g);
    g_hi = std::max(g_hi, g);
  }
  return g_hi - g_lo;
}

constexpr double eps_double = 2.2e-16;
constexpr double eps_ddouble = 4.9e-32;  // 2^-104

struct Conditioning {
  double floor = 0;            // estimated noise level of rel_residual
  bool high_precision = false;
};

inline Conditioning conditioning_for(const BivariatePotential& pot,
                                     Cx lambda, double k, Cx za, Cx zm,
                                     Cx zb, const OracleOptions& opt) {
  Cx w_prev{};
  double exc = side_excursion(pot, lambda, za, zm, w_prev) +
               side_excursion(pot, lambda, zm, zb, w_prev);
  double ge = std::exp(std::min(2.0 * k * exc, 700.0));
  Conditioning c;
  c.high_precision = eps_double * ge > opt.prec_switch;
  c.floor = (c.high_precision ? eps_ddouble : eps_double) * ge;
  return c;
}

inline Cx truncated_endpoint(const BivariatePotential& pot, Cx lambda,
                             const BoundaryPoint& p, double r_trunc,
                             double eps_tp) {
  if (p.finite) return p.z;
  double r = r_trunc;
  if (r <= 0) {
    double spread = 0;
    for (const auto& tp : turning_points(pot, lambda, eps_tp).points)
      spread = std::max(spread, std::abs(tp.z));
    r = 6.0 * (spread + 1.0);
  }
  return std::polar(r, p.phi);
}

}  // namespace detail

// One full determinant evaluation: the log-scaled value, the relative
// Wronskian residual, and the estimated noise floor of that residual.
struct DeterminantEvaluation {
  LogScaledValue value;
  double rel_residual = 0;
  double floor = 0;             // conditioning estimate: residual noise level
  bool high_precision = false;  // double-double state was required
};

// Two-sided shooting Wronskian; a nonzero multiple of the characteristic
// determinant with the same zero set. Flags (not fails) when the segment
// passes near a turning point: P is polynomial, so the ODE stays regular.
inline DeterminantEvaluation evaluate_determinant(
    const ProblemInstance& prob, Cx lambda, const OracleOptions& opt = {},
    OracleDiagnostics* diag = nullptr) {
  if (!(prob.k > 0))
    throw std::invalid_argument("oracle: k must be positive");
  Cx za = detail::truncated_endpoint(prob.potential, lambda, prob.a,
                                     prob.r_trunc, opt.eps_tp);
  Cx zb = detail::truncated_endpoint(prob.potential, lambda, prob.b,
                                     prob.r_trunc, opt.eps_tp);
  if (std::abs(za - zb) <= 1e-12 * (1.0 + std::abs(za)))
    throw std::invalid_argument("oracle: boundary points must be distinct");

  if (diag) {
    ++diag->det_evals;
    try {
      for (const auto& tp :
           turning_points(prob.potential, lambda, opt.eps_tp).points)
        if (segment_distance(tp.z, za, zb) <=
            opt.eps_tp * (1.0 + std::abs(tp.z)))
          diag->segment_near_turning_point = true;
    } catch (const Error&) {
    }
  }

  Cx zm = detail::match_point(prob.potential, lambda, za, zb, opt.eps_tp);
  detail::Conditioning cond =
      detail::conditioning_for(prob.potential, lambda, prob.k, za, zm, zb,
                               opt);
  DeterminantEvaluation out;
  out.floor = cond.floor;
  out.high_precision = cond.high_precision;
  if (diag && cond.high_precision) ++diag->high_precision_evals;
  if (cond.high_precision) {
    auto s = detail::shoot_both<CDD>(prob.potential, lambda, prob.k, za, zm,
                                     zb, opt.rtol);
    out.value = log_scaled(s.det(), s.growth());
    out.rel_residual = s.rel_residual();
  } else {
    auto s = detail::shoot_both<Cx>(prob.potential, lambda, prob.k, za, zm,
                                    zb, opt.rtol);
    out.value = log_scaled(s.det(), s.growth());
    out.rel_residual = s.rel_residual();
  }
  return out;
}

inline LogScaledValue characteristic_determinant(
    const ProblemInstance& prob, Cx lambda, const OracleOptions& opt = {},
    OracleDiagnostics* diag = nullptr) {
  return evaluate_determinant(prob, lambda, opt, diag).value;
}

// Relative Wronskian residual of the two shots; ~0 exactly at the
// eigenvalues and symmetric in the endpoints by construction. Read it
// against determinant_floor, not in absolute terms.
inline double determinant_residual(const ProblemInstance& prob, Cx lambda,
                                   const OracleOptions& opt = {}) {
  return evaluate_determinant(prob, lambda, opt).rel_residual;
}

// Estimated relative noise level of determinant_residual at lambda under
// the precision the evaluation would pick, without integrating the ODE.
// Cheap: one branch-tracked quadrature of sqrt(P) along the segment.
inline double determinant_floor(const ProblemInstance& prob, Cx lambda,
                                const OracleOptions& opt = {}) {
  Cx za = detail::truncated_endpoint(prob.potential, lambda, prob.a,
                                     prob.r_trunc, opt.eps_tp);
  Cx zb = detail::truncated_endpoint(prob.potential, lambda, prob.b,
                                     prob.r_trunc, opt.eps_tp);
  Cx zm = detail::match_point(prob.potential, lambda, za, zb, opt.eps_tp);
  return detail::conditioning_for(prob.potential, lambda, prob.k, za, zm, zb,
                                  opt)
      .floor;
}

namespace detail {

struct DetCache {
  const ProblemInstance& prob;
  const OracleOptions& opt;
  OracleDiagnostics* diag;
  std::map<std::pair<double, double>, LogScaledValue> memo;

  LogScaledValue operator()(Cx lambda) {
    auto key = std::make_pair(lambda.real(), lambda.imag());
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    LogScaledValue v = characteristic_determinant(prob, lambda, opt, diag);
    memo.emplace(key, v);
    return v;
  }
};

struct EdgeUnresolved {};

// Total continuous argument change of the determinant from l1 to l2,
// refining until each sub-interval turns by at most pi/2.
inline double arg_sweep(DetCache& det, Cx l1, LogScaledValue v1, Cx l2,
                        LogScaledValue v2, int depth) {
  if (std::abs(v1.mantissa) == 0 || std::abs(v2.mantissa) == 0)
    throw EdgeUnresolved{};
  double d = std::arg(v2.mantissa / v1.mantissa);
  if (std::abs(d) <= 0.5 * pi) return d;
  if (depth <= 0) {
    if (std::abs(d) <= pi) return d;
    throw EdgeUnresolved{};
  }
  Cx mid = 0.5 * (l1 + l2);
  LogScaledValue vm = det(mid);
  return arg_sweep(det, l1, v1, mid, vm, depth - 1) +
         arg_sweep(det, mid, vm, l2, v2, depth - 1);
}

// Argument change along one cell edge. A uniform base sampling comes first:
// purely adaptive bisection from the endpoints alone can alias a full phase
// turn into a small principal difference and silently lose 2 pi.
inline double edge_arg(DetCache& det, Cx l1, Cx l2, int base_n, int depth) {
  double total = 0;
  Cx prev_z = l1;
  LogScaledValue prev = det(l1);
  for (int j = 1; j <= base_n; ++j) {
    Cx z = l1 + (l2 - l1) * (double(j) / base_n);
    LogScaledValue cur = det(z);
    total += arg_sweep(det, prev_z, prev, z, cur, depth);
    prev_z = z;
    prev = cur;
  }
  return total;
}

inline int rect_winding(DetCache& det, Cx lo, Cx hi, int base_n, int depth) {
  Cx c[4] = {lo, Cx(hi.real(), lo.imag()), hi, Cx(lo.real(), hi.imag())};
  double total = 0;
  for (int i = 0; i < 4; ++i)
    total += edge_arg(det, c[i], c[(i + 1) % 4], base_n, depth);
  return int(std::lround(total / (2 * pi)));
}

}  // namespace detail

// Argument-principle zero count of the determinant inside the rectangle
// [lo, hi], counted with multiplicity. Throws WindingUnresolved (via
// find_eigenvalues this is caught and retried on a jittered cell) when the
// phase cannot be tracked along the boundary.
inline int winding_number(const ProblemInstance& prob, Cx lo, Cx hi,
                          const OracleOptions& opt = {},
                          OracleDiagnostics* diag = nullptr) {
  detail::DetCache det{prob, opt, diag, {}};
  try {
    return detail::rect_winding(det, lo, hi, opt.edge_samples, opt.edge_depth);
  } catch (const detail::EdgeUnresolved&) {
    throw WindingUnresolved(
        "determinant phase could not be tracked along the region boundary");
  }
}

namespace detail {

struct CellSolver {
  const ProblemInstance& prob;
  const OracleOptions& opt;
  OracleDiagnostics* diag;
  DetCache det;
  std::vector<OracleEigenvalue> found;

  int winding(Cx lo, Cx hi) {
    return rect_winding(det, lo, hi, opt.edge_samples, opt.edge_depth);
  }

  // Complex log of the determinant, for Newton on log Delta.
  Cx clog(Cx lambda) {
    LogScaledValue v = det(lambda);
    return Cx(v.log_abs(), std::arg(v.mantissa));
  }

  void newton(Cx lo, Cx hi, int w) {
    Cx lambda = 0.5 * (lo + hi);
    double cell_r = 0.5 * std::abs(hi - lo);
    bool ok = false;
    double step = cell_r;
    double f = clog(lambda).real();
    for (int it = 0; it < opt.max_newton; ++it) {
      // The difference step must stay well inside the distance to the zero
      // (roughly the previous Newton step), else lambda +- h straddle it and
      // the log-derivative quotient saturates near pi / (2h).
      double scale = 1.0 + std::abs(lambda);
      double h = std::clamp(0.1 * step, 1e-11 * scale, 1e-6 * scale);
      Cx d = clog(lambda + h) - clog(lambda - h);
      // Principal-branch argument difference: the raw args are each in
      // (-pi, pi], so their difference needs rewrapping into that range.
      Cx dlog = Cx(d.real(), std::remainder(d.imag(), 2 * pi)) / (2 * h);
      if (std::norm(dlog) == 0) break;
      Cx dl = -1.0 / dlog;
      if (std::abs(dl) > cell_r) dl *= cell_r / std::abs(dl);
      // Far from the zero the quotient is dominated by the exponential
      // background k B'(lambda) and the raw step drifts. log|D| is harmonic
      // away from zeros, so it has no spurious interior minima: accepting
      // only descending steps (backtracking otherwise) steers the iteration
      // into a zero instead.
      double fn = 0;
      int bt = 0;
      for (; bt < 12; ++bt) {
        fn = clog(lambda + dl).real();
        if (fn < f) break;
        dl *= 0.5;
      }
      if (bt == 12) break;
      lambda += dl;
      f = fn;
      step = std::abs(dl);
      if (step <= 1e-10 * scale) {
        ok = true;
        break;
      }
    }
    double res = determinant_residual(prob, lambda, opt);
    if (!ok || res > opt.eps_orc ||
        std::abs(lambda - 0.5 * (lo + hi)) > 3.0 * cell_r) {
      if (diag) ++diag->newton_failures;
      return;
    }
    found.push_back({lambda, prob.k, w, res});
  }

  void process(Cx lo, Cx hi, int depth) {
    int w;
    try {
      w = winding(lo, hi);
    } catch (const EdgeUnresolved&) {
      // A zero sits on (or hugs) the boundary: retry once on a slightly
      // inflated cell, whose overlap is deduplicated at the end.
      Cx pad = 2.3e-3 * (hi - lo);
      try {
        w = winding(lo - pad, hi + pad);
        lo -= pad;
        hi += pad;
      } catch (const EdgeUnresolved&) {
        if (diag) ++diag->unresolved_cells;
        return;
      }
    }
    if (w <= 0) return;
    if (w == 1 || depth >= opt.max_subdiv ||
        std::abs(hi - lo) < 100 * opt.eps_orc) {
      newton(lo, hi, w);
      return;
    }
    Cx mid = 0.5 * (lo + hi);
    process(lo, mid, depth + 1);
    process(Cx(mid.real(), lo.imag()), Cx(hi.real(), mid.imag()), depth + 1);
    process(Cx(lo.real(), mid.imag()), Cx(mid.real(), hi.imag()), depth + 1);
    process(mid, hi, depth + 1);
  }
};

}  // namespace detail

// Locate the eigenvalues inside [lo, hi] by a cell_n x cell_n winding sweep
// with subdivision and Newton refinement. Cells whose boundary phase cannot
// be resolved are skipped and counted in the diagnostics.
inline std::vector<OracleEigenvalue> find_eigenvalues(
    const ProblemInstance& prob, Cx lo, Cx hi, int cell_n,
    const OracleOptions& opt = {}, OracleDiagnostics* diag = nullptr) {
  if (cell_n < 1)
    throw std::invalid_argument("oracle: cell_n must be at least 1");
  if (!(lo.real() < hi.real() && lo.imag() < hi.imag()))
    throw std::invalid_argument("oracle: empty search region");

  detail::CellSolver solver{prob, opt, diag, {prob, opt, diag, {}}, {}};
  double dx = (hi.real() - lo.real()) / cell_n;
  double dy = (hi.imag() - lo.imag()) / cell_n;
  for (int iy = 0; iy < cell_n; ++iy)
    for (int ix = 0; ix < cell_n; ++ix) {
      Cx clo(lo.real() + ix * dx, lo.imag() + iy * dy);
      Cx chi(lo.real() + (ix + 1) * dx, lo.imag() + (iy + 1) * dy);
      solver.process(clo, chi, 0);
    }

  auto& out = solver.found;
  std::sort(out.begin(), out.end(),
            [](const OracleEigenvalue& p, const OracleEigenvalue& q) {
              if (p.lambda.real() != q.lambda.real())
                return p.lambda.real() < q.lambda.real();
              return p.lambda.imag() < q.lambda.imag();
            });
  std::vector<OracleEigenvalue> dedup;
  for (const auto& e : out) {
    bool dup = false;
    for (const auto& d : dedup)
      if (std::abs(d.lambda - e.lambda) <=
          100 * opt.eps_orc * (1.0 + std::abs(e.lambda)))
        dup = true;
    if (!dup) dedup.push_back(e);
  }
  return dedup;
}

// ---------------------------------------------------------------------------
// A-priori localization for potentials of the form i (q(z) - lambda).
// ---------------------------------------------------------------------------

// Half-strip known to contain the spectrum: re in [re_lo, re_hi], im < im_hi
// (unbounded below).
struct AprioriHalfStrip {
  double re_lo = 0, re_hi = 0;
  double im_hi = 0;
};

// Energy estimate: for P = i (q(z) - lambda) with real q and real finite
// endpoints, Re lambda lies in the range of q over [a, b] and Im lambda < 0.
inline AprioriHalfStrip a_priori_region(const ProblemInstance& prob) {
  const auto& c = prob.potential.coeffs;
  auto bad = []() {
    return FormNotSupported(
        "a-priori region needs P = i (q(z) - lambda) with real q and real "
        "finite endpoints");
  };
  if (c.size() < 2) throw bad();
  double scale = prob.potential.coeff_scale();
  auto real_of_i = [&](Cx v) -> double {  // v must be i * (real)
    if (std::abs(v.real()) > 1e-12 * scale) throw bad();
    return v.imag();
  };
  std::vector<double> q(c.size());
  for (std::size_t j = 1; j < c.size(); ++j) {
    for (std::size_t d = 1; d < c[j].size(); ++d)
      if (std::abs(c[j][d]) > 1e-12 * scale) throw bad();
    q[j] = real_of_i(c[j].empty() ? Cx{} : c[j][0]);
  }
  if (c[0].size() != 2 || std::abs(c[0][1] - Cx(0, -1)) > 1e-12 * scale)
    throw bad();
  q[0] = real_of_i(c[0][0]);
  if (!prob.a.finite || !prob.b.finite ||
      std::abs(prob.a.z.imag()) > 1e-12 ||
      std::abs(prob.b.z.imag()) > 1e-12)
    throw bad();

  double xa = std::min(prob.a.z.real(), prob.b.z.real());
  double xb = std::max(prob.a.z.real(), prob.b.z.real());
  std::vector<Cx> qc(q.begin(), q.end());
  auto qval = [&](double x) { return poly_eval(qc, Cx(x, 0)).real(); };
  double lo = std::min(qval(xa), qval(xb));
  double hi = std::max(qval(xa), qval(xb));
  for (Cx r : poly_roots(poly_derivative(qc))) {
    if (std::abs(r.imag()) > 1e-9) continue;
    double x = r.real();
    if (x <= xa || x >= xb) continue;
    lo = std::min(lo, qval(x));
    hi = std::max(hi, qval(x));
  }
  return {lo, hi, 0.0};
}

}  // namespace specgraph
