#pragma once

// Branch-tracked evaluation of w = sqrt(P(., lambda)) along paths, and the
// action integrals of w between turning points and boundary points.
//
// A square root along a path is pinned down by one anchor value; every other
// evaluation picks the sign nearest to a local reference (the neighbouring
// accepted value, or a linear interpolant between panel endpoints inside the
// quadrature). Integrals that terminate at an m-fold turning point z0 are
// desingularized by the substitution zeta = z0 + u s^2, under which the
// integrand becomes s^(m+1) times a square root that stays bounded away from
// zero, so plain adaptive panels apply again.

#include <optional>
#include <vector>

#include "specgraph/core.hpp"
#include "specgraph/numerics.hpp"
#include "specgraph/potential.hpp"

namespace specgraph {

using ContourPath = std::vector<Cx>;

struct BranchAnchor {
  Cx z;
  Cx w;  // chosen value of sqrt(P(z, lambda))
};

// A value defined up to the global sign of the square root, together with
// the anchor that fixes the sign actually used.
struct PhaseValue {
  Cx value;
  BranchAnchor anchor;
};

struct PhaseOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  int max_depth = 34;
  // Reject a sign decision when the losing choice is within this factor of
  // the winning one.
  double ambiguity_ratio = 0.6;
};

// Distance from point p to segment [a, b].
inline double segment_distance(Cx p, Cx a, Cx b) {
  Cx d = b - a;
  double L2 = std::norm(d);
  if (L2 == 0) return std::abs(p - a);
  double t = ((p.real() - a.real()) * d.real() +
              (p.imag() - a.imag()) * d.imag()) / L2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

inline double path_distance(const ContourPath& path, Cx p) {
  double d = 1e300;
  for (std::size_t i = 0; i + 1 < path.size(); ++i)
    d = std::min(d, segment_distance(p, path[i], path[i + 1]));
  return d;
}

inline double path_length(const ContourPath& path) {
  double L = 0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i)
    L += std::abs(path[i + 1] - path[i]);
  return L;
}

namespace detail {

// Continue a square-root value from (z_a, w_a) to z_b by bisection until
// each hop rotates the value by a clearly resolvable amount.
template <class FP>
Cx continue_sqrt_segment(FP& f, Cx z_a, Cx w_a, Cx z_b, int depth,
                         const PhaseOptions& opt) {
  Cx w_raw = std::sqrt(f(z_b));
  double near = std::abs(w_raw - w_a), far = std::abs(w_raw + w_a);
  if (near > far) {
    std::swap(near, far);
    w_raw = -w_raw;
  }
  if (far > 0 && near <= opt.ambiguity_ratio * far) return w_raw;
  if (depth >= opt.max_depth)
    throw BranchAmbiguity(
        "square-root continuation: branch could not be resolved (path too "
        "close to a zero of the potential)");
  Cx mid = 0.5 * (z_a + z_b);
  Cx w_mid = continue_sqrt_segment(f, z_a, w_a, mid, depth + 1, opt);
  return continue_sqrt_segment(f, mid, w_mid, z_b, depth + 1, opt);
}

// Adaptive Kronrod integration of w over the straight segment z(t) =
// z_a + t (z_b - z_a), t in [t0, t1], with w sign-matched against the linear
// interpolant of the endpoint values. Splits whenever the sign decision is
// not clear-cut, so the interpolant reference stays trustworthy.
template <class FP>
struct SegmentIntegrator {
  FP& f;
  Cx z_a, dz;
  const PhaseOptions& opt;
  double tol_per_len = 0;

  Cx w_at(double t, Cx ref, bool& clear) const {
    Cx w = std::sqrt(f(z_a + t * dz));
    double near = std::abs(w - ref), far = std::abs(w + ref);
    if (near > far) {
      std::swap(near, far);
      w = -w;
    }
    if (!(far > 0 && near <= opt.ambiguity_ratio * far)) clear = false;
    return w;
  }

  Cx run(double t0, Cx w0, double t1, Cx w1, int depth, Cx* w_end = nullptr) {
    bool clear = true;
    auto integrand = [&](double t) {
      double u = (t - t0) / (t1 - t0);
      Cx ref = w0 + u * (w1 - w0);
      return w_at(t, ref, clear);
    };
    auto panel = gk::eval_panel(integrand, t0, t1);
    double err = std::abs(panel.k15 - panel.g7);
    double allow = tol_per_len * (t1 - t0);
    if (clear && err <= allow) {
      if (w_end) *w_end = w1;
      return panel.k15 * dz;
    }
    if (depth >= opt.max_depth) {
      if (!clear)
        throw BranchAmbiguity(
            "segment integration: branch undecidable at requested depth");
      throw QuadratureFailure("segment integration: tolerance not reached");
    }
    double tm = 0.5 * (t0 + t1);
    Cx wm_ref = 0.5 * (w0 + w1);
    bool mid_clear = true;
    Cx wm = w_at(tm, wm_ref, mid_clear);
    if (!mid_clear)
      wm = continue_sqrt_segment(f, z_a + t0 * dz, w0, z_a + tm * dz, depth,
                                 opt);
    Cx left = run(t0, w0, tm, wm, depth + 1);
    Cx right = run(tm, wm, t1, w1, depth + 1, w_end);
    return left + right;
  }
};

}  // namespace detail

// Continue sqrt(P(., lambda)) along the polyline; returns one value per node,
// starting from the given anchor value at path.front().
inline std::vector<Cx> continue_sqrt(const BivariatePotential& pot, Cx lambda,
                                     const ContourPath& path, Cx w_front,
                                     const PhaseOptions& opt = {}) {
  auto f = [&](Cx z) { return pot.eval(z, lambda); };
  std::vector<Cx> w(path.size());
  if (path.empty()) return w;
  w[0] = w_front;
  for (std::size_t i = 1; i < path.size(); ++i)
    w[i] = detail::continue_sqrt_segment(f, path[i - 1], w[i - 1], path[i], 0,
                                         opt);
  return w;
}

struct RouteIntegralOptions {
  PhaseOptions phase;
  // Route end nodes within this relative tolerance of a turning point are
  // treated as terminating there.
  double tp_snap = 1e-8;
};

namespace detail {

inline const TurningPoint* tp_near(const TurningPointSet& tps, Cx z,
                                   double rel_tol) {
  for (const auto& p : tps.points)
    if (std::abs(p.z - z) <= rel_tol * (1.0 + std::abs(p.z))) return &p;
  return nullptr;
}

// Integral of w from the m-fold turning point z0 along the straight leg to
// q, given the continued value w_q at q. Under zeta = z0 + u s^2 the
// integrand is 2 u A s^(m+1) sqrt(g(zeta(s))) with A = w_q / sqrt(g(q)) and
// g the potential with the factor (zeta - z0)^m removed; g is nonzero on the
// leg, so its root continues by the same interpolation scheme.
inline Cx tp_leg_integral(const BivariatePotential& pot, Cx lambda,
                          const TurningPointSet& tps, const TurningPoint& tp,
                          Cx q, Cx w_q, const PhaseOptions& opt,
                          double tol_per_len) {
  Cx u = q - tp.z;
  Cx a_n = pot.coeff_z(pot.degree(), lambda);
  auto g = [&](Cx zeta) {
    Cx v = a_n;
    for (const auto& other : tps.points) {
      if (other.label == tp.label) continue;
      for (int r = 0; r < other.multiplicity; ++r) v *= (zeta - other.z);
    }
    return v;
  };
  Cx g_q = g(q);
  if (g_q == Cx{})
    throw DegenerateTurningPoints("coincident turning points on a route leg");
  Cx sqrt_gq = std::sqrt(g_q);
  Cx A = w_q / sqrt_gq;

  // Integrate h(s) = s^(m+1) sqrt(g(z0 + u s^2)) over [0, 1], continuing
  // sqrt(g) from its value at s = 1. The result is scaled by 2 u A, so the
  // error allowance shrinks by the same factor.
  auto fg = [&](Cx zeta) { return g(zeta); };
  double allow =
      tol_per_len * std::abs(u) / std::max(2.0 * std::abs(u * A), 1e-300);

  struct Rec {
    decltype(fg)& g;
    Cx z0, u;
    int m;
    const PhaseOptions& opt;
    double tol_per_len;

    Cx sq_at(double s, Cx ref, bool& clear) const {
      Cx v = std::sqrt(g(z0 + u * s * s));
      double near = std::abs(v - ref), far = std::abs(v + ref);
      if (near > far) {
        std::swap(near, far);
        v = -v;
      }
      if (!(far > 0 && near <= opt.ambiguity_ratio * far)) clear = false;
      return v;
    }
    Cx run(double s0, Cx g0, double s1, Cx g1, int depth) const {
      bool clear = true;
      auto integrand = [&](double s) {
        double t = (s - s0) / (s1 - s0);
        Cx ref = g0 + t * (g1 - g0);
        return std::pow(s, m + 1) * sq_at(s, ref, clear);
      };
      auto panel = gk::eval_panel(integrand, s0, s1);
      double err = std::abs(panel.k15 - panel.g7);
      if (clear && err <= tol_per_len * (s1 - s0)) return panel.k15;
      if (depth >= opt.max_depth) {
        if (!clear)
          throw BranchAmbiguity("turning-point panel: branch undecidable");
        throw QuadratureFailure("turning-point panel: tolerance not reached");
      }
      double sm = 0.5 * (s0 + s1);
      bool mc = true;
      Cx gm = sq_at(sm, 0.5 * (g0 + g1), mc);
      if (!mc)
        throw BranchAmbiguity("turning-point panel: branch undecidable");
      return run(s0, g0, sm, gm, depth + 1) + run(sm, gm, s1, g1, depth + 1);
    }
  };

  Rec rec{fg, tp.z, u, tp.multiplicity, opt, allow};
  Cx sqrt_g0 = detail::continue_sqrt_segment(fg, q, sqrt_gq, tp.z, 0, opt);
  Cx integral = rec.run(0.0, sqrt_g0, 1.0, sqrt_gq, 0);
  return 2.0 * u * A * integral;
}

}  // namespace detail

// Integral of the branch-tracked square root of the potential along a
// polyline route. Only the first and last node may sit at a turning point;
// there the leg is integrated with the desingularizing substitution. The
// branch is fixed by `anchor` (position must coincide with a non-terminal
// route node); without an anchor the principal root at the first such node
// is used. Returns the total together with the anchor employed.
inline PhaseValue action_integral(const BivariatePotential& pot, Cx lambda,
                                  const ContourPath& route,
                                  const TurningPointSet& tps,
                                  const BranchAnchor* anchor = nullptr,
                                  const RouteIntegralOptions& opt = {}) {
  if (route.size() < 2)
    throw std::invalid_argument("action_integral: route needs >= 2 nodes");
  auto f = [&](Cx z) { return pot.eval(z, lambda); };

  const TurningPoint* tp_start =
      detail::tp_near(tps, route.front(), opt.tp_snap);
  const TurningPoint* tp_end = detail::tp_near(tps, route.back(), opt.tp_snap);
  if (tp_start && tp_end && tp_start->label == tp_end->label &&
      route.size() == 2)
    throw DegenerateTurningPoints(
        "route connects a turning point to itself directly");

  // Work on a copy whose terminal nodes are snapped exactly onto the
  // turning points, with a midpoint inserted when both ends terminate at one
  // and no interior node exists.
  ContourPath path = route;
  if (tp_start) path.front() = tp_start->z;
  if (tp_end) path.back() = tp_end->z;
  if (tp_start && tp_end && path.size() == 2)
    path.insert(path.begin() + 1, 0.5 * (path.front() + path.back()));

  std::size_t i0 = tp_start ? 1 : 0;
  std::size_t i1 = path.size() - 1 - (tp_end ? 1 : 0);

  // Interior legs must keep away from every turning point.
  for (std::size_t i = 0; i + 1 < path.size(); ++i)
    for (const auto& p : tps.points) {
      if (tp_start && p.label == tp_start->label && i == 0) continue;
      if (tp_end && p.label == tp_end->label && i + 2 == path.size()) continue;
      if (segment_distance(p.z, path[i], path[i + 1]) <=
          1e-7 * (1.0 + std::abs(p.z)))
        throw TooCloseToTurningPoint(
            "route leg passes through a turning point");
    }

  // Branch anchors at the plain nodes i0..i1.
  std::vector<Cx> w(path.size());
  std::size_t ia = i0;
  Cx w_ia;
  if (anchor) {
    bool found = false;
    for (std::size_t i = i0; i <= i1; ++i)
      if (std::abs(path[i] - anchor->z) <= 1e-9 * (1.0 + std::abs(path[i]))) {
        ia = i;
        found = true;
        break;
      }
    if (!found)
      throw std::invalid_argument(
          "action_integral: anchor must sit on a non-terminal route node");
    w_ia = anchor->w;
  } else {
    w_ia = std::sqrt(f(path[ia]));
  }
  PhaseOptions popt = opt.phase;
  w[ia] = w_ia;
  for (std::size_t i = ia; i > i0; --i)
    w[i - 1] =
        detail::continue_sqrt_segment(f, path[i], w[i], path[i - 1], 0, popt);
  for (std::size_t i = ia; i < i1; ++i)
    w[i + 1] =
        detail::continue_sqrt_segment(f, path[i], w[i], path[i + 1], 0, popt);

  // Tolerance allocation: relative to a crude scale of the whole integral.
  double total_len = path_length(path);
  double scale = 0;
  for (std::size_t i = i0; i <= i1; ++i) scale = std::max(scale, std::abs(w[i]));
  scale = std::max(scale * total_len, 1.0);
  double tol_per_len =
      std::max(popt.abs_tol, popt.rel_tol * scale) / std::max(total_len, 1e-30);

  Cx total{};
  for (std::size_t i = i0; i < i1; ++i) {
    // SegmentIntegrator works in t in [0, 1], so its per-unit-t allowance is
    // the per-length allowance times the leg length.
    detail::SegmentIntegrator<decltype(f)> seg{
        f, path[i], path[i + 1] - path[i], popt,
        tol_per_len * std::abs(path[i + 1] - path[i])};
    total += seg.run(0.0, w[i], 1.0, w[i + 1], 0);
  }
  // The route traverses a starting turning-point leg outward (z0 -> first
  // plain node) and an ending one inward, hence the sign difference.
  if (tp_start)
    total += detail::tp_leg_integral(pot, lambda, tps, *tp_start, path[i0],
                                     w[i0], popt, tol_per_len);
  if (tp_end)
    total -= detail::tp_leg_integral(pot, lambda, tps, *tp_end, path[i1],
                                     w[i1], popt, tol_per_len);

  return {total, BranchAnchor{path[ia], w[ia]}};
}

// ---------------------------------------------------------------------------
// Default routes: straight segments with perpendicular detours around any
// turning point that comes too close, and the named integrals built on them.
// ---------------------------------------------------------------------------

// Straight route from z_from to z_to that detours around every turning point
// not in `exempt_labels` which lies within clearance_frac of the segment.
inline ContourPath detour_route(Cx z_from, Cx z_to,
                                const TurningPointSet& tps,
                                const std::vector<int>& exempt_labels = {},
                                double clearance_frac = 0.1) {
  ContourPath path{z_from, z_to};
  auto exempt = [&](int label) {
    for (int e : exempt_labels)
      if (e == label) return true;
    return false;
  };
  double clear = clearance_frac * std::abs(z_to - z_from);
  for (const auto& p : tps.points) {
    if (exempt(p.label)) continue;
    // Find the closest leg and push a detour vertex away from the point.
    std::size_t leg = 0;
    double best = 1e300;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      double d = segment_distance(p.z, path[i], path[i + 1]);
      if (d < best) {
        best = d;
        leg = i;
      }
    }
    if (best >= clear) continue;
    Cx a = path[leg], b = path[leg + 1];
    Cx dir = (b - a) / std::abs(b - a);
    Cx n(-dir.imag(), dir.real());
    // Side away from the turning point (either when it sits on the line).
    double side = (p.z - a).real() * n.real() + (p.z - a).imag() * n.imag();
    double r = std::max(2.0 * best, clear);
    double t = std::clamp(
        (((p.z - a) * std::conj(dir)).real()) / std::abs(b - a), 0.1, 0.9);
    Cx foot = a + t * (b - a);
    Cx detour = foot - (side >= 0 ? 1.0 : -1.0) * r * n;
    path.insert(path.begin() + long(leg) + 1, detour);
  }
  return path;
}

// Lowest clearance of the route from the non-exempt turning points.
inline double route_clearance(const ContourPath& path,
                              const TurningPointSet& tps,
                              const std::vector<int>& exempt_labels = {}) {
  double d = 1e300;
  for (const auto& p : tps.points) {
    bool skip = false;
    for (int e : exempt_labels)
      if (e == p.label) skip = true;
    if (!skip) d = std::min(d, path_distance(path, p.z));
  }
  return d;
}

namespace detail {

inline PhaseValue standardized(PhaseValue v) {
  Cx s = standardize_sign(v.value);
  if (s != v.value) v.anchor.w = -v.anchor.w;
  v.value = s;
  return v;
}

}  // namespace detail

// Action integral between the turning points with the given labels, reported
// with the standardized overall sign (Im >= 0; Re >= 0 on the real axis).
inline PhaseValue pair_integral(const BivariatePotential& pot, Cx lambda,
                                const TurningPointSet& tps, int label_j,
                                int label_l,
                                const RouteIntegralOptions& opt = {}) {
  const TurningPoint* zj = tps.by_label(label_j);
  const TurningPoint* zl = tps.by_label(label_l);
  if (!zj || !zl) {
    for (const auto& p : tps.points)
      if (p.multiplicity > 1)
        throw DegenerateTurningPoints(
            "pair integral: requested turning points have merged");
    throw std::invalid_argument("pair_integral: unknown turning point label");
  }
  double scale = 1.0 + std::max(std::abs(zj->z), std::abs(zl->z));
  if (std::abs(zj->z - zl->z) <= 1e-9 * scale)
    throw DegenerateTurningPoints(
        "pair integral requested between coincident turning points");
  ContourPath route =
      detour_route(zj->z, zl->z, tps, {label_j, label_l});
  return detail::standardized(
      action_integral(pot, lambda, route, tps, nullptr, opt));
}

// Action integral from turning point label_j to the finite boundary point a.
inline PhaseValue endpoint_integral(const BivariatePotential& pot, Cx lambda,
                                    const TurningPointSet& tps, int label_j,
                                    Cx a, const RouteIntegralOptions& opt = {},
                                    const ContourPath* route_override =
                                        nullptr) {
  const TurningPoint* zj = tps.by_label(label_j);
  if (!zj)
    throw std::invalid_argument(
        "endpoint_integral: unknown turning point label");
  for (const auto& p : tps.points)
    if (std::abs(p.z - a) <= 1e-8 * (1.0 + std::abs(p.z)))
      throw TooCloseToTurningPoint(
          "boundary point coincides with a turning point");
  ContourPath route = route_override ? *route_override
                                     : detour_route(zj->z, a, tps, {label_j});
  return detail::standardized(
      action_integral(pot, lambda, route, tps, nullptr, opt));
}

// Action integral between two finite boundary points, along route_override
// when given (canonical routes are supplied by the graph layer) or a default
// detoured straight path.
inline PhaseValue boundary_integral(const BivariatePotential& pot, Cx lambda,
                                    const TurningPointSet& tps, Cx a, Cx b,
                                    const RouteIntegralOptions& opt = {},
                                    const ContourPath* route_override =
                                        nullptr) {
  for (const auto& p : tps.points)
    for (Cx q : {a, b})
      if (std::abs(p.z - q) <= 1e-8 * (1.0 + std::abs(p.z)))
        throw TooCloseToTurningPoint(
            "boundary point coincides with a turning point");
  ContourPath route =
      route_override ? *route_override : detour_route(a, b, tps, {});
  return detail::standardized(
      action_integral(pot, lambda, route, tps, nullptr, opt));
}

}  // namespace specgraph
