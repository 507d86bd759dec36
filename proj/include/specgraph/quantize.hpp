#pragma once

// Quantization formulas along the limit spectral graph and leading-order
// WKB solutions. Each curve kind carries one rule:
//   balanced   k B      ~  m pi i,
//   critical   k C_j    ~  (-1/4 + m) pi i,
//   singular   k S_{j,l} ~ (-1/2 + m) pi i,
// solved for lambda by a damped Newton iteration seeded from the curve
// sample whose integral is nearest the target level. Solutions that leave
// the curve tube or the parameter domain are discarded. The values use the
// standardized sign (Im >= 0), so admissible m are positive; the mirrored
// branch would relabel m -> -m without changing the solution set.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "specgraph/arrangement.hpp"
#include "specgraph/curves.hpp"
#include "specgraph/phase.hpp"
#include "specgraph/potential.hpp"

namespace specgraph {

struct QuantizationRule {
  enum class Kind { Balanced, Critical, Singular };
  Kind kind = Kind::Balanced;
  double offset = 0;  // 0, -1/4, -1/2
};

inline QuantizationRule rule_for(CurveKind k) {
  switch (k) {
    case CurveKind::Balanced: return {QuantizationRule::Kind::Balanced, 0.0};
    case CurveKind::Singular:
      return {QuantizationRule::Kind::Singular, -0.5};
    default: return {QuantizationRule::Kind::Critical, -0.25};
  }
}

struct EigenvalueEstimate {
  long m = 0;
  Cx lambda0;
  QuantizationRule rule;
  double k = 0;
  double residual = 0;  // |k F(lambda0) - (offset + m) pi i|
};

struct QuantizeOptions {
  double eps_quant = 1e-7;  // residual acceptance for k F - target
  double tube_frac = 0.05;  // accepted distance to the curve, per length
  int max_newton = 30;
  double fd_h = 1e-7;       // lambda stencil for F'
  long m_clip = 10000;
  RouteIntegralOptions phase;
  TraceOptions graph;  // only used to fix canonical routes on balanced curves
  ArrOptions arr;
  CanonicalRouteOptions route;
};

struct QuantizeDiagnostics {
  int newton_failures = 0;
  int off_tube = 0;
  int out_of_domain = 0;
};

// Theorem-3 hypothesis for quantizing T.curves[index]: its closure must not
// meet other members away from its endpoints. Contact tolerance defaults to
// a few sample spacings.
inline void check_quantization_hypothesis(const LimitSpectralGraph& T,
                                          std::size_t index,
                                          double eps = 0) {
  const SpectralCurve& c = T.curves.at(index);
  if (c.samples.size() < 2) return;
  double spacing = path_length(c.samples) / double(c.samples.size() - 1);
  double tol = eps > 0 ? eps : 2.5 * spacing;
  for (std::size_t q = 0; q < T.curves.size(); ++q) {
    if (q == index) continue;
    for (const auto& run : detail::contact_runs(c, T.curves[q], tol)) {
      bool interior = run.best >= 2 && run.best + 2 < c.samples.size();
      if (interior)
        throw HypothesisViolated(
            "quantization: curve meets another member of the limit graph "
            "away from its endpoints");
    }
  }
}

namespace detail {

// The defining integral of a curve as a function of lambda. For balanced
// curves the route class is fixed at the seed sample: when the canonical
// route differs from the direct one, that fixed path is used for every
// nearby evaluation (the integral only depends on the homotopy class).
struct CurveIntegral {
  RootTracker& tracker;
  const SpectralCurve& curve;
  Cx pa, pb;
  const QuantizeOptions& opt;
  std::map<std::size_t, ContourPath> fixed;  // seed index -> override

  const ContourPath* route_for(std::size_t seed) {
    if (curve.kind != CurveKind::Balanced) return nullptr;
    auto it = fixed.find(seed);
    if (it == fixed.end()) {
      ContourPath path;  // empty: direct route
      try {
        Cx lam = curve.samples[seed];
        StokesGraph g =
            trace_graph(tracker.potential(), lam, tracker.at(lam), opt.graph);
        auto arrs = make_arrangements(g, opt.arr);
        CanonicalRoute r = canonical_route(g, arrs, pa, pb, opt.route);
        if (!r.straight) path = std::move(r.path);
      } catch (const Error&) {
      }
      it = fixed.emplace(seed, std::move(path)).first;
    }
    return it->second.empty() ? nullptr : &it->second;
  }

  Cx operator()(Cx lam, std::size_t seed) {
    const TurningPointSet& tps = tracker.at(lam);
    const BivariatePotential& pot = tracker.potential();
    switch (curve.kind) {
      case CurveKind::Singular:
        return pair_integral(pot, lam, tps, curve.j, curve.l, opt.phase)
            .value;
      case CurveKind::CriticalA:
        return endpoint_integral(pot, lam, tps, curve.j, pa, opt.phase).value;
      case CurveKind::CriticalB:
        return endpoint_integral(pot, lam, tps, curve.j, pb, opt.phase).value;
      default:
        return boundary_integral(pot, lam, tps, pa, pb, opt.phase,
                                 route_for(seed))
            .value;
    }
  }
};

}  // namespace detail

// Solve k F(lambda) = (offset + m) pi i for every admissible m along the
// curve. Per-m Newton failures are skipped (counted in the diagnostics),
// never fatal. m_range additionally restricts the attained default range.
inline std::vector<EigenvalueEstimate> quantize_along_curve(
    RootTracker& tracker, const SpectralCurve& curve, const BoundaryPoint& a,
    const BoundaryPoint& b, double k,
    std::optional<std::pair<long, long>> m_range = std::nullopt,
    const QuantizeOptions& opt = {}, QuantizeDiagnostics* diag = nullptr) {
  if (!(k > 0)) throw std::invalid_argument("quantize: k must be positive");
  if (curve.samples.size() < 2)
    throw std::invalid_argument("quantize: curve has too few samples");
  if (curve.kind == CurveKind::Balanced && !(a.finite && b.finite))
    throw std::invalid_argument(
        "quantize: balanced rule needs finite boundary points");

  QuantizationRule rule = rule_for(curve.kind);
  detail::CurveIntegral F{tracker, curve, a.z, b.z, opt, {}};

  // Integral values along the curve; prefer the stored ones.
  std::vector<Cx> vals = curve.values;
  if (vals.size() != curve.samples.size()) {
    vals.assign(curve.samples.size(),
                Cx(std::numeric_limits<double>::quiet_NaN(), 0));
    for (std::size_t i = 0; i < curve.samples.size(); ++i) {
      try {
        vals[i] = F(curve.samples[i], i);
      } catch (const Error&) {
      }
    }
  }

  double im_lo = 1e300, im_hi = -1e300;
  for (Cx v : vals) {
    if (!(v.real() == v.real())) continue;
    im_lo = std::min(im_lo, v.imag());
    im_hi = std::max(im_hi, v.imag());
  }
  if (im_hi < im_lo) return {};

  long m_lo = long(std::ceil(k * im_lo / pi - rule.offset - 1e-12));
  long m_hi = long(std::floor(k * im_hi / pi - rule.offset + 1e-12));
  m_lo = std::max(m_lo, -opt.m_clip);
  m_hi = std::min(m_hi, opt.m_clip);
  if (m_range) {
    m_lo = std::max(m_lo, m_range->first);
    m_hi = std::min(m_hi, m_range->second);
  }

  double tube = opt.tube_frac * path_length(curve.samples);
  std::vector<EigenvalueEstimate> out;
  for (long m = m_lo; m <= m_hi; ++m) {
    double target = (rule.offset + double(m)) * pi;
    std::size_t seed = 0;
    double best = 1e300;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (!(vals[i].real() == vals[i].real())) continue;
      double d = std::abs(k * vals[i].imag() - target);
      if (d < best) {
        best = d;
        seed = i;
      }
    }

    Cx lam = curve.samples[seed];
    Cx goal(0, target);
    bool ok = false;
    try {
      for (int it = 0; it < opt.max_newton; ++it) {
        Cx G = k * F(lam, seed) - goal;
        if (std::abs(G) <= opt.eps_quant) {
          ok = true;
          break;
        }
        Cx dF = (F(lam + opt.fd_h, seed) - F(lam - opt.fd_h, seed)) /
                (2 * opt.fd_h);
        if (std::norm(dF) == 0) break;
        Cx dl = -G / (k * dF);
        double cap = 0.5 * std::max(tube, 10 * opt.fd_h);
        if (std::abs(dl) > cap) dl *= cap / std::abs(dl);
        lam += dl;
      }
    } catch (const Error&) {
      ok = false;
    }
    if (!ok) {
      if (diag) ++diag->newton_failures;
      continue;
    }
    if (path_distance(curve.samples, lam) > tube) {
      if (diag) ++diag->off_tube;
      continue;
    }
    if (!tracker.domain().contains(lam)) {
      if (diag) ++diag->out_of_domain;
      continue;
    }
    double residual = std::abs(k * F(lam, seed) - goal);
    if (residual > opt.eps_quant) {
      if (diag) ++diag->newton_failures;
      continue;
    }
    out.push_back({m, lam, rule, k, residual});
  }
  return out;
}

// Same, for a member of an assembled limit graph; enforces the Theorem-3
// hypothesis first.
inline std::vector<EigenvalueEstimate> quantize_along_curve(
    RootTracker& tracker, const LimitSpectralGraph& T, std::size_t index,
    const BoundaryPoint& a, const BoundaryPoint& b, double k,
    std::optional<std::pair<long, long>> m_range = std::nullopt,
    const QuantizeOptions& opt = {}, QuantizeDiagnostics* diag = nullptr) {
  check_quantization_hypothesis(T, index);
  return quantize_along_curve(tracker, T.curves[index], a, b, k, m_range, opt,
                              diag);
}

// ---------------------------------------------------------------------------
// Leading-order WKB solutions.
// ---------------------------------------------------------------------------

struct WkbValue {
  Cx z;
  Cx s;       // S(z0, z)
  Cx v_plus;  // P^{-1/4} e^{+kS}
  Cx v_minus;
};

// v_{+-}(z) = P^{-1/4} e^{+- k S(z0,z)} at the given sample points. The
// half-root branch is anchored at the principal root over the first sample;
// the quarter root is continued along the same routes, so both stay
// mutually consistent. z0 may be a turning point (S then starts with the
// desingularized leg); the samples themselves must keep clear of turning
// points.
inline std::vector<WkbValue> wkb_solutions(const BivariatePotential& pot,
                                           Cx lambda, double k, Cx z0,
                                           const std::vector<Cx>& zs,
                                           const RouteIntegralOptions& opt =
                                               {},
                                           double eps_tp = 1e-10) {
  if (zs.empty()) return {};
  TurningPointSet tps = turning_points(pot, lambda, eps_tp);
  for (Cx z : zs)
    for (const auto& p : tps.points)
      if (std::abs(z - p.z) <= 1e-6 * (1.0 + std::abs(p.z)))
        throw TooCloseToTurningPoint("wkb sample at a turning point");

  auto f = [&](Cx z) { return pot.eval(z, lambda); };
  Cx z_ref = zs.front();
  BranchAnchor ref{z_ref, std::sqrt(f(z_ref))};

  // S from z0 to the reference sample, branch matched to ref at its end.
  double scale = 1.0 + std::abs(z0) + std::abs(z_ref);
  Cx s_ref = 0;
  if (std::abs(z_ref - z0) > 1e-13 * scale) {
    ContourPath route0 = detour_route(z0, z_ref, tps);
    s_ref = action_integral(pot, lambda, route0, tps, &ref, opt).value;
  }

  // Quarter-root continuation along a route: follow the continuous argument
  // of P from the reference sample, subdividing legs until each step turns
  // by less than a right angle.
  auto quarter_along = [&](const ContourPath& route) {
    double theta = 2 * std::arg(ref.w);
    for (std::size_t i = 0; i + 1 < route.size(); ++i) {
      int n = 8;
      for (; n <= 65536; n *= 2) {
        double th = theta;
        bool fine = true;
        Cx prev = f(route[i]);
        for (int j = 1; j <= n && fine; ++j) {
          Cx cur = f(route[i] + (route[i + 1] - route[i]) *
                                    (double(j) / n));
          double d = std::arg(cur / prev);
          if (std::abs(d) > 0.5 * pi) fine = false;
          th += d;
          prev = cur;
        }
        if (fine) {
          theta = th;
          break;
        }
      }
    }
    Cx pz = f(route.back());
    return std::polar(std::pow(std::abs(pz), 0.25), theta / 4.0);
  };

  std::vector<WkbValue> out;
  for (Cx z : zs) {
    Cx s, u;
    if (std::abs(z - z_ref) <= 1e-13 * scale) {
      s = s_ref;
      u = std::polar(std::pow(std::abs(f(z_ref)), 0.25),
                     2 * std::arg(ref.w) / 4.0);
    } else {
      ContourPath route = detour_route(z_ref, z, tps);
      s = s_ref + action_integral(pot, lambda, route, tps, &ref, opt).value;
      u = quarter_along(route);
    }
    Cx ep = std::exp(k * s), em = std::exp(-k * s);
    out.push_back({z, s, ep / u, em / u});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Convergence bookkeeping against oracle eigenvalues.
// ---------------------------------------------------------------------------

struct ConvergenceRow {
  long m = 0;
  Cx estimate_k, oracle_k, estimate_2k, oracle_2k;
  double err_k = 0, err_2k = 0;
  double ratio = 0;  // err_k / err_2k; 0 when err_2k vanishes
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  double median_ratio = 0;
  double max_err_k = 0, max_err_2k = 0;
};

namespace detail {

// Nearest oracle to the estimate; ambiguous when the runner-up is less
// than twice as far, so the attribution is not decisive.
inline Cx match_oracle(Cx e, const std::vector<Cx>& oracle) {
  std::size_t b1 = 0;
  double d1 = 1e300, d2 = 1e300;
  for (std::size_t i = 0; i < oracle.size(); ++i) {
    double d = std::abs(oracle[i] - e);
    if (d < d1) {
      d2 = d1;
      d1 = d;
      b1 = i;
    } else if (d < d2) {
      d2 = d;
    }
  }
  if (oracle.size() >= 2 && d2 < 2 * d1)
    throw MatchingAmbiguous(
        "convergence report: two oracle eigenvalues compete for one "
        "estimate");
  return oracle[b1];
}

}  // namespace detail

// Per-m error table for the same curve quantized at k and 2k, against the
// oracle eigenvalue lists at those k. Rows cover the m present in both
// estimate lists.
inline ConvergenceReport convergence_report(
    const std::vector<EigenvalueEstimate>& est_k,
    const std::vector<Cx>& oracle_k,
    const std::vector<EigenvalueEstimate>& est_2k,
    const std::vector<Cx>& oracle_2k) {
  ConvergenceReport rep;
  if (oracle_k.empty() || oracle_2k.empty()) return rep;
  for (const auto& e1 : est_k)
    for (const auto& e2 : est_2k) {
      if (e1.m != e2.m) continue;
      ConvergenceRow row;
      row.m = e1.m;
      row.estimate_k = e1.lambda0;
      row.estimate_2k = e2.lambda0;
      row.oracle_k = detail::match_oracle(e1.lambda0, oracle_k);
      row.oracle_2k = detail::match_oracle(e2.lambda0, oracle_2k);
      row.err_k = std::abs(row.estimate_k - row.oracle_k);
      row.err_2k = std::abs(row.estimate_2k - row.oracle_2k);
      row.ratio = row.err_2k > 0 ? row.err_k / row.err_2k : 0.0;
      rep.rows.push_back(row);
      rep.max_err_k = std::max(rep.max_err_k, row.err_k);
      rep.max_err_2k = std::max(rep.max_err_2k, row.err_2k);
    }
  std::vector<double> ratios;
  for (const auto& r : rep.rows)
    if (r.err_2k > 0) ratios.push_back(r.ratio);
  if (!ratios.empty()) {
    std::sort(ratios.begin(), ratios.end());
    std::size_t n = ratios.size();
    rep.median_ratio = n % 2 ? ratios[n / 2]
                             : 0.5 * (ratios[n / 2 - 1] + ratios[n / 2]);
  }
  return rep;
}

}  // namespace specgraph
