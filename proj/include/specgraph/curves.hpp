#pragma once

// Spectral curves in the lambda plane and the limit spectral graph. The
// eigenvalue accumulation set is carried by three curve families, each the
// zero set of the real part of an action integral:
//   singular   Re S_{j,l} = 0   (turning points j and l joined by a line),
//   critical   Re C_j(p)  = 0   (a Stokes line of z_j passes through p),
//   balanced   Re B(a,b)  = 0   (both boundary points in a canonical domain).
// A shared zero-set tracer follows level lines of a harmonic function by a
// tangent predictor and a gradient-Newton corrector. Family wrappers feed it
// the standardized integrals under a consistent turning-point labeling, the
// essential filter classifies samples by linkedness of the boundary points,
// and the assembler splits, truncates, and joins the pieces.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "specgraph/arrangement.hpp"
#include "specgraph/core.hpp"
#include "specgraph/phase.hpp"
#include "specgraph/potential.hpp"
#include "specgraph/stokes.hpp"

namespace specgraph {

// ---------------------------------------------------------------------------
// Curve types.
// ---------------------------------------------------------------------------

enum class CurveKind { Singular, CriticalA, CriticalB, Balanced };

inline const char* to_string(CurveKind k) {
  switch (k) {
    case CurveKind::Singular: return "singular";
    case CurveKind::CriticalA: return "critical_a";
    case CurveKind::CriticalB: return "critical_b";
    default: return "balanced";
  }
}

enum class EndpointKind {
  Open,       // stopped at the rectangle boundary (or step budget)
  Junction,   // gradient collapse or truncation against another structure
  Degenerate  // excluded-disc rim or evaluation breakdown
};

struct SpectralCurve {
  CurveKind kind = CurveKind::Balanced;
  int j = -1, l = -1;  // defining turning-point labels (l only for Singular)
  std::vector<Cx> samples;
  std::vector<Cx> values;              // standardized integral per sample
  std::vector<signed char> essential;  // 1 yes, 0 no, -1 undecided
  EndpointKind front_end = EndpointKind::Open;
  EndpointKind back_end = EndpointKind::Open;
  bool closed = false;

  std::size_t size() const { return samples.size(); }
};

// ---------------------------------------------------------------------------
// Turning-point labeling over the parameter domain.
// ---------------------------------------------------------------------------

// Stateful label continuation. Labels are pinned at a reproducible base
// point of the domain and carried to each queried lambda by root tracking
// from the previous query (curve tracers move in small steps, so hops stay
// short). A failed hop falls back to a fresh continuation from the base.
class RootTracker {
 public:
  RootTracker(const BivariatePotential& pot, const ParameterDomain& dom,
              double eps_tp = 1e-10)
      : pot_(&pot), dom_(dom), eps_(eps_tp) {
    base_ = turning_points(pot, base_lambda(dom), eps_tp);
    cur_ = base_;
  }

  // Deterministic base: the node of a coarse lattice farthest from all
  // excluded discs (the rectangle center when there are none).
  static Cx base_lambda(const ParameterDomain& dom) {
    if (dom.excluded.empty()) return dom.center();
    const int n = 17;
    Cx best = dom.center();
    double best_d = -1;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        Cx z = dom.lo + Cx(dom.width() * (i + 0.5) / n,
                           dom.height() * (j + 0.5) / n);
        double d = 1e300;
        for (const auto& disc : dom.excluded)
          d = std::min(d, std::abs(z - disc.center) - disc.radius);
        if (d > best_d) {
          best_d = d;
          best = z;
        }
      }
    return best;
  }

  const BivariatePotential& potential() const { return *pot_; }
  const ParameterDomain& domain() const { return dom_; }
  const TurningPointSet& base() const { return base_; }

  std::vector<int> labels() const {
    std::vector<int> out;
    for (const auto& p : base_.points) out.push_back(p.label);
    return out;
  }

  const TurningPointSet& at(Cx lambda) {
    if (lambda == cur_.lambda) return cur_;
    try {
      cur_ = hop(cur_, lambda);
    } catch (const Error&) {
      cur_ = hop(base_, lambda);  // rethrows on a genuine breakdown
    }
    return cur_;
  }

  void reset() { cur_ = base_; }

 private:
  // One continuation from.lambda -> lambda, detouring around excluded discs
  // so the labels do not depend on how close a straight hop shaves them.
  TurningPointSet hop(const TurningPointSet& from, Cx lambda) const {
    std::vector<Cx> path{from.lambda};
    Cx d = lambda - from.lambda;
    double len = std::abs(d);
    if (len > 0) {
      struct Detour {
        double t;
        Cx z;
      };
      std::vector<Detour> det;
      for (const auto& disc : dom_.excluded) {
        double t = std::clamp(
            ((disc.center - from.lambda) / d).real(), 0.0, 1.0);
        Cx near = from.lambda + t * d;
        if (t <= 0 || t >= 1) continue;
        if (std::abs(near - disc.center) >= 1.3 * disc.radius) continue;
        Cx away = near - disc.center;
        if (std::abs(away) < 1e-12 * disc.radius) away = Cx(0, 1) * d / len;
        det.push_back(
            {t, disc.center + away / std::abs(away) * (2.0 * disc.radius)});
      }
      std::sort(det.begin(), det.end(),
                [](const Detour& a, const Detour& b) { return a.t < b.t; });
      for (const auto& dv : det) path.push_back(dv.z);
    }
    path.push_back(lambda);
    return track_roots(*pot_, path, from, eps_).back();
  }

  const BivariatePotential* pot_;
  ParameterDomain dom_;
  double eps_;
  TurningPointSet base_;
  TurningPointSet cur_;
};

// ---------------------------------------------------------------------------
// Zero-set tracing for harmonic real functions.
// ---------------------------------------------------------------------------

struct ZeroTraceOptions {
  double eps_curve = 1e-9;  // corrector residual target for |F|
  double step = 0;          // arclength step; 0: domain diameter / 256
  double fd_h = 0;          // gradient stencil; 0: 1e-6 * domain diameter
  double eps_bif = 0;       // |grad F| junction cutoff; 0: 1e-3 * running max
  int max_steps = 6000;     // per tracing direction
  int newton_iters = 12;
};

struct ZeroTraceDiagnostics {
  long evals = 0;
  int seeds = 0;
  int seeds_rejected = 0;
  std::vector<Cx> junctions;  // gradient-collapse stops
};

struct TracedCurve {
  std::vector<Cx> points;
  EndpointKind front_end = EndpointKind::Open;
  EndpointKind back_end = EndpointKind::Open;
  bool closed = false;
};

namespace detail {

struct ZeroTracer {
  const std::function<double(Cx)>& F;
  const ParameterDomain& dom;
  ZeroTraceOptions opt;
  ZeroTraceDiagnostics* diag;

  double step, fd, cell;
  std::vector<TracedCurve> curves;

  static constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

  double eval(Cx z) const {
    if (!dom.contains(z)) return kNan;
    if (diag) ++diag->evals;
    try {
      return F(z);
    } catch (const Error&) {
      return kNan;
    }
  }

  // Central-difference gradient as gx + i gy; NaN component on breakdown.
  Cx grad(Cx z) const {
    double fr = eval(z + fd) - eval(z - fd);
    double fi = eval(z + Cx(0, fd)) - eval(z - Cx(0, fd));
    return Cx(fr, fi) / (2 * fd);
  }

  static bool bad(double x) { return !(x == x); }
  static bool bad(Cx z) { return bad(z.real()) || bad(z.imag()); }

  // Newton toward the zero set along the gradient. Returns false when the
  // residual cannot be brought under eps within the displacement cap.
  bool correct(Cx& z, double cap) const {
    Cx z0 = z;
    for (int it = 0; it < opt.newton_iters; ++it) {
      double f = eval(z);
      if (bad(f)) return false;
      if (std::abs(f) <= opt.eps_curve) return true;
      Cx g = grad(z);
      if (bad(g) || std::norm(g) == 0) return false;
      Cx dz = -f * g / std::norm(g);
      if (std::abs(z + dz - z0) > cap) return false;
      z += dz;
    }
    return std::abs(eval(z)) <= opt.eps_curve;
  }

  // 1-D Newton constrained to the line z0 + s dir (rectangle edge) or, when
  // rim is set, re-projected onto the excluded-disc rim after each move.
  bool correct_on(Cx& z, Cx dir, const ExcludedDisc* rim) const {
    for (int it = 0; it < 8; ++it) {
      double f = eval(z);
      if (bad(f)) return false;
      if (std::abs(f) <= opt.eps_curve) return true;
      double df =
          (eval(z + fd * dir) - eval(z - fd * dir)) / (2 * fd);
      if (bad(df) || df == 0) return false;
      double s = -f / df;
      if (std::abs(s) > step) return false;
      z += s * dir;
      if (rim) {
        Cx rel = z - rim->center;
        z = rim->center + rel / std::abs(rel) * rim->radius;
        dir = Cx(0, 1) * rel / std::abs(rel);
      }
    }
    return std::abs(eval(z)) <= opt.eps_curve;
  }

  double dist_to_traced(Cx z) const {
    double d = 1e300;
    for (const auto& c : curves) d = std::min(d, path_distance(c.points, z));
    return d;
  }

  // Clip the step [z, z + h t] to the rectangle; returns the boundary point
  // and the edge direction, or h if no crossing.
  double clip_rect(Cx z, Cx t, double h, Cx& edge_dir) const {
    double s = h;
    edge_dir = Cx(0, 1);
    auto check = [&](double num, double den, Cx dir) {
      if (den == 0) return;
      double si = num / den;
      if (si >= 0 && si < s) {
        s = si;
        edge_dir = dir;
      }
    };
    check(dom.lo.real() - z.real(), t.real(), Cx(0, 1));
    check(dom.hi.real() - z.real(), t.real(), Cx(0, 1));
    check(dom.lo.imag() - z.imag(), t.imag(), Cx(1, 0));
    check(dom.hi.imag() - z.imag(), t.imag(), Cx(1, 0));
    return s;
  }

  // March from the seed in the direction sign * (tangent at seed). Appends
  // accepted samples to out and returns the endpoint kind; sets closed when
  // the path returns to the seed.
  EndpointKind march(Cx seed, Cx t_seed, int sign, std::vector<Cx>& out,
                     bool& closed) const {
    Cx z = seed;
    Cx t = t_seed * double(sign);
    double h = step;
    double g_max = std::abs(grad(seed));
    closed = false;

    for (int k = 0; k < opt.max_steps; ++k) {
      Cx zp = z + h * t;

      // Rectangle exit: land exactly on the wall and polish along it.
      if (!dom.in_rect(zp)) {
        Cx edge_dir;
        double s_hit = clip_rect(z, t, h, edge_dir);
        Cx zb = z + std::min(s_hit, h) * t;
        zb = Cx(std::clamp(zb.real(), dom.lo.real(), dom.hi.real()),
                std::clamp(zb.imag(), dom.lo.imag(), dom.hi.imag()));
        if (correct_on(zb, edge_dir, nullptr)) out.push_back(zb);
        return EndpointKind::Open;
      }

      // Excluded-disc entry (or transit): land on the near rim and polish
      // along it.
      bool hit_disc = false;
      for (const auto& disc : dom.excluded) {
        Cx w = z - disc.center;
        double bq = (w * std::conj(t)).real();
        double cq = std::norm(w) - disc.radius * disc.radius;
        double D = bq * bq - cq;
        if (D < 0) continue;
        double s_in = -bq - std::sqrt(D);
        if (s_in <= 0 || s_in > h) continue;
        Cx rel = z + s_in * t - disc.center;
        Cx zr = disc.center + rel / std::abs(rel) * disc.radius;
        Cx dir = Cx(0, 1) * rel / std::abs(rel);
        if (correct_on(zr, dir, &disc)) out.push_back(zr);
        hit_disc = true;
        break;
      }
      if (hit_disc) return EndpointKind::Degenerate;

      if (!correct(zp, 0.6 * h + 2 * opt.eps_curve)) {
        if (h > step / 64) {
          h *= 0.5;
          continue;
        }
        return EndpointKind::Degenerate;
      }

      Cx g = grad(zp);
      if (bad(g)) {
        out.push_back(zp);
        return EndpointKind::Degenerate;
      }
      double gn = std::abs(g);
      g_max = std::max(g_max, gn);
      double cutoff = opt.eps_bif > 0 ? opt.eps_bif : 1e-3 * g_max;
      if (gn < cutoff) {
        out.push_back(zp);
        if (diag) diag->junctions.push_back(zp);
        return EndpointKind::Junction;
      }

      out.push_back(zp);
      if (k > 4 && std::abs(zp - seed) < 0.9 * step) {
        closed = true;
        return EndpointKind::Open;
      }

      Cx tn = Cx(0, 1) * g / gn;
      if ((tn * std::conj(t)).real() < 0) tn = -tn;
      t = tn;
      z = zp;
      h = std::min(step, 1.5 * h);
    }
    return EndpointKind::Open;
  }

  void trace_from(Cx seed) {
    Cx g = grad(seed);
    if (bad(g) || std::abs(g) == 0) {
      if (diag) ++diag->seeds_rejected;
      return;
    }
    Cx t = Cx(0, 1) * g / std::abs(g);

    TracedCurve c;
    std::vector<Cx> fwd, bwd;
    bool closed = false;
    c.back_end = march(seed, t, +1, fwd, closed);
    if (closed) {
      c.points.push_back(seed);
      c.points.insert(c.points.end(), fwd.begin(), fwd.end());
      c.closed = true;
      c.front_end = c.back_end = EndpointKind::Open;
    } else {
      bool closed_b = false;
      c.front_end = march(seed, t, -1, bwd, closed_b);
      c.points.assign(bwd.rbegin(), bwd.rend());
      c.points.push_back(seed);
      c.points.insert(c.points.end(), fwd.begin(), fwd.end());
    }
    if (c.points.size() >= 2) curves.push_back(std::move(c));
  }

  void run(int grid_n) {
    if (grid_n < 8)
      throw SeedMiss("zero-set tracing: lattice below 8 x 8 cannot seed "
                     "curve coverage");
    step = opt.step > 0 ? opt.step : dom.diameter() / 256.0;
    fd = opt.fd_h > 0 ? opt.fd_h : 1e-6 * dom.diameter();
    cell = std::max(dom.width(), dom.height()) / (grid_n - 1);

    std::vector<double> fg(std::size_t(grid_n) * grid_n, kNan);
    auto node = [&](int i, int j) {
      return dom.lo + Cx(dom.width() * i / (grid_n - 1),
                         dom.height() * j / (grid_n - 1));
    };
    for (int j = 0; j < grid_n; ++j)
      for (int i = 0; i < grid_n; ++i)
        fg[std::size_t(j) * grid_n + i] = eval(node(i, j));

    auto try_seed = [&](Cx za, double fa, Cx zb, double fb) {
      if (bad(fa) || bad(fb) || fa * fb > 0) return;
      if (fa == 0 && fb == 0) return;
      for (int it = 0; it < 40 && std::abs(zb - za) > 1e-3 * cell; ++it) {
        Cx zm = 0.5 * (za + zb);
        double fm = eval(zm);
        if (bad(fm)) return;
        if (fm == 0 || fm * fa < 0) {
          zb = zm;
          fb = fm;
        } else {
          za = zm;
          fa = fm;
        }
      }
      Cx z = std::abs(fa) < std::abs(fb) ? za : zb;
      if (diag) ++diag->seeds;
      if (!correct(z, 1.5 * cell) || !dom.contains(z)) {
        if (diag) ++diag->seeds_rejected;
        return;
      }
      if (dist_to_traced(z) < 0.75 * cell) return;  // already covered
      trace_from(z);
    };

    for (int j = 0; j < grid_n; ++j)
      for (int i = 0; i < grid_n; ++i) {
        double f = fg[std::size_t(j) * grid_n + i];
        if (i + 1 < grid_n)
          try_seed(node(i, j), f, node(i + 1, j),
                   fg[std::size_t(j) * grid_n + i + 1]);
        if (j + 1 < grid_n)
          try_seed(node(i, j), f, node(i, j + 1),
                   fg[std::size_t(j + 1) * grid_n + i]);
      }
  }
};

}  // namespace detail

// Trace the zero set of a real-valued F (locally the real part of an
// analytic function) over the domain. Seeds come from sign changes on a
// grid_n x grid_n lattice; each is refined by bisection and a Newton
// corrector, then continued both ways by a tangent predictor along the
// harmonic-conjugate direction. Evaluation failures inside F surface as
// curve terminations, not exceptions.
inline std::vector<TracedCurve> trace_zero_set(
    const std::function<double(Cx)>& F, const ParameterDomain& dom,
    int grid_n, ZeroTraceOptions opt = {},
    ZeroTraceDiagnostics* diag = nullptr) {
  detail::ZeroTracer tr{F, dom, opt, diag, 0, 0, 0, {}};
  tr.run(grid_n);
  return tr.curves;
}

// ---------------------------------------------------------------------------
// Curve family drivers.
// ---------------------------------------------------------------------------

enum class BoundarySide { A, B };

struct CurveOptions {
  int grid_n = 32;
  ZeroTraceOptions trace;
  double eps_tp = 1e-10;
  RouteIntegralOptions phase;   // quadrature for the defining integrals
  TraceOptions graph;           // Stokes graphs for linkedness checks
  ArrOptions arr;
  CanonicalRouteOptions route;
  int essential_stride = 5;     // graph checks every K-th sample
  bool essential_every_sample = false;
  double canonical_tol = 1e-5;  // |Re B| cutoff along the canonical route
  bool fill_values = true;      // store the complex integral per sample
};

namespace detail {

inline SpectralCurve make_curve(CurveKind kind, int j, int l,
                                TracedCurve&& t) {
  SpectralCurve c;
  c.kind = kind;
  c.j = j;
  c.l = l;
  c.samples = std::move(t.points);
  c.front_end = t.front_end;
  c.back_end = t.back_end;
  c.closed = t.closed;
  return c;
}

inline void fill_values(SpectralCurve& c,
                        const std::function<Cx(Cx)>& integral) {
  c.values.assign(c.samples.size(),
                  Cx(std::numeric_limits<double>::quiet_NaN(), 0));
  for (std::size_t i = 0; i < c.samples.size(); ++i) {
    try {
      c.values[i] = integral(c.samples[i]);
    } catch (const Error&) {
    }
  }
}

inline signed char signed_char_cast(int v) {
  return v > 0 ? 1 : v == 0 ? 0 : -1;
}

// Evaluate a ternary verdict (1, 0, -1 undecided) on every stride-th index,
// bisect between neighbors that disagree, then spread decided values into
// the remaining slots from the nearest decided index.
inline std::vector<signed char> refined_flags(
    std::size_t n, int stride, const std::function<int(std::size_t)>& verdict) {
  std::vector<signed char> flag(n, -2);
  if (n == 0) return flag;
  auto ensure = [&](std::size_t i) {
    if (flag[i] == -2) flag[i] = signed_char_cast(verdict(i));
    return flag[i];
  };
  std::vector<std::size_t> checked;
  for (std::size_t i = 0; i < n; i += std::size_t(std::max(1, stride))) {
    ensure(i);
    checked.push_back(i);
  }
  if (checked.back() != n - 1) {
    ensure(n - 1);
    checked.push_back(n - 1);
  }
  std::vector<std::pair<std::size_t, std::size_t>> work;
  for (std::size_t k = 0; k + 1 < checked.size(); ++k)
    work.push_back({checked[k], checked[k + 1]});
  while (!work.empty()) {
    auto [lo, hi] = work.back();
    work.pop_back();
    if (hi - lo <= 1) continue;
    signed char a = flag[lo], b = flag[hi];
    if (a < 0 || b < 0 || a == b) continue;
    std::size_t mid = lo + (hi - lo) / 2;
    ensure(mid);
    work.push_back({lo, mid});
    work.push_back({mid, hi});
  }
  // Nearest-decided fill for unchecked and undecided slots.
  std::vector<signed char> out(n, -1);
  std::vector<std::size_t> decided;
  for (std::size_t i = 0; i < n; ++i)
    if (flag[i] >= 0) decided.push_back(i);
  if (decided.empty()) return out;
  for (std::size_t i = 0; i < n; ++i) {
    if (flag[i] >= 0) {
      out[i] = flag[i];
      continue;
    }
    std::size_t best = decided.front();
    for (std::size_t d : decided)
      if (std::abs(long(d) - long(i)) < std::abs(long(best) - long(i)))
        best = d;
    out[i] = flag[best];
  }
  return out;
}

// Split a curve into the maximal runs whose flag equals keep. Runs cut at
// interior samples get Junction endpoints; runs reaching the original ends
// inherit the original endpoint kinds. Closed curves are rotated so a
// non-kept sample sits at the seam (fully kept ones pass through intact).
inline std::vector<SpectralCurve> split_by_flag(
    const SpectralCurve& c, const std::vector<signed char>& flag,
    signed char keep) {
  std::vector<SpectralCurve> out;
  std::size_t n = c.samples.size();
  bool all = true;
  for (std::size_t i = 0; i < n; ++i) all = all && (flag[i] == keep);
  if (all) {
    out.push_back(c);
    return out;
  }

  SpectralCurve base = c;
  std::vector<signed char> f = flag;
  bool rotated = false;
  if (c.closed) {
    std::size_t seam = 0;
    while (seam < n && f[seam] == keep) ++seam;
    std::rotate(base.samples.begin(), base.samples.begin() + seam,
                base.samples.end());
    if (!base.values.empty())
      std::rotate(base.values.begin(), base.values.begin() + seam,
                  base.values.end());
    if (!base.essential.empty())
      std::rotate(base.essential.begin(), base.essential.begin() + seam,
                  base.essential.end());
    std::rotate(f.begin(), f.begin() + seam, f.end());
    rotated = true;
  }

  std::size_t i = 0;
  while (i < n) {
    if (f[i] != keep) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && f[j + 1] == keep) ++j;
    if (j - i + 1 >= 2) {
      SpectralCurve piece;
      piece.kind = base.kind;
      piece.j = base.j;
      piece.l = base.l;
      piece.samples.assign(base.samples.begin() + i,
                           base.samples.begin() + j + 1);
      if (!base.values.empty())
        piece.values.assign(base.values.begin() + i,
                            base.values.begin() + j + 1);
      if (!base.essential.empty())
        piece.essential.assign(base.essential.begin() + i,
                               base.essential.begin() + j + 1);
      piece.front_end = (i == 0 && !rotated) ? base.front_end
                                             : EndpointKind::Junction;
      piece.back_end = (j == n - 1 && !rotated) ? base.back_end
                                                : EndpointKind::Junction;
      out.push_back(std::move(piece));
    }
    i = j + 1;
  }
  return out;
}

}  // namespace detail

// Curves Re S_{j,l} = 0 for every unordered pair of turning-point labels.
// Pairs whose zero set is empty contribute nothing.
inline std::vector<SpectralCurve> singular_curves(RootTracker& tracker,
                                                  const CurveOptions& opt = {},
                                                  ZeroTraceDiagnostics* diag =
                                                      nullptr) {
  std::vector<SpectralCurve> out;
  auto labels = tracker.labels();
  for (std::size_t p = 0; p < labels.size(); ++p)
    for (std::size_t q = p + 1; q < labels.size(); ++q) {
      int j = labels[p], l = labels[q];
      auto integral = [&](Cx lam) {
        return pair_integral(tracker.potential(), lam, tracker.at(lam), j, l,
                             opt.phase)
            .value;
      };
      auto F = [&](Cx lam) { return integral(lam).real(); };
      for (auto& t :
           trace_zero_set(F, tracker.domain(), opt.grid_n, opt.trace, diag)) {
        SpectralCurve c =
            detail::make_curve(CurveKind::Singular, j, l, std::move(t));
        if (opt.fill_values) detail::fill_values(c, integral);
        out.push_back(std::move(c));
      }
    }
  return out;
}

inline std::vector<SpectralCurve> singular_curves(
    const BivariatePotential& pot, const ParameterDomain& dom,
    const CurveOptions& opt = {}) {
  RootTracker tracker(pot, dom, opt.eps_tp);
  return singular_curves(tracker, opt);
}

// Curves Re C_j(p) = 0 for every turning-point label j, with respect to the
// finite boundary point p. side records which boundary point p is.
inline std::vector<SpectralCurve> critical_curves(RootTracker& tracker,
                                                  const BoundaryPoint& p,
                                                  BoundarySide side,
                                                  const CurveOptions& opt = {},
                                                  ZeroTraceDiagnostics* diag =
                                                      nullptr) {
  if (!p.finite)
    throw std::invalid_argument(
        "critical_curves: the reference boundary point must be finite");
  CurveKind kind =
      side == BoundarySide::A ? CurveKind::CriticalA : CurveKind::CriticalB;
  std::vector<SpectralCurve> out;
  for (int j : tracker.labels()) {
    auto integral = [&](Cx lam) {
      return endpoint_integral(tracker.potential(), lam, tracker.at(lam), j,
                               p.z, opt.phase)
          .value;
    };
    auto F = [&](Cx lam) { return integral(lam).real(); };
    for (auto& t :
         trace_zero_set(F, tracker.domain(), opt.grid_n, opt.trace, diag)) {
      SpectralCurve c = detail::make_curve(kind, j, -1, std::move(t));
      if (opt.fill_values) detail::fill_values(c, integral);
      out.push_back(std::move(c));
    }
  }
  return out;
}

inline std::vector<SpectralCurve> critical_curves(
    const BivariatePotential& pot, const ParameterDomain& dom,
    const BoundaryPoint& p, BoundarySide side, const CurveOptions& opt = {}) {
  RootTracker tracker(pot, dom, opt.eps_tp);
  return critical_curves(tracker, p, side, opt);
}

// Curves Re B(a,b) = 0 restricted to parameters where a and b lie in one
// canonical domain. The zero set is seeded from the default-route integral;
// each candidate sample must then pass the linkedness conjunction, and where
// the canonical route differs from the direct one the integral is re-taken
// along it and the sample is dropped unless Re B still vanishes. Transitions
// between kept and dropped samples are sharpened by index bisection.
inline std::vector<SpectralCurve> balanced_curves(RootTracker& tracker,
                                                  const BoundaryPoint& a,
                                                  const BoundaryPoint& b,
                                                  const CurveOptions& opt = {},
                                                  ZeroTraceDiagnostics* diag =
                                                      nullptr) {
  if (!a.finite || !b.finite)
    throw std::invalid_argument("balanced_curves: both points must be finite");
  if (std::abs(a.z - b.z) < 1e-12 * (1.0 + std::abs(a.z)))
    throw std::invalid_argument(
        "balanced_curves: boundary points must be distinct");

  const BivariatePotential& pot = tracker.potential();
  auto integral = [&](Cx lam) {
    return boundary_integral(pot, lam, tracker.at(lam), a.z, b.z, opt.phase)
        .value;
  };
  auto F = [&](Cx lam) { return integral(lam).real(); };

  auto verdict_at = [&](Cx lam) -> int {
    try {
      const TurningPointSet& tps = tracker.at(lam);
      StokesGraph g = trace_graph(pot, lam, tps, opt.graph);
      auto arrs = make_arrangements(g, opt.arr);
      for (const auto& arr : arrs)
        if (!arr.linked(a, b)) return 0;
      CanonicalRoute route = canonical_route(g, arrs, a.z, b.z, opt.route);
      if (route.straight) return 1;
      double f = boundary_integral(pot, lam, tps, a.z, b.z, opt.phase,
                                   &route.path)
                     .value.real();
      return std::abs(f) <= opt.canonical_tol ? 1 : 0;
    } catch (const RoutingFailure&) {
      return 0;
    } catch (const Error&) {
      return -1;
    }
  };

  std::vector<SpectralCurve> out;
  int stride = opt.essential_every_sample ? 1 : opt.essential_stride;
  for (auto& t :
       trace_zero_set(F, tracker.domain(), opt.grid_n, opt.trace, diag)) {
    SpectralCurve c =
        detail::make_curve(CurveKind::Balanced, -1, -1, std::move(t));
    if (opt.fill_values) detail::fill_values(c, integral);
    auto flags = detail::refined_flags(
        c.samples.size(), stride,
        [&](std::size_t i) { return verdict_at(c.samples[i]); });
    for (auto& piece : detail::split_by_flag(c, flags, 1)) {
      piece.essential.assign(piece.samples.size(), 1);
      out.push_back(std::move(piece));
    }
  }
  return out;
}

inline std::vector<SpectralCurve> balanced_curves(
    const BivariatePotential& pot, const ParameterDomain& dom,
    const BoundaryPoint& a, const BoundaryPoint& b,
    const CurveOptions& opt = {}) {
  RootTracker tracker(pot, dom, opt.eps_tp);
  return balanced_curves(tracker, a, b, opt);
}

// Essential flags for a singular or critical curve: a sample is essential
// when the boundary points are NOT linked with respect to the complex
// containing the curve's defining turning points. Samples where the graph
// or the arrangement cannot be evaluated are filled from their neighbors.
inline void essential_filter(RootTracker& tracker, SpectralCurve& curve,
                             const BoundaryPoint& a, const BoundaryPoint& b,
                             const CurveOptions& opt = {}) {
  if (curve.kind == CurveKind::Balanced)
    throw std::invalid_argument(
        "essential_filter: balanced curves carry no essential flags");

  auto verdict_at = [&](Cx lam) -> int {
    try {
      const TurningPointSet& tps = tracker.at(lam);
      StokesGraph g = trace_graph(tracker.potential(), lam, tps, opt.graph);
      int ci = g.complex_of(curve.j);
      if (curve.kind == CurveKind::Singular) {
        if (ci != g.complex_of(curve.l)) return -1;  // junction line not hit
      }
      if (ci < 0) return -1;
      Arrangement arr(g, ci, opt.arr);
      return arr.linked(a, b) ? 0 : 1;
    } catch (const Error&) {
      return -1;
    }
  };

  int stride = opt.essential_every_sample ? 1 : opt.essential_stride;
  curve.essential = detail::refined_flags(
      curve.samples.size(), stride,
      [&](std::size_t i) { return verdict_at(curve.samples[i]); });
}

// ---------------------------------------------------------------------------
// Limit spectral graph assembly.
// ---------------------------------------------------------------------------

struct JunctionInfo {
  Cx lambda;
  std::vector<int> curves;  // indices into LimitSpectralGraph::curves
};

struct OverlapInfo {
  int c1 = -1, c2 = -1;     // indices into LimitSpectralGraph::curves
  std::size_t samples = 0;  // length of the sustained co-incidence
};

struct LimitSpectralGraph {
  std::vector<SpectralCurve> curves;
  std::vector<JunctionInfo> junctions;
  std::vector<OverlapInfo> overlaps;
};

namespace detail {

// Contact analysis between two polylines: runs of consecutive samples of c1
// lying within eps of c2. Long runs are overlaps; short isolated ones are
// crossings, reported by their closest sample index.
struct ContactRun {
  std::size_t lo = 0, hi = 0;  // inclusive sample range on c1
  std::size_t best = 0;        // closest sample
  double dist = 1e300;
};

inline std::vector<ContactRun> contact_runs(const SpectralCurve& c1,
                                            const SpectralCurve& c2,
                                            double eps) {
  std::vector<ContactRun> runs;
  bool in = false;
  for (std::size_t i = 0; i < c1.samples.size(); ++i) {
    double d = path_distance(c2.samples, c1.samples[i]);
    if (d < eps) {
      if (!in) {
        runs.push_back({i, i, i, d});
        in = true;
      } else {
        runs.back().hi = i;
        if (d < runs.back().dist) {
          runs.back().dist = d;
          runs.back().best = i;
        }
      }
    } else {
      in = false;
    }
  }
  return runs;
}

inline SpectralCurve slice_curve(const SpectralCurve& c, std::size_t lo,
                                 std::size_t hi, EndpointKind front,
                                 EndpointKind back) {
  SpectralCurve piece;
  piece.kind = c.kind;
  piece.j = c.j;
  piece.l = c.l;
  piece.samples.assign(c.samples.begin() + lo, c.samples.begin() + hi + 1);
  if (!c.values.empty())
    piece.values.assign(c.values.begin() + lo, c.values.begin() + hi + 1);
  if (!c.essential.empty())
    piece.essential.assign(c.essential.begin() + lo,
                           c.essential.begin() + hi + 1);
  piece.front_end = front;
  piece.back_end = back;
  piece.closed = false;
  return piece;
}

inline bool curve_order(const SpectralCurve& x, const SpectralCurve& y) {
  if (x.kind != y.kind) return int(x.kind) < int(y.kind);
  if (x.j != y.j) return x.j < y.j;
  if (x.l != y.l) return x.l < y.l;
  if (x.samples.empty() || y.samples.empty())
    return x.samples.size() < y.samples.size();
  Cx sx = x.samples.front(), sy = y.samples.front();
  if (sx.real() != sy.real()) return sx.real() < sy.real();
  return sx.imag() < sy.imag();
}

}  // namespace detail

// The set T: essential parts of the critical and singular families plus the
// balanced curves, with the family mix decided by endpoint finiteness.
// Curves are split where they cross; junction and overlap metadata is
// attached.
inline LimitSpectralGraph assemble_T(const BivariatePotential& pot,
                                     const ParameterDomain& dom,
                                     const BoundaryPoint& a,
                                     const BoundaryPoint& b,
                                     const CurveOptions& opt = {}) {
  RootTracker tracker(pot, dom, opt.eps_tp);

  std::vector<SpectralCurve> families;
  if (a.finite)
    for (auto& c : critical_curves(tracker, a, BoundarySide::A, opt))
      families.push_back(std::move(c));
  if (b.finite)
    for (auto& c : critical_curves(tracker, b, BoundarySide::B, opt))
      families.push_back(std::move(c));
  for (auto& c : singular_curves(tracker, opt))
    families.push_back(std::move(c));

  std::vector<SpectralCurve> kept;
  for (auto& c : families) {
    essential_filter(tracker, c, a, b, opt);
    for (auto& piece : detail::split_by_flag(c, c.essential, 1))
      kept.push_back(std::move(piece));
  }
  if (a.finite && b.finite)
    for (auto& c : balanced_curves(tracker, a, b, opt))
      kept.push_back(std::move(c));

  double step =
      opt.trace.step > 0 ? opt.trace.step : dom.diameter() / 256.0;
  double eps_j = 2.5 * step;

  LimitSpectralGraph T;
  T.curves = std::move(kept);
  std::sort(T.curves.begin(), T.curves.end(), detail::curve_order);

  // Interior crossings: split both participants; sustained co-incidence is
  // an overlap diagnostic and no split happens.
  std::vector<std::vector<std::size_t>> cut_at(T.curves.size());
  for (std::size_t p = 0; p < T.curves.size(); ++p)
    for (std::size_t q = 0; q < T.curves.size(); ++q) {
      if (p == q) continue;
      auto runs = detail::contact_runs(T.curves[p], T.curves[q], eps_j);
      for (const auto& r : runs) {
        if (r.hi - r.lo + 1 >= 5) {
          if (p < q) T.overlaps.push_back({int(p), int(q), r.hi - r.lo + 1});
          continue;
        }
        if (r.best >= 2 && r.best + 2 < T.curves[p].samples.size())
          cut_at[p].push_back(r.best);
      }
    }

  std::vector<SpectralCurve> split;
  for (std::size_t p = 0; p < T.curves.size(); ++p) {
    auto& cuts = cut_at[p];
    const SpectralCurve& c = T.curves[p];
    if (cuts.empty() || c.closed) {
      split.push_back(c);
      continue;
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::size_t lo = 0;
    EndpointKind front = c.front_end;
    for (std::size_t cut : cuts) {
      if (cut <= lo + 1) continue;
      split.push_back(
          detail::slice_curve(c, lo, cut, front, EndpointKind::Junction));
      lo = cut;
      front = EndpointKind::Junction;
    }
    if (c.samples.size() - lo >= 2)
      split.push_back(detail::slice_curve(c, lo, c.samples.size() - 1, front,
                                          c.back_end));
  }
  T.curves = std::move(split);
  std::sort(T.curves.begin(), T.curves.end(), detail::curve_order);

  // Junction metadata: single-linkage clusters of curve endpoints, joined by
  // curves whose interior passes through the cluster.
  struct End {
    Cx z;
    int curve;
  };
  std::vector<End> ends;
  for (std::size_t i = 0; i < T.curves.size(); ++i) {
    const auto& c = T.curves[i];
    if (c.closed || c.samples.empty()) continue;
    if (c.front_end != EndpointKind::Open)
      ends.push_back({c.samples.front(), int(i)});
    if (c.back_end != EndpointKind::Open)
      ends.push_back({c.samples.back(), int(i)});
  }
  std::vector<int> cluster(ends.size());
  for (std::size_t i = 0; i < ends.size(); ++i) cluster[i] = int(i);
  for (std::size_t i = 0; i < ends.size(); ++i)
    for (std::size_t j = i + 1; j < ends.size(); ++j)
      if (std::abs(ends[i].z - ends[j].z) < eps_j) {
        int ci = cluster[i], cj = cluster[j];
        for (auto& c : cluster)
          if (c == cj) c = ci;
      }
  std::vector<int> roots;
  for (std::size_t i = 0; i < ends.size(); ++i)
    if (std::find(roots.begin(), roots.end(), cluster[i]) == roots.end())
      roots.push_back(cluster[i]);
  for (int r : roots) {
    JunctionInfo info;
    Cx mean = 0;
    int n = 0;
    for (std::size_t i = 0; i < ends.size(); ++i)
      if (cluster[i] == r) {
        mean += ends[i].z;
        ++n;
        if (std::find(info.curves.begin(), info.curves.end(), ends[i].curve) ==
            info.curves.end())
          info.curves.push_back(ends[i].curve);
      }
    info.lambda = mean / double(n);
    for (std::size_t i = 0; i < T.curves.size(); ++i) {
      if (std::find(info.curves.begin(), info.curves.end(), int(i)) !=
          info.curves.end())
        continue;
      if (path_distance(T.curves[i].samples, info.lambda) < eps_j)
        info.curves.push_back(int(i));
    }
    if (info.curves.size() >= 2) {
      std::sort(info.curves.begin(), info.curves.end());
      T.junctions.push_back(std::move(info));
    }
  }
  std::sort(T.junctions.begin(), T.junctions.end(),
            [](const JunctionInfo& x, const JunctionInfo& y) {
              if (x.lambda.real() != y.lambda.real())
                return x.lambda.real() < y.lambda.real();
              return x.lambda.imag() < y.lambda.imag();
            });
  return T;
}

}  // namespace specgraph
