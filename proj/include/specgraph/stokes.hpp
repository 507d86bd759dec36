#pragma once

// Stokes graph tracing. From every turning point z0 of multiplicity m the
// m + 2 level lines of Re S = 0 are integrated outward with the phase-length
// parametrization dz/ds = i / w(z), which keeps dS/ds = i exactly: Re S stays
// zero up to integration error, and an explicit projection step removes the
// residual drift. A line terminates either by escaping the disc of radius
// r_esc around the asymptotic-ray center (its escape angle must then match
// one of the sector directions) or by hitting another turning point, which
// merges their Stokes complexes.

#include <algorithm>
#include <vector>

#include "specgraph/core.hpp"
#include "specgraph/numerics.hpp"
#include "specgraph/phase.hpp"
#include "specgraph/potential.hpp"

namespace specgraph {

struct StokesLine {
  int origin_label = -1;  // turning point the line starts from
  int ray_index = -1;     // 0..m+1 among that point's lines
  std::vector<Cx> points; // samples; front() is the turning point itself
  bool escaped = false;   // false: terminated on a turning point
  int end_sector = -1;    // sector index when escaped
  double end_angle = 0;   // escape angle when escaped
  int end_label = -1;     // turning point hit, when !escaped
  Cx s_end{};             // accumulated S at termination
  int duplicate_of = -1;  // index of the reverse tracing of the same line

  double length() const { return path_length(points); }
};

struct StokesComplex {
  std::vector<int> labels;    // member turning points
  std::vector<int> line_ids;  // all lines originating at members
  int total_multiplicity = 0;

  bool simple() const { return total_multiplicity == 1; }
};

struct StokesGraph {
  Cx lambda;
  TurningPointSet tps;
  SectorData sectors;
  double r_esc = 0;
  std::vector<StokesLine> lines;
  std::vector<StokesComplex> complexes;

  int complex_of(int label) const {
    for (std::size_t i = 0; i < complexes.size(); ++i)
      for (int l : complexes[i].labels)
        if (l == label) return int(i);
    return -1;
  }
  const TurningPoint& point(int label) const {
    const TurningPoint* p = tps.by_label(label);
    if (!p) throw std::invalid_argument("unknown turning point label");
    return *p;
  }
};

struct TraceOptions {
  double r_esc = 0;             // 0: 3 * (max distance of roots from center + 1)
  double rk_tol = 1e-10;        // local error target for the line ODE
  double eps_hit_rel = 1e-4;    // collision radius, fraction of local root separation
  double eps_ang = 1e-2;        // escape angle tolerance against sector directions
  double max_step_frac = 0.02;  // spatial step cap, fraction of r_esc
  int max_steps = 60000;
  bool check_asymptotes = true; // enforce the escape-angle match
  bool retry_larger = true;     // retry once at 4 r_esc on mismatch
};

namespace detail {

// 5-point Gauss-Legendre on [0, 1].
inline constexpr double gl5_x[5] = {0.04691007703066800, 0.23076534494715845,
                                    0.5, 0.76923465505284155,
                                    0.95308992296933200};
inline constexpr double gl5_w[5] = {0.11846344252809454, 0.23931433524968324,
                                    0.28444444444444444, 0.23931433524968324,
                                    0.11846344252809454};

struct LineTracer {
  const BivariatePotential& pot;
  Cx lambda;
  const TurningPointSet& tps;
  const TraceOptions& opt;
  Cx center;
  double r_esc;
  std::vector<double> hit_radius;  // per label

  Cx w_ref;  // branch reference, updated per accepted step

  Cx sqrt_p(Cx z) const {
    Cx w = std::sqrt(pot.eval(z, lambda));
    return same_sign_branch(w, w_ref) ? w : -w;
  }

  // Trace one line from the turning point tp along initial direction theta.
  StokesLine run(const TurningPoint& tp, int ray_index, double theta) {
    StokesLine line;
    line.origin_label = tp.label;
    line.ray_index = ray_index;
    line.points.push_back(tp.z);

    double sep = 1e300;
    for (const auto& other : tps.points)
      if (other.label != tp.label)
        sep = std::min(sep, std::abs(other.z - tp.z));
    double delta0 = 1e-3 * std::min(sep, r_esc);
    Cx dir = Cx(std::cos(theta), std::sin(theta));
    Cx z = tp.z + delta0 * dir;

    // Branch with arg w = pi/2 - theta makes dz/ds = i/w point outward.
    Cx w_raw = std::sqrt(pot.eval(z, lambda));
    double want = pi / 2 - theta;
    if (std::cos(std::arg(w_raw) - want) < 0) w_raw = -w_raw;
    w_ref = w_raw;
    // Local power-law value of S at the starting offset:
    // S(z0) = w(z0) * (z0 - tp) / (m/2 + 1), purely imaginary on the ray.
    Cx s = w_ref * (delta0 * dir) / (0.5 * double(tp.multiplicity) + 1.0);
    line.points.push_back(z);

    double armed_radius = std::max(3 * delta0, 2 * hit_radius[tp.label]);
    bool armed = false;

    auto rhs = [&](double, const CxN<1>& y) {
      return CxN<1>{Cx(0, 1) / sqrt_p(y[0])};
    };
    CxN<1> y{z};
    CxN<1> k1 = rhs(0.0, y);
    double h = delta0 * std::abs(w_ref);

    for (int step = 0; step < opt.max_steps; ++step) {
      // Keep the spatial step below both the global cap and a fraction of
      // the distance to the nearest turning point.
      double d_near = 1e300;
      for (const auto& p : tps.points) {
        double d = std::abs(y[0] - p.z);
        if (p.label == tp.label && !armed) continue;
        d_near = std::min(d_near, d);
      }
      double dz_cap = std::min(opt.max_step_frac * r_esc, 0.35 * d_near);
      double h_cap = dz_cap * std::abs(w_ref);
      h = std::min(h, h_cap);
      if (!(h > 1e-14 * (1.0 + std::abs(y[0]))))
        throw StepCollapse("line tracing: step size collapsed");

      auto st = dp5_step(rhs, 0.0, y, k1, h);
      double scale = 1e-3 + std::abs(y[0]);
      double err = std::abs(st.err[0]) / scale;
      double tol = opt.rk_tol;
      if (err > tol) {
        h *= std::clamp(0.9 * std::pow(tol / err, 0.2), 0.2, 1.0);
        continue;
      }
      Cx z_prev = y[0];
      Cx z_new = st.y5[0];
      // Guard: the branch must not rotate too far within one step.
      Cx w_new_raw = std::sqrt(pot.eval(z_new, lambda));
      Cx w_new = same_sign_branch(w_new_raw, w_ref) ? w_new_raw : -w_new_raw;
      if (std::abs(w_new - w_ref) > 0.7 * std::abs(w_ref) + 1e-300) {
        h *= 0.4;
        continue;
      }

      // S increment along the accepted segment.
      Cx dz = z_new - z_prev;
      Cx ds{};
      for (int q = 0; q < 5; ++q)
        ds += gl5_w[q] * sqrt_p(z_prev + gl5_x[q] * dz);
      ds *= dz;
      s += ds;

      y[0] = z_new;
      k1 = st.k_last;
      w_ref = w_new;

      // Projection corrector: push the drift of Re S back to zero.
      double drift_tol = 10 * opt.rk_tol * (1.0 + std::abs(s));
      if (std::abs(s.real()) > drift_tol) {
        Cx w_here = sqrt_p(y[0]);
        Cx dz_fix = -s.real() * std::conj(w_here) / std::norm(w_here);
        double cap = 0.5 * std::abs(dz);
        if (std::abs(dz_fix) > cap) dz_fix *= cap / std::abs(dz_fix);
        y[0] += dz_fix;
        s += w_here * dz_fix;
        k1 = rhs(0.0, y);
      }

      line.points.push_back(y[0]);

      if (!armed && std::abs(y[0] - tp.z) > armed_radius) armed = true;

      // Collision with a turning point?
      for (const auto& p : tps.points) {
        if (p.label == tp.label && !armed) continue;
        if (segment_distance(p.z, z_prev, y[0]) <= hit_radius[p.label]) {
          line.points.back() = p.z;
          line.escaped = false;
          line.end_label = p.label;
          line.s_end = s;
          return line;
        }
      }

      // Escape through the disc boundary?
      if (std::abs(y[0] - center) >= r_esc) {
        // Crop the final segment onto the circle.
        Cx d = y[0] - z_prev;
        Cx rel = z_prev - center;
        double aa = std::norm(d);
        double bb = 2 * (rel.real() * d.real() + rel.imag() * d.imag());
        double cc = std::norm(rel) - r_esc * r_esc;
        double disc = bb * bb - 4 * aa * cc;
        double t = disc >= 0 ? (-bb + std::sqrt(disc)) / (2 * aa) : 1.0;
        t = std::clamp(t, 0.0, 1.0);
        line.points.back() = z_prev + t * d;
        line.escaped = true;
        line.end_angle = std::arg(line.points.back() - center);
        line.s_end = s;
        return line;
      }

      // Step-size growth for the next step.
      double f = 0.9 * std::pow(tol / std::max(err, 1e-3 * tol), 0.2);
      h *= std::clamp(f, 0.2, 4.0);
    }
    throw StepCollapse("line tracing: step budget exhausted");
  }
};

// Union-find for complex assembly.
struct Uf {
  std::vector<int> p;
  explicit Uf(int n) : p(n) {
    for (int i = 0; i < n; ++i) p[i] = i;
  }
  int find(int x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  void unite(int a, int b) { p[find(a)] = find(b); }
};

// Coarse symmetric distance between two polylines, for recognizing the same
// geometric line traced from both of its endpoints.
inline double polyline_mismatch(const std::vector<Cx>& a,
                                const std::vector<Cx>& b) {
  double worst = 0;
  for (int q = 0; q <= 8; ++q) {
    Cx pa = a[std::size_t(q * double(a.size() - 1) / 8.0)];
    Cx pb = b[std::size_t(q * double(b.size() - 1) / 8.0)];
    worst = std::max(worst, std::min(path_distance(b, pa), path_distance(a, pb)));
  }
  return worst;
}

}  // namespace detail

inline StokesGraph trace_graph(const BivariatePotential& pot, Cx lambda,
                               const TurningPointSet& tps,
                               const TraceOptions& opt_in = {}) {
  TraceOptions opt = opt_in;
  StokesGraph g;
  g.lambda = lambda;
  g.tps = tps;
  g.sectors = sector_data(pot, lambda);

  double spread = 0;
  for (const auto& p : tps.points)
    spread = std::max(spread, std::abs(p.z - g.sectors.center));
  double r0 = opt.r_esc > 0 ? opt.r_esc : 3.0 * (spread + 1.0);

  for (int attempt = 0;; ++attempt) {
    g.r_esc = r0 * (attempt == 0 ? 1.0 : 4.0);
    g.lines.clear();

    detail::LineTracer tracer{pot, lambda, tps, opt, g.sectors.center,
                              g.r_esc, {}, Cx{}};
    tracer.hit_radius.assign(tps.points.size() + 8, 0.0);
    for (const auto& p : tps.points) {
      double sep = 1e300;
      for (const auto& q : tps.points)
        if (q.label != p.label) sep = std::min(sep, std::abs(q.z - p.z));
      if (sep > 1e200) sep = 1.0 + std::abs(p.z - g.sectors.center);
      if (int(tracer.hit_radius.size()) <= p.label)
        tracer.hit_radius.resize(p.label + 1, 0.0);
      tracer.hit_radius[p.label] = opt.eps_hit_rel * sep;
    }

    bool mismatch = false;
    for (const auto& p : tps.points) {
      // Initial directions at an m-fold point: arg c + (m + 2) theta = pi
      // (mod 2 pi), with c the deflated leading product at the point.
      Cx c = pot.coeff_z(pot.degree(), lambda);
      for (const auto& q : tps.points) {
        if (q.label == p.label) continue;
        for (int r = 0; r < q.multiplicity; ++r) c *= (p.z - q.z);
      }
      int m = p.multiplicity;
      for (int j = 0; j < m + 2; ++j) {
        double theta = (pi - std::arg(c) + 2 * pi * j) / (m + 2);
        StokesLine line = tracer.run(p, j, theta);
        if (line.escaped) {
          auto [idx, dist] = g.sectors.nearest(line.end_angle);
          if (opt.check_asymptotes && dist > opt.eps_ang) {
            mismatch = true;
            break;
          }
          line.end_sector = idx;
        }
        g.lines.push_back(std::move(line));
      }
      if (mismatch) break;
    }
    if (mismatch) {
      if (opt.retry_larger && attempt == 0) continue;
      throw AsymptoteMismatch(
          "escape direction does not match any sector direction");
    }
    break;
  }

  // Pair up the two tracings of each finite connecting line.
  for (std::size_t i = 0; i < g.lines.size(); ++i) {
    auto& a = g.lines[i];
    if (a.escaped || a.duplicate_of >= 0) continue;
    for (std::size_t j = i + 1; j < g.lines.size(); ++j) {
      auto& b = g.lines[j];
      if (b.escaped || b.duplicate_of >= 0) continue;
      if (b.origin_label != a.end_label || b.end_label != a.origin_label)
        continue;
      double tol = 0.05 * std::min(a.length(), b.length()) + 1e-9;
      if (detail::polyline_mismatch(a.points, b.points) <= tol) {
        b.duplicate_of = int(i);
        break;
      }
    }
  }

  // Stokes complexes: connected components under the hit relation.
  int max_label = 0;
  for (const auto& p : tps.points) max_label = std::max(max_label, p.label);
  detail::Uf uf(max_label + 1);
  for (const auto& line : g.lines)
    if (!line.escaped) uf.unite(line.origin_label, line.end_label);
  std::vector<int> root_of(max_label + 1, -1);
  for (const auto& p : tps.points) {
    int r = uf.find(p.label);
    if (root_of[r] < 0) {
      root_of[r] = int(g.complexes.size());
      g.complexes.push_back({});
    }
    auto& cx = g.complexes[root_of[r]];
    cx.labels.push_back(p.label);
    cx.total_multiplicity += p.multiplicity;
  }
  for (std::size_t i = 0; i < g.lines.size(); ++i) {
    int r = uf.find(g.lines[i].origin_label);
    g.complexes[root_of[r]].line_ids.push_back(int(i));
  }
  return g;
}

}  // namespace specgraph
