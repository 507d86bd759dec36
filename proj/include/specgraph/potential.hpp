#pragma once

// Polynomial potentials P(z, lambda), polynomial in both the spatial variable
// and the spectral parameter. Provides turning points with multiplicity,
// asymptotic sector directions, root tracking along parameter paths, and the
// branch points of the root functions (discriminant zeros in lambda).

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "specgraph/core.hpp"
#include "specgraph/numerics.hpp"

namespace specgraph {

// ---------------------------------------------------------------------------
// Potential and basic queries.
// ---------------------------------------------------------------------------

// coeffs[j][l] multiplies z^j * lambda^l. The leading row (largest j) must be
// nonzero for at least one lambda; degree in z must be >= 1.
struct BivariatePotential {
  std::vector<std::vector<Cx>> coeffs;

  int degree() const { return int(coeffs.size()) - 1; }

  // Largest magnitude among the structure coefficients.
  double coeff_scale() const {
    double m = 0;
    for (const auto& row : coeffs)
      for (const Cx& v : row) m = std::max(m, std::abs(v));
    return m;
  }

  // a_j(lambda), the z^j coefficient at fixed lambda.
  Cx coeff_z(int j, Cx lambda) const { return poly_eval(coeffs[j], lambda); }

  // All z-coefficients at fixed lambda, ascending. Throws if the leading
  // coefficient degenerates there.
  std::vector<Cx> z_coefficients(Cx lambda) const {
    int n = degree();
    std::vector<Cx> c(n + 1);
    double high = 0;
    for (int j = 0; j <= n; ++j) {
      c[j] = coeff_z(j, lambda);
      high = std::max(high, std::abs(c[j]));
    }
    if (std::abs(c[n]) <= 1e-12 * (high + coeff_scale()))
      throw LeadingCoefficientVanishes(
          "leading z-coefficient vanishes at this parameter value");
    return c;
  }

  Cx eval(Cx z, Cx lambda) const {
    Cx v{};
    for (std::size_t j = coeffs.size(); j-- > 0;)
      v = v * z + poly_eval(coeffs[j], lambda);
    return v;
  }

  Cx eval_dz(Cx z, Cx lambda) const {
    Cx v{};
    for (std::size_t j = coeffs.size(); j-- > 1;)
      v = v * z + double(j) * poly_eval(coeffs[j], lambda);
    return v;
  }

  void validate() const {
    if (coeffs.size() < 2)
      throw ValidationError("potential must have degree >= 1 in z");
    bool lead = false;
    for (const Cx& v : coeffs.back())
      if (v != Cx{}) lead = true;
    if (!lead)
      throw ValidationError("leading z-coefficient row is identically zero");
  }
};

// ---------------------------------------------------------------------------
// Boundary points and the parameter domain.
// ---------------------------------------------------------------------------

struct BoundaryPoint {
  bool finite = true;
  Cx z{};       // position when finite
  double phi = 0;  // ray direction when infinite

  static BoundaryPoint at(Cx z) { return {true, z, 0}; }
  static BoundaryPoint infinite(double phi) {
    return {false, Cx{}, angle_norm(phi)};
  }
  bool operator==(const BoundaryPoint&) const = default;
};

struct ExcludedDisc {
  Cx center;
  double radius = 0;
};

// Axis-aligned rectangle in the lambda plane minus a set of excluded discs.
struct ParameterDomain {
  Cx lo, hi;
  std::vector<ExcludedDisc> excluded;

  bool in_rect(Cx z) const {
    return z.real() >= lo.real() && z.real() <= hi.real() &&
           z.imag() >= lo.imag() && z.imag() <= hi.imag();
  }
  bool in_excluded(Cx z) const {
    for (const auto& d : excluded)
      if (std::abs(z - d.center) < d.radius) return true;
    return false;
  }
  bool contains(Cx z) const { return in_rect(z) && !in_excluded(z); }
  double width() const { return hi.real() - lo.real(); }
  double height() const { return hi.imag() - lo.imag(); }
  double diameter() const { return std::abs(hi - lo); }
  Cx center() const { return 0.5 * (lo + hi); }
};

// ---------------------------------------------------------------------------
// Turning points.
// ---------------------------------------------------------------------------

struct TurningPoint {
  Cx z;
  int multiplicity = 1;
  int label = -1;  // stable identity; assigned at the base set and carried
                   // along by tracking
};

struct TurningPointSet {
  Cx lambda;
  std::vector<TurningPoint> points;

  int total_multiplicity() const {
    int m = 0;
    for (const auto& p : points) m += p.multiplicity;
    return m;
  }
  double min_separation() const {
    double d = 1e300;
    for (std::size_t i = 0; i < points.size(); ++i)
      for (std::size_t j = i + 1; j < points.size(); ++j)
        d = std::min(d, std::abs(points[i].z - points[j].z));
    return d;
  }
  const TurningPoint* by_label(int label) const {
    for (const auto& p : points)
      if (p.label == label) return &p;
    return nullptr;
  }
};

namespace detail {

// Single-linkage merge of near-coincident roots. The merge radius grows with
// cluster size m like eps^(1/m): a perturbation of size eps splits an m-fold
// root into simple roots spread over a disc of that radius.
inline std::vector<std::vector<Cx>> cluster_roots(const std::vector<Cx>& raw,
                                                  double eps_tp) {
  std::vector<std::vector<Cx>> cl;
  for (Cx r : raw) cl.push_back({r});
  auto centroid = [](const std::vector<Cx>& v) {
    Cx s{};
    for (Cx x : v) s += x;
    return s / double(v.size());
  };
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < cl.size() && !merged; ++i)
      for (std::size_t j = i + 1; j < cl.size() && !merged; ++j) {
        Cx ci = centroid(cl[i]), cj = centroid(cl[j]);
        double scale = 1.0 + std::max(std::abs(ci), std::abs(cj));
        double tol =
            10.0 * std::pow(eps_tp, 1.0 / double(cl[i].size() + cl[j].size())) *
            scale;
        if (std::abs(ci - cj) <= tol) {
          cl[i].insert(cl[i].end(), cl[j].begin(), cl[j].end());
          cl.erase(cl.begin() + j);
          merged = true;
        }
      }
  }
  return cl;
}

}  // namespace detail

// Roots of z -> P(z, lambda) with multiplicities. Labels are assigned in
// (Re, Im) lexicographic order of position; use track_roots or a LabelField
// to keep labels consistent across different lambda.
inline TurningPointSet turning_points(const BivariatePotential& pot, Cx lambda,
                                      double eps_tp = 1e-10) {
  std::vector<Cx> c = pot.z_coefficients(lambda);
  std::vector<Cx> raw = poly_roots(c);
  auto clusters = detail::cluster_roots(raw, eps_tp);

  TurningPointSet out;
  out.lambda = lambda;
  for (auto& cl : clusters) {
    Cx z{};
    for (Cx x : cl) z += x;
    z /= double(cl.size());
    int m = int(cl.size());
    // Polish: a simple root by Newton on P, an m-fold root by Newton on the
    // (m-1)-th z-derivative, where it is a simple zero.
    std::vector<Cx> q = c;
    for (int d = 1; d < m; ++d) q = poly_derivative(q);
    double radius = 0;
    for (Cx x : cl) radius = std::max(radius, std::abs(x - z));
    for (int it = 0; it < 6; ++it) {
      auto [v, dv] = poly_eval_d(q, z);
      if (dv == Cx{}) break;
      Cx step = v / dv;
      if (std::abs(step) > radius + 1e-6 * (1.0 + std::abs(z))) break;
      z -= step;
      if (std::abs(step) < 1e-15 * (1.0 + std::abs(z))) break;
    }
    out.points.push_back({z, m, -1});
  }
  std::sort(out.points.begin(), out.points.end(),
            [](const TurningPoint& a, const TurningPoint& b) {
              if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
              return a.z.imag() < b.z.imag();
            });
  for (std::size_t i = 0; i < out.points.size(); ++i)
    out.points[i].label = int(i);
  return out;
}

// ---------------------------------------------------------------------------
// Asymptotic sectors.
// ---------------------------------------------------------------------------

// Directions of the Stokes-line asymptotes at infinity and the common center
// of the asymptotic rays. For degree n there are n + 2 directions
//   phi_j = (pi - arg a_n + 2 pi j) / (n + 2),
// and the rays emanate from -a_{n-1} / (n a_n).
struct SectorData {
  Cx center;
  std::vector<double> angles;  // sorted, in [0, 2 pi)

  // Index of the nearest direction and the angular distance to it.
  std::pair<int, double> nearest(double phi) const {
    int best = -1;
    double bd = 1e300;
    for (std::size_t i = 0; i < angles.size(); ++i) {
      double d = angle_dist(angles[i], phi);
      if (d < bd) {
        bd = d;
        best = int(i);
      }
    }
    return {best, bd};
  }
};

inline SectorData sector_data(const BivariatePotential& pot, Cx lambda) {
  std::vector<Cx> c = pot.z_coefficients(lambda);
  int n = int(c.size()) - 1;
  SectorData s;
  s.center = -c[n - 1] / (double(n) * c[n]);
  double base = pi - std::arg(c[n]);
  for (int j = 0; j < n + 2; ++j)
    s.angles.push_back(angle_norm((base + 2 * pi * j) / (n + 2)));
  std::sort(s.angles.begin(), s.angles.end());
  return s;
}

// A parameter value is exceptional when an infinite boundary ray hugs a
// sector boundary direction or a finite boundary point collides with a
// turning point; the graph-based constructions are skipped there.
inline bool is_exceptional(const BivariatePotential& pot, Cx lambda,
                           const BoundaryPoint& a, const BoundaryPoint& b,
                           double eps_ang, double eps_tp = 1e-10) {
  SectorData s = sector_data(pot, lambda);
  TurningPointSet tp = turning_points(pot, lambda, eps_tp);
  for (const BoundaryPoint* p : {&a, &b}) {
    if (p->finite) {
      for (const auto& t : tp.points)
        if (std::abs(t.z - p->z) <= 1e-8 * (1.0 + std::abs(t.z))) return true;
    } else {
      if (s.nearest(p->phi).second <= eps_ang) return true;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------
// Root tracking along parameter paths.
// ---------------------------------------------------------------------------

namespace detail {

// One tracking hop cur -> lambda_next, bisecting the hop until the matching
// is unambiguous. Labels carry over from cur.
inline TurningPointSet track_step(const BivariatePotential& pot,
                                  const TurningPointSet& cur, Cx lambda_next,
                                  double eps_tp, int depth) {
  if (depth > 48)
    throw BranchPointEncountered(
        "root tracking: matching failed to stabilize; the path passes too "
        "close to a branch point");
  TurningPointSet nxt = turning_points(pot, lambda_next, eps_tp);
  auto subdivide = [&]() {
    Cx mid = 0.5 * (cur.lambda + lambda_next);
    TurningPointSet half = track_step(pot, cur, mid, eps_tp, depth + 1);
    return track_step(pot, half, lambda_next, eps_tp, depth + 1);
  };

  if (nxt.points.size() != cur.points.size()) return subdivide();
  std::vector<int> mult_a, mult_b;
  for (const auto& p : cur.points) mult_a.push_back(p.multiplicity);
  for (const auto& p : nxt.points) mult_b.push_back(p.multiplicity);
  std::sort(mult_a.begin(), mult_a.end());
  std::sort(mult_b.begin(), mult_b.end());
  if (mult_a != mult_b) return subdivide();

  double limit = 0.45 * std::min(cur.min_separation(), nxt.min_separation());
  std::vector<int> assign(cur.points.size(), -1);
  std::vector<bool> used(nxt.points.size(), false);
  for (std::size_t i = 0; i < cur.points.size(); ++i) {
    double bd = 1e300;
    int bj = -1;
    for (std::size_t j = 0; j < nxt.points.size(); ++j) {
      double d = std::abs(cur.points[i].z - nxt.points[j].z);
      if (d < bd) {
        bd = d;
        bj = int(j);
      }
    }
    if (bj < 0 || used[bj] || bd > limit) return subdivide();
    if (nxt.points[bj].multiplicity != cur.points[i].multiplicity)
      return subdivide();
    used[bj] = true;
    assign[i] = bj;
  }
  TurningPointSet out;
  out.lambda = lambda_next;
  out.points.resize(cur.points.size());
  for (std::size_t i = 0; i < cur.points.size(); ++i) {
    out.points[i] = nxt.points[assign[i]];
    out.points[i].label = cur.points[i].label;
  }
  return out;
}

}  // namespace detail

// Track labeled roots along the polyline of parameter values. start must be
// the labeled set at path.front(). Returns one set per path node, the first
// being start itself. Throws BranchPointEncountered when roots collide.
inline std::vector<TurningPointSet> track_roots(
    const BivariatePotential& pot, const std::vector<Cx>& path,
    const TurningPointSet& start, double eps_tp = 1e-10) {
  if (path.empty()) return {};
  std::vector<TurningPointSet> out;
  out.push_back(start);
  out.front().lambda = path.front();
  for (std::size_t i = 1; i < path.size(); ++i)
    out.push_back(detail::track_step(pot, out.back(), path[i], eps_tp, 0));
  return out;
}

// ---------------------------------------------------------------------------
// Branch points of the root functions: zeros in lambda of the discriminant
// of P with respect to z, found by sampling the Sylvester determinant on a
// circle and recovering the polynomial coefficients exactly.
// ---------------------------------------------------------------------------

namespace detail {

inline Cx resultant_at(const BivariatePotential& pot, Cx lambda) {
  int n = pot.degree();
  std::vector<Cx> p(n + 1);
  for (int j = 0; j <= n; ++j) p[j] = pot.coeff_z(j, lambda);
  std::vector<Cx> q = poly_derivative(p);
  int m = n - 1;
  int size = n + m;
  std::vector<std::vector<Cx>> s(size, std::vector<Cx>(size, Cx{}));
  for (int r = 0; r < m; ++r)
    for (int k = 0; k <= n; ++k) s[r][r + k] = p[n - k];
  for (int r = 0; r < n; ++r)
    for (int k = 0; k <= m; ++k) s[m + r][r + k] = q[m - k];
  return matrix_det(std::move(s));
}

}  // namespace detail

// Branch points within (a modest margin of) the rectangle [lo, hi].
inline std::vector<Cx> branch_points(const BivariatePotential& pot, Cx lo,
                                     Cx hi) {
  int n = pot.degree();
  if (n < 2) return {};
  int d_lambda = 0;
  for (const auto& row : pot.coeffs)
    d_lambda = std::max(d_lambda, int(row.size()) - 1);
  int bound = (2 * n - 1) * d_lambda;
  if (bound == 0) return {};

  double radius = 1.0 + std::max(std::abs(lo), std::abs(hi));
  auto coef = fit_poly_on_circle(
      [&](Cx lam) { return detail::resultant_at(pot, lam); }, bound, radius);

  double top = 0;
  for (const Cx& v : coef) top = std::max(top, std::abs(v));
  if (top == 0.0)
    throw FormNotSupported("discriminant vanishes identically");
  for (Cx& v : coef)
    if (std::abs(v) < 1e-11 * top) v = Cx{};

  std::vector<Cx> roots = poly_roots(coef);
  std::vector<Cx> keep;
  double margin = 0.25 * (std::abs(hi - lo) + 1.0);
  for (Cx r : roots) {
    if (r.real() < lo.real() - margin || r.real() > hi.real() + margin ||
        r.imag() < lo.imag() - margin || r.imag() > hi.imag() + margin)
      continue;
    bool dup = false;
    for (Cx k : keep)
      if (std::abs(k - r) < 1e-8 * (1.0 + std::abs(k))) dup = true;
    if (!dup) keep.push_back(r);
  }
  std::sort(keep.begin(), keep.end(), [](Cx a, Cx b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return keep;
}

}  // namespace specgraph
