#pragma once

// Planar subdivision of the escape disc by one Stokes complex. The complex's
// lines (escaping ones extended radially to the working radius) together with
// the bounding circle form an embedded planar graph; its faces are the basic
// domains of the complex. Faces are extracted from the rotation system: at
// every vertex the outgoing half-edges are sorted by departure angle, and the
// orbit next(h) = cw-next of twin(h) walks each face boundary with the face
// interior on the left. The unique clockwise orbit around the circle is the
// disc exterior and carries no basic domain.
//
// Linkedness of two boundary points w.r.t. the complex means: same face, or
// faces adjacent across a Stokes line of positive length (sharing only the
// vertex at a turning point does not count). Lemma-style canonical-domain
// queries reduce to linkedness w.r.t. every complex of the graph.

#include <algorithm>
#include <array>
#include <map>
#include <utility>
#include <vector>

#include "specgraph/core.hpp"
#include "specgraph/stokes.hpp"

namespace specgraph {

struct ArrOptions {
  double r_arr = 0;        // working radius; 0: the graph's escape radius
  double on_line_eps = 0;  // OnStokesLine clearance; 0: 1e-6 * r_arr
  double vertex_snap = 0;  // nearest-vertex slot-rule radius; 0: 1e-7 * r_arr
};

struct ArrFace {
  std::vector<Cx> polygon;    // boundary, interior on the left
  double area = 0;            // signed; the disc exterior is the negative one
  bool outer = false;
  std::vector<int> adjacent;  // faces sharing a Stokes line segment
};

// Where a boundary point sits: inside a face, or on a Stokes line with the
// two faces flanking that line. A maximal admissible domain is two adjacent
// faces plus the open line between them, so on-line points take part in
// linkedness through their flanks.
struct Location {
  int face = -1;                   // -1 when on a line
  int edge = -1;                   // Stokes edge id when on a line
  std::array<int, 2> flanks{-1, -1};
  bool on_line() const { return edge >= 0; }
};

class Arrangement {
 public:
  Arrangement(const StokesGraph& g, int complex_index, ArrOptions opt = {})
      : ci_(complex_index), center_(g.sectors.center) {
    if (complex_index < 0 || complex_index >= int(g.complexes.size()))
      throw std::invalid_argument("arrangement: complex index out of range");
    const StokesComplex& cx = g.complexes[complex_index];
    if (cx.line_ids.empty())
      throw std::invalid_argument("arrangement: empty complex");

    r_arr_ = opt.r_arr > 0 ? opt.r_arr : g.r_esc;
    if (r_arr_ < g.r_esc * (1.0 - 1e-12))
      throw std::invalid_argument("arrangement: radius below trace radius");
    on_eps_ = opt.on_line_eps > 0 ? opt.on_line_eps : 1e-6 * r_arr_;
    snap_ = opt.vertex_snap > 0 ? opt.vertex_snap : 1e-7 * r_arr_;

    build(g, cx);
  }

  const std::vector<ArrFace>& faces() const { return faces_; }
  int complex_index() const { return ci_; }
  double radius() const { return r_arr_; }
  Cx center() const { return center_; }

  int interior_count() const {
    int n = 0;
    for (const auto& f : faces_) n += f.outer ? 0 : 1;
    return n;
  }

  bool adjacent(int fa, int fb) const {
    const auto& adj = faces_.at(fa).adjacent;
    return std::find(adj.begin(), adj.end(), fb) != adj.end();
  }

  int edge_count() const { return int(edges_.size()); }
  bool edge_is_stokes(int e) const { return edges_.at(e).stokes; }
  const std::vector<Cx>& edge_points(int e) const { return edges_.at(e).pts; }
  std::array<int, 2> edge_flanks(int e) const {
    return {face_of_[2 * e], face_of_[2 * e + 1]};
  }

  // Full location of a boundary point. Finite points use the nearest-edge
  // side test (slot rule at graph vertices); infinite directions pick the
  // face behind the circle arc that brackets the angle. Points within the
  // on-line clearance of a Stokes line resolve to that line.
  Location locate_full(const BoundaryPoint& p) const {
    if (!p.finite) return locate_angle(p.phi);
    Cx rel = p.z - center_;
    if (std::abs(rel) >= r_arr_ * (1.0 - 1e-12))
      return locate_angle(std::arg(rel));

    double d_line = 1e300, d_all = 1e300;
    int best_e = -1, best_seg = -1, best_line = -1;
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const auto& pts = edges_[e].pts;
      for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double d = segment_distance(p.z, pts[i], pts[i + 1]);
        if (edges_[e].stokes && d < d_line) {
          d_line = d;
          best_line = int(e);
        }
        if (d < d_all) {
          d_all = d;
          best_e = int(e);
          best_seg = int(i);
        }
      }
    }
    if (d_line < on_eps_) return line_location(best_line);

    // Nearest point on the nearest segment; fall back to the slot rule when
    // it coincides with a graph vertex.
    const auto& ed = edges_[best_e];
    Cx a = ed.pts[best_seg], b = ed.pts[best_seg + 1];
    Cx d = b - a;
    double t = std::norm(d) > 0
                   ? std::clamp(((p.z - a) * std::conj(d)).real() / std::norm(d),
                                0.0, 1.0)
                   : 0.0;
    Cx q = a + t * d;
    for (std::size_t v = 0; v < verts_.size(); ++v)
      if (std::abs(q - verts_[v].pos) <= snap_)
        return face_location(
            slot_face(int(v), std::arg(p.z - verts_[v].pos)));
    if (!ed.stokes)
      return face_location(face_of_[2 * best_e]);  // arc interior is its left
    double cr = cross(d, p.z - a);
    return face_location(face_of_[cr > 0 ? 2 * best_e : 2 * best_e + 1]);
  }

  // Face index, or OnStokesLine when membership is undefined.
  int locate(const BoundaryPoint& p) const {
    Location loc = locate_full(p);
    if (loc.on_line())
      throw OnStokesLine("boundary point lies on a Stokes line");
    return loc.face;
  }

  // Linkedness per the admissible-domain rule. A domain containing an
  // interior point of a line necessarily meets both of its flanking faces,
  // which already exhausts the two basic domains an admissible domain may
  // touch; the rules below are what survives.
  bool linked(const BoundaryPoint& a, const BoundaryPoint& b) const {
    Location la = locate_full(a), lb = locate_full(b);
    auto same_flanks = [](const Location& x, const Location& y) {
      return (x.flanks[0] == y.flanks[0] && x.flanks[1] == y.flanks[1]) ||
             (x.flanks[0] == y.flanks[1] && x.flanks[1] == y.flanks[0]);
    };
    if (la.on_line() && lb.on_line())
      return la.edge == lb.edge || same_flanks(la, lb);
    if (la.on_line()) return lb.face == la.flanks[0] || lb.face == la.flanks[1];
    if (lb.on_line()) return la.face == lb.flanks[0] || la.face == lb.flanks[1];
    return la.face == lb.face || adjacent(la.face, lb.face);
  }

 private:
  struct Vert {
    Cx pos;
    std::vector<int> out;  // outgoing half-edges, sorted by departure angle
  };
  struct Edge {
    bool stokes = true;  // false: circle arc
    int u = -1, v = -1;
    std::vector<Cx> pts;  // oriented u -> v
  };

  static double cross(Cx a, Cx b) {
    return a.real() * b.imag() - a.imag() * b.real();
  }

  // Half-edge h: index 2e (forward, u->v) or 2e+1 (backward).
  int origin(int h) const { return h & 1 ? edges_[h >> 1].v : edges_[h >> 1].u; }
  int head(int h) const { return origin(h ^ 1); }

  double dep_angle(int h) const {
    const auto& pts = edges_[h >> 1].pts;
    Cx from = h & 1 ? pts.back() : pts.front();
    // First sample a meaningful distance away from the vertex sets the
    // departure direction.
    if (h & 1) {
      for (std::size_t i = pts.size() - 1; i-- > 0;)
        if (std::abs(pts[i] - from) > 1e-12 * r_arr_)
          return std::arg(pts[i] - from);
    } else {
      for (std::size_t i = 1; i < pts.size(); ++i)
        if (std::abs(pts[i] - from) > 1e-12 * r_arr_)
          return std::arg(pts[i] - from);
    }
    throw ArrangementDegeneracy("arrangement: zero-length edge");
  }

  void build(const StokesGraph& g, const StokesComplex& cx) {
    // Vertices at member turning points.
    std::map<int, int> vert_of_label;
    for (int label : cx.labels) {
      vert_of_label[label] = int(verts_.size());
      verts_.push_back({g.point(label).z, {}});
    }

    // One edge per line (duplicates excluded); escaping lines gain a radial
    // tail out to the working radius and a vertex on the circle.
    std::vector<std::pair<double, int>> circle;  // (angle, vertex)
    for (int id : cx.line_ids) {
      const StokesLine& ln = g.lines[id];
      if (ln.duplicate_of >= 0) continue;
      Edge e;
      e.stokes = true;
      e.u = vert_of_label.at(ln.origin_label);
      e.pts = ln.points;
      if (ln.escaped) {
        double ang = std::arg(e.pts.back() - center_);
        Cx rim = center_ + std::polar(r_arr_, ang);
        if (std::abs(rim - e.pts.back()) > 1e-12 * r_arr_) e.pts.push_back(rim);
        e.v = int(verts_.size());
        verts_.push_back({rim, {}});
        circle.emplace_back(ang, e.v);
        esc_.emplace_back(ang, int(edges_.size()));
      } else {
        e.v = vert_of_label.at(ln.end_label);
        e.pts.back() = verts_[e.v].pos;
      }
      edges_.push_back(std::move(e));
    }
    if (circle.empty())
      throw ArrangementDegeneracy(
          "arrangement: complex does not reach the escape circle");

    // Circle arcs between consecutive escape points, counterclockwise.
    std::sort(circle.begin(), circle.end());
    arcs_.clear();
    for (std::size_t i = 0; i < circle.size(); ++i) {
      auto [a0, v0] = circle[i];
      auto [a1, v1] = circle[(i + 1) % circle.size()];
      double sweep = i + 1 < circle.size() ? a1 - a0 : a1 + 2 * pi - a0;
      if (circle.size() == 1) sweep = 2 * pi;
      Edge e;
      e.stokes = false;
      e.u = v0;
      e.v = v1;
      int n = std::max(3, int(sweep / 0.05) + 2);
      for (int k = 0; k <= n; ++k)
        e.pts.push_back(center_ + std::polar(r_arr_, a0 + sweep * k / n));
      e.pts.front() = verts_[v0].pos;
      e.pts.back() = verts_[v1].pos;
      arcs_.emplace_back(a0, int(edges_.size()));
      edges_.push_back(std::move(e));
    }

    // Rotation system: outgoing half-edges per vertex by departure angle.
    std::vector<double> dep(2 * edges_.size());
    for (std::size_t h = 0; h < 2 * edges_.size(); ++h) {
      dep[h] = dep_angle(int(h));
      verts_[origin(int(h))].out.push_back(int(h));
    }
    for (auto& v : verts_) {
      std::sort(v.out.begin(), v.out.end(),
                [&](int a, int b) { return dep[a] < dep[b]; });
      for (std::size_t i = 0; i + 1 < v.out.size(); ++i)
        if (dep[v.out[i + 1]] - dep[v.out[i]] < 1e-7)
          throw ArrangementDegeneracy(
              "arrangement: two lines overlap at a vertex");
    }

    // Connectivity: every piece must hang together with the circle.
    detail::Uf uf(int(verts_.size()));
    for (const auto& e : edges_) uf.unite(e.u, e.v);
    for (const auto& v : verts_)
      if (uf.find(int(&v - verts_.data())) != uf.find(0))
        throw ArrangementDegeneracy("arrangement: disconnected subdivision");

    // Face orbits: next(h) = cw-next of twin(h) around head(h).
    face_of_.assign(2 * edges_.size(), -1);
    for (int h0 = 0; h0 < int(2 * edges_.size()); ++h0) {
      if (face_of_[h0] >= 0) continue;
      int f = int(faces_.size());
      faces_.push_back({});
      ArrFace& face = faces_.back();
      int h = h0;
      do {
        face_of_[h] = f;
        const auto& pts = edges_[h >> 1].pts;
        if (h & 1)
          face.polygon.insert(face.polygon.end(), pts.rbegin(), pts.rend() - 1);
        else
          face.polygon.insert(face.polygon.end(), pts.begin(), pts.end() - 1);
        const auto& out = verts_[head(h)].out;
        auto it = std::find(out.begin(), out.end(), h ^ 1);
        h = it == out.begin() ? out.back() : *std::prev(it);
      } while (h != h0);
      double a2 = 0;
      for (std::size_t i = 0; i < face.polygon.size(); ++i)
        a2 += cross(face.polygon[i],
                    face.polygon[(i + 1) % face.polygon.size()]);
      face.area = 0.5 * a2;
      face.outer = face.area < 0;
    }

    int outer_count = 0;
    for (const auto& f : faces_) outer_count += f.outer ? 1 : 0;
    long long euler = (long long)verts_.size() - (long long)edges_.size() +
                      (long long)faces_.size();
    if (outer_count != 1 || euler != 2)
      throw ArrangementDegeneracy("arrangement: inconsistent face structure");

    // Adjacency across Stokes edges only; the circle is a truncation artifact.
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      if (!edges_[e].stokes) continue;
      int fa = face_of_[2 * e], fb = face_of_[2 * e + 1];
      if (fa == fb) continue;
      auto& la = faces_[fa].adjacent;
      auto& lb = faces_[fb].adjacent;
      if (std::find(la.begin(), la.end(), fb) == la.end()) la.push_back(fb);
      if (std::find(lb.begin(), lb.end(), fa) == lb.end()) lb.push_back(fa);
    }
  }

  // Face in the angular slot just counterclockwise of theta at a vertex: the
  // left face of the outgoing half-edge with the largest departure angle
  // at or below theta (cyclically).
  int slot_face(int v, double theta) const {
    const auto& out = verts_[v].out;
    int best = -1;
    double best_gap = 1e300;
    for (int h : out) {
      double gap = angle_norm(theta - dep_angle(h));
      if (gap < 0) gap += 2 * pi;
      if (gap < best_gap) {
        best_gap = gap;
        best = h;
      }
    }
    return face_of_[best];
  }

  Location face_location(int f) const {
    Location loc;
    loc.face = f;
    return loc;
  }

  Location line_location(int e) const {
    Location loc;
    loc.edge = e;
    loc.flanks = {face_of_[2 * e], face_of_[2 * e + 1]};
    return loc;
  }

  Location locate_angle(double phi) const {
    phi = angle_norm(phi);
    for (const auto& [ang, e] : esc_)
      if (angle_dist(phi, ang) < 1e-9) return line_location(e);
    int best = -1;
    double best_gap = 1e300;
    for (const auto& [ang, e] : arcs_) {
      double gap = angle_norm(phi - ang);
      if (gap < 0) gap += 2 * pi;
      if (gap < best_gap) {
        best_gap = gap;
        best = e;
      }
    }
    // The forward arc runs counterclockwise, so its left is the interior.
    return face_location(face_of_[2 * best]);
  }

  int ci_;
  Cx center_;
  double r_arr_ = 0, on_eps_ = 0, snap_ = 0;
  std::vector<Vert> verts_;
  std::vector<Edge> edges_;
  std::vector<std::pair<double, int>> arcs_;  // (start angle, arc edge id)
  std::vector<std::pair<double, int>> esc_;   // (escape angle, line edge id)
  std::vector<int> face_of_;                  // per half-edge
  std::vector<ArrFace> faces_;
};

inline std::vector<Arrangement> make_arrangements(const StokesGraph& g,
                                                  ArrOptions opt = {}) {
  std::vector<Arrangement> arrs;
  arrs.reserve(g.complexes.size());
  for (std::size_t ci = 0; ci < g.complexes.size(); ++ci)
    arrs.emplace_back(g, int(ci), opt);
  return arrs;
}

inline bool are_linked(const StokesGraph& g, int complex_index,
                       const BoundaryPoint& a, const BoundaryPoint& b,
                       ArrOptions opt = {}) {
  return Arrangement(g, complex_index, opt).linked(a, b);
}

// Lemma-1 criterion: the two points lie in one canonical domain iff they are
// linked with respect to every complex of the graph.
inline bool in_common_canonical_domain(const StokesGraph& g,
                                       const BoundaryPoint& a,
                                       const BoundaryPoint& b,
                                       ArrOptions opt = {}) {
  for (std::size_t ci = 0; ci < g.complexes.size(); ++ci)
    if (!are_linked(g, int(ci), a, b, opt)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Canonical routes. An integral between two boundary points is taken along a
// path inside the canonical domain containing both, which pins the homotopy
// class: with respect to every complex, the path stays within the faces of
// its endpoints and may cross Stokes lines only between those faces.
// ---------------------------------------------------------------------------

struct CanonicalRouteOptions {
  double sample_step_frac = 1.0 / 256.0;  // membership sampling step / radius
  double tp_clearance_frac = 0.02;        // keep portals away from endpoints
  int bfs_n = 128;                        // fallback grid resolution
  int max_depth = 3;                      // portal recursion depth
};

struct CanonicalRoute {
  ContourPath path;
  bool straight = true;  // the direct detoured segment was already admissible
};

namespace detail {

struct RouteFinder {
  const StokesGraph& g;
  const std::vector<Arrangement>& arrs;
  CanonicalRouteOptions opt;
  std::vector<std::vector<int>> allowed;  // admissible faces per complex
  double r;

  static bool contains(const std::vector<int>& v, int x) {
    return std::find(v.begin(), v.end(), x) != v.end();
  }
  static void add_faces(std::vector<int>& v, const Location& loc) {
    if (loc.on_line()) {
      if (!contains(v, loc.flanks[0])) v.push_back(loc.flanks[0]);
      if (!contains(v, loc.flanks[1])) v.push_back(loc.flanks[1]);
    } else if (!contains(v, loc.face)) {
      v.push_back(loc.face);
    }
  }

  bool point_ok(Cx z, int ci) const {
    Location loc = arrs[ci].locate_full(BoundaryPoint::at(z));
    if (loc.on_line())
      return contains(allowed[ci], loc.flanks[0]) &&
             contains(allowed[ci], loc.flanks[1]);
    return contains(allowed[ci], loc.face);
  }
  bool point_ok(Cx z) const {
    for (std::size_t ci = 0; ci < arrs.size(); ++ci)
      if (!point_ok(z, int(ci))) return false;
    return true;
  }

  // First complex whose allowed set the sampled path leaves; -1 if none.
  int first_block(const ContourPath& path) const {
    double step = opt.sample_step_frac * r;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      int n = std::max(1, int(std::abs(path[i + 1] - path[i]) / step));
      for (int k = 0; k <= n; ++k) {
        Cx z = path[i] + (path[i + 1] - path[i]) * (double(k) / n);
        for (std::size_t ci = 0; ci < arrs.size(); ++ci)
          if (!point_ok(z, int(ci))) return int(ci);
      }
    }
    return -1;
  }
  bool path_ok(const ContourPath& path) const { return first_block(path) < 0; }

  double tp_distance(Cx z) const {
    double d = 1e300;
    for (const auto& p : g.tps.points) d = std::min(d, std::abs(z - p.z));
    return d;
  }

  static Cx point_along(const std::vector<Cx>& pts, double frac) {
    double total = path_length(pts);
    double want = frac * total, run = 0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      double seg = std::abs(pts[i + 1] - pts[i]);
      if (run + seg >= want && seg > 0)
        return pts[i] + (pts[i + 1] - pts[i]) * ((want - run) / seg);
      run += seg;
    }
    return pts.back();
  }

  ContourPath find(Cx from, Cx to, int depth) const {
    ContourPath direct = detour_route(from, to, g.tps, {});
    int bc = first_block(direct);
    if (bc < 0) return direct;
    if (depth >= opt.max_depth)
      throw RoutingFailure("canonical route: portal recursion exhausted");

    // Portals: interior points of lines whose flanks are exactly the two
    // admissible faces of the blocking complex.
    const Arrangement& arr = arrs[bc];
    for (int e = 0; e < arr.edge_count(); ++e) {
      if (!arr.edge_is_stokes(e)) continue;
      auto fl = arr.edge_flanks(e);
      if (!contains(allowed[bc], fl[0]) || !contains(allowed[bc], fl[1]) ||
          fl[0] == fl[1])
        continue;
      for (double frac : {0.5, 0.3, 0.7, 0.15, 0.85}) {
        Cx q = point_along(arr.edge_points(e), frac);
        if (tp_distance(q) < opt.tp_clearance_frac * r) continue;
        if (!point_ok(q)) continue;
        try {
          ContourPath left = find(from, q, depth + 1);
          ContourPath right = find(q, to, depth + 1);
          left.insert(left.end(), right.begin() + 1, right.end());
          if (path_ok(left)) return left;
        } catch (const RoutingFailure&) {
        }
      }
    }
    throw RoutingFailure("canonical route: no admissible portal worked");
  }

  // Exhaustive fallback: breadth-first search over a lattice restricted to
  // the admissible region, then greedy shortcutting.
  ContourPath bfs(Cx from, Cx to) const {
    int n = opt.bfs_n;
    Cx c = arrs.front().center();
    double R = r;
    double cell = 2 * R / n;
    auto center_of = [&](int i, int j) {
      return c + Cx(-R + (i + 0.5) * cell, -R + (j + 0.5) * cell);
    };
    auto cell_of = [&](Cx z) {
      int i = int((z.real() - c.real() + R) / cell);
      int j = int((z.imag() - c.imag() + R) / cell);
      return std::pair<int, int>(std::clamp(i, 0, n - 1),
                                 std::clamp(j, 0, n - 1));
    };
    std::vector<signed char> open(std::size_t(n) * n, 0);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        Cx z = center_of(i, j);
        if (std::abs(z - c) > R * (1.0 - 2.0 / n)) continue;
        if (tp_distance(z) < 1.5 * cell) continue;
        open[std::size_t(j) * n + i] = point_ok(z) ? 1 : 0;
      }
    auto near_open = [&](std::pair<int, int> s) {
      for (int rad = 0; rad <= 3; ++rad)
        for (int dj = -rad; dj <= rad; ++dj)
          for (int di = -rad; di <= rad; ++di) {
            int i = s.first + di, j = s.second + dj;
            if (i < 0 || j < 0 || i >= n || j >= n) continue;
            if (open[std::size_t(j) * n + i]) return std::pair<int, int>(i, j);
          }
      throw RoutingFailure("canonical route: endpoint cell is blocked");
    };
    auto s = near_open(cell_of(from)), t = near_open(cell_of(to));
    std::vector<int> prev(std::size_t(n) * n, -2);
    std::vector<int> queue{s.second * n + s.first};
    prev[std::size_t(s.second) * n + s.first] = -1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      int cur = queue[head];
      if (cur == t.second * n + t.first) break;
      int ci = cur % n, cj = cur / n;
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
          int i = ci + di, j = cj + dj;
          if (i < 0 || j < 0 || i >= n || j >= n) continue;
          int id = j * n + i;
          if (!open[id] || prev[id] != -2) continue;
          prev[id] = cur;
          queue.push_back(id);
        }
    }
    if (prev[std::size_t(t.second) * n + t.first] == -2)
      throw RoutingFailure("canonical route: admissible region disconnected");
    ContourPath cells{to};
    for (int cur = t.second * n + t.first; cur >= 0; cur = prev[cur])
      cells.push_back(center_of(cur % n, cur / n));
    cells.push_back(from);
    std::reverse(cells.begin(), cells.end());

    ContourPath out{cells.front()};
    std::size_t i = 0;
    while (i + 1 < cells.size()) {
      std::size_t j = cells.size() - 1;
      for (; j > i + 1; --j)
        if (path_ok({cells[i], cells[j]})) break;
      out.push_back(cells[j]);
      i = j;
    }
    return out;
  }
};

}  // namespace detail

// Route from a to b inside the common canonical domain. Throws
// RoutingFailure when the points are not linked with respect to some
// complex (no such domain exists) or no admissible path is found.
inline CanonicalRoute canonical_route(const StokesGraph& g,
                                      const std::vector<Arrangement>& arrs,
                                      Cx a, Cx b,
                                      CanonicalRouteOptions opt = {}) {
  detail::RouteFinder rf{g, arrs, opt, {}, arrs.empty() ? 1.0 : arrs[0].radius()};
  BoundaryPoint pa = BoundaryPoint::at(a), pb = BoundaryPoint::at(b);
  for (const auto& arr : arrs) {
    if (!arr.linked(pa, pb))
      throw RoutingFailure(
          "canonical route: endpoints are not linked for some complex");
    std::vector<int> faces;
    detail::RouteFinder::add_faces(faces, arr.locate_full(pa));
    detail::RouteFinder::add_faces(faces, arr.locate_full(pb));
    rf.allowed.push_back(std::move(faces));
  }

  ContourPath direct = detour_route(a, b, g.tps, {});
  if (rf.path_ok(direct)) return {direct, true};
  try {
    return {rf.find(a, b, 0), false};
  } catch (const RoutingFailure&) {
  }
  return {rf.bfs(a, b), false};
}

}  // namespace specgraph
