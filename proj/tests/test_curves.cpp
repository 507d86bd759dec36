#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "specgraph/curves.hpp"
#include "specgraph/models.hpp"

using namespace specgraph;

namespace {

double line_residual(Cx lam) {  // combined-profile singular line
  return std::abs(lam.real() + lam.imag() + 1.0 / 16.0);
}

// Distance of lam to the locus arg(p - lam) in {pi/6, 5pi/6}, i.e. the
// closed-form critical rays of the linear profile for boundary point p.
double ray_residual(Cx p, Cx lam) {
  Cx w = p - lam;
  double r = std::abs(w);
  double d1 = std::abs(w - std::polar(r, pi / 6));
  double d2 = std::abs(w - std::polar(r, 5 * pi / 6));
  return std::min(d1, d2);
}

}  // namespace

TEST_CASE("zero tracer follows a vertical line and is deterministic") {
  auto m = models::plane_couette();
  auto F = [](Cx lam) { return lam.real(); };

  REQUIRE_THROWS_AS(trace_zero_set(F, m.domain, 7), SeedMiss);

  ZeroTraceDiagnostics diag;
  auto curves = trace_zero_set(F, m.domain, 24, {}, &diag);
  REQUIRE(curves.size() == 1);
  const auto& c = curves[0];
  REQUIRE(c.points.size() > 100);
  REQUIRE_FALSE(c.closed);
  REQUIRE(c.front_end == EndpointKind::Open);
  REQUIRE(c.back_end == EndpointKind::Open);

  double top = -1e300, bot = 1e300;
  for (Cx z : c.points) {
    REQUIRE(std::abs(z.real()) < 1e-9);
    top = std::max(top, z.imag());
    bot = std::min(bot, z.imag());
  }
  // Wall polishing puts the end samples on the rectangle boundary.
  REQUIRE(top == Catch::Approx(m.domain.hi.imag()).margin(1e-12));
  REQUIRE(bot == Catch::Approx(m.domain.lo.imag()).margin(1e-12));

  auto again = trace_zero_set(F, m.domain, 24);
  REQUIRE(again.size() == 1);
  REQUIRE(again[0].points == c.points);
}

TEST_CASE("flag refinement pins transitions and splits runs") {
  int calls = 0;
  auto flags = detail::refined_flags(100, 5, [&](std::size_t i) {
    ++calls;
    return i < 37 ? 1 : 0;
  });
  REQUIRE(flags[36] == 1);
  REQUIRE(flags[37] == 0);
  for (std::size_t i = 0; i < 100; ++i)
    REQUIRE(flags[i] == (i < 37 ? 1 : 0));
  REQUIRE(calls < 40);  // stride plus a short bisection, not every index

  SpectralCurve loop;
  loop.kind = CurveKind::Singular;
  loop.closed = true;
  std::vector<signed char> keep;
  for (int i = 0; i < 10; ++i) {
    loop.samples.push_back(Cx(std::cos(0.2 * pi * i), std::sin(0.2 * pi * i)));
    keep.push_back(i <= 2 || i >= 8 ? 1 : 0);
  }
  auto pieces = detail::split_by_flag(loop, keep, 1);
  REQUIRE(pieces.size() == 1);  // wraps across the seam into one run
  REQUIRE(pieces[0].samples.size() == 5);
  REQUIRE(pieces[0].front_end == EndpointKind::Junction);
  REQUIRE(pieces[0].back_end == EndpointKind::Junction);
}

TEST_CASE("combined profile: the singular curve is a straight line") {
  auto m = models::couette_poiseuille();
  CurveOptions opt;
  opt.grid_n = 20;

  auto curves = singular_curves(m.potential, m.domain, opt);
  REQUIRE(curves.size() == 1);
  const auto& c = curves[0];
  REQUIRE(c.kind == CurveKind::Singular);
  REQUIRE(c.samples.size() > 80);

  double span = 0;
  for (std::size_t i = 0; i < c.samples.size(); ++i) {
    REQUIRE(line_residual(c.samples[i]) < 1.5e-3);
    REQUIRE(std::abs(c.values[i].real()) < 1e-7);
    span = std::max(span, std::abs(c.samples[i] - c.samples[0]));
  }
  REQUIRE(span > 2.0);  // crosses most of the rectangle
}

TEST_CASE("linear profile: critical families cross at -i/sqrt(3)") {
  auto m = models::plane_couette();
  CurveOptions opt;
  opt.grid_n = 20;

  RootTracker tracker(m.potential, m.domain, opt.eps_tp);
  auto fam_a = critical_curves(tracker, m.a, BoundarySide::A, opt);
  auto fam_b = critical_curves(tracker, m.b, BoundarySide::B, opt);
  REQUIRE(fam_a.size() >= 1);
  REQUIRE(fam_b.size() >= 1);

  for (const auto& c : fam_a) {
    REQUIRE(c.kind == CurveKind::CriticalA);
    for (Cx lam : c.samples) REQUIRE(ray_residual(m.a.z, lam) < 2e-3);
  }
  for (const auto& c : fam_b) {
    REQUIRE(c.kind == CurveKind::CriticalB);
    for (Cx lam : c.samples) REQUIRE(ray_residual(m.b.z, lam) < 2e-3);
  }

  // Closest approach between the two families is the known intersection.
  double best = 1e300;
  Cx where;
  for (const auto& ca : fam_a)
    for (Cx za : ca.samples)
      for (const auto& cb : fam_b) {
        double d = path_distance(cb.samples, za);
        if (d < best) {
          best = d;
          where = za;
        }
      }
  // Samples sit up to half a tracing step from the crossing itself.
  REQUIRE(best < 0.02);
  REQUIRE(std::abs(where - Cx(0, -1.0 / std::sqrt(3.0))) < 0.03);
}

TEST_CASE("linear profile: balanced curve is the truncated imaginary ray") {
  auto m = models::plane_couette();
  CurveOptions opt;
  opt.grid_n = 20;

  auto curves = balanced_curves(m.potential, m.domain, m.a, m.b, opt);
  REQUIRE(curves.size() == 1);
  const auto& c = curves[0];
  REQUIRE(c.kind == CurveKind::Balanced);
  REQUIRE(c.samples.size() > 60);

  double top = -1e300, bot = 1e300;
  for (std::size_t i = 0; i < c.samples.size(); ++i) {
    REQUIRE(std::abs(c.samples[i].real()) < 1e-3);
    REQUIRE(c.essential[i] == 1);
    top = std::max(top, c.samples[i].imag());
    bot = std::min(bot, c.samples[i].imag());
  }
  // Truncated where the boundary points stop sharing a canonical domain,
  // and reaching the bottom of the rectangle.
  double t0 = -1.0 / std::sqrt(3.0);
  REQUIRE(top < t0 + 0.01);
  REQUIRE(top > t0 - 0.05);
  REQUIRE(bot < m.domain.lo.imag() + 0.05);
}

TEST_CASE("combined profile: essential and inessential singular segments") {
  auto m = models::couette_poiseuille();
  CurveOptions opt;
  opt.grid_n = 20;

  RootTracker tracker(m.potential, m.domain, opt.eps_tp);
  auto curves = singular_curves(tracker, opt);
  REQUIRE(curves.size() == 1);
  auto& c = curves[0];
  essential_filter(tracker, c, m.a, m.b, opt);

  // The segment near the real axis is essential, the far tail is not, and
  // the two verdicts split the line into two contiguous runs.
  std::size_t n_true = 0, n_false = 0;
  for (auto f : c.essential) {
    if (f == 1) ++n_true;
    if (f == 0) ++n_false;
  }
  REQUIRE(n_true >= 10);
  REQUIRE(n_false >= 10);

  auto value_near = [&](Cx probe) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < c.samples.size(); ++i)
      if (std::abs(c.samples[i] - probe) < std::abs(c.samples[best] - probe))
        best = i;
    return c.essential[best];
  };
  REQUIRE(value_near(Cx(0.0, -1.0 / 16.0)) == 1);
  REQUIRE(value_near(Cx(1.7, -1.7 - 1.0 / 16.0)) == 0);

  int transitions = 0;
  for (std::size_t i = 0; i + 1 < c.essential.size(); ++i)
    if (c.essential[i] != c.essential[i + 1]) ++transitions;
  REQUIRE(transitions == 1);
}

TEST_CASE("linear profile: the limit spectral graph is a Y") {
  auto m = models::plane_couette();
  CurveOptions opt;
  opt.grid_n = 20;

  auto T = assemble_T(m.potential, m.domain, m.a, m.b, opt);

  int n_bal = 0, n_ca = 0, n_cb = 0;
  for (const auto& c : T.curves) {
    if (c.kind == CurveKind::Balanced) ++n_bal;
    if (c.kind == CurveKind::CriticalA) ++n_ca;
    if (c.kind == CurveKind::CriticalB) ++n_cb;
    REQUIRE(c.samples.size() >= 2);
  }
  REQUIRE(n_bal == 1);
  REQUIRE(n_ca == 1);
  REQUIRE(n_cb == 1);
  REQUIRE(T.curves.size() == 3);

  Cx star(0, -1.0 / std::sqrt(3.0));
  REQUIRE(T.junctions.size() == 1);
  REQUIRE(std::abs(T.junctions[0].lambda - star) < 0.04);
  REQUIRE(T.junctions[0].curves.size() == 3);

  // The essential critical arcs run from the junction up toward the top of
  // the domain; nothing essential survives below it except the balanced ray.
  for (const auto& c : T.curves) {
    if (c.kind == CurveKind::Balanced) continue;
    double lo = 1e300, hi = -1e300;
    for (Cx z : c.samples) {
      lo = std::min(lo, z.imag());
      hi = std::max(hi, z.imag());
    }
    REQUIRE(lo > star.imag() - 0.04);
    REQUIRE(hi > -0.1);
  }
  REQUIRE(T.overlaps.empty());
}
