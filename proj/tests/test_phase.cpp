#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "specgraph/models.hpp"
#include "specgraph/phase.hpp"

using namespace specgraph;

namespace {

// Distance between two values that are only defined up to overall sign.
double sign_free_dist(Cx a, Cx b) {
  return std::min(std::abs(a - b), std::abs(a + b));
}

}  // namespace

TEST_CASE("linear potential: action from the turning point in closed form") {
  auto m = models::plane_couette();
  // P = i (z - lambda) gives S(lambda, z) = (2/3) e^{i pi/4} (z - lambda)^{3/2}.
  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 12; ++trial) {
    Cx lam(u(rng), u(rng));
    Cx a(u(rng) + 2.5, u(rng));  // keep the endpoint away from the turning point
    auto tps = turning_points(m.potential, lam);
    auto v = endpoint_integral(m.potential, lam, tps, tps.points[0].label, a);
    Cx closed = 2.0 / 3.0 * std::exp(Cx(0, pi / 4)) *
                std::pow(a - lam, 1.5);
    REQUIRE(sign_free_dist(v.value, closed) < 1e-9 * (1.0 + std::abs(closed)));
  }
}

TEST_CASE("linear potential: frozen reference value") {
  auto m = models::plane_couette();
  auto tps = turning_points(m.potential, Cx(0, 0));
  auto v = endpoint_integral(m.potential, Cx(0, 0), tps, 0, Cx(1, 0));
  REQUIRE(std::abs(v.value - Cx(0.47140452079103173, 0.47140452079103173)) <
          1e-12);
}

TEST_CASE("quadratic potentials: pair integral in closed form") {
  // P = a2 (z - z1)(z - z2) gives the integral i pi a2^{1/2} (z2-z1)^2 / 8
  // between the roots, up to the overall sign.
  std::mt19937 rng(917);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  for (int trial = 0; trial < 12; ++trial) {
    Cx a2(u(rng), u(rng));
    if (std::abs(a2) < 0.3) a2 += Cx(1, 0);
    Cx z1(u(rng), u(rng));
    Cx z2 = z1 + Cx(u(rng) + 1.8, u(rng));
    BivariatePotential p;
    p.coeffs = {{a2 * z1 * z2}, {-a2 * (z1 + z2)}, {a2}};
    auto tps = turning_points(p, Cx(0, 0));
    REQUIRE(tps.points.size() == 2);
    auto v = pair_integral(p, Cx(0, 0), tps, 0, 1);
    Cx closed =
        Cx(0, pi / 8.0) * std::sqrt(a2) * (z2 - z1) * (z2 - z1);
    REQUIRE(sign_free_dist(v.value, closed) < 1e-9 * (1.0 + std::abs(closed)));
    // Standardized output has a nonnegative imaginary part.
    REQUIRE(v.value.imag() >= 0.0);
  }
}

TEST_CASE("parabolic profile: pair integral matches its closed form") {
  auto m = models::couette_poiseuille();
  for (Cx lam : {Cx(0.3, -0.8), Cx(1.0, 0.0), Cx(0.0, -0.5), Cx(-0.2, -1.3)}) {
    auto tps = turning_points(m.potential, lam);
    auto v = pair_integral(m.potential, lam, tps, 0, 1);
    Cx closed = Cx(0, pi / 8.0) * std::exp(Cx(0, pi / 4)) *
                (Cx(0.25, 0) + 4.0 * lam);
    REQUIRE(sign_free_dist(v.value, closed) < 1e-9 * (1.0 + std::abs(closed)));
  }
}

TEST_CASE("route integral is additive and reverses sign") {
  auto m = models::couette_poiseuille();
  Cx lam(0.6, -0.9);
  auto tps = turning_points(m.potential, lam);
  Cx a(-1.3, 0.4), b(0.1, 1.1), c(1.4, 0.6);

  auto whole = action_integral(m.potential, lam, {a, b, c}, tps);
  auto first = action_integral(m.potential, lam, {a, b}, tps);
  // Continue the second piece with the branch the first one ended on.
  auto wb = continue_sqrt(m.potential, lam, {a, b}, first.anchor.w);
  BranchAnchor at_b{b, wb.back()};
  auto second = action_integral(m.potential, lam, {b, c}, tps, &at_b);
  REQUIRE(std::abs(whole.value - (first.value + second.value)) < 1e-9);

  BranchAnchor rev_anchor{b, wb.back()};
  auto back = action_integral(m.potential, lam, {b, a}, tps, &rev_anchor);
  REQUIRE(std::abs(back.value + first.value) < 1e-9);
}

TEST_CASE("square-root continuation flips sign around a loop") {
  auto m = models::couette_poiseuille();
  Cx lam(0.5, -1.0);
  auto tps = turning_points(m.potential, lam);
  // Circle around exactly one simple turning point.
  Cx z0 = tps.points[0].z;
  double rad = 0.3 * std::abs(tps.points[0].z - tps.points[1].z);
  ContourPath loop;
  for (int i = 0; i <= 32; ++i) {
    double th = 2 * pi * i / 32;
    loop.push_back(z0 + rad * Cx(std::cos(th), std::sin(th)));
  }
  Cx w0 = std::sqrt(m.potential.eval(loop.front(), lam));
  auto w = continue_sqrt(m.potential, lam, loop, w0);
  REQUIRE(std::abs(w.back() + w0) < 1e-12 * (1.0 + std::abs(w0)));

  // Around both turning points the branch returns to itself.
  Cx mid = 0.5 * (tps.points[0].z + tps.points[1].z);
  double rad2 = 2.0 * std::abs(tps.points[0].z - mid);
  ContourPath big;
  for (int i = 0; i <= 48; ++i) {
    double th = 2 * pi * i / 48;
    big.push_back(mid + rad2 * Cx(std::cos(th), std::sin(th)));
  }
  Cx wb0 = std::sqrt(m.potential.eval(big.front(), lam));
  auto wb = continue_sqrt(m.potential, lam, big, wb0);
  REQUIRE(std::abs(wb.back() - wb0) < 1e-12 * (1.0 + std::abs(wb0)));
}

TEST_CASE("routes through a turning point are rejected") {
  auto m = models::couette_poiseuille();
  Cx lam(0.5, -1.0);
  auto tps = turning_points(m.potential, lam);
  Cx z0 = tps.points[0].z;
  Cx d(0.4, 0.1);
  REQUIRE_THROWS_AS(
      action_integral(m.potential, lam, {z0 - d, z0 + d}, tps),
      TooCloseToTurningPoint);
}

TEST_CASE("merged turning points make the pair integral degenerate") {
  auto m = models::couette_poiseuille();
  Cx lam(-1.0 / 16, 0);
  auto tps = turning_points(m.potential, lam);
  REQUIRE_THROWS_AS(pair_integral(m.potential, lam, tps, 0, 1),
                    DegenerateTurningPoints);
}

TEST_CASE("default routes detour around intervening turning points") {
  // Cubic with a root parked right on the segment between the other two.
  BivariatePotential p;
  Cx z1(-1, 0), z2(1, 0), z3(0, 0);
  // (z - z1)(z - z2)(z - z3) = z^3 - z
  p.coeffs = {{Cx(0, 0)}, {Cx(-1, 0)}, {Cx(0, 0)}, {Cx(1, 0)}};
  auto tps = turning_points(p, Cx(0, 0));
  REQUIRE(tps.points.size() == 3);
  int l1 = -1, l2 = -1, l3 = -1;
  for (const auto& t : tps.points) {
    if (std::abs(t.z - z1) < 1e-9) l1 = t.label;
    if (std::abs(t.z - z2) < 1e-9) l2 = t.label;
    if (std::abs(t.z - z3) < 1e-9) l3 = t.label;
  }
  REQUIRE((l1 >= 0 && l2 >= 0 && l3 >= 0));
  auto route = detour_route(z1, z2, tps, {l1, l2});
  REQUIRE(route.size() > 2);
  REQUIRE(route_clearance(route, tps, {l1, l2}) > 0.05);
  REQUIRE_NOTHROW(action_integral(p, Cx(0, 0), route, tps));
}

TEST_CASE("endpoint integral rejects boundary points on turning points") {
  auto m = models::plane_couette();
  Cx lam(1, 0);  // turning point exactly at the boundary point below
  auto tps = turning_points(m.potential, lam);
  REQUIRE_THROWS_AS(
      endpoint_integral(m.potential, lam, tps, 0, Cx(1, 0)),
      TooCloseToTurningPoint);
}

TEST_CASE("boundary integral between regular points has a stable branch") {
  auto m = models::plane_couette();
  Cx lam(0.3, -1.2);
  auto tps = turning_points(m.potential, lam);
  auto v = boundary_integral(m.potential, lam, tps, Cx(-1, 0), Cx(1, 0));
  // Same quantity out of the closed form: difference of endpoint actions on
  // a branch that is continuous along the segment.
  Cx c1 = 2.0 / 3.0 * std::exp(Cx(0, pi / 4)) * std::pow(Cx(1, 0) - lam, 1.5);
  Cx c2 = 2.0 / 3.0 * std::exp(Cx(0, pi / 4)) * std::pow(Cx(-1, 0) - lam, 1.5);
  // pow picks principal branches; the difference matches up to sign for
  // parameters below the segment, where no branch cut intervenes.
  REQUIRE(sign_free_dist(v.value, c1 - c2) < 1e-9 * (1.0 + std::abs(c1)));
}
