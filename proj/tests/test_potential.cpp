#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "specgraph/models.hpp"
#include "specgraph/potential.hpp"

using namespace specgraph;

TEST_CASE("model potentials evaluate to their defining expressions") {
  auto m1 = models::plane_couette();
  auto m2 = models::couette_poiseuille();
  Cx z(0.3, 0.1), lam(-0.2, -0.7);
  REQUIRE(std::abs(m1.potential.eval(z, lam) - Cx(0, 1) * (z - lam)) < 1e-15);
  REQUIRE(std::abs(m2.potential.eval(z, lam) -
                   Cx(0, 1) * (z * z - 0.5 * z - lam)) < 1e-15);
  REQUIRE(std::abs(m1.potential.eval_dz(z, lam) - Cx(0, 1)) < 1e-15);
  REQUIRE(std::abs(m2.potential.eval_dz(z, lam) - Cx(0, 1) * (2.0 * z - 0.5)) <
          1e-15);
}

TEST_CASE("turning points match the explicit root formulas") {
  auto m1 = models::plane_couette();
  auto m2 = models::couette_poiseuille();

  Cx lam(0.4, -1.1);
  auto t1 = turning_points(m1.potential, lam);
  REQUIRE(t1.points.size() == 1);
  REQUIRE(t1.points[0].multiplicity == 1);
  REQUIRE(std::abs(t1.points[0].z - lam) < 1e-12);

  auto t2 = turning_points(m2.potential, lam);
  REQUIRE(t2.points.size() == 2);
  Cx s = std::sqrt(Cx(1.0 / 16, 0) + lam);
  Cx r1 = Cx(0.25, 0) - s, r2 = Cx(0.25, 0) + s;
  REQUIRE(t2.total_multiplicity() == 2);
  double d1 = std::min(std::abs(t2.points[0].z - r1),
                       std::abs(t2.points[0].z - r2));
  double d2 = std::min(std::abs(t2.points[1].z - r1),
                       std::abs(t2.points[1].z - r2));
  REQUIRE(d1 < 1e-11);
  REQUIRE(d2 < 1e-11);
}

TEST_CASE("colliding roots merge into one double point") {
  auto m2 = models::couette_poiseuille();
  auto t = turning_points(m2.potential, Cx(-1.0 / 16, 0));
  REQUIRE(t.points.size() == 1);
  REQUIRE(t.points[0].multiplicity == 2);
  REQUIRE(std::abs(t.points[0].z - Cx(0.25, 0)) < 1e-9);
  // Slightly off the collision the pair splits again.
  auto t_off = turning_points(m2.potential, Cx(-1.0 / 16 + 0.01, 0));
  REQUIRE(t_off.points.size() == 2);
}

TEST_CASE("root residual invariant on random parameters") {
  auto m2 = models::couette_poiseuille();
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 100; ++i) {
    Cx lam(u(rng), u(rng));
    auto t = turning_points(m2.potential, lam);
    REQUIRE(t.total_multiplicity() == 2);
    double bound = 1e-10 * (1.0 + m2.potential.coeff_scale());
    for (const auto& p : t.points)
      if (p.multiplicity == 1)
        REQUIRE(std::abs(m2.potential.eval(p.z, lam)) < bound * 1e2);
  }
}

TEST_CASE("sector directions and centers") {
  auto m1 = models::plane_couette();
  auto m2 = models::couette_poiseuille();

  Cx lam(0.2, -0.9);
  auto s1 = sector_data(m1.potential, lam);
  REQUIRE(s1.angles.size() == 3);
  REQUIRE(std::abs(s1.angles[0] - pi / 6) < 1e-12);
  REQUIRE(std::abs(s1.angles[1] - 5 * pi / 6) < 1e-12);
  REQUIRE(std::abs(s1.angles[2] - 3 * pi / 2) < 1e-12);
  REQUIRE(std::abs(s1.center - lam) < 1e-12);

  auto s2 = sector_data(m2.potential, lam);
  REQUIRE(s2.angles.size() == 4);
  REQUIRE(std::abs(s2.angles[0] - pi / 8) < 1e-12);
  REQUIRE(std::abs(s2.angles[1] - 5 * pi / 8) < 1e-12);
  REQUIRE(std::abs(s2.angles[2] - 9 * pi / 8) < 1e-12);
  REQUIRE(std::abs(s2.angles[3] - 13 * pi / 8) < 1e-12);
  REQUIRE(std::abs(s2.center - Cx(0.25, 0)) < 1e-12);

  // Directions depend only on the leading coefficient, not on lambda.
  auto s2b = sector_data(m2.potential, Cx(-1.4, 0.3));
  for (int i = 0; i < 4; ++i)
    REQUIRE(std::abs(s2.angles[i] - s2b.angles[i]) < 1e-12);
}

TEST_CASE("degenerate leading coefficient is rejected") {
  // (lambda - 1) z^2 + z: leading row vanishes at lambda = 1.
  BivariatePotential p;
  p.coeffs = {{Cx(0, 0)}, {Cx(1, 0)}, {Cx(-1, 0), Cx(1, 0)}};
  p.validate();
  REQUIRE_THROWS_AS(turning_points(p, Cx(1, 0)), LeadingCoefficientVanishes);
  REQUIRE_NOTHROW(turning_points(p, Cx(0.5, 0)));
}

TEST_CASE("exceptional directions are flagged") {
  auto m1 = models::plane_couette();
  Cx lam(0, -1);
  auto inf_near = BoundaryPoint::infinite(pi / 6 + 5e-3);
  auto inf_far = BoundaryPoint::infinite(pi / 2);
  auto fin = BoundaryPoint::at(Cx(1, 0));
  REQUIRE(is_exceptional(m1.potential, lam, inf_near, fin, 1e-2));
  REQUIRE(!is_exceptional(m1.potential, lam, inf_far, fin, 1e-2));
  // Finite point sitting on the turning point.
  auto on_tp = BoundaryPoint::at(lam);
  REQUIRE(is_exceptional(m1.potential, lam, on_tp, fin, 1e-2));
}

TEST_CASE("root tracking keeps labels and detects monodromy") {
  auto m2 = models::couette_poiseuille();
  Cx center(-1.0 / 16, 0);
  double rad = 0.08;

  // Closed loop around the branch point: positions return, labels swap.
  std::vector<Cx> loop;
  int steps = 24;
  for (int i = 0; i <= steps; ++i) {
    double th = 2 * pi * i / steps;
    loop.push_back(center + rad * Cx(std::cos(th), std::sin(th)));
  }
  auto start = turning_points(m2.potential, loop.front());
  REQUIRE(start.points.size() == 2);
  auto hist = track_roots(m2.potential, loop, start);
  const auto& fin = hist.back();
  REQUIRE(fin.points.size() == 2);
  const TurningPoint* f0 = fin.by_label(start.points[0].label);
  const TurningPoint* f1 = fin.by_label(start.points[1].label);
  REQUIRE(f0 != nullptr);
  REQUIRE(f1 != nullptr);
  REQUIRE(std::abs(f0->z - start.points[1].z) < 1e-9);
  REQUIRE(std::abs(f1->z - start.points[0].z) < 1e-9);

  // A path straight through the branch point cannot be tracked.
  std::vector<Cx> through{center + Cx(rad, 0), center - Cx(rad, 0)};
  auto s2 = turning_points(m2.potential, through.front());
  REQUIRE_THROWS_AS(track_roots(m2.potential, through, s2),
                    BranchPointEncountered);

  // A path that stays away from it tracks fine and keeps labels consistent
  // with plain nearest matching.
  std::vector<Cx> safe{Cx(0.5, -1.0), Cx(0.5, -0.2), Cx(-0.3, -0.2)};
  auto s3 = turning_points(m2.potential, safe.front());
  auto hist3 = track_roots(m2.potential, safe, s3);
  REQUIRE(hist3.size() == safe.size());
  for (const auto& set : hist3) REQUIRE(set.points.size() == 2);
}

TEST_CASE("branch points from the discriminant") {
  auto m1 = models::plane_couette();
  auto m2 = models::couette_poiseuille();
  REQUIRE(branch_points(m1.potential, Cx(-2, -2), Cx(2, 2)).empty());
  auto bp = branch_points(m2.potential, Cx(-2, -2), Cx(2, 2));
  REQUIRE(bp.size() == 1);
  REQUIRE(std::abs(bp[0] - Cx(-1.0 / 16, 0)) < 1e-10);
  // The guarded domain carries an excluded disc around it.
  REQUIRE(m2.domain.excluded.size() == 1);
  REQUIRE(std::abs(m2.domain.excluded[0].center - Cx(-1.0 / 16, 0)) < 1e-10);
  REQUIRE(!m2.domain.contains(Cx(-1.0 / 16, 0)));
}

TEST_CASE("parameter domain membership") {
  ParameterDomain d{Cx(-1, -2), Cx(1, 0), {{Cx(0, -1), 0.25}}};
  REQUIRE(d.contains(Cx(0.5, -0.5)));
  REQUIRE(!d.contains(Cx(0, -1.1)));   // inside excluded disc
  REQUIRE(!d.contains(Cx(2, -1)));     // outside rectangle
  REQUIRE(d.in_rect(Cx(0, -1.1)));
}
