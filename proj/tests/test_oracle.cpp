#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "specgraph/models.hpp"
#include "specgraph/oracle.hpp"
#include "specgraph/quantize.hpp"

using namespace specgraph;

namespace {

ProblemInstance make_prob(const models::ModelProblem& m, double k) {
  return {m.potential, m.a, m.b, k, 0};
}

}  // namespace

TEST_CASE("log scaling keeps the mantissa normalized") {
  auto v = log_scaled(Cx(3.7e5, -1.2e5));
  CHECK(std::abs(v.mantissa) >= 1.0);
  CHECK(std::abs(v.mantissa) < std::exp(1.0));
  CHECK(std::abs(v.mantissa * std::exp(v.log_factor) - Cx(3.7e5, -1.2e5)) <
        1e-6);

  auto tiny = log_scaled(Cx(0, 1e-200), -50.0);
  CHECK(std::abs(tiny.mantissa) >= 1.0);
  CHECK(std::abs(tiny.mantissa) < std::exp(1.0));
  CHECK(tiny.log_abs() == Catch::Approx(std::log(1e-200) - 50.0));

  auto zero = log_scaled(Cx(0, 0));
  CHECK(std::abs(zero.mantissa) == 0.0);
}

TEST_CASE("determinant input validation") {
  auto m = models::plane_couette();
  ProblemInstance prob = make_prob(m, 10);
  prob.b = prob.a;
  CHECK_THROWS_AS(characteristic_determinant(prob, Cx(0, -1)),
                  std::invalid_argument);

  ProblemInstance bad_k = make_prob(m, 10);
  bad_k.k = 0;
  CHECK_THROWS_AS(characteristic_determinant(bad_k, Cx(0, -1)),
                  std::invalid_argument);

  ProblemInstance ok = make_prob(m, 10);
  CHECK_THROWS_AS(find_eigenvalues(ok, Cx(0, 0), Cx(1, 1), 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(find_eigenvalues(ok, Cx(1, 1), Cx(0, 0), 2),
                  std::invalid_argument);
}

TEST_CASE("determinant growth matches the boundary integral slope") {
  auto m = models::plane_couette();
  const Cx lambda(1.2, 0);

  TurningPointSet tps = turning_points(m.potential, lambda);
  PhaseValue b = boundary_integral(m.potential, lambda, tps, m.a.z, m.b.z);
  double slope_ref = std::abs(b.value.real());
  // int_{-1}^{1} sqrt(i(z - 1.2)) dz has constant integrand argument, so the
  // antiderivative gives (2/3)(2.2^{3/2} - 0.2^{3/2}) cos(pi/4) in real part.
  double closed = (2.0 / 3.0) *
                  (std::pow(2.2, 1.5) - std::pow(0.2, 1.5)) *
                  std::cos(pi / 4);
  CHECK(slope_ref == Catch::Approx(closed).epsilon(1e-9));

  // log|D| = k b + c - s log k + O(1/k); Richardson over the doubled spans
  // cancels the prefactor term s, leaving the leading slope b.
  OracleOptions opt;
  double l20 = characteristic_determinant(make_prob(m, 20), lambda, opt)
                   .log_abs();
  double l40 = characteristic_determinant(make_prob(m, 40), lambda, opt)
                   .log_abs();
  double l80 = characteristic_determinant(make_prob(m, 80), lambda, opt)
                   .log_abs();
  double slope = 2 * (l80 - l40) / 40.0 - (l40 - l20) / 20.0;
  CHECK(slope == Catch::Approx(slope_ref).epsilon(0.01));
}

TEST_CASE("log-scaled determinant survives far beyond double range") {
  auto m = models::plane_couette();
  OracleOptions opt;
  opt.rtol = 1e-7;
  auto v = characteristic_determinant(make_prob(m, 600), Cx(1, 0), opt);
  CHECK(std::isfinite(v.log_factor));
  CHECK(std::abs(v.mantissa) >= 1.0);
  CHECK(std::abs(v.mantissa) < std::exp(1.0));
  CHECK(v.log_abs() > 709.0);  // e^709 is the double overflow edge
}

TEST_CASE("segment through a turning point is flagged, not fatal") {
  auto m = models::plane_couette();
  ProblemInstance prob = make_prob(m, 15);

  OracleDiagnostics diag;
  auto v = characteristic_determinant(prob, Cx(0, 0), {}, &diag);
  CHECK(diag.segment_near_turning_point);
  CHECK(std::isfinite(v.log_abs()));

  OracleDiagnostics clear;
  characteristic_determinant(prob, Cx(0, -1), {}, &clear);
  CHECK_FALSE(clear.segment_near_turning_point);
  CHECK(clear.det_evals == 1);
}

TEST_CASE("winding sweep locates example-1 eigenvalues near the estimates") {
  auto m = models::plane_couette();
  RootTracker tracker(m.potential, m.domain);
  auto curves = balanced_curves(tracker, m.a, m.b);
  REQUIRE(curves.size() == 1);

  const double k = 30;
  auto est = quantize_along_curve(tracker, curves[0], m.a, m.b, k);
  REQUIRE(est.size() >= 6);

  // Two adjacent first-order estimates in the middle of the ray.
  std::size_t i = 0;
  while (i < est.size() && est[i].lambda0.imag() > -0.7) ++i;
  REQUIRE(i + 1 < est.size());
  Cx top = est[i].lambda0, bot = est[i + 1].lambda0;
  double gap = std::abs(top - bot);

  // The box straddles the imaginary axis but its grid lines avoid it.
  Cx lo(-0.021, bot.imag() - 0.45 * gap);
  Cx hi(0.029, top.imag() + 0.45 * gap);
  OracleOptions opt;
  opt.rtol = 1e-8;
  ProblemInstance prob = make_prob(m, k);

  OracleDiagnostics diag;
  auto eig = find_eigenvalues(prob, lo, hi, 2, opt, &diag);
  REQUIRE(eig.size() == 2);
  CHECK(diag.unresolved_cells == 0);

  // Eigenvalues approach the first-order estimates as k grows; at k = 30
  // they should already sit within O(k^-2) scale distance.
  CHECK(std::abs(eig[0].lambda - eig[1].lambda) >= 0.5 * gap);
  for (const auto& e : eig) {
    CHECK(e.winding_index == 1);
    CHECK(e.refine_residual <= opt.eps_orc);
    double d = std::min(std::abs(e.lambda - top), std::abs(e.lambda - bot));
    CHECK(d <= 0.01);
  }

  // Reflection symmetry of the example-1 spectrum under lambda -> -conj.
  for (const auto& e : eig) {
    Cx mirror = -std::conj(e.lambda);
    double d = 1e300;
    for (const auto& o : eig) d = std::min(d, std::abs(o.lambda - mirror));
    CHECK(d <= 1e-6);
  }

  // Two-sided shooting: integrating from b instead of a agrees at the zero.
  ProblemInstance back = prob;
  std::swap(back.a, back.b);
  for (const auto& e : eig)
    CHECK(determinant_residual(back, e.lambda, opt) <= 1e-6);

  // Winding counts add over a partition of the region.
  Cx split(0.0043, 0.5 * (lo.imag() + hi.imag()) + 0.0117);
  int whole = winding_number(prob, lo, hi, opt);
  int parts = winding_number(prob, lo, split, opt) +
              winding_number(prob, Cx(split.real(), lo.imag()),
                             Cx(hi.real(), split.imag()), opt) +
              winding_number(prob, Cx(lo.real(), split.imag()),
                             Cx(split.real(), hi.imag()), opt) +
              winding_number(prob, split, hi, opt);
  CHECK(whole == 2);
  CHECK(parts == whole);

  // Zero locations are stable under a tighter ODE tolerance: they move by
  // about rtol divided by the determinant slope, here well under 1e-6.
  OracleOptions tight = opt;
  tight.rtol = 1e-10;
  for (const auto& e : eig) {
    auto redo = find_eigenvalues(prob, e.lambda - Cx(1e-3, 1e-3),
                                 e.lambda + Cx(1e-3, 1e-3), 1, tight);
    REQUIRE(redo.size() == 1);
    CHECK(std::abs(redo[0].lambda - e.lambda) <= 1e-6);
  }
}

TEST_CASE("regions above the real axis hold no example-2 eigenvalues") {
  auto m = models::couette_poiseuille();
  ProblemInstance prob = make_prob(m, 30);
  OracleOptions opt;
  opt.rtol = 1e-8;
  OracleDiagnostics diag;
  auto eig = find_eigenvalues(prob, Cx(0.0, 0.05), Cx(0.5, 0.55), 3, opt,
                              &diag);
  CHECK(eig.empty());
  CHECK(diag.unresolved_cells == 0);
}

TEST_CASE("a-priori half-strip from the energy estimate") {
  auto ex2 = a_priori_region(make_prob(models::couette_poiseuille(), 10));
  CHECK(ex2.re_lo == Catch::Approx(-1.0 / 16).margin(1e-9));
  CHECK(ex2.re_hi == Catch::Approx(1.5).margin(1e-9));
  CHECK(ex2.im_hi == 0.0);

  auto ex1 = a_priori_region(make_prob(models::plane_couette(), 10));
  CHECK(ex1.re_lo == Catch::Approx(-1.0).margin(1e-12));
  CHECK(ex1.re_hi == Catch::Approx(1.0).margin(1e-12));

  // Complex endpoint.
  auto off = make_prob(models::plane_couette(), 10);
  off.a = BoundaryPoint::at(Cx(-1, 0.3));
  CHECK_THROWS_AS(a_priori_region(off), FormNotSupported);

  // Infinite endpoint.
  auto inf = make_prob(models::plane_couette(), 10);
  inf.b = BoundaryPoint::infinite(0.25);
  CHECK_THROWS_AS(a_priori_region(inf), FormNotSupported);

  // Potential not of the form i (q(z) - lambda).
  ProblemInstance real_form = make_prob(models::plane_couette(), 10);
  real_form.potential.coeffs = {{Cx(0, 0), Cx(-1, 0)}, {Cx(1, 0)}};
  CHECK_THROWS_AS(a_priori_region(real_form), FormNotSupported);

  ProblemInstance lam_dep = make_prob(models::plane_couette(), 10);
  lam_dep.potential.coeffs = {{Cx(0, 0), Cx(0, -1)}, {Cx(0, 0), Cx(0, 1)}};
  CHECK_THROWS_AS(a_priori_region(lam_dep), FormNotSupported);
}
