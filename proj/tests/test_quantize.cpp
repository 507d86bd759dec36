#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "specgraph/models.hpp"
#include "specgraph/quantize.hpp"

using namespace specgraph;

namespace {

// Exact balanced integral of the first model problem on lambda = -i t:
// Im B(t) = (2/3) sqrt(2) (1+t^2)^{3/4} (cos x + sin x), x = (3/2) atan t.
double im_b1(double t) {
  double x = 1.5 * std::atan(t);
  return (2.0 / 3.0) * std::sqrt(2.0) * std::pow(1.0 + t * t, 0.75) *
         (std::cos(x) + std::sin(x));
}

// Unique root of g on [lo, hi]; fails the test when the sign-change scan
// does not find exactly one.
template <class G>
double unique_root(G g, double lo, double hi) {
  const int n = 4000;
  double prev = g(lo), a = lo, b = lo;
  int found = 0;
  for (int i = 1; i <= n; ++i) {
    double t = lo + (hi - lo) * double(i) / n;
    double cur = g(t);
    if ((prev < 0) != (cur < 0)) {
      ++found;
      a = lo + (hi - lo) * double(i - 1) / n;
      b = t;
    }
    prev = cur;
  }
  REQUIRE(found == 1);
  for (int i = 0; i < 80; ++i) {
    double mid = 0.5 * (a + b);
    if ((g(a) < 0) != (g(mid) < 0))
      b = mid;
    else
      a = mid;
  }
  return 0.5 * (a + b);
}

SpectralCurve line_curve(CurveKind kind, Cx from, Cx to, int n) {
  SpectralCurve c;
  c.kind = kind;
  c.j = 0;
  c.l = 1;
  for (int i = 0; i < n; ++i)
    c.samples.push_back(from + (to - from) * (double(i) / (n - 1)));
  return c;
}

}  // namespace

TEST_CASE("balanced quantization on the imaginary ray matches the closed form") {
  auto mp = models::plane_couette();
  RootTracker tracker(mp.potential, mp.domain);
  auto curves = balanced_curves(tracker, mp.a, mp.b);
  REQUIRE(curves.size() == 1);

  const double k = 40;
  QuantizeDiagnostics diag;
  auto est = quantize_along_curve(tracker, curves[0], mp.a, mp.b, k,
                                  std::nullopt, {}, &diag);
  REQUIRE(est.size() >= 15);
  CHECK(diag.newton_failures == 0);

  for (std::size_t i = 0; i + 1 < est.size(); ++i)
    CHECK(est[i].m < est[i + 1].m);

  for (const auto& e : est) {
    CHECK(e.rule.kind == QuantizationRule::Kind::Balanced);
    CHECK(e.rule.offset == 0.0);
    CHECK(e.k == k);
    CHECK(e.residual <= 1e-7);
    double tm = unique_root(
        [&](double t) { return k * im_b1(t) - double(e.m) * pi; }, 0.45,
        3.05);
    CHECK(std::abs(e.lambda0 - Cx(0, -tm)) <= 1e-6);
  }

  auto some = quantize_along_curve(
      tracker, curves[0], mp.a, mp.b, k,
      std::make_pair(est[2].m, est[4].m));
  REQUIRE(some.size() == 3);
  CHECK(some[0].m == est[2].m);
  CHECK(std::abs(some[1].lambda0 - est[3].lambda0) < 1e-9);

  auto none = quantize_along_curve(tracker, curves[0], mp.a, mp.b, k,
                                   std::make_pair(2000L, 2100L));
  CHECK(none.empty());
}

TEST_CASE("critical quantization on the example-1 arcs matches the closed form") {
  auto mp = models::plane_couette();
  RootTracker tracker(mp.potential, mp.domain);
  auto curves = critical_curves(tracker, mp.b, BoundarySide::B);
  REQUIRE(!curves.empty());

  const double k = 40;
  int total = 0;
  for (const auto& c : curves) {
    auto est = quantize_along_curve(tracker, c, mp.a, mp.b, k);
    for (const auto& e : est) {
      CHECK(e.rule.kind == QuantizationRule::Kind::Critical);
      CHECK(e.rule.offset == -0.25);
      CHECK(e.residual <= 1e-7);
      double rho = std::pow(3 * pi * (double(e.m) - 0.25) / (2 * k),
                            2.0 / 3.0);
      Cx left = 1.0 - rho * std::polar(1.0, pi / 6);
      Cx right = 1.0 - rho * std::polar(1.0, 5 * pi / 6);
      double err = std::min(std::abs(e.lambda0 - left),
                            std::abs(e.lambda0 - right));
      CHECK(err <= 1e-6);
      ++total;
    }
  }
  CHECK(total >= 20);
}

TEST_CASE("singular quantization on example 2 matches the closed form") {
  auto mp = models::couette_poiseuille();
  RootTracker tracker(mp.potential, mp.domain);
  auto curves = singular_curves(tracker);
  REQUIRE(curves.size() == 1);

  const double k = 60;
  auto est = quantize_along_curve(tracker, curves[0], mp.a, mp.b, k);
  REQUIRE(est.size() >= 60);
  CHECK(est.front().m == 2);
  CHECK(est.back().m >= 75);

  for (const auto& e : est) {
    CHECK(e.rule.kind == QuantizationRule::Kind::Singular);
    CHECK(e.rule.offset == -0.5);
    CHECK(e.residual <= 1e-7);
    double xm = std::sqrt(2.0) * (double(e.m) - 0.5) / k - 1.0 / 16.0;
    Cx exact(xm, -(xm + 1.0 / 16.0));
    CHECK(std::abs(e.lambda0 - exact) <= 1e-6);
  }
}

TEST_CASE("limit graph quantization rejects interior contacts") {
  LimitSpectralGraph cross;
  cross.curves.push_back(
      line_curve(CurveKind::Singular, Cx(-1, 0), Cx(1, 0), 21));
  cross.curves.push_back(
      line_curve(CurveKind::CriticalA, Cx(0, -1), Cx(0, 1), 21));
  CHECK_THROWS_AS(check_quantization_hypothesis(cross, 0),
                  HypothesisViolated);
  CHECK_THROWS_AS(check_quantization_hypothesis(cross, 1),
                  HypothesisViolated);

  // Meeting at a shared endpoint is what junctions are; that is allowed.
  LimitSpectralGraph wye;
  wye.curves.push_back(
      line_curve(CurveKind::Singular, Cx(-1, 0), Cx(1, 0), 21));
  wye.curves.push_back(
      line_curve(CurveKind::CriticalA, Cx(1, 0), Cx(1, 1), 21));
  CHECK_NOTHROW(check_quantization_hypothesis(wye, 0));
  CHECK_NOTHROW(check_quantization_hypothesis(wye, 1));
}

TEST_CASE("wkb solutions reproduce the leading-order formula") {
  auto mp = models::plane_couette();  // P = i (z - lambda)
  const double k = 3.0;

  // Base point at the turning point of lambda = 0.
  auto vals = wkb_solutions(mp.potential, Cx(0, 0), k, Cx(0, 0),
                            {Cx(1, 0), Cx(2, 0)});
  REQUIRE(vals.size() == 2);

  Cx s1 = (2.0 / 3.0) * std::polar(1.0, pi / 4);
  Cx u1 = std::polar(1.0, pi / 8);
  CHECK(std::abs(vals[0].s - s1) < 1e-8);
  CHECK(std::abs(vals[0].v_plus - std::exp(k * s1) / u1) <
        1e-8 * std::abs(std::exp(k * s1)));
  CHECK(std::abs(vals[0].v_minus - std::exp(-k * s1) / u1) < 1e-8);

  Cx s2 = s1 * 2.0 * std::sqrt(2.0);
  Cx u2 = std::pow(2.0, 0.25) * std::polar(1.0, pi / 8);
  CHECK(std::abs(vals[1].s - s2) < 1e-8);
  CHECK(std::abs(vals[1].v_plus - std::exp(k * s2) / u2) <
        1e-7 * std::abs(std::exp(k * s2)));

  // Sample at the base point: S vanishes and both branches agree.
  auto triv = wkb_solutions(mp.potential, Cx(0, 0), k, Cx(1, 0), {Cx(1, 0)});
  REQUIRE(triv.size() == 1);
  CHECK(std::abs(triv[0].s) < 1e-12);
  CHECK(std::abs(triv[0].v_plus - std::polar(1.0, -pi / 8)) < 1e-9);
  CHECK(std::abs(triv[0].v_plus - triv[0].v_minus) < 1e-12);

  CHECK_THROWS_AS(
      wkb_solutions(mp.potential, Cx(0, 0), k, Cx(1, 0), {Cx(1e-8, 0)}),
      TooCloseToTurningPoint);
}

TEST_CASE("wkb error against direct integration halves when k doubles") {
  auto mp = models::plane_couette();
  const BivariatePotential& pot = mp.potential;
  const Cx lambda(0, 0);

  // Relative error of v_plus at z = 2 against an RK4 integration of
  // y'' = k^2 P y started from the WKB data at z = 1. The segment [1, 2]
  // stays inside one basic domain of lambda = 0.
  auto rel_err = [&](double k) {
    auto w = wkb_solutions(pot, lambda, k, Cx(1, 0), {Cx(1, 0), Cx(2, 0)});
    Cx y = w[0].v_plus;
    Cx w1 = std::sqrt(Cx(0, 1));
    Cx yp = (k * w1 - 0.25) * y;  // (k w - w'/(2w)) v at z = 1
    const int n = 4000;
    const double h = 1.0 / n;
    auto acc = [&](Cx z, Cx yy) { return k * k * pot.eval(z, lambda) * yy; };
    Cx z(1, 0);
    for (int i = 0; i < n; ++i) {
      Cx k1y = yp, k1p = acc(z, y);
      Cx k2y = yp + 0.5 * h * k1p, k2p = acc(z + 0.5 * h, y + 0.5 * h * k1y);
      Cx k3y = yp + 0.5 * h * k2p, k3p = acc(z + 0.5 * h, y + 0.5 * h * k2y);
      Cx k4y = yp + h * k3p, k4p = acc(z + h, y + h * k3y);
      y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
      yp += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
      z += h;
    }
    return std::abs(y - w[1].v_plus) / std::abs(y);
  };

  double e1 = rel_err(20), e2 = rel_err(40);
  CHECK(e1 > 1e-6);
  CHECK(e2 > 1e-7);
  double ratio = e1 / e2;
  CHECK(ratio > 1.5);
  CHECK(ratio < 3.0);
}

TEST_CASE("convergence report pairs estimates with oracles") {
  QuantizationRule rule = rule_for(CurveKind::Balanced);
  std::vector<Cx> oracle = {Cx(0, 0), Cx(1, 0), Cx(2, 0)};

  auto make = [&](double off, double k) {
    std::vector<EigenvalueEstimate> v;
    for (int m = 1; m <= 3; ++m)
      v.push_back({m, oracle[std::size_t(m) - 1] + off, rule, k, 0.0});
    return v;
  };

  // Estimates equal to the oracle values: all errors vanish.
  auto exact = convergence_report(make(0, 10), oracle, make(0, 20), oracle);
  REQUIRE(exact.rows.size() == 3);
  CHECK(exact.max_err_k == 0.0);
  CHECK(exact.max_err_2k == 0.0);
  CHECK(exact.median_ratio == 0.0);

  // Errors shrinking by 4 from k to 2k.
  auto rep = convergence_report(make(0.08, 10), oracle, make(0.02, 20),
                                oracle);
  REQUIRE(rep.rows.size() == 3);
  for (const auto& r : rep.rows) {
    CHECK(r.err_k == Catch::Approx(0.08).margin(1e-12));
    CHECK(r.err_2k == Catch::Approx(0.02).margin(1e-12));
    CHECK(r.ratio == Catch::Approx(4.0).epsilon(1e-9));
  }
  CHECK(rep.median_ratio == Catch::Approx(4.0).epsilon(1e-9));
  CHECK(rep.max_err_k == Catch::Approx(0.08).margin(1e-12));

  // Two oracle values competing for one estimate.
  std::vector<Cx> tight = {Cx(0, 0), Cx(1e-3, 0)};
  std::vector<EigenvalueEstimate> mid = {{1, Cx(5e-4, 0), rule, 10, 0.0}};
  CHECK_THROWS_AS(convergence_report(mid, tight, mid, tight),
                  MatchingAmbiguous);

  // Sitting exactly on one of them is not ambiguous.
  std::vector<EigenvalueEstimate> on = {{1, Cx(0, 0), rule, 10, 0.0}};
  CHECK_NOTHROW(convergence_report(on, tight, on, tight));
}
