#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "specgraph/numerics.hpp"

using namespace specgraph;

TEST_CASE("adaptive quadrature reproduces closed forms") {
  auto cube = integrate_adaptive([](double x) { return Cx(x * x * x, 0); },
                                 0.0, 1.0);
  REQUIRE(std::abs(cube - Cx(0.25, 0)) < 1e-13);

  // int_0^pi e^{ix} dx = 2i
  auto osc = integrate_adaptive(
      [](double x) { return std::exp(Cx(0, x)); }, 0.0, pi);
  REQUIRE(std::abs(osc - Cx(0, 2)) < 1e-12);

  // int_0^1 cos(40 x) dx = sin(40)/40
  auto fast = integrate_adaptive(
      [](double x) { return Cx(std::cos(40 * x), 0); }, 0.0, 1.0);
  REQUIRE(std::abs(fast - Cx(std::sin(40.0) / 40.0, 0)) < 1e-12);

  // Integrable square-root singularity just outside the interval.
  auto nearsing = integrate_adaptive(
      [](double x) { return Cx(1.0 / std::sqrt(x + 1e-4), 0); }, 0.0, 1.0);
  double exact = 2.0 * (std::sqrt(1.0 + 1e-4) - std::sqrt(1e-4));
  REQUIRE(std::abs(nearsing - Cx(exact, 0)) < 1e-9 * exact);
}

TEST_CASE("quadrature failure is reported, not silently wrong") {
  // A genuine interior 1/x blow-up cannot be integrated.
  REQUIRE_THROWS_AS(
      integrate_adaptive([](double x) { return Cx(1.0 / (x - 0.5), 0); }, 0.0,
                         1.0, QuadOptions{1e-12, 1e-16, 20}),
      QuadratureFailure);
}

TEST_CASE("embedded 5(4) step integrates a rotating phase") {
  // y' = i y  =>  y(t) = e^{it}; drive the step controller manually.
  auto rhs = [](double, const CxN<1>& y) { return CxN<1>{Cx(0, 1) * y[0]}; };
  CxN<1> y{Cx(1, 0)};
  double t = 0, h = 0.1;
  CxN<1> k1 = rhs(t, y);
  const double tol = 1e-11;
  while (t < 10.0) {
    h = std::min(h, 10.0 - t);
    auto st = dp5_step(rhs, t, y, k1, h);
    double err = std::abs(st.err[0]) / (1.0 + std::abs(st.y5[0]));
    if (err <= tol) {
      t += h;
      y = st.y5;
      k1 = st.k_last;
    }
    double f = 0.9 * std::pow(tol / std::max(err, 1e-300), 0.2);
    h *= std::clamp(f, 0.2, 5.0);
  }
  REQUIRE(std::abs(y[0] - std::exp(Cx(0, 10))) < 1e-9);
}

TEST_CASE("embedded error estimate tracks the true step error") {
  auto rhs = [](double t, const CxN<1>& y) {
    return CxN<1>{y[0] * Cx(std::cos(t), 0.3)};
  };
  CxN<1> y{Cx(0.7, -0.2)};
  CxN<1> k1 = rhs(0.0, y);
  for (double h : {0.2, 0.1, 0.05}) {
    auto st = dp5_step(rhs, 0.0, y, k1, h);
    // Reference: many tiny steps across the same interval.
    CxN<1> z = y;
    double t = 0;
    CxN<1> kz = k1;
    int n = 2000;
    for (int i = 0; i < n; ++i) {
      auto s = dp5_step(rhs, t, z, kz, h / n);
      z = s.y5;
      kz = s.k_last;
      t += h / n;
    }
    double actual = std::abs(st.y5[0] - z[0]);
    double estimated = std::abs(st.err[0]);
    REQUIRE(actual < 20 * estimated + 1e-14);
  }
}

static std::vector<Cx> expand_roots(const std::vector<Cx>& roots, Cx lead) {
  std::vector<Cx> c{lead};
  for (Cx r : roots) {
    std::vector<Cx> next(c.size() + 1, Cx{});
    for (std::size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= c[i] * r;
    }
    c = next;
  }
  return c;  // ascending
}

TEST_CASE("root finder recovers scattered roots") {
  std::vector<Cx> roots{Cx(1, 0), Cx(0, 2), Cx(-3, 0), Cx(1, 1)};
  auto c = expand_roots(roots, Cx(0.5, -1.0));
  auto found = poly_roots(c);
  REQUIRE(found.size() == roots.size());
  for (Cx r : roots) {
    double best = 1e300;
    for (Cx f : found) best = std::min(best, std::abs(f - r));
    REQUIRE(best < 1e-10);
  }
}

TEST_CASE("root finder residuals stay small on random polynomials") {
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 2 + int(rng() % 6);
    std::vector<Cx> c(n + 1);
    for (auto& v : c) v = Cx(u(rng), u(rng));
    if (std::abs(c[n]) < 0.3) c[n] += Cx(1, 0);
    auto found = poly_roots(c);
    REQUIRE(found.size() == std::size_t(n));
    double scale = 0;
    for (auto& v : c) scale = std::max(scale, std::abs(v));
    for (Cx r : found) {
      double rpow = std::pow(1.0 + std::abs(r), n);
      REQUIRE(std::abs(poly_eval(c, r)) < 1e-8 * scale * rpow);
    }
  }
}

TEST_CASE("double root comes out as a tight cluster") {
  // (z - 1)^2 (z + 2)
  auto c = expand_roots({Cx(1, 0), Cx(1, 0), Cx(-2, 0)}, Cx(1, 0));
  auto found = poly_roots(c);
  REQUIRE(found.size() == 3);
  std::sort(found.begin(), found.end(),
            [](Cx a, Cx b) { return a.real() < b.real(); });
  REQUIRE(std::abs(found[0] - Cx(-2, 0)) < 1e-10);
  REQUIRE(std::abs(found[1] - Cx(1, 0)) < 1e-5);
  REQUIRE(std::abs(found[2] - Cx(1, 0)) < 1e-5);
}

TEST_CASE("determinant with pivoting") {
  std::vector<std::vector<Cx>> m{
      {Cx(0, 0), Cx(2, 1), Cx(1, 0)},
      {Cx(1, -1), Cx(0, 0), Cx(3, 0)},
      {Cx(2, 0), Cx(1, 0), Cx(0, 2)}};
  // Laplace expansion by hand:
  // det = -(2+i) * det[[1-i, 3], [2, 2i]] + 1 * det[[1-i, 0], [2, 1]]
  Cx d11 = (Cx(1, -1) * Cx(0, 2) - Cx(3, 0) * Cx(2, 0));
  Cx d12 = (Cx(1, -1) * Cx(1, 0) - Cx(0, 0) * Cx(2, 0));
  Cx expected = -Cx(2, 1) * d11 + Cx(1, 0) * d12;
  REQUIRE(std::abs(matrix_det(m) - expected) < 1e-12);
}

TEST_CASE("coefficients recovered from circle samples") {
  std::vector<Cx> c{Cx(2, 1), Cx(-3, 0), Cx(0, 0), Cx(1, 0)};
  auto fit = fit_poly_on_circle([&](Cx z) { return poly_eval(c, z); }, 5, 1.7);
  REQUIRE(fit.size() == 6);
  for (std::size_t i = 0; i < fit.size(); ++i) {
    Cx want = i < c.size() ? c[i] : Cx{};
    REQUIRE(std::abs(fit[i] - want) < 1e-11);
  }
}
