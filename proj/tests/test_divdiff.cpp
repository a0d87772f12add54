#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "opintegral/divdiff.hpp"
#include "opintegral/rng.hpp"

using namespace opintegral;

TEST_CASE("divided differences of simple polynomials") {
  const auto xy = divided_difference(Function2D::parse("x*y"), 1);
  const auto x2 = divided_difference(Function2D::parse("x^2"), 1);
  const auto y3 = divided_difference(Function2D::parse("x*y^3"), 2);
  Xorshift64Star rng(1);
  for (int i = 0; i < 20; ++i) {
    const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2), c = rng.uniform(-2, 2);
    CHECK(std::abs(xy(a, b, c) - c) < 1e-12);
    CHECK(std::abs(x2(a, b, c) - (a + b)) < 1e-12);
    CHECK(std::abs(y3(a, b, c) - a * (b * b + b * c + c * c)) < 1e-11);
  }
}

TEST_CASE("coincident arguments use the partial derivative") {
  const auto d = divided_difference(Function2D::parse("sin(x)*exp(y)"), 1, 1e-9);
  for (double x : {-1.0, 0.0, 0.4, 2.5}) CHECK(std::abs(d(x, x, 0.3) - std::cos(x) * std::exp(0.3)) < 1e-14);
  const auto e = divided_difference(Function2D::parse("sin(x)*exp(y)"), 2, 1e-9);
  CHECK(std::abs(e(0.5, 1.0, 1.0) - std::sin(0.5) * std::exp(1.0)) < 1e-14);
  CHECK_THROWS_AS(divided_difference(Function2D::parse("x"), 3), ValidationError);
}

TEST_CASE("coincidence tolerance scales with the spectra") {
  RVector a(3), b(2);
  a << -1, 0, 2;
  b << 5, -3;
  CHECK(default_coincidence_tol({&a, &b}) == doctest::Approx(8e-7));
}

TEST_CASE("polynomial projective representation is exact") {
  Xorshift64Star rng(2);
  CMatrix coeffs = random_complex_gaussian(4, 4, rng);
  const Function2D phi = Function2D::polynomial(coeffs);
  for (int axis : {1, 2}) {
    const HaagerupRep rep = polynomial_projective_rep(coeffs, axis);
    const auto d = divided_difference(phi, axis, 1e-12);
    for (int i = 0; i < 30; ++i) {
      const double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1), c = rng.uniform(-1, 1);
      CHECK(std::abs(rep.value(a, b, c) - d(a, b, c)) < 1e-11);
      CHECK(std::abs(rep.value(a, a, c) - d(a, a, c)) < 1e-11);
    }
  }
}

TEST_CASE("sinc squares sum to one") {
  constexpr int J = 10000;
  double worst = 0;
  for (int i = 0; i <= 40; ++i) {
    const double x = -kPi + i * kPi / 20;
    double s = 0;
    for (int j = -J; j <= J; ++j) {
      const double v = sinc(x - j * kPi);
      s += v * v;
    }
    worst = std::max(worst, std::abs(s - 1.0));
  }
  CHECK(worst <= 1e-3);
}

TEST_CASE("sinc representation of sin x") {
  SincOptions opt;
  opt.J = 100;
  const SincRep r = sinc_representation(Function2D::parse("sin(x)"), 1, 1.0, opt);
  CHECK(r.rep.kind == RepKind::FirstKind);
  CHECK(std::abs(r.rep.value(0.0, kPi, 0.0)) < 1e-3);
  const auto d = divided_difference(Function2D::parse("sin(x)"), 1, 1e-12);
  for (double a : {-2.0, -0.3, 0.9})
    for (double b : {-1.1, 0.2, 2.4}) CHECK(std::abs(r.rep.value(a, b, 0.0) - d(a, b, 0.0)) < 1e-2);
  CHECK(r.tail_bound > 0);
  CHECK(std::isfinite(r.tail_bound));
}

TEST_CASE("sinc representation in the second variable is second kind") {
  SincOptions opt;
  opt.J = 64;
  const Function2D phi = Function2D::parse("cos(0.75*y) * sin(0.5*x)");
  const SincRep r = sinc_representation(phi, 2, 1.0, opt);
  CHECK(r.rep.kind == RepKind::SecondKind);
  const auto d = divided_difference(phi, 2, 1e-12);
  for (double a : {-0.5, 0.7})
    for (double b : {-1.0, 0.4})
      for (double c : {-0.2, 1.3}) CHECK(std::abs(r.rep.value(a, b, c) - d(a, b, c)) < 1e-2);
}

TEST_CASE("band limit is enforced") {
  SincOptions opt;
  opt.J = 16;
  CHECK_THROWS_AS(sinc_representation(Function2D::parse("sin(3*x)"), 1, 1.0, opt), ValidationError);
}

TEST_CASE("lattice matrix norm is stable in J") {
  // C(J) = ||{(f(j pi) - f(k pi)) / (j pi - k pi)}_{|j|,|k| <= J}|| / ||f||, f band-limited to 1.
  auto f = [](double x) { return std::cos(0.7 * x) + 0.5 * std::sin(0.3 * x); };
  auto df = [](double x) { return -0.7 * std::sin(0.7 * x) + 0.15 * std::cos(0.3 * x); };
  auto constant = [&](int J) {
    const int n = 2 * J + 1;
    CMatrix m(n, n);
    for (int j = -J; j <= J; ++j)
      for (int k = -J; k <= J; ++k) {
        const double xj = j * kPi, xk = k * kPi;
        m(j + J, k + J) = j == k ? df(xj) : (f(xj) - f(xk)) / (xj - xk);
      }
    return op_norm(m);
  };
  const double c32 = constant(32), c64 = constant(64), c128 = constant(128);
  MESSAGE("lattice constants: ", c32, " ", c64, " ", c128);
  CHECK(c64 <= 3.0);
  CHECK(std::abs(c128 - c64) <= 0.05 * c64);
}

TEST_CASE("Besov representation") {
  PeriodicGrid g;
  g.dim = 2;
  g.period = 16;
  g.points = 128;
  SincOptions opt;
  opt.J = 48;
  opt.radius = 1.0;

  const BesovRep poly = besov_representation(Function2D::parse("x^2*y"), 1, g, std::nullopt, opt);
  CHECK(poly.bands.empty());
  CHECK_FALSE(poly.notes.empty());

  // Frequency pi/2 is a grid frequency inside bands 0 and 1 only.
  const BesovRep single = besov_representation(Function2D::parse("cos(pi/2*x)"), 1, g, std::nullopt, opt);
  CHECK(single.bands.size() <= 3);
  CHECK(single.bands.size() >= 1);

  const Function2D bump = Function2D::parse("exp(-x^2 - y^2)");
  const BesovRep br = besov_representation(bump, 1, g, BandRange{-10, 3}, opt);
  CHECK(std::isfinite(br.besov_norm));
  RVector s(5);
  s << -1, -0.5, 0, 0.5, 1;
  CHECK(std::isfinite(br.aggregate_bound(s, s, s)));
  const auto d = divided_difference(bump, 1, 1e-12);
  double worst = 0;
  for (int k = 0; k < 20; ++k)
    for (int i = 0; i < 20; ++i)
      for (int j = 0; j < 20; ++j) {
        const double a = -1 + 2 * (i + 0.5) / 20, b = -1 + 2 * (j + 0.5) / 20, c = -1 + 2 * (k + 0.5) / 20;
        worst = std::max(worst, std::abs(br.value(a, b, c) - d(a, b, c)));
      }
  MESSAGE("besov representation max error ", worst);
  CHECK(worst <= 1e-2);
}
