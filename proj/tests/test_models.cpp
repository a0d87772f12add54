#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "opintegral/models.hpp"
#include "opintegral/rng.hpp"
#include "opintegral/spectral.hpp"

using namespace opintegral;

namespace {

Symbol random_real_symbol(int deg, Xorshift64Star& rng) {
  std::map<int, Complex> c;
  c[0] = rng.normal();
  for (int k = 1; k <= deg; ++k) {
    const Complex z = rng.complex_normal();
    c[k] = z;
    c[-k] = std::conj(z);
  }
  return Symbol(c);
}

}  // namespace

TEST_CASE("symbol arithmetic") {
  const Symbol f = Symbol::monomial(2, {1, 1}) + Symbol::monomial(-1, 3.0);
  CHECK(f.degree() == 2);
  CHECK(f.coeff(2) == Complex(1, 1));
  CHECK(f.coeff(1) == Complex(0, 0));
  for (double t : {0.0, 0.7, 2.0}) {
    CHECK(std::abs(f(t) - (Complex(1, 1) * std::exp(Complex(0, 2 * t)) + 3.0 * std::exp(Complex(0, -t)))) < 1e-14);
    CHECK(std::abs(f.conj()(t) - std::conj(f(t))) < 1e-14);
    CHECK(std::abs(f.real_part()(t) - f(t).real()) < 1e-14);
    CHECK(std::abs(f.imag_part()(t) - f(t).imag()) < 1e-14);
    CHECK(std::abs((f * f)(t) - f(t) * f(t)) < 1e-13);
  }
  CHECK(Symbol::cos_theta().is_real());
  CHECK_FALSE(Symbol::monomial(1).is_real());
}

TEST_CASE("toeplitz matrices of the basic symbols") {
  const CMatrix s = toeplitz_matrix(Symbol::monomial(1), 6);
  CMatrix shift = CMatrix::Zero(6, 6);
  for (int i = 1; i < 6; ++i) shift(i, i - 1) = 1.0;
  CHECK(max_abs_entry(s - shift) == 0.0);

  const CMatrix c = toeplitz_matrix(Symbol::cos_theta(), 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) CHECK(std::abs(c(i, j) - (std::abs(i - j) == 1 ? 0.5 : 0.0)) < 1e-15);
  CHECK_THROWS_AS(toeplitz_matrix(Symbol::monomial(3), 3), ValidationError);
}

TEST_CASE("hankel matrix of the shift has one entry") {
  const CMatrix h = hankel_matrix(Symbol::monomial(-1), 5);
  CHECK(std::abs(h(0, 0) - 1.0) < 1e-15);
  CHECK(h.cwiseAbs().sum() == doctest::Approx(1.0));
  CHECK(hankel_matrix(Symbol::monomial(1), 5).cwiseAbs().sum() == 0.0);
}

TEST_CASE("hankel rank equals the degree") {
  Xorshift64Star rng(1);
  for (int deg = 1; deg <= 5; ++deg) {
    const Symbol f = random_real_symbol(deg, rng);
    const RVector sv = singular_values(hankel_matrix(f, 32));
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i) rank += sv(i) > 1e-12 * sv(0) ? 1 : 0;
    CHECK(rank == deg);
  }
}

TEST_CASE("shift commutator sits in the corners") {
  const int n = 16;
  const CMatrix a = toeplitz_matrix(Symbol::cos_theta(), n), b = toeplitz_matrix(Symbol::sin_theta(), n);
  CMatrix expected = CMatrix::Zero(n, n);
  expected(0, 0) = 1.0 / Complex(0, 2);
  expected(n - 1, n - 1) = -1.0 / Complex(0, 2);
  CHECK(max_abs_entry(commutator(a, b) - expected) <= 1e-14);
}

TEST_CASE("toeplitz-hankel commutator identity") {
  const HankelIdentityCheck same = verify_hankel_identity(Symbol::cos_theta(), Symbol::cos_theta(), 32, 16);
  CHECK(same.residual == 0.0);
  const HankelIdentityCheck cs = verify_hankel_identity(Symbol::cos_theta(), Symbol::sin_theta(), 64, 32);
  CHECK(cs.residual <= 1e-13);
  CHECK(cs.scale > 0.1);
  Xorshift64Star rng(2);
  for (int t = 0; t < 10; ++t) {
    const Symbol f = random_real_symbol(rng.uniform_int(1, 5), rng), g = random_real_symbol(rng.uniform_int(1, 5), rng);
    CHECK(verify_hankel_identity(f, g, 64, 64 - f.degree() - g.degree()).residual <= 1e-12);
  }
  CHECK_THROWS_AS(verify_hankel_identity(Symbol::monomial(3), Symbol::monomial(2), 64, 62), ValidationError);
}

TEST_CASE("winding numbers") {
  CHECK(winding_number(Symbol::monomial(1), 0.0) == 1);
  CHECK(winding_number(Symbol::monomial(1), 2.0) == 0);
  CHECK(winding_number(Symbol::monomial(-1), 0.0) == -1);
  const Symbol w2 = Symbol::monomial(2) + Symbol::monomial(1, 0.5);
  CHECK(winding_number(w2, 0.0) == 2);
  CHECK_THROWS_AS(winding_number(Symbol::monomial(1), 1.0), ValidationError);

  // Additivity under products.
  const Symbol f = Symbol::monomial(1) + Symbol::monomial(0, 0.3), g = Symbol::monomial(-2) + Symbol::monomial(1, 0.2);
  CHECK(winding_number(f * g, 0.0) == winding_number(f, 0.0) + winding_number(g, 0.0));
}

TEST_CASE("principal function of the shift is the disc indicator") {
  const PrincipalFunction g(Symbol::monomial(1));
  CHECK(g(0, 0) == 1);
  CHECK(g(0.5, -0.6) == 1);
  CHECK(g(1.2, 0) == 0);
  CHECK(g(-3, 4) == 0);
  CHECK_FALSE(g(1, 0).has_value());

  const Box box = g.support_box();
  CHECK(box.x0 == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(box.x1 == doctest::Approx(1.0).epsilon(1e-6));
  const int res = 400;
  const Eigen::MatrixXi r = g.rasterize(box, res);
  // Area of the disc from the raster.
  const double cell = (box.x1 - box.x0) * (box.y1 - box.y0) / (res * res);
  CHECK(r.sum() * cell == doctest::Approx(kPi).epsilon(5e-3));
  // Raster agrees with pointwise winding away from the curve.
  Xorshift64Star rng(3);
  for (int t = 0; t < 50; ++t) {
    const int i = rng.uniform_int(0, res - 1), j = rng.uniform_int(0, res - 1);
    const double x = box.x0 + (i + 0.5) * (box.x1 - box.x0) / res, y = box.y0 + (j + 0.5) * (box.y1 - box.y0) / res;
    if (std::abs(std::hypot(x, y) - 1.0) < 0.02) continue;
    CHECK(r(i, j) == *g(x, y));
  }
}

TEST_CASE("real symbols have zero principal function") {
  const PrincipalFunction g(Symbol::cos_theta() + Symbol::monomial(0, 0.2));
  CHECK(g(0.0, 0.5) == 0);
  CHECK(g(0.1, -0.2) == 0);
  const Eigen::MatrixXi r = g.rasterize(Box{-2, 2, -2, 2}, 64);
  CHECK(r.cwiseAbs().sum() == 0);
}

TEST_CASE("winding two symbol") {
  const PrincipalFunction g(Symbol::monomial(2) + Symbol::monomial(1, 0.5));
  CHECK(g(0, 0) == 2);
  CHECK(g(0.05, 0.05) == 2);
  CHECK(g(2, 0) == 0);
}
