#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "opintegral/doi.hpp"
#include "opintegral/rng.hpp"
#include "opintegral/schur.hpp"

using namespace opintegral;

namespace {

HermitianOperator random_op(int n, Xorshift64Star& rng) { return HermitianOperator(random_hermitian(n, rng)); }

CMatrix power(const CMatrix& m, int k) {
  CMatrix r = CMatrix::Identity(m.rows(), m.cols());
  for (int i = 0; i < k; ++i) r = r * m;
  return r;
}

CMatrix diag_op(const RVector& v) { return v.cast<Complex>().asDiagonal(); }

}  // namespace

TEST_CASE("double operator integral with constant symbol is the identity map") {
  Xorshift64Star rng(1);
  const auto a = decompose(random_op(6, rng));
  const auto b = decompose(random_op(6, rng));
  const CMatrix t = random_complex_gaussian(6, 6, rng);
  CHECK(max_abs_entry(double_operator_integral(Function2D::parse("1"), a, t, b) - t) < 1e-12);
}

TEST_CASE("product symbol factors") {
  Xorshift64Star rng(2);
  const HermitianOperator ha = random_op(7, rng), hb = random_op(7, rng);
  const auto a = decompose(ha);
  const auto b = decompose(hb);
  const CMatrix t = random_complex_gaussian(7, 7, rng);
  const Function1D u = Function1D::parse("sin(x) + x^2"), v = Function1D::parse("exp(-x)");
  const CMatrix expected = apply_function(u, a) * t * apply_function(v, b);
  CHECK(max_abs_entry(double_operator_integral(Function2D::product(u, v), a, t, b) - expected) < 1e-11);
}

TEST_CASE("diagonal operators give entrywise products") {
  RVector la(3), lb(4);
  la << -1, 0.5, 2;
  lb << -2, -0.25, 1, 3;
  CMatrix a = diag_op(la), b = diag_op(lb);
  Xorshift64Star rng(3);
  const CMatrix t = random_complex_gaussian(3, 4, rng);
  const Function2D phi = Function2D::parse("exp(x*y) + x");
  const CMatrix w = double_operator_integral(phi, decompose(HermitianOperator(a)), t, decompose(HermitianOperator(b)));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK(std::abs(w(i, j) - (std::exp(la(i) * lb(j)) + la(i)) * t(i, j)) < 1e-12);
}

TEST_CASE("funcalc of a polynomial orders A before B") {
  Xorshift64Star rng(4);
  const HermitianOperator a = random_op(6, rng), b = random_op(6, rng);
  CMatrix coeffs = CMatrix::Zero(3, 3);
  coeffs(1, 1) = 1.0;
  coeffs(2, 1) = Complex(0.5, -1.0);
  coeffs(0, 2) = -2.0;
  coeffs(0, 0) = 0.25;
  CMatrix direct = CMatrix::Zero(6, 6);
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k) direct += coeffs(j, k) * power(a.matrix(), j) * power(b.matrix(), k);
  const CMatrix got = funcalc(Function2D::polynomial(coeffs), a, b);
  CHECK(max_abs_entry(got - direct) <= 1e-10 * std::max(1.0, max_abs_entry(direct)));
}

TEST_CASE("funcalc of a product and of commuting diagonals") {
  Xorshift64Star rng(5);
  const HermitianOperator a = random_op(5, rng), b = random_op(5, rng);
  const Function1D u = Function1D::parse("cos(x)"), v = Function1D::parse("x^3");
  const CMatrix got = funcalc(Function2D::product(u, v), a, b);
  CHECK(max_abs_entry(got - apply_function(u, decompose(a)) * apply_function(v, decompose(b))) < 1e-12);

  RVector la(4), lb(4);
  la << 0, 1, 2, 3;
  lb << 3, -1, 0.5, 1;
  const CMatrix d = funcalc(Function2D::parse("x*exp(y)"), HermitianOperator(diag_op(la)), HermitianOperator(diag_op(lb)));
  for (int i = 0; i < 4; ++i) CHECK(std::abs(d(i, i) - la(i) * std::exp(lb(i))) < 1e-12);
  CHECK(max_abs_entry(d - CMatrix(d.diagonal().asDiagonal())) < 1e-14);
}

TEST_CASE("non-finite symbol values name the point") {
  RVector l(2);
  l << 0, 1;
  CHECK_THROWS_AS(symbol_matrix(Function2D::parse("1/x"), l, l), ValidationError);
}

TEST_CASE("one-variable commutator identity") {
  Xorshift64Star rng(6);
  const HermitianOperator a = random_op(12, rng), b = random_op(12, rng);
  const CMatrix q = random_complex_gaussian(12, 12, rng);
  const auto lin = one_var_commutator_identity(Function1D::parse("x"), a, b, q);
  CHECK(lin.residual <= 1e-13 * lin.scale);
  const auto sq = one_var_commutator_identity(Function1D::parse("x^2"), a, b, q);
  CHECK(sq.residual <= 1e-10 * sq.scale);
  CVector c(6);
  c << 0.3, -1, 0.5, 2, -0.7, 0.1;
  const auto p5 = one_var_commutator_identity(Function1D::polynomial(c), a, b, q);
  CHECK(p5.residual <= 1e-10 * p5.scale);
  const auto tr = one_var_commutator_identity(Function1D::parse("sin(3*x)"), a, b, q);
  CHECK(tr.residual <= 1e-10 * tr.scale);
}

TEST_CASE("divided difference matrix uses the derivative on the diagonal") {
  RVector l(3);
  l << 0, 1, 1;
  const CMatrix d = divided_difference_matrix(Function1D::parse("x^3"), l, l, 1e-12);
  CHECK(std::abs(d(0, 1) - 1.0) < 1e-14);
  CHECK(std::abs(d(1, 2) - 3.0) < 1e-14);
  CHECK(std::abs(d(0, 0)) < 1e-14);
}

TEST_CASE("schur multiplier norm: all ones") {
  const auto c = schur_multiplier_norm(CMatrix::Ones(4, 4));
  CHECK(std::abs(c.upper - 1.0) <= 1e-9);
  CHECK(std::abs(c.lower - 1.0) <= 1e-9);
  CHECK(c.lower <= c.upper + 1e-12);
}

TEST_CASE("schur multiplier norm: rank one") {
  Xorshift64Star rng(7);
  for (int t = 0; t < 5; ++t) {
    const CVector u = random_complex_gaussian(4, 1, rng), v = random_complex_gaussian(5, 1, rng);
    const CMatrix phi = u * v.adjoint();
    const double oracle = u.cwiseAbs().maxCoeff() * v.cwiseAbs().maxCoeff();
    const auto c = schur_multiplier_norm(phi);
    CHECK(std::abs(c.upper - oracle) <= 1e-6 * oracle);
    CHECK(std::abs(c.lower - oracle) <= 1e-6 * oracle);
  }
}

TEST_CASE("schur multiplier norm: 2x2 sign matrix") {
  CMatrix h(2, 2);
  h << 1, 1, 1, -1;
  const auto c = schur_multiplier_norm(h);
  CHECK(c.lower <= c.upper);
  CHECK(c.gap <= 1e-4);
  CHECK(c.upper == doctest::Approx(std::sqrt(2.0)).epsilon(1e-4));
  // The explicit factorization rows x_i, y_j with <x_i, y_j> = h_ij, |x_i| = 1, |y_j| = sqrt 2.
  CHECK(c.upper <= std::sqrt(2.0) + 1e-9);
}

TEST_CASE("schur multiplier sandwich on random matrices") {
  Xorshift64Star rng(8);
  for (int t = 0; t < 4; ++t) {
    const CMatrix phi = random_complex_gaussian(3 + t, 4, rng);
    const auto c = schur_multiplier_norm(phi);
    CHECK(c.lower <= c.upper + 1e-12);
    // phi = phi * I and phi = I * phi are factorizations.
    CHECK(c.upper <= phi.rowwise().norm().maxCoeff() + 1e-9);
    CHECK(c.upper <= phi.colwise().norm().maxCoeff() + 1e-9);
    CHECK(c.witness_min_eig >= -1e-9);
    const CMatrix z = random_unitary(6, rng).topLeftCorner(phi.rows(), phi.cols());
    CHECK(schur_ratio(phi, z) <= c.upper + 1e-9);
  }
}

TEST_CASE("trigonometric projective bound") {
  CMatrix one = CMatrix::Zero(3, 3);
  one(2, 2) = 1.0;  // e^{i(x+y)}
  const auto r1 = projective_decompose_trig(one, 256);
  CHECK(r1.bound == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r1.bound <= 3 * r1.sup_norm + 1e-12);

  CMatrix cc = CMatrix::Zero(3, 3);  // cos x cos y
  for (int j : {0, 2})
    for (int k : {0, 2}) cc(j, k) = 0.25;
  const auto r2 = projective_decompose_trig(cc, 256);
  CHECK(r2.bound <= 3 * r2.sup_norm + 1e-12);
  CHECK(r2.sup_norm == doctest::Approx(1.0).epsilon(1e-12));

  Xorshift64Star rng(9);
  for (int t = 0; t < 5; ++t) {
    const CMatrix c = random_complex_gaussian(9, 9, rng);
    const auto r = projective_decompose_trig(c, 512);
    CHECK(r.bound <= 9 * r.sup_norm * (1 + 1e-9));
  }
}
