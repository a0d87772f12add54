#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "opintegral/doi.hpp"

using namespace opintegral;
using namespace opintegral::testing;

namespace {

struct Instance {
  SpectralDecomposition a, b, c;
  CMatrix t, r;
};

Instance random_instance(int n, Xorshift64Star& rng) {
  return {decompose(HermitianOperator(random_hermitian(n, rng))), decompose(HermitianOperator(random_hermitian(n, rng))),
          decompose(HermitianOperator(random_hermitian(n, rng))), random_complex_gaussian(n, n, rng),
          random_complex_gaussian(n, n, rng)};
}

double rel_diff(const CMatrix& x, const CMatrix& y) { return max_abs_entry(x - y) / std::max(1.0, max_abs_entry(y)); }

CMatrix eval(const HaagerupRep& rep, const Instance& in, EvalPath path = EvalPath::Assembled) {
  return eval_representation(rep, in.a, in.t, in.b, in.r, in.c, path);
}

}  // namespace

TEST_CASE("constant integrand collapses to T R") {
  Xorshift64Star rng(1);
  const Instance in = random_instance(6, rng);
  const CMatrix w = triple_spectral_sum([](double, double, double) { return Complex(1.0); }, in.a, in.b, in.c, in.t, in.r);
  CHECK(rel_diff(w, in.t * in.r) < 1e-12);

  const FactorFamily one = FactorFamily::constant_one();
  for (const HaagerupRep& rep : {make_projective(one, one, one), make_haagerup(one, MatrixFactorFamily::diagonal(one), one),
                                 make_first_kind(one, one, MatrixFactorFamily::diagonal(one)),
                                 make_second_kind(MatrixFactorFamily::diagonal(one), one, one)})
    CHECK(rel_diff(eval(rep, in), in.t * in.r) < 1e-12);
}

TEST_CASE("product integrand factors") {
  Xorshift64Star rng(2);
  const Instance in = random_instance(5, rng);
  const Function1D u = Function1D::parse("x^2 + 1"), v = Function1D::parse("sin(x)"), w = Function1D::parse("exp(x)");
  const CMatrix expected = apply_function(u, in.a) * in.t * apply_function(v, in.b) * in.r * apply_function(w, in.c);
  const CMatrix got = triple_spectral_sum([&](double x, double y, double z) { return u(x) * v(y) * w(z); }, in.a, in.b,
                                          in.c, in.t, in.r);
  CHECK(rel_diff(got, expected) < 1e-12);
}

TEST_CASE("diagonal operators give the index sum") {
  RVector la(3), lb(3), lc(3);
  la << -1, 0, 2;
  lb << 0.5, 1.5, -2;
  lc << 3, -0.5, 1;
  auto diag = [](const RVector& l) { return decompose(HermitianOperator(CMatrix(l.cast<Complex>().asDiagonal()))); };
  Xorshift64Star rng(3);
  const CMatrix t = random_complex_gaussian(3, 3, rng), r = random_complex_gaussian(3, 3, rng);
  auto psi = [](double x, double y, double z) { return Complex(std::cos(x * y), z); };
  const CMatrix w = triple_spectral_sum(psi, diag(la), diag(lb), diag(lc), t, r);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      Complex s = 0.0;
      for (int j = 0; j < 3; ++j) s += psi(la(i), lb(j), lc(k)) * t(i, j) * r(j, k);
      CHECK(std::abs(w(i, k) - s) < 1e-12);
    }
}

TEST_CASE("all representations agree with the spectral sum") {
  Xorshift64Star rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    const Instance in = random_instance(8, rng);
    const SeparableIntegrand s = random_separable(3, rng);
    const CMatrix oracle = triple_spectral_sum(s.direct(), in.a, in.b, in.c, in.t, in.r);
    CHECK(rel_diff(eval(s.projective(), in), oracle) < 1e-12);
    CHECK(rel_diff(eval(s.haagerup(), in), oracle) < 1e-12);
    CHECK(rel_diff(eval(s.first_kind(), in), oracle) < 1e-11);
    CHECK(rel_diff(eval(s.second_kind(), in), oracle) < 1e-11);
    CHECK(rel_diff(eval(s.first_kind(), in, EvalPath::Probing), oracle) < 1e-11);
    CHECK(rel_diff(eval(s.second_kind(), in, EvalPath::Probing), oracle) < 1e-11);
  }
}

TEST_CASE("full middle factor matches its projective expansion") {
  Xorshift64Star rng(5);
  const Instance in = random_instance(8, rng);
  const CoupledIntegrand c = random_coupled(3, 2, rng);
  CHECK(rel_diff(eval(c.haagerup(), in), eval(c.projective(), in)) < 1e-12);
}

TEST_CASE("pairing functional is the trace against W") {
  Xorshift64Star rng(6);
  const Instance in = random_instance(6, rng);
  const SeparableIntegrand s = random_separable(2, rng);
  const CMatrix q = random_complex_gaussian(6, 6, rng);
  for (const HaagerupRep& rep : {s.first_kind(), s.second_kind()}) {
    const CMatrix w = eval(rep, in);
    const Complex l = pairing_functional(rep, in.a, in.t, in.b, in.r, in.c, q);
    CHECK(std::abs(l - (w * q).trace()) < 1e-10 * std::max(1.0, std::abs(l)));
  }
  CHECK_THROWS_AS(pairing_functional(s.projective(), in.a, in.t, in.b, in.r, in.c, q), ValidationError);
}

TEST_CASE("first kind certificate with rank-one T") {
  Xorshift64Star rng(7);
  Instance in = random_instance(6, rng);
  in.t = random_complex_gaussian(6, 1, rng) * random_complex_gaussian(1, 6, rng);
  const FactorFamily one = FactorFamily::constant_one();
  const HaagerupRep rep = make_first_kind(one, one, MatrixFactorFamily::diagonal(one));
  const S1Certificate c = s1_certificate(rep, in.a, in.t, in.b, in.r, in.c);
  CHECK(c.satisfied);
  CHECK(c.lhs == doctest::Approx(trace_norm(in.t * in.r)).epsilon(1e-10));
  CHECK(c.bound == doctest::Approx(trace_norm(in.t) * op_norm(in.r)).epsilon(1e-10));
}

TEST_CASE("haagerup operator-norm certificate over random trials") {
  Xorshift64Star rng(8);
  int violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Instance in = random_instance(4, rng);
    const CoupledIntegrand c = random_coupled(2, 2, rng);
    const S1Certificate cert = s1_certificate(c.haagerup(), in.a, in.t, in.b, in.r, in.c);
    CHECK(cert.norm == "op");
    violations += cert.satisfied ? 0 : 1;
  }
  CHECK(violations == 0);
}

TEST_CASE("every kind satisfies its certificate") {
  Xorshift64Star rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const Instance in = random_instance(6, rng);
    const SeparableIntegrand s = random_separable(2, rng);
    for (const HaagerupRep& rep : {s.projective(), s.haagerup(), s.first_kind(), s.second_kind()})
      CHECK(s1_certificate(rep, in.a, in.t, in.b, in.r, in.c).satisfied);
  }
}

TEST_CASE("Hoelder mapping property for projective representations") {
  Xorshift64Star rng(10);
  const Instance in = random_instance(6, rng);
  const SeparableIntegrand s = random_separable(2, rng);
  for (auto [p, q] : {std::pair{2.0, 2.0}, std::pair{4.0, 4.0 / 3.0}, std::pair{3.0, 3.0}}) {
    const HolderCheck h = holder_check(s.projective(), in.a, in.t, in.b, in.r, in.c, p, q);
    CHECK(h.satisfied);
  }
  CHECK_THROWS_AS(holder_check(s.projective(), in.a, in.t, in.b, in.r, in.c, 1.5, 1.5), ValidationError);
  CHECK_THROWS_AS(holder_check(s.haagerup(), in.a, in.t, in.b, in.r, in.c, 2, 2), ValidationError);
}

TEST_CASE("malformed representations are rejected") {
  const FactorFamily two = FactorFamily::from_functions({Function1D::parse("x"), Function1D::parse("1")});
  const FactorFamily one = FactorFamily::constant_one();
  CHECK_THROWS_AS(make_projective(two, one, one), ValidationError);
  CHECK_THROWS_AS(make_haagerup(two, MatrixFactorFamily::diagonal(one), one), ValidationError);
  CHECK(rep_kind_from_string("first_kind") == RepKind::FirstKind);
  CHECK(rep_kind_from_string("second") == RepKind::SecondKind);
  CHECK_THROWS_AS(rep_kind_from_string("third"), ValidationError);
}

TEST_CASE("non-finite integrand values are reported") {
  Xorshift64Star rng(11);
  const Instance in = random_instance(3, rng);
  CHECK_THROWS_AS(triple_spectral_sum([](double, double, double) { return Complex(NAN, 0); }, in.a, in.b, in.c, in.t, in.r),
                  ValidationError);
}
