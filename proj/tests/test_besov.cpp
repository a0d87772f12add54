#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "opintegral/besov.hpp"
#include "opintegral/rng.hpp"

using namespace opintegral;

namespace {

SampledFunction sample_1d(const PeriodicGrid& g, double (*f)(double)) {
  CVector v(g.points);
  for (int i = 0; i < g.points; ++i) v(i) = f(g.coord(i));
  return SampledFunction::from_1d(g, v);
}

}  // namespace

TEST_CASE("window values") {
  CHECK(window_eval(2.0) == 0.0);
  CHECK(window_eval(0.5) == 0.0);
  CHECK(window_eval(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(window_eval(3.0) == 0.0);
  CHECK(window_eval(0.0) == 0.0);
  for (double s : {0.6, 0.9, 1.2, 1.7}) {
    CHECK(window_eval(s) >= 0.0);
    CHECK(window_eval(s) <= 1.0);
  }
}

TEST_CASE("dyadic windows sum to one") {
  Xorshift64Star rng(1);
  double worst = 0;
  for (int i = 0; i < 10000; ++i) {
    const double s = std::exp(rng.uniform(std::log(0.01), std::log(1000.0)));
    double acc = 0;
    for (int n = -20; n <= 20; ++n) acc += window_eval(s / std::ldexp(1.0, n));
    worst = std::max(worst, std::abs(acc - 1.0));
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("sin x lives in band 0") {
  const PeriodicGrid g;
  const SampledFunction f = sample_1d(g, [](double x) { return std::sin(x); });
  const LPDecomposition d = lp_decompose(f);
  for (int n = d.range.lo; n <= d.range.hi; ++n) {
    if (n == 0)
      CHECK(max_abs_entry(d.band(0) - f.values) < 1e-12);
    else
      CHECK(d.sup_norms[n - d.range.lo] < 1e-12);
  }
  CHECK(besov_norm(f).value == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("cos 1.5x splits over bands 0 and 1") {
  const PeriodicGrid g;
  const SampledFunction f = sample_1d(g, [](double x) { return std::cos(1.5 * x); });
  const LPDecomposition d = lp_decompose(f);
  CHECK(d.sup_norms[0 - d.range.lo] > 0.1);
  CHECK(d.sup_norms[1 - d.range.lo] > 0.1);
  CHECK(max_abs_entry(d.band(0) + d.band(1) - f.values) < 1e-12);
  for (int n = d.range.lo; n <= d.range.hi; ++n)
    if (n != 0 && n != 1) CHECK(d.sup_norms[n - d.range.lo] < 1e-12);
}

TEST_CASE("constants and polynomials have zero norm") {
  const PeriodicGrid g;
  const SampledFunction c = sample_1d(g, [](double) { return 3.0; });
  const LPDecomposition d = lp_decompose(c);
  for (double s : d.sup_norms) CHECK(s < 1e-13);
  CHECK(besov_norm(c).value < 1e-12);

  PeriodicGrid g2;
  g2.dim = 2;
  g2.points = 64;
  const BesovNorm p = besov_norm(Function2D::parse("x^2*y - 3*x + 1"), g2);
  CHECK(p.value == 0.0);
  CHECK_FALSE(p.warnings.empty());
}

TEST_CASE("dyadic dilation doubles the norm") {
  PeriodicGrid g;
  const SampledFunction f = sample_1d(g, [](double x) { return std::exp(-x * x) + 0.3 * std::exp(-(x - 2) * (x - 2) / 3); });
  PeriodicGrid h = g;
  h.period = g.period / 2;
  const SampledFunction f2 = SampledFunction::from_1d(h, f.values.col(0));
  const double a = besov_norm(f, 1, kInf, 1, BandRange{-10, 5}).value;
  const double b = besov_norm(f2, 1, kInf, 1, BandRange{-9, 6}).value;
  CHECK(std::abs(b - 2 * a) <= 1e-10 * a);
}

TEST_CASE("finite p and q") {
  const PeriodicGrid g;
  const SampledFunction f = sample_1d(g, [](double x) { return std::sin(x); });
  // ||sin||_2 over one grid period L is sqrt(L / 2).
  const double v = besov_norm(f, 1, 2, 2).value;
  CHECK(v == doctest::Approx(std::sqrt(g.period / 2)).epsilon(1e-10));
  CHECK_THROWS_AS(besov_norm(f, 0, kInf, 1), ValidationError);
  CHECK_THROWS_AS(besov_norm(f, 1, 0.5, 1), ValidationError);
}

TEST_CASE("band range beyond Nyquist is rejected") {
  PeriodicGrid g;
  g.points = 256;
  const SampledFunction f = sample_1d(g, [](double x) { return std::sin(x); });
  CHECK_THROWS_AS(lp_decompose(f, BandRange{-2, 8}), ValidationError);
  const BandRange r = default_band_range(g);
  CHECK(std::ldexp(1.0, r.hi + 1) <= g.nyquist());
}

TEST_CASE("bandlimit check") {
  const PeriodicGrid g;
  const auto s1 = bandlimit_check(sample_1d(g, [](double x) { return std::sin(x); }), 1.0);
  CHECK(s1.band_limited);
  const auto s2 = bandlimit_check(sample_1d(g, [](double x) { return std::sin(2 * x); }), 1.0);
  CHECK_FALSE(s2.band_limited);
  CHECK(s2.leakage == doctest::Approx(1.0).epsilon(1e-10));
  const auto gauss = bandlimit_check(sample_1d(g, [](double x) { return std::exp(-x * x); }), 8.0, 1e-9);
  CHECK(gauss.band_limited);
}

TEST_CASE("two-dimensional decomposition reconstructs") {
  PeriodicGrid g;
  g.dim = 2;
  g.period = 16;
  g.points = 256;
  const SampledFunction f = SampledFunction::sample(Function2D::parse("exp(-x^2 - 2*y^2)"), g);
  const LPDecomposition d = lp_decompose(f);
  CMatrix sum = CMatrix::Constant(g.points, g.points, 0.0);
  for (const auto& b : d.bands) sum += b;
  // The zero bin is excluded from every band.
  const Complex mean = f.values.mean();
  CHECK(max_abs_entry(sum + CMatrix::Constant(g.points, g.points, mean) - f.values) < 1e-8);
}
