#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "opintegral/io.hpp"
#include "opintegral/rng.hpp"

using namespace opintegral;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "opintegral_test_io";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("opmat round trip is exact") {
  Xorshift64Star rng(1);
  const CMatrix m = random_complex_gaussian(5, 5, rng) * 1e-7;
  const CMatrix back = io::parse_opmat(io::format_opmat(m));
  CHECK(max_abs_entry(back - m) == 0.0);
  const fs::path p = scratch("m.opmat");
  io::write_opmat(p, m);
  CHECK(max_abs_entry(io::read_opmat(p) - m) == 0.0);
}

TEST_CASE("opmat is row-major") {
  const CMatrix m = io::parse_opmat("dim 2 complex\n1 0\n2 0\n3 0\n4 0.5\n");
  CHECK(m(0, 1) == Complex(2, 0));
  CHECK(m(1, 0) == Complex(3, 0));
  CHECK(m(1, 1) == Complex(4, 0.5));
}

TEST_CASE("malformed opmat") {
  CHECK_THROWS_AS(io::parse_opmat("dim 2 complex\n1 0\n2 0\n3 0\n"), ValidationError);
  CHECK_THROWS_AS(io::parse_opmat("dim 2 real\n1 0\n2 0\n3 0\n4 0\n"), ValidationError);
  CHECK_THROWS_AS(io::parse_opmat("dim 1 complex\nnan 0\n"), ValidationError);
  CHECK_THROWS_AS(io::parse_opmat("dim 1 complex\n1 zero\n"), ValidationError);
  CHECK_THROWS_AS(io::parse_opmat("dim -1 complex\n"), ValidationError);
  CHECK_THROWS_AS(io::read_opmat("/nonexistent/file.opmat"), ValidationError);
}

TEST_CASE("opfun round trip") {
  PeriodicGrid g;
  g.dim = 2;
  g.period = 4.5;
  g.points = 8;
  const SampledFunction f = SampledFunction::sample(Function2D::parse("exp(i*x) * cos(y) + 0.1"), g);
  const SampledFunction back = io::parse_opfun(io::format_opfun(f));
  CHECK(back.grid.dim == 2);
  CHECK(back.grid.points == 8);
  CHECK(back.grid.period == 4.5);
  CHECK(max_abs_entry(back.values - f.values) == 0.0);

  const SampledFunction one = io::parse_opfun("grid 1 6.283185307179586 4\n1\n2\n3 1\n4\n");
  CHECK(one.values.size() == 4);
  CHECK(one.values(2) == Complex(3, 1));
  CHECK_THROWS_AS(io::parse_opfun("grid 1 1 4\n1\n2\n3\n"), ValidationError);
  CHECK_THROWS_AS(io::parse_opfun("grid 3 1 4\n"), ValidationError);
  CHECK_THROWS_AS(io::parse_opfun("grid 1 0 2\n1\n2\n"), ValidationError);
}

TEST_CASE("symbol files") {
  const Symbol f = io::parse_symbol("deg 2\n1 0.5 0\n2 1 0\n# trailing comment\n");
  CHECK(f.degree() == 2);
  CHECK(f.coeff(1) == Complex(0.5, 0));
  const Symbol back = io::parse_symbol(io::format_symbol(f));
  for (int k = -2; k <= 2; ++k) CHECK(back.coeff(k) == f.coeff(k));
  CHECK_THROWS_AS(io::parse_symbol("deg 1\n2 1 0\n"), ValidationError);
  CHECK_THROWS_AS(io::parse_symbol("degree 1\n1 1 0\n"), ValidationError);
}

TEST_CASE("key values") {
  const io::KeyValues kv = io::KeyValues::parse("a = 1\n# comment\n\nb = two words  # tail\na = 3\nc = 0.25\n");
  CHECK(kv.get("a") == "3");
  CHECK(kv.all("a").size() == 2);
  CHECK(kv.get("b") == "two words");
  CHECK(kv.get_double("c", 0) == 0.25);
  CHECK(kv.get_int("missing", 7) == 7);
  CHECK(kv.unused().empty());
  CHECK_THROWS_AS(kv.get("missing"), ValidationError);
  CHECK_THROWS_AS(kv.get_int("b", 0), ValidationError);
  CHECK_THROWS_AS(io::KeyValues::parse("no equals sign\n"), ValidationError);

  const io::KeyValues partial = io::KeyValues::parse("x = 1\ny = 2\n");
  (void)partial.get("x");
  CHECK(partial.unused() == std::vector<std::string>{"y"});
}

TEST_CASE("function specs") {
  const Function2D poly = io::parse_function_spec("variant = polynomial\ncoeff = 1 0 2\ncoeff = 0 2 0 1\n");
  CHECK(poly.as_polynomial().has_value());
  CHECK(std::abs(poly(0.5, 2.0) - Complex(1.0, 4.0)) < 1e-14);

  const Function2D expr = io::parse_function_spec("variant = expr\nexpr = sin(x) * y\n");
  CHECK(std::abs(expr(1.0, 2.0) - 2 * std::sin(1.0)) < 1e-14);

  const Function2D prod = io::parse_function_spec("variant = product\nu = x^2\nv = cos(x)\n");
  CHECK(std::abs(prod(3.0, 0.5) - 9 * std::cos(0.5)) < 1e-13);

  const Function2D bare = io::parse_function_spec("x*y + 1");
  CHECK(std::abs(bare(2.0, 3.0) - 7.0) < 1e-14);

  PeriodicGrid g;
  g.dim = 2;
  g.period = 2 * kPi;
  g.points = 16;
  const fs::path opfun = scratch("cos.opfun");
  io::write_text(opfun, io::format_opfun(SampledFunction::sample(Function2D::parse("cos(x) + sin(2*y)"), g)));
  const Function2D sampled = io::parse_function_spec("variant = sampled\nfile = cos.opfun\n", opfun.parent_path());
  CHECK(std::abs(sampled(0.3, -0.7) - (std::cos(0.3) + std::sin(-1.4))) < 1e-12);

  CHECK_THROWS_AS(io::parse_function_spec("variant = spline\n"), ValidationError);
  CHECK_THROWS_AS(io::parse_function_spec("variant = expr\nexpr = x\nbogus = 1\n"), ValidationError);
  CHECK_THROWS_AS(io::parse_function_spec("variant = polynomial\ncoeff = 1\n"), ValidationError);
}

TEST_CASE("function arguments") {
  const fs::path p = scratch("phi.fun");
  io::write_text(p, "variant = expr\nexpr = x - y\n");
  CHECK(std::abs(io::function_argument(p.string())(3.0, 1.0) - 2.0) < 1e-15);
  CHECK(std::abs(io::function_argument("x^2")(3.0, 1.0) - 9.0) < 1e-15);
  CHECK_THROWS_AS(io::function_argument("x +* y"), ValidationError);
}

TEST_CASE("representation files") {
  const HaagerupRep h = io::parse_representation(
      "kind = haagerup\nJ = 2\nK = 1\nf1 = x ; 1\nf3 = exp(x)\ng.0 = cos(x)\ng.1 = x^2\n");
  CHECK(h.kind == RepKind::Haagerup);
  const double a = 0.3, b = -0.4, c = 1.1;
  CHECK(std::abs(h.value(a, b, c) - (a * std::cos(b) + b * b) * std::exp(c)) < 1e-14);

  const HaagerupRep first =
      io::parse_representation("kind = first_kind\nJ = 1\nK = 2\nf1 = x\nf2 = 1 ; x\ng.0 = x ; 2\n");
  CHECK(first.kind == RepKind::FirstKind);

  CHECK_THROWS_AS(io::parse_representation("kind = haagerup\nJ = 2\nK = 1\nf1 = x\nf3 = 1\ng.0 = 1\ng.1 = 1\n"),
                  ValidationError);
  CHECK_THROWS_AS(io::parse_representation("kind = fourth\nJ = 1\nK = 1\n"), ValidationError);
  CHECK_THROWS_AS(io::parse_representation("kind = projective\nJ = 1\nf1 = x\nf2 = y\nf3 = 1\n"), ValidationError);
}

TEST_CASE("shortest round-trip doubles") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, kPi}) CHECK(std::stod(io::format_double(v)) == v);
  CHECK(io::format_double(0.5) == "0.5");
}
