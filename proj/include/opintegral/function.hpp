#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>

#include "opintegral/expr.hpp"
#include "opintegral/fft.hpp"

namespace opintegral {

// A function of one real variable: polynomial coefficients c_k x^k, or an
// expression in x.
class Function1D {
 public:
  static Function1D polynomial(CVector coeffs);
  static Function1D from_expr(const Expr& e);  // polynomial trees are converted
  static Function1D parse(std::string_view text);

  Complex operator()(double x) const;
  CVector eval(const RVector& xs) const;
  Function1D derivative() const;
  Expr to_expr() const;
  const std::optional<CVector>& polynomial_coeffs() const { return poly_; }
  std::string str() const { return to_expr().str(); }

 private:
  std::optional<CVector> poly_;
  Expr expr_;
};

// Trigonometric interpolant of samples on a 2D periodic grid.
struct SampledData {
  PeriodicGrid grid;
  CMatrix values;  // values(i, j) at (grid.coord(i), grid.coord(j))
  CMatrix coeffs;  // (N+1) x (N+1), signed frequencies -N/2..N/2, Nyquist split

  static SampledData from_values(const PeriodicGrid& g, CMatrix values);
  static SampledData from_coeffs(const PeriodicGrid& g, CMatrix coeffs);
};

// Two-variable function in one of four concrete forms.
class Function2D {
 public:
  struct Polynomial {
    CMatrix a;  // a(j, k) multiplies x^j y^k
  };
  struct Product {
    Function1D u, v;  // u(x) v(y)
  };
  struct ClosedForm {
    Expr expr;
  };
  using Variant = std::variant<Polynomial, Product, SampledData, ClosedForm>;

  explicit Function2D(Variant v);
  static Function2D polynomial(CMatrix a) { return Function2D(Polynomial{std::move(a)}); }
  static Function2D product(Function1D u, Function1D v) { return Function2D(Product{std::move(u), std::move(v)}); }
  static Function2D closed_form(Expr e) { return Function2D(ClosedForm{std::move(e)}); }
  static Function2D sampled(const PeriodicGrid& g, CMatrix values) {
    return Function2D(SampledData::from_values(g, std::move(values)));
  }
  // Polynomial trees become the polynomial variant.
  static Function2D from_expr(const Expr& e);
  static Function2D parse(std::string_view text) { return from_expr(Expr::parse(text)); }

  Complex operator()(double x, double y) const;
  // Tensor evaluation: result(i, j) = f(xs(i), ys(j)).
  CMatrix eval_grid(const RVector& xs, const RVector& ys) const;

  // f(xs(i), .) for a fixed set of first-variable points; the returned
  // callable maps ys to the xs.size() x ys.size() table. Sampled functions
  // precompute the x half of the trigonometric sum.
  std::function<CMatrix(const RVector&)> fixed_x_evaluator(const RVector& xs) const;
  // Same with the second variable fixed: maps xs to xs.size() x ys.size().
  std::function<CMatrix(const RVector&)> fixed_y_evaluator(const RVector& ys) const;

  Function2D partial(int axis) const;
  Function2D conj() const;
  // Samples on a square periodic grid (dim must be 2).
  CMatrix sample(const PeriodicGrid& g) const;

  std::optional<CMatrix> as_polynomial() const;
  std::optional<Expr> to_expr() const;

  const Variant& variant() const { return v_; }
  std::string kind() const;
  std::string str() const;

  // Pointwise product and linear combination a f + b g. Sampled operands
  // force the result onto the sampled grid of the first sampled operand.
  static Function2D multiply(const Function2D& f, const Function2D& g);
  static Function2D combine(Complex a, const Function2D& f, Complex b, const Function2D& g);

 private:
  Variant v_;
};

// Powers x^0..x^deg of every entry of xs, as columns.
CMatrix vandermonde(const RVector& xs, int deg);

}  // namespace opintegral
