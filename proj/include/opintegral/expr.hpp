#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "opintegral/types.hpp"

namespace opintegral {

// Immutable expression tree in the real variables x and y with complex
// constants. Supports + - * /, integer powers, exp, sin, cos, erf and conj.
class Expr {
 public:
  enum class Op { Const, X, Y, Add, Sub, Mul, Div, Pow, Neg, Exp, Sin, Cos, Erf, Conj };

  Expr() : Expr(constant(0.0)) {}

  static Expr constant(Complex c);
  static Expr x();
  static Expr y();
  static Expr exp(const Expr& a);
  static Expr sin(const Expr& a);
  static Expr cos(const Expr& a);
  static Expr erf(const Expr& a);
  static Expr conj(const Expr& a);
  static Expr pow(const Expr& a, int n);

  // Parses e.g. "exp(-(x^2 + y^2)/0.02) * (1 + 2*i*x)". Throws ValidationError
  // with the column of the first offending character.
  static Expr parse(std::string_view text);

  Complex operator()(double xv, double yv) const;
  Expr derivative(int axis) const;  // axis 1 = x, 2 = y
  // Replaces the variables x and y by the given expressions.
  Expr substitute(const Expr& for_x, const Expr& for_y) const;
  bool depends_on(int axis) const;
  std::string str() const;

  // Coefficients a(j, k) of x^j y^k when the tree is a polynomial.
  std::optional<CMatrix> try_polynomial() const;

  Op op() const;
  bool is_constant() const { return op() == Op::Const; }
  Complex constant_value() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);

 private:
  struct Node;
  struct Instr {
    Op op;
    Complex value;
    int exponent;
  };
  explicit Expr(std::shared_ptr<const Node> n);
  static Expr make(Op op, std::vector<Expr> args, Complex value = 0.0, int exponent = 0);
  void compile();

  std::shared_ptr<const Node> node_;
  std::shared_ptr<const std::vector<Instr>> program_;
  int stack_depth_ = 0;
};

}  // namespace opintegral
