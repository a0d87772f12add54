#include "opintegral/expr.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <sstream>

namespace opintegral {

struct Expr::Node {
  Op op;
  Complex value;
  int exponent;
  std::vector<Expr> args;
};

Expr::Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) { compile(); }

Expr::Op Expr::op() const { return node_->op; }

Complex Expr::constant_value() const {
  if (node_->op != Op::Const) throw ValidationError("Expr: not a constant");
  return node_->value;
}

Expr Expr::make(Op op, std::vector<Expr> args, Complex value, int exponent) {
  return Expr(std::make_shared<const Node>(Node{op, value, exponent, std::move(args)}));
}

Expr Expr::constant(Complex c) { return make(Op::Const, {}, c); }
Expr Expr::x() { return make(Op::X, {}); }
Expr Expr::y() { return make(Op::Y, {}); }

Expr Expr::exp(const Expr& a) {
  if (a.is_constant()) return constant(std::exp(a.constant_value()));
  return make(Op::Exp, {a});
}
Expr Expr::sin(const Expr& a) {
  if (a.is_constant()) return constant(std::sin(a.constant_value()));
  return make(Op::Sin, {a});
}
Expr Expr::cos(const Expr& a) {
  if (a.is_constant()) return constant(std::cos(a.constant_value()));
  return make(Op::Cos, {a});
}
// Real arguments only; a complex argument evaluates to NaN.
static Complex erf_value(Complex z) {
  if (z.imag() != 0.0) return Complex(std::nan(""), std::nan(""));
  return std::erf(z.real());
}
Expr Expr::erf(const Expr& a) {
  if (a.is_constant()) return constant(erf_value(a.constant_value()));
  return make(Op::Erf, {a});
}
Expr Expr::conj(const Expr& a) {
  if (a.is_constant()) return constant(std::conj(a.constant_value()));
  if (a.op() == Op::X || a.op() == Op::Y) return a;
  return make(Op::Conj, {a});
}
Expr Expr::pow(const Expr& a, int n) {
  if (n == 0) return constant(1.0);
  if (n == 1) return a;
  if (a.is_constant()) return constant(std::pow(a.constant_value(), n));
  return make(Op::Pow, {a}, 0.0, n);
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.constant_value() + b.constant_value());
  if (a.is_constant() && a.constant_value() == 0.0) return b;
  if (b.is_constant() && b.constant_value() == 0.0) return a;
  return Expr::make(Expr::Op::Add, {a, b});
}
Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.constant_value() - b.constant_value());
  if (b.is_constant() && b.constant_value() == 0.0) return a;
  if (a.is_constant() && a.constant_value() == 0.0) return -b;
  return Expr::make(Expr::Op::Sub, {a, b});
}
Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.constant_value() * b.constant_value());
  if ((a.is_constant() && a.constant_value() == 0.0) || (b.is_constant() && b.constant_value() == 0.0))
    return Expr::constant(0.0);
  if (a.is_constant() && a.constant_value() == 1.0) return b;
  if (b.is_constant() && b.constant_value() == 1.0) return a;
  return Expr::make(Expr::Op::Mul, {a, b});
}
Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_constant() && b.constant_value() == 0.0) throw ValidationError("Expr: division by constant zero");
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.constant_value() / b.constant_value());
  if (a.is_constant() && a.constant_value() == 0.0) return Expr::constant(0.0);
  if (b.is_constant() && b.constant_value() == 1.0) return a;
  return Expr::make(Expr::Op::Div, {a, b});
}
Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr::constant(-a.constant_value());
  if (a.op() == Expr::Op::Neg) return a.node_->args[0];
  return Expr::make(Expr::Op::Neg, {a});
}

void Expr::compile() {
  auto prog = std::make_shared<std::vector<Instr>>();
  int depth = 0, max_depth = 0;
  // Post-order walk; children first, so the stack machine sees operands ready.
  auto emit = [&](auto&& self, const Expr& e) -> void {
    const Node& n = *e.node_;
    for (const auto& a : n.args) self(self, a);
    prog->push_back({n.op, n.value, n.exponent});
    switch (n.op) {
      case Op::Const:
      case Op::X:
      case Op::Y:
        ++depth;
        break;
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
      case Op::Div:
        --depth;
        break;
      default:
        break;
    }
    max_depth = std::max(max_depth, depth);
  };
  emit(emit, *this);
  program_ = std::move(prog);
  stack_depth_ = max_depth;
}

Complex Expr::operator()(double xv, double yv) const {
  constexpr int kInline = 64;
  std::array<Complex, kInline> fixed;
  std::vector<Complex> heap;
  Complex* st = fixed.data();
  if (stack_depth_ > kInline) {
    heap.resize(stack_depth_);
    st = heap.data();
  }
  int top = 0;
  for (const auto& in : *program_) {
    switch (in.op) {
      case Op::Const: st[top++] = in.value; break;
      case Op::X: st[top++] = xv; break;
      case Op::Y: st[top++] = yv; break;
      case Op::Add: --top; st[top - 1] += st[top]; break;
      case Op::Sub: --top; st[top - 1] -= st[top]; break;
      case Op::Mul: --top; st[top - 1] *= st[top]; break;
      case Op::Div: --top; st[top - 1] /= st[top]; break;
      case Op::Neg: st[top - 1] = -st[top - 1]; break;
      case Op::Exp: st[top - 1] = std::exp(st[top - 1]); break;
      case Op::Sin: st[top - 1] = std::sin(st[top - 1]); break;
      case Op::Cos: st[top - 1] = std::cos(st[top - 1]); break;
      case Op::Erf: st[top - 1] = erf_value(st[top - 1]); break;
      case Op::Conj: st[top - 1] = std::conj(st[top - 1]); break;
      case Op::Pow: {
        // Square-and-multiply keeps integer powers of real inputs exact-ish.
        Complex base = st[top - 1];
        int n = in.exponent;
        if (n < 0) {
          base = 1.0 / base;
          n = -n;
        }
        Complex r = 1.0;
        while (n) {
          if (n & 1) r *= base;
          base *= base;
          n >>= 1;
        }
        st[top - 1] = r;
        break;
      }
    }
  }
  return st[0];
}

Expr Expr::derivative(int axis) const {
  if (axis != 1 && axis != 2) throw ValidationError("Expr::derivative: axis must be 1 or 2");
  const Node& n = *node_;
  const auto d = [axis](const Expr& e) { return e.derivative(axis); };
  switch (n.op) {
    case Op::Const: return constant(0.0);
    case Op::X: return constant(axis == 1 ? 1.0 : 0.0);
    case Op::Y: return constant(axis == 2 ? 1.0 : 0.0);
    case Op::Add: return d(n.args[0]) + d(n.args[1]);
    case Op::Sub: return d(n.args[0]) - d(n.args[1]);
    case Op::Mul: return d(n.args[0]) * n.args[1] + n.args[0] * d(n.args[1]);
    case Op::Div: {
      const Expr& u = n.args[0];
      const Expr& v = n.args[1];
      if (v.is_constant()) return d(u) / v;
      return (d(u) * v - u * d(v)) / pow(v, 2);
    }
    case Op::Neg: return -d(n.args[0]);
    case Op::Exp: return *this * d(n.args[0]);
    case Op::Sin: return cos(n.args[0]) * d(n.args[0]);
    case Op::Cos: return -(sin(n.args[0]) * d(n.args[0]));
    case Op::Erf:
      return constant(2.0 / std::sqrt(kPi)) * exp(-(n.args[0] * n.args[0])) * d(n.args[0]);
    case Op::Conj: return conj(d(n.args[0]));
    case Op::Pow:
      return constant(static_cast<double>(n.exponent)) * pow(n.args[0], n.exponent - 1) * d(n.args[0]);
  }
  return constant(0.0);
}

Expr Expr::substitute(const Expr& for_x, const Expr& for_y) const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::Const: return *this;
    case Op::X: return for_x;
    case Op::Y: return for_y;
    default: break;
  }
  std::vector<Expr> args;
  args.reserve(n.args.size());
  for (const auto& a : n.args) args.push_back(a.substitute(for_x, for_y));
  switch (n.op) {
    case Op::Add: return args[0] + args[1];
    case Op::Sub: return args[0] - args[1];
    case Op::Mul: return args[0] * args[1];
    case Op::Div: return args[0] / args[1];
    case Op::Neg: return -args[0];
    case Op::Exp: return exp(args[0]);
    case Op::Sin: return sin(args[0]);
    case Op::Cos: return cos(args[0]);
    case Op::Erf: return erf(args[0]);
    case Op::Conj: return conj(args[0]);
    case Op::Pow: return pow(args[0], n.exponent);
    default: return *this;
  }
}

bool Expr::depends_on(int axis) const {
  const Node& n = *node_;
  if (n.op == Op::X) return axis == 1;
  if (n.op == Op::Y) return axis == 2;
  for (const auto& a : n.args)
    if (a.depends_on(axis)) return true;
  return false;
}

namespace {

std::string format_complex(Complex c) {
  std::ostringstream os;
  os.precision(17);
  if (c.imag() == 0.0) {
    os << c.real();
  } else if (c.real() == 0.0) {
    os << c.imag() << "*i";
  } else {
    os << "(" << c.real() << (c.imag() < 0 ? " - " : " + ") << std::abs(c.imag()) << "*i)";
  }
  return os.str();
}

CMatrix poly_mul(const CMatrix& a, const CMatrix& b) {
  CMatrix r = CMatrix::Zero(a.rows() + b.rows() - 1, a.cols() + b.cols() - 1);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      if (a(i, j) == 0.0) continue;
      for (int k = 0; k < b.rows(); ++k)
        for (int l = 0; l < b.cols(); ++l) r(i + k, j + l) += a(i, j) * b(k, l);
    }
  return r;
}

CMatrix poly_add(const CMatrix& a, const CMatrix& b, double sign) {
  CMatrix r = CMatrix::Zero(std::max(a.rows(), b.rows()), std::max(a.cols(), b.cols()));
  r.topLeftCorner(a.rows(), a.cols()) += a;
  r.topLeftCorner(b.rows(), b.cols()) += sign * b;
  return r;
}

}  // namespace

std::string Expr::str() const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::Const: return format_complex(n.value);
    case Op::X: return "x";
    case Op::Y: return "y";
    case Op::Add: return "(" + n.args[0].str() + " + " + n.args[1].str() + ")";
    case Op::Sub: return "(" + n.args[0].str() + " - " + n.args[1].str() + ")";
    case Op::Mul: return n.args[0].str() + "*" + n.args[1].str();
    case Op::Div: return n.args[0].str() + "/(" + n.args[1].str() + ")";
    case Op::Neg: return "-(" + n.args[0].str() + ")";
    case Op::Exp: return "exp(" + n.args[0].str() + ")";
    case Op::Sin: return "sin(" + n.args[0].str() + ")";
    case Op::Cos: return "cos(" + n.args[0].str() + ")";
    case Op::Erf: return "erf(" + n.args[0].str() + ")";
    case Op::Conj: return "conj(" + n.args[0].str() + ")";
    case Op::Pow: return "(" + n.args[0].str() + ")^" + std::to_string(n.exponent);
  }
  return "";
}

std::optional<CMatrix> Expr::try_polynomial() const {
  const Node& n = *node_;
  const auto sub = [](const Expr& e) { return e.try_polynomial(); };
  switch (n.op) {
    case Op::Const: return CMatrix::Constant(1, 1, n.value);
    case Op::X: {
      CMatrix m = CMatrix::Zero(2, 1);
      m(1, 0) = 1.0;
      return m;
    }
    case Op::Y: {
      CMatrix m = CMatrix::Zero(1, 2);
      m(0, 1) = 1.0;
      return m;
    }
    case Op::Add:
    case Op::Sub: {
      auto a = sub(n.args[0]), b = sub(n.args[1]);
      if (!a || !b) return std::nullopt;
      return poly_add(*a, *b, n.op == Op::Add ? 1.0 : -1.0);
    }
    case Op::Mul: {
      auto a = sub(n.args[0]), b = sub(n.args[1]);
      if (!a || !b) return std::nullopt;
      return poly_mul(*a, *b);
    }
    case Op::Div: {
      if (!n.args[1].is_constant()) return std::nullopt;
      auto a = sub(n.args[0]);
      if (!a) return std::nullopt;
      return CMatrix(*a / n.args[1].constant_value());
    }
    case Op::Neg: {
      auto a = sub(n.args[0]);
      if (!a) return std::nullopt;
      return CMatrix(-*a);
    }
    case Op::Conj: {
      auto a = sub(n.args[0]);
      if (!a) return std::nullopt;
      return CMatrix(a->conjugate());
    }
    case Op::Pow: {
      if (n.exponent < 0) return std::nullopt;
      auto a = sub(n.args[0]);
      if (!a) return std::nullopt;
      CMatrix r = CMatrix::Constant(1, 1, 1.0);
      for (int k = 0; k < n.exponent; ++k) r = poly_mul(r, *a);
      return r;
    }
    default: return std::nullopt;
  }
}

// ---- parser ----

namespace {

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Expr parse() {
    Expr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream os;
    os << "expression parse error at column " << pos_ + 1 << ": " << what << " in \"" << s_ << "\"";
    throw ValidationError(os.str());
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (accept('+')) e = e + term();
      else if (accept('-')) e = e - term();
      else return e;
    }
  }
  Expr term() {
    Expr e = unary();
    for (;;) {
      if (accept('*')) e = e * unary();
      else if (accept('/')) e = e / unary();
      else return e;
    }
  }
  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }
  Expr power() {
    Expr base = primary();
    if (accept('^')) {
      const std::size_t at = pos_;
      Expr ex = unary();
      if (!ex.is_constant()) {
        pos_ = at;
        fail("exponent must be a constant integer");
      }
      const Complex v = ex.constant_value();
      const double r = std::round(v.real());
      if (v.imag() != 0.0 || r != v.real() || std::abs(r) > 1000) {
        pos_ = at;
        fail("exponent must be a constant integer");
      }
      return Expr::pow(base, static_cast<int>(r));
    }
    return base;
  }
  Expr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string_view id = s_.substr(start, pos_ - start);
      if (id == "x") return Expr::x();
      if (id == "y") return Expr::y();
      if (id == "i") return Expr::constant(Complex(0.0, 1.0));
      if (id == "pi") return Expr::constant(kPi);
      Expr (*fn)(const Expr&) = nullptr;
      if (id == "exp") fn = &Expr::exp;
      else if (id == "sin") fn = &Expr::sin;
      else if (id == "cos") fn = &Expr::cos;
      else if (id == "erf") fn = &Expr::erf;
      else if (id == "conj") fn = &Expr::conj;
      if (!fn) {
        pos_ = start;
        fail("unknown identifier '" + std::string(id) + "'");
      }
      if (!accept('(')) fail("expected '(' after function name");
      Expr arg = expr();
      if (!accept(')')) fail("expected ')'");
      return fn(arg);
    }
    fail("unexpected character");
  }
  Expr number() {
    const std::string rest(s_.substr(pos_));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(rest, &used);
    } catch (const std::exception&) {
      fail("malformed number");
    }
    pos_ += used;
    return Expr::constant(v);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr Expr::parse(std::string_view text) { return Parser(text).parse(); }

}  // namespace opintegral
