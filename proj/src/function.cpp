#include "opintegral/function.hpp"

#include <cmath>
#include <sstream>

namespace opintegral {

namespace {

Complex horner(const CVector& c, double x) {
  Complex acc = 0.0;
  for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) acc = acc * x + c(k);
  return acc;
}

Expr power_of(const Expr& var, int k) { return Expr::pow(var, k); }

Expr poly1_expr(const CVector& c, const Expr& var) {
  Expr e = Expr::constant(0.0);
  for (int k = 0; k < c.size(); ++k)
    if (c(k) != 0.0) e = e + Expr::constant(c(k)) * power_of(var, k);
  return e;
}

CMatrix poly_product(const CMatrix& a, const CMatrix& b) {
  CMatrix r = CMatrix::Zero(a.rows() + b.rows() - 1, a.cols() + b.cols() - 1);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      if (a(i, j) == 0.0) continue;
      r.block(i, j, b.rows(), b.cols()) += a(i, j) * b;
    }
  return r;
}

// (N+1) x N expansion from FFT bin order to signed frequencies -N/2..N/2
// with the Nyquist bin split evenly between its two signed copies.
RMatrix nyquist_split(int n) {
  RMatrix s = RMatrix::Zero(n + 1, n);
  for (int p = 0; p <= n; ++p) {
    const int m = p - n / 2;
    if (m == -n / 2 || m == n / 2) s(p, n / 2) = 0.5;
    else s(p, (m + n) % n) = 1.0;
  }
  return s;
}

// Rows e^{i xi_m (x + L/2)} for the signed frequencies of the grid.
CMatrix trig_basis(const PeriodicGrid& g, const RVector& xs) {
  const int n = g.points;
  CMatrix e(xs.size(), n + 1);
  for (int i = 0; i < xs.size(); ++i) {
    const double shifted = xs(i) + g.period / 2.0;
    for (int p = 0; p <= n; ++p) {
      const double arg = g.frequency(p - n / 2) * shifted;
      e(i, p) = Complex(std::cos(arg), std::sin(arg));
    }
  }
  return e;
}

RVector grid_coords(const PeriodicGrid& g) {
  RVector xs(g.points);
  for (int k = 0; k < g.points; ++k) xs(k) = g.coord(k);
  return xs;
}

}  // namespace

std::function<CMatrix(const RVector&)> Function2D::fixed_x_evaluator(const RVector& xs) const {
  if (const auto* s = std::get_if<SampledData>(&v_)) {
    const CMatrix left = trig_basis(s->grid, xs) * s->coeffs;
    return [left, g = s->grid](const RVector& ys) { return CMatrix(left * trig_basis(g, ys).transpose()); };
  }
  return [f = *this, xs](const RVector& ys) { return f.eval_grid(xs, ys); };
}

std::function<CMatrix(const RVector&)> Function2D::fixed_y_evaluator(const RVector& ys) const {
  if (const auto* s = std::get_if<SampledData>(&v_)) {
    const CMatrix right = s->coeffs * trig_basis(s->grid, ys).transpose();
    return [right, g = s->grid](const RVector& xs) { return CMatrix(trig_basis(g, xs) * right); };
  }
  return [f = *this, ys](const RVector& xs) { return f.eval_grid(xs, ys); };
}

CMatrix vandermonde(const RVector& xs, int deg) {
  CMatrix v(xs.size(), deg + 1);
  for (int i = 0; i < xs.size(); ++i) {
    double p = 1.0;
    for (int k = 0; k <= deg; ++k) {
      v(i, k) = p;
      p *= xs(i);
    }
  }
  return v;
}

// ---- Function1D ----

Function1D Function1D::polynomial(CVector coeffs) {
  if (coeffs.size() == 0) coeffs = CVector::Zero(1);
  Function1D f;
  f.expr_ = poly1_expr(coeffs, Expr::x());
  f.poly_ = std::move(coeffs);
  return f;
}

Function1D Function1D::from_expr(const Expr& e) {
  if (e.depends_on(2)) throw ValidationError("one-variable function may not depend on y: " + e.str());
  if (auto p = e.try_polynomial()) return polynomial(p->col(0));
  Function1D f;
  f.expr_ = e;
  return f;
}

Function1D Function1D::parse(std::string_view text) { return from_expr(Expr::parse(text)); }

Complex Function1D::operator()(double x) const { return poly_ ? horner(*poly_, x) : expr_(x, 0.0); }

CVector Function1D::eval(const RVector& xs) const {
  CVector r(xs.size());
  for (int i = 0; i < xs.size(); ++i) r(i) = (*this)(xs(i));
  return r;
}

Function1D Function1D::derivative() const {
  if (poly_) {
    const auto& c = *poly_;
    CVector d = CVector::Zero(std::max<Eigen::Index>(1, c.size() - 1));
    for (int k = 1; k < c.size(); ++k) d(k - 1) = static_cast<double>(k) * c(k);
    return polynomial(d);
  }
  return from_expr(expr_.derivative(1));
}

Expr Function1D::to_expr() const { return expr_; }

// ---- SampledData ----

SampledData SampledData::from_values(const PeriodicGrid& g, CMatrix values) {
  g.validate();
  if (g.dim != 2) throw ValidationError("sampled function: grid must be two-dimensional");
  if (values.rows() != g.points || values.cols() != g.points) {
    std::ostringstream os;
    os << "sampled function: expected " << g.points << "x" << g.points << " values, got " << values.rows() << "x"
       << values.cols();
    throw ValidationError(os.str());
  }
  const RMatrix s = nyquist_split(g.points);
  const CMatrix x = fft2(values, true) / (static_cast<double>(g.points) * g.points);
  SampledData d{g, std::move(values), CMatrix()};
  d.coeffs = s.cast<Complex>() * x * s.transpose().cast<Complex>();
  return d;
}

SampledData SampledData::from_coeffs(const PeriodicGrid& g, CMatrix coeffs) {
  g.validate();
  // Fold signed frequencies back to FFT bins; both Nyquist copies land on
  // bin N/2 and sum.
  RMatrix f = RMatrix::Zero(g.points, g.points + 1);
  for (int p = 0; p <= g.points; ++p) f((p - g.points / 2 + g.points) % g.points, p) = 1.0;
  const CMatrix bins = f.cast<Complex>() * coeffs * f.transpose().cast<Complex>();
  SampledData d{g, fft2(bins, false), std::move(coeffs)};
  return d;
}

// ---- Function2D ----

Function2D::Function2D(Variant v) : v_(std::move(v)) {}

Function2D Function2D::from_expr(const Expr& e) {
  if (auto p = e.try_polynomial()) return polynomial(*p);
  return closed_form(e);
}

Complex Function2D::operator()(double x, double y) const {
  return std::visit(
      [&](const auto& f) -> Complex {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Polynomial>) {
          CVector row(f.a.cols());
          for (int k = 0; k < f.a.cols(); ++k) row(k) = horner(f.a.col(k), x);
          return horner(row, y);
        } else if constexpr (std::is_same_v<T, Product>) {
          return f.u(x) * f.v(y);
        } else if constexpr (std::is_same_v<T, SampledData>) {
          RVector xs(1), ys(1);
          xs << x;
          ys << y;
          return (trig_basis(f.grid, xs) * f.coeffs * trig_basis(f.grid, ys).transpose())(0, 0);
        } else {
          return f.expr(x, y);
        }
      },
      v_);
}

CMatrix Function2D::eval_grid(const RVector& xs, const RVector& ys) const {
  return std::visit(
      [&](const auto& f) -> CMatrix {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Polynomial>) {
          // Horner in x for every y-power, then Horner in y.
          CMatrix rows(xs.size(), f.a.cols());
          for (int i = 0; i < xs.size(); ++i)
            for (int k = 0; k < f.a.cols(); ++k) rows(i, k) = horner(f.a.col(k), xs(i));
          CMatrix out(xs.size(), ys.size());
          for (int i = 0; i < xs.size(); ++i)
            for (int j = 0; j < ys.size(); ++j) out(i, j) = horner(rows.row(i).transpose(), ys(j));
          return out;
        } else if constexpr (std::is_same_v<T, Product>) {
          return f.u.eval(xs) * f.v.eval(ys).transpose();
        } else if constexpr (std::is_same_v<T, SampledData>) {
          return trig_basis(f.grid, xs) * f.coeffs * trig_basis(f.grid, ys).transpose();
        } else {
          CMatrix out(xs.size(), ys.size());
          for (int j = 0; j < ys.size(); ++j)
            for (int i = 0; i < xs.size(); ++i) out(i, j) = f.expr(xs(i), ys(j));
          return out;
        }
      },
      v_);
}

Function2D Function2D::partial(int axis) const {
  if (axis != 1 && axis != 2) throw ValidationError("partial: axis must be 1 or 2");
  return std::visit(
      [&](const auto& f) -> Function2D {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Polynomial>) {
          const int rows = static_cast<int>(f.a.rows()), cols = static_cast<int>(f.a.cols());
          if (axis == 1) {
            CMatrix d = CMatrix::Zero(std::max(1, rows - 1), cols);
            for (int j = 1; j < rows; ++j) d.row(j - 1) = static_cast<double>(j) * f.a.row(j);
            return polynomial(d);
          }
          CMatrix d = CMatrix::Zero(rows, std::max(1, cols - 1));
          for (int k = 1; k < cols; ++k) d.col(k - 1) = static_cast<double>(k) * f.a.col(k);
          return polynomial(d);
        } else if constexpr (std::is_same_v<T, Product>) {
          return axis == 1 ? product(f.u.derivative(), f.v) : product(f.u, f.v.derivative());
        } else if constexpr (std::is_same_v<T, SampledData>) {
          const int n = f.grid.points;
          CMatrix c = f.coeffs;
          for (int p = 0; p <= n; ++p) {
            const Complex factor(0.0, f.grid.frequency(p - n / 2));
            if (axis == 1) c.row(p) *= factor;
            else c.col(p) *= factor;
          }
          return Function2D(SampledData::from_coeffs(f.grid, std::move(c)));
        } else {
          return closed_form(f.expr.derivative(axis));
        }
      },
      v_);
}

Function2D Function2D::conj() const {
  return std::visit(
      [&](const auto& f) -> Function2D {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Polynomial>) {
          return polynomial(f.a.conjugate());
        } else if constexpr (std::is_same_v<T, Product>) {
          return product(Function1D::from_expr(Expr::conj(f.u.to_expr())),
                         Function1D::from_expr(Expr::conj(f.v.to_expr())));
        } else if constexpr (std::is_same_v<T, SampledData>) {
          // c'(m) = conj(c(-m)): reverse both signed-frequency axes.
          const CMatrix c = f.coeffs.conjugate().reverse();
          return Function2D(SampledData::from_coeffs(f.grid, c));
        } else {
          return closed_form(Expr::conj(f.expr));
        }
      },
      v_);
}

CMatrix Function2D::sample(const PeriodicGrid& g) const {
  g.validate();
  if (const auto* s = std::get_if<SampledData>(&v_)) {
    if (s->grid.period == g.period && s->grid.points == g.points) return s->values;
  }
  const RVector xs = grid_coords(g);
  return eval_grid(xs, xs);
}

std::optional<CMatrix> Function2D::as_polynomial() const {
  if (const auto* p = std::get_if<Polynomial>(&v_)) return p->a;
  if (const auto* p = std::get_if<Product>(&v_)) {
    const auto& u = p->u.polynomial_coeffs();
    const auto& v = p->v.polynomial_coeffs();
    if (u && v) return CMatrix(*u * v->transpose());
    return std::nullopt;
  }
  if (const auto* c = std::get_if<ClosedForm>(&v_)) return c->expr.try_polynomial();
  return std::nullopt;
}

std::optional<Expr> Function2D::to_expr() const {
  if (const auto* p = std::get_if<Polynomial>(&v_)) {
    Expr e = Expr::constant(0.0);
    for (int j = 0; j < p->a.rows(); ++j)
      for (int k = 0; k < p->a.cols(); ++k)
        if (p->a(j, k) != 0.0)
          e = e + Expr::constant(p->a(j, k)) * power_of(Expr::x(), j) * power_of(Expr::y(), k);
    return e;
  }
  if (const auto* p = std::get_if<Product>(&v_)) {
    return p->u.to_expr() * p->v.to_expr().substitute(Expr::y(), Expr::y());
  }
  if (const auto* c = std::get_if<ClosedForm>(&v_)) return c->expr;
  return std::nullopt;
}

std::string Function2D::kind() const {
  switch (v_.index()) {
    case 0: return "polynomial";
    case 1: return "product";
    case 2: return "sampled";
    default: return "closed_form";
  }
}

std::string Function2D::str() const {
  if (auto e = to_expr()) return e->str();
  const auto& s = std::get<SampledData>(v_);
  std::ostringstream os;
  os << "sampled(L=" << s.grid.period << ", N=" << s.grid.points << ")";
  return os.str();
}

namespace {

const PeriodicGrid* sampled_grid(const Function2D& f) {
  if (const auto* s = std::get_if<SampledData>(&f.variant())) return &s->grid;
  return nullptr;
}

}  // namespace

Function2D Function2D::multiply(const Function2D& f, const Function2D& g) {
  const PeriodicGrid* grid = sampled_grid(f) ? sampled_grid(f) : sampled_grid(g);
  if (grid) return sampled(*grid, CMatrix(f.sample(*grid).cwiseProduct(g.sample(*grid))));
  const auto pf = f.as_polynomial();
  const auto pg = g.as_polynomial();
  if (pf && pg) return polynomial(poly_product(*pf, *pg));
  const auto* a = std::get_if<Product>(&f.v_);
  const auto* b = std::get_if<Product>(&g.v_);
  if (a && b) {
    return product(Function1D::from_expr(a->u.to_expr() * b->u.to_expr()),
                   Function1D::from_expr(a->v.to_expr() * b->v.to_expr()));
  }
  return from_expr(*f.to_expr() * *g.to_expr());
}

Function2D Function2D::combine(Complex a, const Function2D& f, Complex b, const Function2D& g) {
  const PeriodicGrid* grid = sampled_grid(f) ? sampled_grid(f) : sampled_grid(g);
  if (grid) return sampled(*grid, CMatrix(a * f.sample(*grid) + b * g.sample(*grid)));
  const auto pf = f.as_polynomial();
  const auto pg = g.as_polynomial();
  if (pf && pg) {
    CMatrix r = CMatrix::Zero(std::max(pf->rows(), pg->rows()), std::max(pf->cols(), pg->cols()));
    r.topLeftCorner(pf->rows(), pf->cols()) += a * *pf;
    r.topLeftCorner(pg->rows(), pg->cols()) += b * *pg;
    return polynomial(r);
  }
  return from_expr(Expr::constant(a) * *f.to_expr() + Expr::constant(b) * *g.to_expr());
}

}  // namespace opintegral
