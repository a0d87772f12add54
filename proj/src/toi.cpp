#include "opintegral/toi.hpp"

#include <cmath>
#include <sstream>

namespace opintegral {

namespace {

// Compensated matrix sum; the order of add() calls fixes the result bit for bit.
class KahanMatrix {
 public:
  KahanMatrix(Eigen::Index rows, Eigen::Index cols)
      : sum_(CMatrix::Zero(rows, cols)), comp_(CMatrix::Zero(rows, cols)) {}
  void add(const CMatrix& x) {
    const CMatrix y = x - comp_;
    const CMatrix t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  const CMatrix& sum() const { return sum_; }

 private:
  CMatrix sum_, comp_;
};

RVector point(double x) { return RVector::Constant(1, x); }

void check_shapes(const SpectralDecomposition& a, const CMatrix& t, const SpectralDecomposition& b, const CMatrix& r,
                  const SpectralDecomposition& c) {
  if (t.rows() != a.dim() || t.cols() != b.dim() || r.rows() != b.dim() || r.cols() != c.dim()) {
    std::ostringstream os;
    os << "triple operator integral: T is " << t.rows() << "x" << t.cols() << ", R is " << r.rows() << "x"
       << r.cols() << ", spectra have sizes " << a.dim() << ", " << b.dim() << ", " << c.dim();
    throw ValidationError(os.str());
  }
}

CMatrix table(const FactorFamily& f, const RVector& xs) {
  CMatrix m = f.eval(xs);
  if (m.rows() != f.count || m.cols() != xs.size()) throw ValidationError("factor family returned a table of wrong shape");
  return m;
}

// Operators of a first/second kind integral in the original coordinates.
struct Pieces {
  std::vector<CMatrix> left;   // first kind: alpha_j(A) ;        second kind: gamma_k(C)
  std::vector<CMatrix> right;  // first kind: sum_k beta_k(B) R gamma_jk(C) ; second kind: sum_j alpha_jk(A) T beta_j(B)
};

CMatrix diag_op(const SpectralDecomposition& d, const CMatrix& row) {
  return d.eigenvectors * row.transpose().asDiagonal() * d.eigenvectors.adjoint();
}

Pieces build_pieces(const HaagerupRep& rep, const SpectralDecomposition& a, const CMatrix& t,
                    const SpectralDecomposition& b, const CMatrix& r, const SpectralDecomposition& c) {
  Pieces p;
  if (rep.kind == RepKind::FirstKind) {
    const CMatrix fa = table(rep.f1, a.eigenvalues);
    const CMatrix fb = table(rep.f2, b.eigenvalues);
    const CMatrix rt = b.eigenvectors.adjoint() * r * c.eigenvectors;
    for (int j = 0; j < rep.f1.count; ++j) {
      p.left.push_back(diag_op(a, fa.row(j)));
      const CMatrix g = fb.transpose() * rep.g.row_slice(j, c.eigenvalues);
      p.right.push_back(b.eigenvectors * rt.cwiseProduct(g) * c.eigenvectors.adjoint());
    }
  } else if (rep.kind == RepKind::SecondKind) {
    const CMatrix fb = table(rep.f2, b.eigenvalues);
    const CMatrix fc = table(rep.f3, c.eigenvalues);
    const CMatrix tt = a.eigenvectors.adjoint() * t * b.eigenvectors;
    for (int k = 0; k < rep.f3.count; ++k) {
      p.left.push_back(diag_op(c, fc.row(k)));
      const CMatrix f = rep.g.col_slice(k, a.eigenvalues).transpose() * fb;
      p.right.push_back(a.eigenvectors * f.cwiseProduct(tt) * b.eigenvectors.adjoint());
    }
  } else {
    throw ValidationError("trace pairing is defined for first and second kind representations only");
  }
  return p;
}

Complex pairing_from_pieces(const HaagerupRep& rep, const Pieces& p, const CMatrix& t, const CMatrix& r,
                            const CMatrix& q) {
  const int n = static_cast<int>(p.left.size());
  if (n == 0) return {};
  CMatrix inner = CMatrix::Zero(0, 0);
  for (int j = 0; j < n; ++j) {
    // first kind: M_j Q alpha_j(A);  second kind: gamma_k(C) Q N_k
    const CMatrix term = rep.kind == RepKind::FirstKind ? CMatrix(p.right[j] * q * p.left[j])
                                                        : CMatrix(p.left[j] * q * p.right[j]);
    if (inner.size() == 0)
      inner = term;
    else
      inner += term;
  }
  return rep.kind == RepKind::FirstKind ? (inner * t).trace() : (inner * r).trace();
}

double column_norm_sup(const FactorFamily& f, const RVector& xs) {
  if (xs.size() == 0) return 0.0;
  return table(f, xs).colwise().norm().maxCoeff();
}

double matrix_norm_sup(const MatrixFactorFamily& g, const RVector& xs) {
  double best = 0.0;
  for (int i = 0; i < xs.size(); ++i) best = std::max(best, op_norm(g.at(xs(i))));
  return best;
}

}  // namespace

FactorFamily FactorFamily::from_functions(std::vector<Function1D> fs) {
  FactorFamily f;
  f.count = static_cast<int>(fs.size());
  f.eval = [fs = std::move(fs)](const RVector& xs) {
    CMatrix m(static_cast<Eigen::Index>(fs.size()), xs.size());
    for (std::size_t j = 0; j < fs.size(); ++j) m.row(static_cast<Eigen::Index>(j)) = fs[j].eval(xs).transpose();
    return m;
  };
  return f;
}

FactorFamily FactorFamily::constant_one() {
  FactorFamily f;
  f.count = 1;
  f.eval = [](const RVector& xs) { return CMatrix::Ones(1, xs.size()); };
  return f;
}

MatrixFactorFamily MatrixFactorFamily::from_functions(std::vector<std::vector<Function1D>> g) {
  MatrixFactorFamily m;
  m.rows = static_cast<int>(g.size());
  m.cols = g.empty() ? 0 : static_cast<int>(g.front().size());
  for (const auto& row : g)
    if (static_cast<int>(row.size()) != m.cols) throw ValidationError("matrix factor family has ragged rows");
  m.at = [g](double x) {
    CMatrix v(static_cast<Eigen::Index>(g.size()), g.empty() ? 0 : static_cast<Eigen::Index>(g.front().size()));
    for (Eigen::Index j = 0; j < v.rows(); ++j)
      for (Eigen::Index k = 0; k < v.cols(); ++k) v(j, k) = g[j][k](x);
    return v;
  };
  m.row_slice = [g](int j, const RVector& xs) {
    CMatrix s(static_cast<Eigen::Index>(g[j].size()), xs.size());
    for (std::size_t k = 0; k < g[j].size(); ++k) s.row(static_cast<Eigen::Index>(k)) = g[j][k].eval(xs).transpose();
    return s;
  };
  m.col_slice = [g](int k, const RVector& xs) {
    CMatrix s(static_cast<Eigen::Index>(g.size()), xs.size());
    for (std::size_t j = 0; j < g.size(); ++j) s.row(static_cast<Eigen::Index>(j)) = g[j][k].eval(xs).transpose();
    return s;
  };
  return m;
}

MatrixFactorFamily MatrixFactorFamily::diagonal(const FactorFamily& f) {
  MatrixFactorFamily m;
  m.rows = m.cols = f.count;
  m.at = [f](double x) {
    const CMatrix v = f.eval(point(x));
    return CMatrix(v.col(0).asDiagonal());
  };
  m.row_slice = [f](int j, const RVector& xs) {
    CMatrix s = CMatrix::Zero(f.count, xs.size());
    s.row(j) = f.eval(xs).row(j);
    return s;
  };
  m.col_slice = m.row_slice;
  return m;
}

void MatrixFactorFamily::complete() {
  if (!at) throw ValidationError("matrix factor family has no evaluator");
  if (!row_slice) {
    row_slice = [at = at, cols = cols](int j, const RVector& xs) {
      CMatrix s(cols, xs.size());
      for (int i = 0; i < xs.size(); ++i) s.col(i) = at(xs(i)).row(j).transpose();
      return s;
    };
  }
  if (!col_slice) {
    col_slice = [at = at, rows = rows](int k, const RVector& xs) {
      CMatrix s(rows, xs.size());
      for (int i = 0; i < xs.size(); ++i) s.col(i) = at(xs(i)).col(k);
      return s;
    };
  }
}

std::string to_string(RepKind k) {
  switch (k) {
    case RepKind::Projective: return "projective";
    case RepKind::Haagerup: return "haagerup";
    case RepKind::FirstKind: return "first_kind";
    case RepKind::SecondKind: return "second_kind";
  }
  return "?";
}

RepKind rep_kind_from_string(const std::string& s) {
  if (s == "projective") return RepKind::Projective;
  if (s == "haagerup") return RepKind::Haagerup;
  if (s == "first_kind" || s == "first") return RepKind::FirstKind;
  if (s == "second_kind" || s == "second") return RepKind::SecondKind;
  throw ValidationError("unknown representation kind '" + s + "'");
}

void HaagerupRep::validate() const {
  auto need = [](bool ok, const char* what) {
    if (!ok) throw ValidationError(std::string("representation: ") + what);
  };
  switch (kind) {
    case RepKind::Projective:
      need(f1.eval && f2.eval && f3.eval, "projective factors missing");
      need(f1.count == f2.count && f2.count == f3.count, "projective factor families differ in length");
      break;
    case RepKind::Haagerup:
      need(f1.eval && g.at && f3.eval, "haagerup factors missing");
      need(g.rows == f1.count && g.cols == f3.count, "haagerup middle factor has wrong shape");
      break;
    case RepKind::FirstKind:
      need(f1.eval && f2.eval && g.at && g.row_slice, "first kind factors missing");
      need(g.rows == f1.count && g.cols == f2.count, "first kind last factor has wrong shape");
      break;
    case RepKind::SecondKind:
      need(g.at && g.col_slice && f2.eval && f3.eval, "second kind factors missing");
      need(g.rows == f2.count && g.cols == f3.count, "second kind first factor has wrong shape");
      break;
  }
  need(tail_bound >= 0.0, "negative tail bound");
}

Complex HaagerupRep::value(double x1, double x2, double x3) const {
  switch (kind) {
    case RepKind::Projective: {
      const CMatrix a = f1.eval(point(x1)), b = f2.eval(point(x2)), c = f3.eval(point(x3));
      return a.col(0).cwiseProduct(b.col(0)).cwiseProduct(c.col(0)).sum();
    }
    case RepKind::Haagerup:
      return (f1.eval(point(x1)).col(0).transpose() * g.at(x2) * f3.eval(point(x3)).col(0))(0, 0);
    case RepKind::FirstKind:
      return (f1.eval(point(x1)).col(0).transpose() * g.at(x3) * f2.eval(point(x2)).col(0))(0, 0);
    case RepKind::SecondKind:
      return (f2.eval(point(x2)).col(0).transpose() * g.at(x1) * f3.eval(point(x3)).col(0))(0, 0);
  }
  return {};
}

HaagerupRep make_projective(FactorFamily phi, FactorFamily psi, FactorFamily chi) {
  HaagerupRep r;
  r.kind = RepKind::Projective;
  r.f1 = std::move(phi);
  r.f2 = std::move(psi);
  r.f3 = std::move(chi);
  r.validate();
  return r;
}

HaagerupRep make_haagerup(FactorFamily alpha, MatrixFactorFamily beta, FactorFamily gamma) {
  HaagerupRep r;
  r.kind = RepKind::Haagerup;
  r.f1 = std::move(alpha);
  beta.complete();
  r.g = std::move(beta);
  r.f3 = std::move(gamma);
  r.validate();
  return r;
}

HaagerupRep make_first_kind(FactorFamily alpha, FactorFamily beta, MatrixFactorFamily gamma) {
  HaagerupRep r;
  r.kind = RepKind::FirstKind;
  r.f1 = std::move(alpha);
  r.f2 = std::move(beta);
  gamma.complete();
  r.g = std::move(gamma);
  r.validate();
  return r;
}

HaagerupRep make_second_kind(MatrixFactorFamily alpha, FactorFamily beta, FactorFamily gamma) {
  HaagerupRep r;
  r.kind = RepKind::SecondKind;
  alpha.complete();
  r.g = std::move(alpha);
  r.f2 = std::move(beta);
  r.f3 = std::move(gamma);
  r.validate();
  return r;
}

CMatrix triple_spectral_sum(const TripleFunction& psi, const SpectralDecomposition& a,
                            const SpectralDecomposition& b, const SpectralDecomposition& c, const CMatrix& t,
                            const CMatrix& r) {
  check_shapes(a, t, b, r, c);
  const CMatrix tt = a.eigenvectors.adjoint() * t * b.eigenvectors;
  const CMatrix rt = b.eigenvectors.adjoint() * r * c.eigenvectors;
  const int na = a.dim(), nb = b.dim(), nc = c.dim();
  KahanMatrix acc(na, nc);
  CMatrix term(na, nc);
  for (int j = 0; j < nb; ++j) {
    const double mu = b.eigenvalues(j);
    for (int k = 0; k < nc; ++k)
      for (int i = 0; i < na; ++i) {
        const Complex v = psi(a.eigenvalues(i), mu, c.eigenvalues(k));
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
          std::ostringstream os;
          os.precision(17);
          os << "integrand is not finite at (" << a.eigenvalues(i) << ", " << mu << ", " << c.eigenvalues(k) << ")";
          throw ValidationError(os.str());
        }
        term(i, k) = v * tt(i, j) * rt(j, k);
      }
    acc.add(term);
  }
  return a.eigenvectors * acc.sum() * c.eigenvectors.adjoint();
}

CMatrix eval_representation(const HaagerupRep& rep, const SpectralDecomposition& a, const CMatrix& t,
                            const SpectralDecomposition& b, const CMatrix& r, const SpectralDecomposition& c,
                            EvalPath path) {
  check_shapes(a, t, b, r, c);
  rep.validate();
  const int na = a.dim(), nc = c.dim();

  if (path == EvalPath::Probing && (rep.kind == RepKind::FirstKind || rep.kind == RepKind::SecondKind)) {
    // trace(W E_ab) = W(b, a)
    const Pieces p = build_pieces(rep, a, t, b, r, c);
    CMatrix w(na, nc);
    CMatrix e = CMatrix::Zero(nc, na);
    for (int col = 0; col < nc; ++col)
      for (int row = 0; row < na; ++row) {
        e(col, row) = 1.0;
        w(row, col) = pairing_from_pieces(rep, p, t, r, e);
        e(col, row) = 0.0;
      }
    return w;
  }

  const CMatrix tt = a.eigenvectors.adjoint() * t * b.eigenvectors;
  const CMatrix rt = b.eigenvectors.adjoint() * r * c.eigenvectors;
  KahanMatrix acc(na, nc);
  switch (rep.kind) {
    case RepKind::Projective: {
      const CMatrix fa = table(rep.f1, a.eigenvalues), fb = table(rep.f2, b.eigenvalues),
                    fc = table(rep.f3, c.eigenvalues);
      for (int n = 0; n < rep.f1.count; ++n) {
        const CMatrix left = fa.row(n).transpose().asDiagonal() * tt * fb.row(n).transpose().asDiagonal();
        acc.add(left * rt * fc.row(n).transpose().asDiagonal());
      }
      break;
    }
    case RepKind::Haagerup: {
      const CMatrix fa = table(rep.f1, a.eigenvalues), fc = table(rep.f3, c.eigenvalues);
      for (int j = 0; j < rep.f1.count; ++j) {
        // sum_k beta_jk(B) R gamma_k(C), in eigen coordinates
        const CMatrix m = rt.cwiseProduct(rep.g.row_slice(j, b.eigenvalues).transpose() * fc);
        acc.add(fa.row(j).transpose().asDiagonal() * tt * m);
      }
      break;
    }
    case RepKind::FirstKind: {
      const CMatrix fa = table(rep.f1, a.eigenvalues), fb = table(rep.f2, b.eigenvalues);
      for (int j = 0; j < rep.f1.count; ++j) {
        const CMatrix m = rt.cwiseProduct(fb.transpose() * rep.g.row_slice(j, c.eigenvalues));
        acc.add(fa.row(j).transpose().asDiagonal() * tt * m);
      }
      break;
    }
    case RepKind::SecondKind: {
      const CMatrix fb = table(rep.f2, b.eigenvalues), fc = table(rep.f3, c.eigenvalues);
      for (int k = 0; k < rep.f3.count; ++k) {
        const CMatrix n = (rep.g.col_slice(k, a.eigenvalues).transpose() * fb).cwiseProduct(tt);
        acc.add(n * rt * fc.row(k).transpose().asDiagonal());
      }
      break;
    }
  }
  return a.eigenvectors * acc.sum() * c.eigenvectors.adjoint();
}

Complex pairing_functional(const HaagerupRep& rep, const SpectralDecomposition& a, const CMatrix& t,
                           const SpectralDecomposition& b, const CMatrix& r, const SpectralDecomposition& c,
                           const CMatrix& q) {
  check_shapes(a, t, b, r, c);
  if (q.rows() != c.dim() || q.cols() != a.dim()) throw ValidationError("pairing functional: Q has wrong shape");
  return pairing_from_pieces(rep, build_pieces(rep, a, t, b, r, c), t, r, q);
}

RepNormCertificate rep_norm(const HaagerupRep& rep, const RVector& s1, const RVector& s2, const RVector& s3) {
  rep.validate();
  RepNormCertificate cert;
  cert.kind = rep.kind;
  switch (rep.kind) {
    case RepKind::Projective: {
      const CMatrix a = table(rep.f1, s1), b = table(rep.f2, s2), c = table(rep.f3, s3);
      for (int n = 0; n < rep.f1.count; ++n)
        cert.value += a.row(n).cwiseAbs().maxCoeff() * b.row(n).cwiseAbs().maxCoeff() * c.row(n).cwiseAbs().maxCoeff();
      cert.factor_norms[0] = cert.factor_norms[1] = cert.factor_norms[2] = 0.0;
      return cert;
    }
    case RepKind::Haagerup:
      cert.factor_norms[0] = column_norm_sup(rep.f1, s1);
      cert.factor_norms[1] = matrix_norm_sup(rep.g, s2);
      cert.factor_norms[2] = column_norm_sup(rep.f3, s3);
      break;
    case RepKind::FirstKind:
      cert.factor_norms[0] = column_norm_sup(rep.f1, s1);
      cert.factor_norms[1] = column_norm_sup(rep.f2, s2);
      cert.factor_norms[2] = matrix_norm_sup(rep.g, s3);
      break;
    case RepKind::SecondKind:
      cert.factor_norms[0] = matrix_norm_sup(rep.g, s1);
      cert.factor_norms[1] = column_norm_sup(rep.f2, s2);
      cert.factor_norms[2] = column_norm_sup(rep.f3, s3);
      break;
  }
  cert.value = cert.factor_norms[0] * cert.factor_norms[1] * cert.factor_norms[2];
  return cert;
}

S1Certificate s1_certificate(const HaagerupRep& rep, const CMatrix& w, const SpectralDecomposition& a,
                             const CMatrix& t, const SpectralDecomposition& b, const CMatrix& r,
                             const SpectralDecomposition& c) {
  S1Certificate cert;
  cert.rep_norm = rep_norm(rep, a.eigenvalues, b.eigenvalues, c.eigenvalues).value;
  switch (rep.kind) {
    case RepKind::Haagerup:
      cert.norm = "op";
      cert.lhs = op_norm(w);
      cert.bound = cert.rep_norm * op_norm(t) * op_norm(r);
      break;
    case RepKind::FirstKind:
      cert.norm = "S1";
      cert.lhs = trace_norm(w);
      cert.bound = cert.rep_norm * trace_norm(t) * op_norm(r);
      break;
    case RepKind::SecondKind:
      cert.norm = "S1";
      cert.lhs = trace_norm(w);
      cert.bound = cert.rep_norm * op_norm(t) * trace_norm(r);
      break;
    case RepKind::Projective:
      cert.norm = "S1";
      cert.lhs = trace_norm(w);
      cert.bound = cert.rep_norm * std::min(trace_norm(t) * op_norm(r), op_norm(t) * trace_norm(r));
      break;
  }
  cert.satisfied = cert.lhs <= cert.bound + 1e-9;
  return cert;
}

S1Certificate s1_certificate(const HaagerupRep& rep, const SpectralDecomposition& a, const CMatrix& t,
                             const SpectralDecomposition& b, const CMatrix& r, const SpectralDecomposition& c) {
  return s1_certificate(rep, eval_representation(rep, a, t, b, r, c), a, t, b, r, c);
}

HolderCheck holder_check(const HaagerupRep& rep, const SpectralDecomposition& a, const CMatrix& t,
                         const SpectralDecomposition& b, const CMatrix& r, const SpectralDecomposition& c, double p,
                         double q) {
  if (rep.kind != RepKind::Projective) throw ValidationError("Hoelder check needs a projective representation");
  if (!(p >= 1.0) || !(q >= 1.0)) throw ValidationError("Hoelder check: exponents must be >= 1");
  const double inv_r = 1.0 / p + 1.0 / q;
  if (inv_r > 1.0 + 1e-15) throw ValidationError("Hoelder check: need 1/p + 1/q <= 1");
  HolderCheck h;
  h.p = p;
  h.q = q;
  h.r = inv_r == 0.0 ? kSchattenInf : 1.0 / inv_r;
  const double n = rep_norm(rep, a.eigenvalues, b.eigenvalues, c.eigenvalues).value;
  h.lhs = schatten_norm(eval_representation(rep, a, t, b, r, c), h.r);
  h.bound = n * schatten_norm(t, p) * schatten_norm(r, q);
  h.satisfied = h.lhs <= h.bound + 1e-9;
  return h;
}

}  // namespace opintegral
