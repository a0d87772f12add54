#include "opintegral/doi.hpp"

#include <cmath>
#include <sstream>

namespace opintegral {

CMatrix symbol_matrix(const Function2D& phi, const RVector& lambda, const RVector& mu) {
  CMatrix m = phi.eval_grid(lambda, mu);
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) {
        std::ostringstream os;
        os.precision(17);
        os << "function " << phi.str() << " is not finite at (" << lambda(i) << ", " << mu(j) << ")";
        throw ValidationError(os.str());
      }
  return m;
}

CMatrix double_operator_integral(const CMatrix& phi_hat, const SpectralDecomposition& a, const CMatrix& t,
                                 const SpectralDecomposition& b) {
  if (t.rows() != a.dim() || t.cols() != b.dim()) {
    std::ostringstream os;
    os << "double operator integral: T is " << t.rows() << "x" << t.cols() << ", spectra have sizes " << a.dim()
       << " and " << b.dim();
    throw ValidationError(os.str());
  }
  if (phi_hat.rows() != a.dim() || phi_hat.cols() != b.dim())
    throw ValidationError("double operator integral: symbol matrix shape mismatch");
  const CMatrix inner = a.eigenvectors.adjoint() * t * b.eigenvectors;
  return a.eigenvectors * phi_hat.cwiseProduct(inner) * b.eigenvectors.adjoint();
}

CMatrix double_operator_integral(const Function2D& phi, const SpectralDecomposition& a, const CMatrix& t,
                                 const SpectralDecomposition& b) {
  return double_operator_integral(symbol_matrix(phi, a.eigenvalues, b.eigenvalues), a, t, b);
}

CMatrix funcalc(const Function2D& phi, const SpectralDecomposition& a, const SpectralDecomposition& b) {
  if (a.dim() != b.dim()) throw ValidationError("funcalc: A and B must have the same dimension");
  const CMatrix phi_hat = symbol_matrix(phi, a.eigenvalues, b.eigenvalues);
  // With T = I the inner product U_A* U_B is the only full product needed.
  const CMatrix inner = a.eigenvectors.adjoint() * b.eigenvectors;
  return a.eigenvectors * phi_hat.cwiseProduct(inner) * b.eigenvectors.adjoint();
}

CMatrix funcalc(const Function2D& phi, const HermitianOperator& a, const HermitianOperator& b) {
  return funcalc(phi, decompose(a), decompose(b));
}

CMatrix apply_function(const Function1D& f, const SpectralDecomposition& a) {
  return a.apply([&](double x) { return f(x); });
}

CMatrix divided_difference_matrix(const Function1D& f, const RVector& lambda, const RVector& mu, double tol) {
  const Function1D df = f.derivative();
  const CVector fl = f.eval(lambda), fm = f.eval(mu);
  CMatrix d(lambda.size(), mu.size());
  for (int j = 0; j < mu.size(); ++j)
    for (int i = 0; i < lambda.size(); ++i) {
      const double h = lambda(i) - mu(j);
      d(i, j) = std::abs(h) <= tol ? df(0.5 * (lambda(i) + mu(j))) : (fl(i) - fm(j)) / h;
    }
  return d;
}

OneVarCommutatorCheck one_var_commutator_identity(const Function1D& f, const HermitianOperator& a,
                                                  const HermitianOperator& b, const CMatrix& q) {
  const SpectralDecomposition da = decompose(a);
  const SpectralDecomposition db = decompose(b);
  const double lo = std::min(da.eigenvalues.minCoeff(), db.eigenvalues.minCoeff());
  const double hi = std::max(da.eigenvalues.maxCoeff(), db.eigenvalues.maxCoeff());
  const double tol = 1e-7 * std::max(hi - lo, 1e-300);

  const CMatrix fa_q = apply_function(f, da) * q;
  const CMatrix q_fb = q * apply_function(f, db);
  const CMatrix diff = a.matrix() * q - q * b.matrix();
  const CMatrix rhs =
      double_operator_integral(divided_difference_matrix(f, da.eigenvalues, db.eigenvalues, tol), da, diff, db);

  OneVarCommutatorCheck r;
  r.lhs_s1 = trace_norm(fa_q - q_fb);
  r.residual = trace_norm(fa_q - q_fb - rhs);
  r.scale = trace_norm(fa_q) + trace_norm(q_fb);
  r.commutator_s1 = trace_norm(diff);
  return r;
}

ProjectiveTrigRep projective_decompose_trig(const CMatrix& coeffs, int grid_points) {
  if (coeffs.rows() != coeffs.cols() || coeffs.rows() % 2 == 0)
    throw ValidationError("trig polynomial coefficients must be (2N+1)x(2N+1)");
  const int deg = static_cast<int>(coeffs.rows() - 1) / 2;
  if (grid_points <= 2 * deg) throw ValidationError("sup grid must have more than 2N points");

  ProjectiveTrigRep rep;
  rep.degree = deg;
  rep.coeffs = coeffs;
  rep.grid_points = grid_points;

  // E(t, k) = e^{ik theta_t}; rows r_j on the grid are coeffs.row(j) * E^T.
  CMatrix e(grid_points, 2 * deg + 1);
  for (int t = 0; t < grid_points; ++t) {
    const double th = 2.0 * kPi * t / grid_points;
    for (int k = -deg; k <= deg; ++k) e(t, k + deg) = Complex(std::cos(k * th), std::sin(k * th));
  }
  const CMatrix rows = coeffs * e.transpose();  // (2N+1) x grid
  rep.row_sups.resize(2 * deg + 1);
  for (int j = 0; j <= 2 * deg; ++j) {
    rep.row_sups[j] = rows.row(j).cwiseAbs().maxCoeff();
    rep.bound += rep.row_sups[j];
  }
  // f on the grid, in row blocks: F = E * rows.
  constexpr int kBlock = 256;
  for (int t0 = 0; t0 < grid_points; t0 += kBlock) {
    const int nb = std::min(kBlock, grid_points - t0);
    const CMatrix block = e.middleRows(t0, nb) * rows;
    rep.sup_norm = std::max(rep.sup_norm, block.cwiseAbs().maxCoeff());
  }
  return rep;
}

}  // namespace opintegral
