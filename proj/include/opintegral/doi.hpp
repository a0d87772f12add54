#pragma once

#include <vector>

#include "opintegral/function.hpp"
#include "opintegral/spectral.hpp"

namespace opintegral {

// Phi(lambda_i, mu_j) on the two spectra. Throws ValidationError naming the
// first point where phi is not finite.
CMatrix symbol_matrix(const Function2D& phi, const RVector& lambda, const RVector& mu);

// U_A (phi_hat o (U_A* T U_B)) U_B*.
CMatrix double_operator_integral(const CMatrix& phi_hat, const SpectralDecomposition& a, const CMatrix& t,
                                 const SpectralDecomposition& b);
CMatrix double_operator_integral(const Function2D& phi, const SpectralDecomposition& a, const CMatrix& t,
                                 const SpectralDecomposition& b);

// sum_{i,j} phi(lambda_i, mu_j) P_i Q_j: A's projections on the left.
CMatrix funcalc(const Function2D& phi, const SpectralDecomposition& a, const SpectralDecomposition& b);
CMatrix funcalc(const Function2D& phi, const HermitianOperator& a, const HermitianOperator& b);

// f(A) for a one-variable function.
CMatrix apply_function(const Function1D& f, const SpectralDecomposition& a);

// (f(x) - f(y)) / (x - y) on the two spectra, f'(x) when |x - y| <= tol.
CMatrix divided_difference_matrix(const Function1D& f, const RVector& lambda, const RVector& mu, double tol);

struct OneVarCommutatorCheck {
  double residual = 0;        // S1 norm of f(A)Q - Qf(B) - DOI(Df)[AQ - QB]
  double scale = 0;           // ||f(A)Q||_S1 + ||Qf(B)||_S1
  double lhs_s1 = 0;          // ||f(A)Q - Qf(B)||_S1
  double commutator_s1 = 0;   // ||AQ - QB||_S1
};

OneVarCommutatorCheck one_var_commutator_identity(const Function1D& f, const HermitianOperator& a,
                                                  const HermitianOperator& b, const CMatrix& q);

// Row-wise projective representation of a trigonometric polynomial in two
// variables, f(x, y) = sum_j e^{ijx} r_j(y) with r_j(y) = sum_k c(j, k) e^{iky}.
struct ProjectiveTrigRep {
  int degree = 0;
  CMatrix coeffs;                 // (2N+1) x (2N+1), index j + N, k + N
  std::vector<double> row_sups;   // grid sup of |r_j|
  double bound = 0;               // sum of row_sups
  double sup_norm = 0;            // grid sup of |f|
  int grid_points = 0;
};

// Sup norms on a uniform grid of `grid_points` per axis over [0, 2pi).
ProjectiveTrigRep projective_decompose_trig(const CMatrix& coeffs, int grid_points = 4096);

}  // namespace opintegral
