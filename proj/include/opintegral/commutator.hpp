#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "opintegral/divdiff.hpp"
#include "opintegral/spectral.hpp"

namespace opintegral {

enum class CommutatorPath {
  Auto,        // polynomial when phi is a polynomial, spectral otherwise
  Polynomial,  // exact projective representations of the divided differences
  Spectral,    // triple spectral sums of the divided differences
  Sinc,        // lattice-sampling representations (phi band-limited to sigma)
};

struct CommutatorOptions {
  CommutatorPath path = CommutatorPath::Auto;
  double coincidence_tol = -1;  // negative: 1e-7 times the joint spectral diameter
  double sigma = 0;             // sinc path only
  int J = 256;                  // sinc path only
};

// [phi(A,B), Q] = W1 + W2 with
//   W1 = iiint (D_y phi)(x, y1, y2) dE_A(x) I dE_B(y1) [B,Q] dE_B(y2)   (second kind)
//   W2 = iiint (D_x phi)(x1, x2, y) dE_A(x1) [A,Q] dE_A(x2) I dE_B(y)   (first kind)
struct CommutatorTerms {
  CMatrix w1, w2, total;
  std::string path;
  // Present for the representation paths (polynomial, sinc).
  std::vector<S1Certificate> certificates;
  double tail_bound = 0;
};

CommutatorTerms commutator_terms(const Function2D& phi, const SpectralDecomposition& a,
                                 const SpectralDecomposition& b, const CMatrix& q, const CommutatorOptions& opt = {});
CMatrix commutator_via_toi(const Function2D& phi, const HermitianOperator& a, const HermitianOperator& b,
                           const CMatrix& q, const CommutatorOptions& opt = {});

// Smallest R with both spectra in [-R, R], at least 1e-12.
double spectral_box_radius(const SpectralDecomposition& a, const SpectralDecomposition& b);

// B^1_{inf,1} norm of phi * chi, chi(x, y) = c(x) c(y) a smooth cutoff equal
// to 1 on [-R, R] and 0 outside [-2R, 2R]. Operators only see phi on the
// spectra, and the plain norm of a polynomial is zero.
double surrogate_besov_norm(const Function2D& phi, double radius);
double surrogate_besov_norm_1d(const Function1D& f, double radius);

struct CommutatorReport {
  double lhs_s1 = 0;       // ||[phi(A,B), Q]||_S1 (direct)
  double rhs_s1 = 0;       // ||W1 + W2||_S1
  double residual_s1 = 0;  // ||W1 + W2 - direct||_S1
  double sup_norm = 0;     // max |phi| on sigma(A) x sigma(B)
  double q_norm = 0;       // ||Q||
  double tolerance = 0;    // 1e-10 * sup_norm * q_norm * dim
  double phi_besov = 0;    // surrogate norm
  double psi_besov = 0;    // commutator_of_functions only
  double comm_aq_s1 = 0, comm_bq_s1 = 0, comm_ab_s1 = 0;
  double empirical_constant = 0;
  std::string path;
  std::string norm_note;
  std::vector<S1Certificate> certificates;
};

CommutatorReport verify_theorem_41(const Function2D& phi, const HermitianOperator& a, const HermitianOperator& b,
                                   const CMatrix& q, const CommutatorOptions& opt = {});

struct FunctionCommutator {
  CMatrix value;  // [phi(A,B), psi(A,B)] through the triple integrals
  CMatrix direct;
  CommutatorReport report;
};

// [phi(A,B), psi(A,B)] with Q = psi(A,B), where [A,Q] and [B,Q] are in turn
// computed by commutator_via_toi from [A,B].
FunctionCommutator commutator_of_functions(const Function2D& phi, const Function2D& psi, const HermitianOperator& a,
                                           const HermitianOperator& b, const CommutatorOptions& opt = {});

// ||(phi psi)(A,B) - phi(A,B) psi(A,B)||_S1
double probe_problem1(const Function2D& phi, const Function2D& psi, const HermitianOperator& a,
                      const HermitianOperator& b);
// ||phi(A,B)* - conj(phi)(A,B)||_S1
double probe_problem2(const Function2D& phi, const HermitianOperator& a, const HermitianOperator& b);

// A Hermitian pair: A random with spectrum in [-1, 1], B = B0 + sum of
// `rank` rank-one Hermitian terms where B0 commutes with A.
struct AlmostCommutingPair {
  HermitianOperator a, b;
};
AlmostCommutingPair almost_commuting_pair(int n, int rank, double perturbation, std::uint64_t seed);

// Random polynomial in x, y of total degree <= deg with complex Gaussian
// coefficients scaled by 1 / (j + k)!.
Function2D random_polynomial(int deg, std::uint64_t seed);

struct TrialRecord {
  int dim = 0, degree = 0, rank = 0;
  double residual_ratio = 0;  // residual_s1 / tolerance
  double constant_one_var = 0, constant_commutator = 0, constant_pair = 0;
  double probe1 = 0, probe2 = 0;
  int certificate_violations = 0;
};

struct TrialSuite {
  std::vector<TrialRecord> trials;
  double max_residual_ratio = 0;
  double max_constant_one_var = 0, max_constant_commutator = 0, max_constant_pair = 0;
  int certificate_violations = 0;
  int certificates_checked = 0;
};

// The standard suite: dims in [4, max_dim], degrees in [1, max_degree],
// per-trial seeds derived from `seed`.
TrialSuite run_trial_suite(std::uint64_t seed, int trials = 50, int max_dim = 32, int max_degree = 4);

}  // namespace opintegral
