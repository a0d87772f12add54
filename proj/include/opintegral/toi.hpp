#pragma once

#include <functional>
#include <string>
#include <vector>

#include "opintegral/function.hpp"
#include "opintegral/spectral.hpp"

namespace opintegral {

// {f_j}, j < count: eval(xs) returns a count x xs.size() table.
struct FactorFamily {
  int count = 0;
  std::function<CMatrix(const RVector&)> eval;

  static FactorFamily from_functions(std::vector<Function1D> fs);
  static FactorFamily constant_one();
};

// {g_jk}, j < rows, k < cols.
struct MatrixFactorFamily {
  int rows = 0, cols = 0;
  std::function<CMatrix(double)> at;                           // rows x cols at one point
  std::function<CMatrix(int j, const RVector&)> row_slice;     // g_{j,.}(xs): cols x npts
  std::function<CMatrix(int k, const RVector&)> col_slice;     // g_{.,k}(xs): rows x npts

  static MatrixFactorFamily from_functions(std::vector<std::vector<Function1D>> g);
  // Diagonal family g_jj = f_j, zero off the diagonal.
  static MatrixFactorFamily diagonal(const FactorFamily& f);
  // Fills row_slice / col_slice from `at` when they are missing.
  void complete();
};

enum class RepKind { Projective, Haagerup, FirstKind, SecondKind };
std::string to_string(RepKind k);
RepKind rep_kind_from_string(const std::string& s);

// Finite representation of a three-variable integrand. Which members are
// used depends on the kind:
//   projective:  sum_n f1_n(x1) f2_n(x2) f3_n(x3)
//   haagerup:    sum_{j,k} f1_j(x1) g_jk(x2) f3_k(x3)
//   first kind:  sum_{j,k} f1_j(x1) f2_k(x2) g_jk(x3)
//   second kind: sum_{j,k} g_jk(x1) f2_j(x2) f3_k(x3)
struct HaagerupRep {
  RepKind kind = RepKind::Projective;
  FactorFamily f1, f2, f3;
  MatrixFactorFamily g;
  double tail_bound = 0;  // producer-supplied bound on the truncated tail, pointwise
  std::string description;

  void validate() const;
  Complex value(double x1, double x2, double x3) const;
};

HaagerupRep make_projective(FactorFamily phi, FactorFamily psi, FactorFamily chi);
HaagerupRep make_haagerup(FactorFamily alpha, MatrixFactorFamily beta, FactorFamily gamma);
HaagerupRep make_first_kind(FactorFamily alpha, FactorFamily beta, MatrixFactorFamily gamma);
HaagerupRep make_second_kind(MatrixFactorFamily alpha, FactorFamily beta, FactorFamily gamma);

using TripleFunction = std::function<Complex(double, double, double)>;

// sum_{i,j,k} Psi(lambda_i, mu_j, nu_k) P_i T Q_j R S_k, summed over the
// middle index in ascending order with compensated accumulation.
CMatrix triple_spectral_sum(const TripleFunction& psi, const SpectralDecomposition& a,
                            const SpectralDecomposition& b, const SpectralDecomposition& c, const CMatrix& t,
                            const CMatrix& r);

enum class EvalPath {
  Assembled,  // first/second kind: operator obtained by transposing the trace pairing in closed form
  Probing,    // first/second kind: operator recovered entrywise from the functional on matrix units
};

CMatrix eval_representation(const HaagerupRep& rep, const SpectralDecomposition& a, const CMatrix& t,
                            const SpectralDecomposition& b, const CMatrix& r, const SpectralDecomposition& c,
                            EvalPath path = EvalPath::Assembled);

// The trace functional that defines first/second kind integrals:
//   first kind:  Q -> trace((iiint Psi dE2 R dE3 Q dE1) T)
//   second kind: Q -> trace((iiint Psi dE3 Q dE1 T dE2) R)
Complex pairing_functional(const HaagerupRep& rep, const SpectralDecomposition& a, const CMatrix& t,
                           const SpectralDecomposition& b, const CMatrix& r, const SpectralDecomposition& c,
                           const CMatrix& q);

struct RepNormCertificate {
  RepKind kind = RepKind::Projective;
  double value = 0;               // product of the factor norms (sum of products for projective)
  double factor_norms[3] = {0, 0, 0};
};

// Norms of the factors, with sups taken over the three spectra.
RepNormCertificate rep_norm(const HaagerupRep& rep, const RVector& s1, const RVector& s2, const RVector& s3);

struct S1Certificate {
  std::string norm;  // which norm of W was measured ("S1" or "op")
  double lhs = 0;
  double bound = 0;
  double rep_norm = 0;
  bool satisfied = false;
};

// haagerup: ||W|| <= N ||T|| ||R||; first kind: ||W||_S1 <= N ||T||_S1 ||R||;
// second kind: ||W||_S1 <= N ||T|| ||R||_S1; projective: the smaller of the two S1 bounds.
S1Certificate s1_certificate(const HaagerupRep& rep, const SpectralDecomposition& a, const CMatrix& t,
                             const SpectralDecomposition& b, const CMatrix& r, const SpectralDecomposition& c);
// Same, for an already evaluated W.
S1Certificate s1_certificate(const HaagerupRep& rep, const CMatrix& w, const SpectralDecomposition& a,
                             const CMatrix& t, const SpectralDecomposition& b, const CMatrix& r,
                             const SpectralDecomposition& c);

struct HolderCheck {
  double p = 1, q = 1, r = 1;
  double lhs = 0, bound = 0;
  bool satisfied = false;
};

// ||W||_{S_r} <= N ||T||_{S_p} ||R||_{S_q}, 1/r = 1/p + 1/q, projective reps only.
HolderCheck holder_check(const HaagerupRep& rep, const SpectralDecomposition& a, const CMatrix& t,
                         const SpectralDecomposition& b, const CMatrix& r, const SpectralDecomposition& c, double p,
                         double q);

}  // namespace opintegral
