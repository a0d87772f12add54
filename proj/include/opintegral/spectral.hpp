#pragma once

#include <limits>
#include <vector>

#include "opintegral/types.hpp"

namespace opintegral {

/// A dense self-adjoint matrix. Construction validates the Hermitian
/// symmetry, so holding one of these is proof that the check ran.
class HermitianOperator {
 public:
  /// Throws ValidationError naming the worst (i, j) pair when
  /// |H_ij - conj(H_ji)| exceeds `rel_tol` times the largest entry.
  explicit HermitianOperator(CMatrix entries, double rel_tol = 1e-12);

  /// Wraps `entries` after symmetrizing; for matrices that are Hermitian by
  /// construction up to rounding (products, model matrices).
  static HermitianOperator symmetrized(const CMatrix& entries);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const CMatrix& matrix() const { return entries_; }

 private:
  struct Unchecked {};
  HermitianOperator(CMatrix entries, Unchecked) : entries_(std::move(entries)) {}
  CMatrix entries_;
};

/// Eigensystem of a Hermitian matrix with eigenvalues grouped into clusters.
struct SpectralDecomposition {
  RVector eigenvalues;   // ascending
  CMatrix eigenvectors;  // columns, unitary
  double cluster_tol = 0.0;
  std::vector<std::vector<int>> clusters;
  int sweeps = 0;  // Jacobi sweeps used

  int dim() const { return static_cast<int>(eigenvalues.size()); }
  /// U diag(f(lambda)) U*
  template <typename F>
  CMatrix apply(F&& f) const {
    CVector d(dim());
    for (int i = 0; i < dim(); ++i) d(i) = f(eigenvalues(i));
    return eigenvectors * d.asDiagonal() * eigenvectors.adjoint();
  }
  CMatrix reconstruct() const;
  double spectral_radius() const;
};

/// Cyclic Jacobi eigensolver. A negative `cluster_tol` selects the default
/// 1e-8 * ||H||.
SpectralDecomposition decompose(const HermitianOperator& h, double cluster_tol = -1.0);

/// Sum of u_i u_i* over the given cluster.
CMatrix spectral_projection(const SpectralDecomposition& dec, int cluster_index);

inline constexpr double kSchattenInf = std::numeric_limits<double>::infinity();

RVector singular_values(const CMatrix& m);

/// (sum sigma_i^p)^(1/p); p = kSchattenInf gives the operator norm.
double schatten_norm(const CMatrix& m, double p);

inline double trace_norm(const CMatrix& m) { return schatten_norm(m, 1.0); }
inline double op_norm(const CMatrix& m) { return schatten_norm(m, kSchattenInf); }

}  // namespace opintegral
