#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "opintegral/besov.hpp"
#include "opintegral/toi.hpp"

namespace opintegral {

// Divided difference of phi in one variable:
//   axis 1: (x1, x2, y) -> (phi(x1, y) - phi(x2, y)) / (x1 - x2)
//   axis 2: (x, y1, y2) -> (phi(x, y1) - phi(x, y2)) / (y1 - y2)
// with the partial derivative at the midpoint when the two arguments are
// within coincidence_tol.
class DividedDifference {
 public:
  DividedDifference(Function2D phi, int axis, double coincidence_tol = 0.0);

  Complex operator()(double a, double b, double c) const;
  TripleFunction as_triple() const;

  int axis() const { return axis_; }
  double coincidence_tol() const { return tol_; }
  const Function2D& source() const { return phi_; }
  const Function2D& partial() const { return dphi_; }

 private:
  Function2D phi_, dphi_;
  int axis_;
  double tol_;
};

DividedDifference divided_difference(const Function2D& phi, int axis, double coincidence_tol = 0.0);

// 1e-7 times the diameter of the union of the given spectra.
double default_coincidence_tol(const std::vector<const RVector*>& spectra);

// Exact projective representation of the divided difference of a polynomial
// sum a_jk x^j y^k, one term per (j, k, l):
//   axis 1: a_jk x1^l x2^(j-1-l) y^k,   axis 2: a_jk x^j y1^l y2^(k-1-l).
HaagerupRep polynomial_projective_rep(const CMatrix& a, int axis);

inline double sinc(double t) { return std::abs(t) < 1e-8 ? 1.0 - t * t / 6.0 : std::sin(t) / t; }

struct SincOptions {
  int J = 256;                         // lattice indices |j| <= J
  double radius = kPi;                 // spectra assumed inside [-radius, radius]
  std::optional<double> sup_norm;      // ||phi||_inf; estimated from samples when absent
  bool check_bandlimit = true;
};

// Lattice-sampling representation of the divided difference of a function
// band-limited to radius sigma: step h = pi / sigma,
//   axis 1 (first kind):  alpha_j(x1) = sinc(sigma x1 - j pi), beta_k(x2) = sinc(sigma x2 - k pi),
//                         gamma_jk(y) = (phi(jh, y) - phi(kh, y)) / ((j - k) h), d/dx phi(jh, y) for j = k;
//   axis 2 (second kind): the same with the roles of the variables exchanged.
struct SincRep {
  double sigma = 0;
  int J = 0;
  int axis = 1;
  double radius = 0;
  double sup_norm = 0;
  double tail_bound = 0;  // 14 sigma ||phi|| / (pi^2 (J - sigma R / pi)), infinite when J is too small
  HaagerupRep rep;
};

SincRep sinc_representation(const Function2D& phi, int axis, double sigma, const SincOptions& opt = {});

// One sinc representation per nonzero Littlewood-Paley band, sigma_n = 2^(n+1).
struct BesovRep {
  int axis = 1;
  std::vector<int> band_index;
  std::vector<SincRep> bands;
  double besov_norm = 0;     // B^1_{inf,1} norm of phi on the band range
  double tail_bound = 0;     // sum of per-band tail bounds
  std::vector<std::string> notes;

  Complex value(double a, double b, double c) const;
  // Sum of per-band representation norms over the given spectra.
  double aggregate_bound(const RVector& s1, const RVector& s2, const RVector& s3) const;
};

BesovRep besov_representation(const Function2D& phi, int axis, const PeriodicGrid& grid,
                              std::optional<BandRange> range = std::nullopt, const SincOptions& opt = {});

}  // namespace opintegral
