#pragma once

#include <map>
#include <optional>
#include <vector>

#include "opintegral/types.hpp"

namespace opintegral {

// Trigonometric polynomial on the circle, f(e^{i theta}) = sum_k c_k e^{ik theta}.
class Symbol {
 public:
  Symbol() = default;
  // Coefficients for |k| <= degree; missing ones are zero.
  explicit Symbol(std::map<int, Complex> coeffs);

  static Symbol monomial(int k, Complex c = 1.0);
  static Symbol cos_theta();
  static Symbol sin_theta();

  int degree() const { return degree_; }
  Complex coeff(int k) const;
  Complex operator()(double theta) const;
  bool is_real(double tol = 1e-14) const;

  Symbol conj() const;       // conj(f): c'_k = conj(c_{-k})
  Symbol real_part() const;  // (f + conj f) / 2
  Symbol imag_part() const;  // (f - conj f) / (2i)
  Symbol operator+(const Symbol& o) const;
  Symbol operator*(const Symbol& o) const;
  Symbol scaled(Complex s) const;

  const std::map<int, Complex>& coeffs() const { return c_; }

 private:
  std::map<int, Complex> c_;
  int degree_ = 0;
};

// (T_f)_{jk} = c_{j-k}, 0 <= j, k < N. Requires N > degree.
CMatrix toeplitz_matrix(const Symbol& f, int n);
// (H_f)_{jk} = c_{-(j+k+1)}: the index convention under which
// [T_f, T_g] = H*_{conj g} H_f - H*_{conj f} H_g holds on truncation windows.
CMatrix hankel_matrix(const Symbol& f, int n);

struct HankelIdentityCheck {
  double residual = 0;  // max entry difference on the top-left M x M window
  double scale = 0;     // max entry of the commutator there
};

// Requires N >= 2 (deg f + deg g) and M <= N - deg f - deg g.
HankelIdentityCheck verify_hankel_identity(const Symbol& f, const Symbol& g, int n, int m);

inline constexpr int kCurvePoints = 1 << 14;
inline constexpr double kCurveProximity = 1e-9;

// Winding number of theta -> f(e^{i theta}) - lambda by argument accumulation
// over kCurvePoints samples. ValidationError when lambda is within
// kCurveProximity of the sampled curve, ToleranceError when the accumulated
// angle is not within 1e-6 of an integer multiple of 2 pi.
int winding_number(const Symbol& f, Complex lambda);

struct Box {
  double x0 = -1, x1 = 1, y0 = -1, y1 = 1;
};

// g(x, y) = winding of the symbol curve around x + iy.
class PrincipalFunction {
 public:
  explicit PrincipalFunction(Symbol f);

  // nullopt when the point is on the curve.
  std::optional<int> operator()(double x, double y) const;
  // Bounding box of the curve; g vanishes outside it.
  Box support_box() const { return box_; }
  // Values at the midpoints of a res x res grid over `box` (row i = x index),
  // computed from signed crossings of horizontal scanlines with the curve.
  Eigen::MatrixXi rasterize(const Box& box, int res) const;
  const Symbol& symbol() const { return f_; }

 private:
  Symbol f_;
  std::vector<Complex> curve_;
  Box box_;
};

}  // namespace opintegral
