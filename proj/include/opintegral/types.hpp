#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace opintegral {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;

// Bad input: malformed files, out-of-range parameters, failed preconditions.
// The CLI maps this to exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation finished but missed a numerical tolerance it is required
// to meet. The CLI maps this to exit code 2.
class ToleranceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Largest absolute entry; used as a scale for relative tolerances.
inline double max_abs_entry(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline CMatrix commutator(const CMatrix& x, const CMatrix& y) { return x * y - y * x; }

}  // namespace opintegral
