#pragma once

#include "opintegral/types.hpp"

namespace opintegral {

// Uniform periodic grid on [-L/2, L/2)^d with `points` samples per axis.
struct PeriodicGrid {
  int dim = 1;
  double period = 64.0 * kPi;
  int points = 4096;

  double spacing() const { return period / points; }
  double coord(int k) const { return -period / 2.0 + k * spacing(); }
  // Angular frequency of DFT bin m (m taken in [-N/2, N/2)).
  double frequency(int m) const { return 2.0 * kPi * m / period; }
  double nyquist() const { return kPi * points / period; }
  int signed_bin(int m) const { return m < points / 2 ? m : m - points; }

  void validate() const;
};

// Unnormalized DFTs (FFTW sign conventions: forward uses e^{-i}).
// Plans are created with FFTW_ESTIMATE so results do not depend on timing.
CVector fft(const CVector& in, bool forward);
// Square 2D transform of a column-major matrix.
CMatrix fft2(const CMatrix& in, bool forward);

}  // namespace opintegral
