#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "opintegral/fft.hpp"
#include "opintegral/function.hpp"

namespace opintegral {

// Smooth dyadic window: zero outside [1/2, 2] and w(s) + w(s/2) = 1 on [1, 2].
double window_eval(double s);

// Samples on a periodic grid; a column vector for d = 1, N x N for d = 2.
struct SampledFunction {
  PeriodicGrid grid;
  CMatrix values;

  static SampledFunction from_1d(const PeriodicGrid& g, const CVector& v);
  static SampledFunction sample(const Function2D& f, const PeriodicGrid& g);
  void validate() const;
};

struct BandRange {
  int lo = -10;
  int hi = 10;
};

// [-10, 10] clipped so that every band stays below the grid Nyquist frequency.
BandRange default_band_range(const PeriodicGrid& g);

struct LPDecomposition {
  PeriodicGrid grid;
  BandRange range;
  std::vector<CMatrix> bands;     // bands[n - range.lo]
  std::vector<double> sup_norms;  // grid sup of each band
  double mean = 0.0;              // magnitude of the zero-frequency coefficient
  double uncovered_fraction = 0;  // spectral energy outside the covered annuli (relative)
  std::vector<std::string> warnings;

  const CMatrix& band(int n) const;
  int count() const { return static_cast<int>(bands.size()); }
};

// Throws ValidationError when 2^(hi+1) exceeds the grid Nyquist frequency.
LPDecomposition lp_decompose(const SampledFunction& f, std::optional<BandRange> range = std::nullopt);

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct BesovNorm {
  double s = 1, p = kInf, q = 1;
  double value = 0;
  BandRange range;
  std::vector<double> band_terms;  // 2^{ns} ||f_n||_p
  std::vector<std::string> warnings;
};

// Grid L^p norm (counting measure scaled by the cell volume; p = inf is the max).
double grid_lp_norm(const CMatrix& values, const PeriodicGrid& g, double p);

BesovNorm besov_norm(const SampledFunction& f, double s = 1, double p = kInf, double q = 1,
                     std::optional<BandRange> range = std::nullopt);
// Polynomials have norm zero modulo polynomials; everything else is sampled
// on `grid` first.
BesovNorm besov_norm(const Function2D& f, const PeriodicGrid& grid, double s = 1, double p = kInf, double q = 1,
                     std::optional<BandRange> range = std::nullopt);

struct BandlimitResult {
  bool band_limited = false;
  double leakage = 0;  // spectral energy outside radius sigma, relative to total
};

BandlimitResult bandlimit_check(const SampledFunction& f, double sigma, double tol = 1e-9);

}  // namespace opintegral
