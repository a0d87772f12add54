#include "opintegral/besov.hpp"

#include <cmath>
#include <sstream>

namespace opintegral {

namespace {

double bump_q(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

// Smooth step from 0 at t <= 0 to 1 at t >= 1.
double smooth_step(double t) {
  const double a = bump_q(t);
  const double b = bump_q(1.0 - t);
  return a / (a + b);
}

// |xi| for every DFT bin, in the layout of the values matrix.
RMatrix frequency_magnitudes(const PeriodicGrid& g) {
  const int n = g.points;
  if (g.dim == 1) {
    RMatrix m(n, 1);
    for (int k = 0; k < n; ++k) m(k, 0) = std::abs(g.frequency(g.signed_bin(k)));
    return m;
  }
  RMatrix m(n, n);
  for (int j = 0; j < n; ++j) {
    const double b = g.frequency(g.signed_bin(j));
    for (int i = 0; i < n; ++i) m(i, j) = std::hypot(g.frequency(g.signed_bin(i)), b);
  }
  return m;
}

CMatrix forward(const SampledFunction& f) {
  if (f.grid.dim == 1) return fft(f.values.col(0), true);
  return fft2(f.values, true);
}

CMatrix inverse(const CMatrix& spec, const PeriodicGrid& g) {
  if (g.dim == 1) return fft(spec.col(0), false) / static_cast<double>(g.points);
  return fft2(spec, false) / (static_cast<double>(g.points) * g.points);
}

}  // namespace

double window_eval(double s) {
  if (!(s > 0.5) || !(s < 2.0)) return 0.0;
  if (s <= 1.0) return smooth_step(std::log2(s) + 1.0);
  return 1.0 - smooth_step(std::log2(s));
}

SampledFunction SampledFunction::from_1d(const PeriodicGrid& g, const CVector& v) {
  SampledFunction f{g, CMatrix(v)};
  f.grid.dim = 1;
  f.validate();
  return f;
}

SampledFunction SampledFunction::sample(const Function2D& f, const PeriodicGrid& g) {
  PeriodicGrid g2 = g;
  g2.dim = 2;
  return SampledFunction{g2, f.sample(g2)};
}

void SampledFunction::validate() const {
  grid.validate();
  const bool ok = grid.dim == 1 ? (values.rows() == grid.points && values.cols() == 1)
                                : (values.rows() == grid.points && values.cols() == grid.points);
  if (!ok) {
    std::ostringstream os;
    os << "sampled function: values are " << values.rows() << "x" << values.cols() << " but the grid has "
       << grid.points << " points per axis in dimension " << grid.dim;
    throw ValidationError(os.str());
  }
}

BandRange default_band_range(const PeriodicGrid& g) {
  BandRange r;
  while (r.hi > r.lo && std::ldexp(1.0, r.hi + 1) > g.nyquist()) --r.hi;
  return r;
}

const CMatrix& LPDecomposition::band(int n) const {
  if (n < range.lo || n > range.hi) {
    std::ostringstream os;
    os << "band " << n << " outside computed range [" << range.lo << ", " << range.hi << "]";
    throw ValidationError(os.str());
  }
  return bands[n - range.lo];
}

LPDecomposition lp_decompose(const SampledFunction& f, std::optional<BandRange> range) {
  f.validate();
  const PeriodicGrid& g = f.grid;
  const BandRange r = range.value_or(default_band_range(g));
  if (r.lo > r.hi) throw ValidationError("band range is empty");
  const double needed = std::ldexp(1.0, r.hi + 1);
  if (needed > g.nyquist()) {
    std::ostringstream os;
    os << "band " << r.hi << " reaches |xi| = " << needed << " beyond the grid Nyquist frequency " << g.nyquist()
       << "; need at least " << static_cast<long long>(std::ceil(needed * g.period / kPi))
       << " points per axis for period " << g.period;
    throw ValidationError(os.str());
  }

  const CMatrix spec = forward(f);
  const RMatrix mag = frequency_magnitudes(g);

  LPDecomposition d;
  d.grid = g;
  d.range = r;
  const double total_points = g.dim == 1 ? g.points : static_cast<double>(g.points) * g.points;
  d.mean = std::abs(spec(0, 0)) / total_points;

  RMatrix coverage = RMatrix::Zero(mag.rows(), mag.cols());
  for (int n = r.lo; n <= r.hi; ++n) {
    const double scale = std::ldexp(1.0, -n);
    CMatrix band_spec(spec.rows(), spec.cols());
    for (int j = 0; j < spec.cols(); ++j)
      for (int i = 0; i < spec.rows(); ++i) {
        const double w = window_eval(mag(i, j) * scale);
        coverage(i, j) += w;
        band_spec(i, j) = w * spec(i, j);
      }
    d.bands.push_back(inverse(band_spec, g));
    d.sup_norms.push_back(max_abs_entry(d.bands.back()));
  }

  double total = 0.0, missed = 0.0;
  for (int j = 0; j < spec.cols(); ++j)
    for (int i = 0; i < spec.rows(); ++i) {
      if (i == 0 && j == 0) continue;
      const double e = std::norm(spec(i, j));
      total += e;
      missed += e * (1.0 - coverage(i, j)) * (1.0 - coverage(i, j));
    }
  d.uncovered_fraction = total > 0.0 ? missed / total : 0.0;
  if (d.uncovered_fraction > 1e-12) {
    std::ostringstream os;
    os << "spectral energy fraction " << d.uncovered_fraction << " lies outside bands [" << r.lo << ", " << r.hi
       << "]";
    d.warnings.push_back(os.str());
  }
  return d;
}

double grid_lp_norm(const CMatrix& values, const PeriodicGrid& g, double p) {
  if (!(p >= 1.0)) throw ValidationError("L^p norm needs p >= 1");
  if (std::isinf(p)) return max_abs_entry(values);
  const double cell = std::pow(g.spacing(), g.dim);
  double acc = 0.0;
  for (int j = 0; j < values.cols(); ++j)
    for (int i = 0; i < values.rows(); ++i) acc += std::pow(std::abs(values(i, j)), p);
  return std::pow(acc * cell, 1.0 / p);
}

BesovNorm besov_norm(const SampledFunction& f, double s, double p, double q, std::optional<BandRange> range) {
  if (!(s > 0.0)) throw ValidationError("Besov smoothness s must be positive");
  if (!(p >= 1.0) || !(q >= 1.0)) throw ValidationError("Besov exponents p and q must lie in [1, inf]");
  const LPDecomposition d = lp_decompose(f, range);
  BesovNorm out;
  out.s = s;
  out.p = p;
  out.q = q;
  out.range = d.range;
  out.warnings = d.warnings;
  double acc = 0.0;
  for (int n = d.range.lo; n <= d.range.hi; ++n) {
    const double lp = std::isinf(p) ? d.sup_norms[n - d.range.lo] : grid_lp_norm(d.band(n), d.grid, p);
    const double term = std::pow(2.0, n * s) * lp;
    out.band_terms.push_back(term);
    // Ascending n, fixed order.
    if (std::isinf(q)) acc = std::max(acc, term);
    else acc += std::pow(term, q);
  }
  out.value = std::isinf(q) ? acc : std::pow(acc, 1.0 / q);
  return out;
}

BesovNorm besov_norm(const Function2D& f, const PeriodicGrid& grid, double s, double p, double q,
                     std::optional<BandRange> range) {
  if (f.as_polynomial()) {
    BesovNorm out;
    out.s = s;
    out.p = p;
    out.q = q;
    out.range = range.value_or(default_band_range(grid));
    out.band_terms.assign(out.range.hi - out.range.lo + 1, 0.0);
    out.warnings.push_back("polynomial input: norm is zero modulo polynomials");
    return out;
  }
  return besov_norm(SampledFunction::sample(f, grid), s, p, q, range);
}

BandlimitResult bandlimit_check(const SampledFunction& f, double sigma, double tol) {
  f.validate();
  if (!(sigma > 0.0)) throw ValidationError("band radius must be positive");
  if (f.grid.nyquist() < 2.0 * sigma) {
    std::ostringstream os;
    os << "band-limit check at radius " << sigma << " needs Nyquist >= " << 2.0 * sigma << ", grid has "
       << f.grid.nyquist();
    throw ValidationError(os.str());
  }
  const CMatrix spec = forward(f);
  const RMatrix mag = frequency_magnitudes(f.grid);
  const double edge = sigma * (1.0 + 1e-12);
  double total = 0.0, outside = 0.0;
  for (int j = 0; j < spec.cols(); ++j)
    for (int i = 0; i < spec.rows(); ++i) {
      const double e = std::norm(spec(i, j));
      total += e;
      if (mag(i, j) > edge) outside += e;
    }
  BandlimitResult r;
  r.leakage = total > 0.0 ? outside / total : 0.0;
  r.band_limited = r.leakage <= tol;
  return r;
}

}  // namespace opintegral
