#include "opintegral/divdiff.hpp"

#include <limits>
#include <memory>
#include <mutex>
#include <sstream>

namespace opintegral {

DividedDifference::DividedDifference(Function2D phi, int axis, double coincidence_tol)
    : phi_(std::move(phi)), dphi_(phi_.partial(axis)), axis_(axis), tol_(coincidence_tol) {
  if (axis != 1 && axis != 2) throw ValidationError("divided difference axis must be 1 or 2");
  if (!(coincidence_tol >= 0.0)) throw ValidationError("coincidence tolerance must be non-negative");
}

Complex DividedDifference::operator()(double a, double b, double c) const {
  if (axis_ == 1) {
    // (x1, x2, y)
    if (std::abs(a - b) <= tol_) return dphi_(0.5 * (a + b), c);
    return (phi_(a, c) - phi_(b, c)) / (a - b);
  }
  // (x, y1, y2)
  if (std::abs(b - c) <= tol_) return dphi_(a, 0.5 * (b + c));
  return (phi_(a, b) - phi_(a, c)) / (b - c);
}

TripleFunction DividedDifference::as_triple() const {
  return [dd = *this](double a, double b, double c) { return dd(a, b, c); };
}

DividedDifference divided_difference(const Function2D& phi, int axis, double coincidence_tol) {
  return DividedDifference(phi, axis, coincidence_tol);
}

double default_coincidence_tol(const std::vector<const RVector*>& spectra) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const RVector* s : spectra) {
    if (s->size() == 0) continue;
    lo = std::min(lo, s->minCoeff());
    hi = std::max(hi, s->maxCoeff());
  }
  return hi > lo ? 1e-7 * (hi - lo) : 0.0;
}

namespace {

// Monomials coef_n x^power_n.
FactorFamily monomials(std::vector<Complex> coef, std::vector<int> power) {
  FactorFamily f;
  f.count = static_cast<int>(coef.size());
  f.eval = [coef = std::move(coef), power = std::move(power)](const RVector& xs) {
    CMatrix m(static_cast<Eigen::Index>(coef.size()), xs.size());
    for (std::size_t n = 0; n < coef.size(); ++n)
      for (Eigen::Index i = 0; i < xs.size(); ++i) {
        double p = 1.0;
        for (int e = 0; e < power[n]; ++e) p *= xs(i);
        m(static_cast<Eigen::Index>(n), i) = coef[n] * p;
      }
    return m;
  };
  return f;
}

FactorFamily sinc_family(double sigma, int J) {
  FactorFamily f;
  f.count = 2 * J + 1;
  f.eval = [sigma, J](const RVector& xs) {
    CMatrix m(2 * J + 1, xs.size());
    for (Eigen::Index i = 0; i < xs.size(); ++i)
      for (int j = -J; j <= J; ++j) m(j + J, i) = sinc(sigma * xs(i) - j * kPi);
    return m;
  };
  return f;
}

// Lattice samples of phi and of its partial along `axis`, as functions of
// the other variable. Rows index the lattice; the last query is cached
// because eval_representation asks for the same points once per slice.
class LatticeSamples {
 public:
  LatticeSamples(const Function2D& phi, int axis, const RVector& lattice) {
    const Function2D d = phi.partial(axis);
    if (axis == 1) {
      value_ = phi.fixed_x_evaluator(lattice);
      deriv_ = d.fixed_x_evaluator(lattice);
      transpose_ = false;
    } else {
      value_ = phi.fixed_y_evaluator(lattice);
      deriv_ = d.fixed_y_evaluator(lattice);
      transpose_ = true;
    }
  }

  // (lattice x pts) tables of phi and its partial.
  std::pair<CMatrix, CMatrix> at(const RVector& pts) const {
    std::lock_guard<std::mutex> lock(mu_);
    if (cached_pts_.size() != pts.size() || cached_pts_ != pts) {
      cached_pts_ = pts;
      cached_v_ = transpose_ ? CMatrix(value_(pts).transpose()) : value_(pts);
      cached_d_ = transpose_ ? CMatrix(deriv_(pts).transpose()) : deriv_(pts);
    }
    return {cached_v_, cached_d_};
  }

 private:
  std::function<CMatrix(const RVector&)> value_, deriv_;
  bool transpose_ = false;
  mutable std::mutex mu_;
  mutable RVector cached_pts_;
  mutable CMatrix cached_v_, cached_d_;
};

// G(j, k) = (v_j - v_k) / ((j - k) h), G(j, j) = d_j for one point.
CMatrix sample_matrix(const CVector& v, const CVector& d, double h, int J) {
  const int n = 2 * J + 1;
  CMatrix g(n, n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) g(j, k) = j == k ? d(j) : (v(j) - v(k)) / ((j - k) * h);
  return g;
}

double estimate_sup(const Function2D& phi, int axis, const RVector& lattice, double radius) {
  if (const auto* s = std::get_if<SampledData>(&phi.variant())) return max_abs_entry(s->values);
  RVector other(129);
  for (int i = 0; i < other.size(); ++i) other(i) = -radius + 2.0 * radius * i / (other.size() - 1);
  const CMatrix m = axis == 1 ? phi.eval_grid(lattice, other) : phi.eval_grid(other, lattice);
  return max_abs_entry(m);
}

void require_bandlimited(const Function2D& phi, double sigma) {
  SampledFunction f;
  if (const auto* s = std::get_if<SampledData>(&phi.variant())) {
    f.grid = s->grid;
    f.values = s->values;
  } else {
    PeriodicGrid g{2, 64.0 * kPi, 64};
    while (g.nyquist() < 4.0 * sigma) g.points *= 2;  // headroom so content just above sigma is not aliased below it
    if (g.points > 2048) {
      std::ostringstream os;
      os << "band-limit check at radius " << sigma << " would need " << g.points
         << " points per axis; sample phi on a grid first or disable the check";
      throw ValidationError(os.str());
    }
    f = SampledFunction::sample(phi, g);
  }
  const BandlimitResult r = bandlimit_check(f, sigma);
  if (!r.band_limited) {
    std::ostringstream os;
    os << "function is not band-limited to radius " << sigma << ": leakage mass " << r.leakage;
    throw ValidationError(os.str());
  }
}

}  // namespace

HaagerupRep polynomial_projective_rep(const CMatrix& a, int axis) {
  if (axis != 1 && axis != 2) throw ValidationError("divided difference axis must be 1 or 2");
  std::vector<Complex> c1;
  std::vector<int> p1, p2, p3;
  for (int j = 0; j < a.rows(); ++j)
    for (int k = 0; k < a.cols(); ++k) {
      if (a(j, k) == 0.0) continue;
      const int inner = axis == 1 ? j : k;
      for (int l = 0; l < inner; ++l) {
        c1.push_back(a(j, k));
        if (axis == 1) {
          p1.push_back(l);
          p2.push_back(j - 1 - l);
          p3.push_back(k);
        } else {
          p1.push_back(j);
          p2.push_back(l);
          p3.push_back(k - 1 - l);
        }
      }
    }
  const std::vector<Complex> ones(c1.size(), 1.0);
  HaagerupRep r = make_projective(monomials(c1, p1), monomials(ones, p2), monomials(ones, p3));
  r.description = axis == 1 ? "polynomial divided difference in x" : "polynomial divided difference in y";
  return r;
}

SincRep sinc_representation(const Function2D& phi, int axis, double sigma, const SincOptions& opt) {
  if (axis != 1 && axis != 2) throw ValidationError("divided difference axis must be 1 or 2");
  if (!(sigma > 0.0)) throw ValidationError("sinc representation: sigma must be positive");
  if (opt.J < 1) throw ValidationError("sinc representation: J must be at least 1");
  if (opt.check_bandlimit) require_bandlimited(phi, sigma);

  const int J = opt.J;
  const double h = kPi / sigma;
  RVector lattice(2 * J + 1);
  for (int j = -J; j <= J; ++j) lattice(j + J) = j * h;

  SincRep s;
  s.sigma = sigma;
  s.J = J;
  s.axis = axis;
  s.radius = opt.radius;
  s.sup_norm = opt.sup_norm ? *opt.sup_norm : estimate_sup(phi, axis, lattice, opt.radius);
  const double margin = J - sigma * opt.radius / kPi;
  s.tail_bound = margin > 0.0 ? 14.0 * sigma * s.sup_norm / (kPi * kPi * margin)
                              : std::numeric_limits<double>::infinity();

  auto samples = std::make_shared<LatticeSamples>(phi, axis, lattice);
  MatrixFactorFamily g;
  g.rows = g.cols = 2 * J + 1;
  g.at = [samples, h, J](double x) {
    const auto [v, d] = samples->at(RVector::Constant(1, x));
    return sample_matrix(v.col(0), d.col(0), h, J);
  };
  // The sample matrix is symmetric, so row and column slices coincide.
  auto slice = [samples, h, J](int j, const RVector& pts) {
    const auto [v, d] = samples->at(pts);
    CMatrix out(2 * J + 1, pts.size());
    for (int k = 0; k < 2 * J + 1; ++k)
      out.row(k) = k == j ? CMatrix(d.row(j)) : CMatrix((v.row(j) - v.row(k)) / ((j - k) * h));
    return out;
  };
  g.row_slice = slice;
  g.col_slice = slice;

  if (axis == 1) {
    s.rep = make_first_kind(sinc_family(sigma, J), sinc_family(sigma, J), std::move(g));
    s.rep.description = "sinc lattice representation, first kind";
  } else {
    s.rep = make_second_kind(std::move(g), sinc_family(sigma, J), sinc_family(sigma, J));
    s.rep.description = "sinc lattice representation, second kind";
  }
  s.rep.tail_bound = s.tail_bound;
  return s;
}

Complex BesovRep::value(double a, double b, double c) const {
  Complex acc = 0.0;
  for (const SincRep& s : bands) acc += s.rep.value(a, b, c);
  return acc;
}

double BesovRep::aggregate_bound(const RVector& s1, const RVector& s2, const RVector& s3) const {
  double acc = 0.0;
  for (const SincRep& s : bands) acc += rep_norm(s.rep, s1, s2, s3).value;
  return acc;
}

BesovRep besov_representation(const Function2D& phi, int axis, const PeriodicGrid& grid,
                              std::optional<BandRange> range, const SincOptions& opt) {
  BesovRep out;
  out.axis = axis;
  if (phi.as_polynomial()) {
    out.notes.push_back("polynomial: every band is zero, use the exact polynomial representation");
    return out;
  }
  const SampledFunction f = SampledFunction::sample(phi, grid);
  const LPDecomposition lp = lp_decompose(f, range);
  out.besov_norm = besov_norm(f, 1, kInf, 1, lp.range).value;
  for (const std::string& w : lp.warnings) out.notes.push_back(w);
  const double scale = std::max(lp.mean, *std::max_element(lp.sup_norms.begin(), lp.sup_norms.end()));
  for (int n = lp.range.lo; n <= lp.range.hi; ++n) {
    const int idx = n - lp.range.lo;
    if (lp.sup_norms[idx] <= 1e-15 * scale) continue;
    SincOptions o = opt;
    o.check_bandlimit = false;  // band n lives in the annulus up to 2^(n+1) by construction
    o.sup_norm = lp.sup_norms[idx];
    out.band_index.push_back(n);
    out.bands.push_back(sinc_representation(Function2D::sampled(grid, lp.bands[idx]), axis, std::ldexp(1.0, n + 1), o));
    out.tail_bound += out.bands.back().tail_bound;
  }
  return out;
}

}  // namespace opintegral
