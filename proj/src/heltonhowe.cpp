#include "opintegral/heltonhowe.hpp"

#include <sstream>

#include "opintegral/doi.hpp"

namespace opintegral {

TruncatedModel truncated_model(const Symbol& f, int n) {
  HermitianOperator a = HermitianOperator::symmetrized(toeplitz_matrix(f.real_part(), n));
  HermitianOperator b = HermitianOperator::symmetrized(toeplitz_matrix(f.imag_part(), n));
  SpectralDecomposition da = decompose(a);
  SpectralDecomposition db = decompose(b);
  return TruncatedModel{n, f, std::move(a), std::move(b), std::move(da), std::move(db)};
}

namespace {

int total_degree(const Function2D& f) {
  const auto p = f.as_polynomial();
  if (!p) return -1;
  int d = 0;
  for (int j = 0; j < p->rows(); ++j)
    for (int k = 0; k < p->cols(); ++k)
      if ((*p)(j, k) != 0.0) d = std::max(d, j + k);
  return d;
}

Complex corner_trace_only(const CMatrix& p, const CMatrix& q, int m) {
  Complex acc = 0.0;
  for (int k = 0; k < m; ++k)
    acc += p.row(k).transpose().cwiseProduct(q.col(k)).sum() - q.row(k).transpose().cwiseProduct(p.col(k)).sum();
  return Complex(0.0, 1.0) * acc;
}

CornerTrace corner_trace(const CMatrix& p, const CMatrix& q, int m) {
  const CMatrix rows = Complex(0.0, 1.0) * (p.topRows(m) * q - q.topRows(m) * p);
  const Complex tr = rows.leftCols(m).trace();
  CornerTrace c;
  c.value = tr.real();
  c.imag_residue = tr.imag();
  c.scale = op_norm(rows);
  c.imag_ok = std::abs(c.imag_residue) <= 1e-10 * std::max(c.scale, 1e-300);
  if (!c.imag_ok) {
    std::ostringstream os;
    os << "corner trace has imaginary part " << c.imag_residue << " (scale " << c.scale << ")";
    c.warnings.push_back(os.str());
  }
  return c;
}

RVector midpoints(double lo, double hi, int res) {
  RVector v(res);
  for (int i = 0; i < res; ++i) v(i) = lo + (i + 0.5) * (hi - lo) / res;
  return v;
}

// The four partial-derivative tables of phi and psi on the midpoint grid.
struct Gradients {
  CMatrix px, py, qx, qy;
};

Gradients gradients(const Function2D& phi, const Function2D& psi, const RVector& xs, const RVector& ys) {
  return {phi.partial(1).eval_grid(xs, ys), phi.partial(2).eval_grid(xs, ys), psi.partial(1).eval_grid(xs, ys),
          psi.partial(2).eval_grid(xs, ys)};
}

// sum over cells of (phi_x psi_y - phi_y psi_x) g, scaled by the cell area / 2pi.
Complex jacobian_quadrature(const Function2D& phi, const Function2D& psi, const Box& box, int res,
                            const Eigen::MatrixXi* g) {
  if (res < 1) throw ValidationError("quadrature resolution must be positive");
  const RVector xs = midpoints(box.x0, box.x1, res);
  const RVector ys = midpoints(box.y0, box.y1, res);
  const Function2D px = phi.partial(1), py = phi.partial(2), qx = psi.partial(1), qy = psi.partial(2);
  constexpr int kBlock = 128;
  Complex total = 0.0;
  for (int j0 = 0; j0 < res; j0 += kBlock) {
    const int nb = std::min(kBlock, res - j0);
    const RVector yb = ys.segment(j0, nb);
    CMatrix jac = px.eval_grid(xs, yb).cwiseProduct(qy.eval_grid(xs, yb)) -
                  py.eval_grid(xs, yb).cwiseProduct(qx.eval_grid(xs, yb));
    if (g) jac = jac.cwiseProduct(g->middleCols(j0, nb).cast<double>().cast<Complex>());
    total += jac.sum();
  }
  const double cell = (box.x1 - box.x0) * (box.y1 - box.y0) / (static_cast<double>(res) * res);
  return total * cell / (2.0 * kPi);
}

}  // namespace

CornerTrace lhs_corner_trace(const TruncatedModel& model, const Function2D& phi, const Function2D& psi, int m) {
  if (m < 1 || m > model.n) throw ValidationError("corner size must be in [1, N]");
  const CMatrix p = funcalc(phi, model.da, model.db);
  const CMatrix q = funcalc(psi, model.da, model.db);
  CornerTrace c = corner_trace(p, q, m);
  const int dp = total_degree(phi), dq = total_degree(psi);
  if (dp >= 0 && dq >= 0 && m > model.n - (dp + dq) * model.symbol.degree()) {
    std::ostringstream os;
    os << "corner size " << m << " is within the combined degree of the bottom edge; exactness not guaranteed";
    c.warnings.push_back(os.str());
  }
  return c;
}

Complex rhs_integral(const Function2D& phi, const Function2D& psi, const PrincipalFunction& g, int res) {
  const Box box = g.support_box();
  const Eigen::MatrixXi raster = g.rasterize(box, res);
  return jacobian_quadrature(phi, psi, box, res, &raster);
}

Complex rhs_integral_flat(const Function2D& phi, const Function2D& psi, const Box& box, int res) {
  return jacobian_quadrature(phi, psi, box, res, nullptr);
}

TraceReport trace_formula_experiment(const TraceExperimentConfig& cfg) {
  const int m = cfg.m > 0 ? cfg.m : cfg.n / 4;
  if (m < 1 || 2 * m > cfg.n) throw ValidationError("trace experiment: need 1 <= M <= N/2");
  TraceReport r;
  r.n = cfg.n;
  r.m = m;

  Complex rhs;
  if (cfg.flat_g) {
    r.g_mode = "flat";
    rhs = rhs_integral_flat(cfg.phi, cfg.psi, cfg.flat_box, cfg.resolution);
  } else {
    r.g_mode = "winding";
    rhs = rhs_integral(cfg.phi, cfg.psi, PrincipalFunction(cfg.symbol), cfg.resolution);
  }
  r.rhs = rhs.real();
  r.rhs_imag = rhs.imag();

  auto errors = [&](double lhs, double& abs_err, double& rel_err) {
    abs_err = std::abs(lhs - r.rhs);
    rel_err = r.rhs != 0.0 ? abs_err / std::abs(r.rhs) : abs_err;
  };

  {
    const TruncatedModel model = truncated_model(cfg.symbol, cfg.n);
    const CornerTrace c = lhs_corner_trace(model, cfg.phi, cfg.psi, m);
    r.lhs = c.value;
    r.lhs_imag = c.imag_residue;
    r.warnings = c.warnings;
    errors(r.lhs, r.abs_err, r.rel_err);
  }

  for (int n : cfg.table_sizes) {
    const TruncatedModel model = truncated_model(cfg.symbol, n);
    const CMatrix p = funcalc(cfg.phi, model.da, model.db);
    const CMatrix q = funcalc(cfg.psi, model.da, model.db);
    for (int d : cfg.table_divisors) {
      ConvergenceCell cell;
      cell.n = n;
      cell.m = n / d;
      if (cell.m < 1) continue;
      cell.lhs = corner_trace_only(p, q, cell.m).real();
      errors(cell.lhs, cell.abs_err, cell.rel_err);
      r.table.push_back(cell);
    }
  }
  return r;
}

BandAdditivity band_additivity(const TraceExperimentConfig& cfg, const PeriodicGrid& grid,
                               std::optional<BandRange> range, int band_resolution) {
  const int m = cfg.m > 0 ? cfg.m : cfg.n / 4;
  const LPDecomposition lp_phi = lp_decompose(SampledFunction::sample(cfg.phi, grid), range);
  const LPDecomposition lp_psi = lp_decompose(SampledFunction::sample(cfg.psi, grid), range);

  auto nonzero = [](const LPDecomposition& lp, std::vector<int>& idx, std::vector<Function2D>& fs) {
    const double top = *std::max_element(lp.sup_norms.begin(), lp.sup_norms.end());
    for (int n = lp.range.lo; n <= lp.range.hi; ++n)
      if (lp.sup_norms[n - lp.range.lo] > 1e-15 * top) {
        idx.push_back(n);
        fs.push_back(Function2D::sampled(lp.grid, lp.band(n)));
      }
  };
  BandAdditivity out;
  std::vector<Function2D> phis, psis;
  nonzero(lp_phi, out.phi_bands, phis);
  nonzero(lp_psi, out.psi_bands, psis);

  const TruncatedModel model = truncated_model(cfg.symbol, cfg.n);
  std::vector<CMatrix> pm, qm;
  for (const auto& f : phis) pm.push_back(funcalc(f, model.da, model.db));
  for (const auto& f : psis) qm.push_back(funcalc(f, model.da, model.db));

  const Box box = cfg.flat_g ? cfg.flat_box : PrincipalFunction(cfg.symbol).support_box();
  std::optional<Eigen::MatrixXi> raster;
  if (!cfg.flat_g) raster = PrincipalFunction(cfg.symbol).rasterize(box, band_resolution);
  const RVector xs = midpoints(box.x0, box.x1, band_resolution);
  const RVector ys = midpoints(box.y0, box.y1, band_resolution);
  const double cell = (box.x1 - box.x0) * (box.y1 - box.y0) / (static_cast<double>(band_resolution) * band_resolution);
  const CMatrix weight = raster ? CMatrix(raster->cast<double>().cast<Complex>())
                                : CMatrix(CMatrix::Ones(band_resolution, band_resolution));
  std::vector<Gradients> gp, gq;
  const Function2D zero = Function2D::polynomial(CMatrix::Zero(1, 1));
  for (const auto& f : phis) gp.push_back(gradients(f, zero, xs, ys));
  for (const auto& f : psis) gq.push_back(gradients(zero, f, xs, ys));

  out.lhs_parts = RMatrix::Zero(phis.size(), psis.size());
  out.rhs_parts = RMatrix::Zero(phis.size(), psis.size());
  for (std::size_t a = 0; a < phis.size(); ++a)
    for (std::size_t b = 0; b < psis.size(); ++b) {
      out.lhs_parts(a, b) = corner_trace_only(pm[a], qm[b], m).real();
      const CMatrix jac = gp[a].px.cwiseProduct(gq[b].qy) - gp[a].py.cwiseProduct(gq[b].qx);
      out.rhs_parts(a, b) = (jac.cwiseProduct(weight).sum() * cell / (2.0 * kPi)).real();
    }
  out.lhs_sum = out.lhs_parts.sum();
  out.rhs_sum = out.rhs_parts.sum();

  const CMatrix p = funcalc(cfg.phi, model.da, model.db);
  const CMatrix q = funcalc(cfg.psi, model.da, model.db);
  out.lhs_total = corner_trace_only(p, q, m).real();
  out.rhs_total = (jacobian_quadrature(cfg.phi, cfg.psi, box, band_resolution, raster ? &*raster : nullptr)).real();
  out.lhs_defect = std::abs(out.lhs_sum - out.lhs_total);
  out.rhs_defect = std::abs(out.rhs_sum - out.rhs_total);
  return out;
}

}  // namespace opintegral
