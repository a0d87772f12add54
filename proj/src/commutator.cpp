#include "opintegral/commutator.hpp"

#include <cmath>
#include <sstream>

#include "opintegral/doi.hpp"
#include "opintegral/rng.hpp"

namespace opintegral {

namespace {

double smooth_step(double t) {
  auto q = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return q(t) / (q(t) + q(1.0 - t));
}

// 1 on [-r, r], 0 outside [-2r, 2r].
double cutoff(double t, double r) { return 1.0 - smooth_step((std::abs(t) - r) / r); }

CommutatorPath resolve(const Function2D& phi, CommutatorPath p) {
  if (p != CommutatorPath::Auto) return p;
  return phi.as_polynomial() ? CommutatorPath::Polynomial : CommutatorPath::Spectral;
}

std::string path_name(CommutatorPath p) {
  switch (p) {
    case CommutatorPath::Auto: return "auto";
    case CommutatorPath::Polynomial: return "polynomial";
    case CommutatorPath::Spectral: return "spectral";
    case CommutatorPath::Sinc: return "sinc";
  }
  return "?";
}

// The two triple integrals given [A,Q] and [B,Q].
CommutatorTerms terms_from_commutators(const Function2D& phi, const SpectralDecomposition& a,
                                       const SpectralDecomposition& b, const CMatrix& aq, const CMatrix& bq,
                                       const CommutatorOptions& opt) {
  const int n = a.dim();
  if (b.dim() != n) throw ValidationError("commutator: A and B must have the same dimension");
  const CMatrix id = CMatrix::Identity(n, n);
  const CommutatorPath path = resolve(phi, opt.path);
  CommutatorTerms t;
  t.path = path_name(path);
  switch (path) {
    case CommutatorPath::Polynomial: {
      const auto poly = phi.as_polynomial();
      if (!poly) throw ValidationError("commutator: polynomial path needs a polynomial function");
      const HaagerupRep r1 = polynomial_projective_rep(*poly, 1);
      const HaagerupRep r2 = polynomial_projective_rep(*poly, 2);
      t.w1 = eval_representation(r2, a, id, b, bq, b);
      t.w2 = eval_representation(r1, a, aq, a, id, b);
      t.certificates.push_back(s1_certificate(r2, t.w1, a, id, b, bq, b));
      t.certificates.push_back(s1_certificate(r1, t.w2, a, aq, a, id, b));
      break;
    }
    case CommutatorPath::Spectral: {
      const double tol = opt.coincidence_tol >= 0.0 ? opt.coincidence_tol
                                                    : default_coincidence_tol({&a.eigenvalues, &b.eigenvalues});
      t.w1 = triple_spectral_sum(DividedDifference(phi, 2, tol).as_triple(), a, b, b, id, bq);
      t.w2 = triple_spectral_sum(DividedDifference(phi, 1, tol).as_triple(), a, a, b, aq, id);
      break;
    }
    case CommutatorPath::Sinc: {
      if (!(opt.sigma > 0.0)) throw ValidationError("commutator: sinc path needs sigma > 0");
      SincOptions so;
      so.J = opt.J;
      so.radius = spectral_box_radius(a, b);
      const SincRep s1 = sinc_representation(phi, 1, opt.sigma, so);
      const SincRep s2 = sinc_representation(phi, 2, opt.sigma, so);
      t.w1 = eval_representation(s2.rep, a, id, b, bq, b);
      t.w2 = eval_representation(s1.rep, a, aq, a, id, b);
      t.certificates.push_back(s1_certificate(s2.rep, t.w1, a, id, b, bq, b));
      t.certificates.push_back(s1_certificate(s1.rep, t.w2, a, aq, a, id, b));
      t.tail_bound = s1.tail_bound + s2.tail_bound;
      break;
    }
    case CommutatorPath::Auto: break;
  }
  t.total = t.w1 + t.w2;
  return t;
}

double sup_on_spectra(const Function2D& phi, const SpectralDecomposition& a, const SpectralDecomposition& b) {
  return max_abs_entry(phi.eval_grid(a.eigenvalues, b.eigenvalues));
}

}  // namespace

double spectral_box_radius(const SpectralDecomposition& a, const SpectralDecomposition& b) {
  return std::max({a.spectral_radius(), b.spectral_radius(), 1e-12});
}

CommutatorTerms commutator_terms(const Function2D& phi, const SpectralDecomposition& a,
                                 const SpectralDecomposition& b, const CMatrix& q, const CommutatorOptions& opt) {
  const CMatrix am = a.reconstruct(), bm = b.reconstruct();
  if (q.rows() != a.dim() || q.cols() != a.dim()) throw ValidationError("commutator: Q has wrong shape");
  return terms_from_commutators(phi, a, b, commutator(am, q), commutator(bm, q), opt);
}

CMatrix commutator_via_toi(const Function2D& phi, const HermitianOperator& a, const HermitianOperator& b,
                           const CMatrix& q, const CommutatorOptions& opt) {
  if (q.rows() != a.dim() || q.cols() != a.dim()) throw ValidationError("commutator: Q has wrong shape");
  return terms_from_commutators(phi, decompose(a), decompose(b), commutator(a.matrix(), q),
                                commutator(b.matrix(), q), opt)
      .total;
}

double surrogate_besov_norm(const Function2D& phi, double radius) {
  const PeriodicGrid g{2, 8.0 * radius, 256};
  RVector xs(g.points);
  CVector c(g.points);
  for (int k = 0; k < g.points; ++k) {
    xs(k) = g.coord(k);
    c(k) = cutoff(xs(k), radius);
  }
  SampledFunction f{g, phi.eval_grid(xs, xs).cwiseProduct(c * c.transpose())};
  return besov_norm(f).value;
}

double surrogate_besov_norm_1d(const Function1D& fn, double radius) {
  const PeriodicGrid g{1, 8.0 * radius, 1024};
  CVector v(g.points);
  for (int k = 0; k < g.points; ++k) v(k) = fn(g.coord(k)) * cutoff(g.coord(k), radius);
  return besov_norm(SampledFunction::from_1d(g, v)).value;
}

CommutatorReport verify_theorem_41(const Function2D& phi, const HermitianOperator& a, const HermitianOperator& b,
                                   const CMatrix& q, const CommutatorOptions& opt) {
  const SpectralDecomposition da = decompose(a), db = decompose(b);
  const CMatrix aq = commutator(a.matrix(), q), bq = commutator(b.matrix(), q);
  const CommutatorTerms t = terms_from_commutators(phi, da, db, aq, bq, opt);
  const CMatrix f = funcalc(phi, da, db);
  const CMatrix direct = f * q - q * f;

  CommutatorReport r;
  r.path = t.path;
  r.certificates = t.certificates;
  r.lhs_s1 = trace_norm(direct);
  r.rhs_s1 = trace_norm(t.total);
  r.residual_s1 = trace_norm(t.total - direct);
  r.sup_norm = sup_on_spectra(phi, da, db);
  r.q_norm = op_norm(q);
  r.tolerance = 1e-10 * r.sup_norm * r.q_norm * a.dim();
  r.comm_aq_s1 = trace_norm(aq);
  r.comm_bq_s1 = trace_norm(bq);
  const double radius = spectral_box_radius(da, db);
  r.phi_besov = surrogate_besov_norm(phi, radius);
  r.norm_note = "Besov norm of phi times a smooth cutoff equal to 1 on the spectral box";
  const double denom = r.phi_besov * (r.comm_aq_s1 + r.comm_bq_s1);
  r.empirical_constant = denom > 0.0 ? r.lhs_s1 / denom : 0.0;
  return r;
}

FunctionCommutator commutator_of_functions(const Function2D& phi, const Function2D& psi, const HermitianOperator& a,
                                           const HermitianOperator& b, const CommutatorOptions& opt) {
  const SpectralDecomposition da = decompose(a), db = decompose(b);
  const int n = a.dim();
  const CMatrix ab = commutator(a.matrix(), b.matrix());
  const CMatrix zero = CMatrix::Zero(n, n);
  // [psi(A,B), A] and [psi(A,B), B] from [A,B] alone.
  const CMatrix psi_a = terms_from_commutators(psi, da, db, zero, -ab, opt).total;
  const CMatrix psi_b = terms_from_commutators(psi, da, db, ab, zero, opt).total;
  const CommutatorTerms t = terms_from_commutators(phi, da, db, -psi_a, -psi_b, opt);

  FunctionCommutator out;
  out.value = t.total;
  const CMatrix fp = funcalc(phi, da, db), fq = funcalc(psi, da, db);
  out.direct = fp * fq - fq * fp;

  CommutatorReport& r = out.report;
  r.path = t.path;
  r.certificates = t.certificates;
  r.lhs_s1 = trace_norm(out.direct);
  r.rhs_s1 = trace_norm(out.value);
  r.residual_s1 = trace_norm(out.value - out.direct);
  r.sup_norm = sup_on_spectra(phi, da, db);
  r.q_norm = op_norm(fq);
  r.tolerance = 1e-10 * r.sup_norm * r.q_norm * n;
  r.comm_ab_s1 = trace_norm(ab);
  const double radius = spectral_box_radius(da, db);
  r.phi_besov = surrogate_besov_norm(phi, radius);
  r.psi_besov = surrogate_besov_norm(psi, radius);
  r.norm_note = "Besov norms of phi and psi times a smooth cutoff equal to 1 on the spectral box";
  const double denom = r.phi_besov * r.psi_besov * r.comm_ab_s1;
  r.empirical_constant = denom > 0.0 ? r.lhs_s1 / denom : 0.0;
  return out;
}

double probe_problem1(const Function2D& phi, const Function2D& psi, const HermitianOperator& a,
                      const HermitianOperator& b) {
  const SpectralDecomposition da = decompose(a), db = decompose(b);
  const CMatrix prod = funcalc(Function2D::multiply(phi, psi), da, db);
  return trace_norm(prod - funcalc(phi, da, db) * funcalc(psi, da, db));
}

double probe_problem2(const Function2D& phi, const HermitianOperator& a, const HermitianOperator& b) {
  const SpectralDecomposition da = decompose(a), db = decompose(b);
  return trace_norm(funcalc(phi, da, db).adjoint() - funcalc(phi.conj(), da, db));
}

AlmostCommutingPair almost_commuting_pair(int n, int rank, double perturbation, std::uint64_t seed) {
  if (n < 1 || rank < 0) throw ValidationError("almost commuting pair: bad size or rank");
  Xorshift64Star rng(seed);
  const CMatrix h = random_hermitian(n, rng);
  const SpectralDecomposition dh = decompose(HermitianOperator::symmetrized(h));
  const double rho = std::max(dh.spectral_radius(), 1e-300);
  CMatrix a = h / rho;
  CVector d(n);
  for (int i = 0; i < n; ++i) d(i) = rng.uniform(-1.0, 1.0);
  CMatrix b = dh.eigenvectors * d.asDiagonal() * dh.eigenvectors.adjoint();
  for (int r = 0; r < rank; ++r) {
    CVector v = random_complex_gaussian(n, 1, rng);
    v /= v.norm();
    const double s = rng.uniform() < 0.5 ? -1.0 : 1.0;
    b += s * perturbation * v * v.adjoint();
  }
  b /= 1.0 + rank * perturbation;
  return {HermitianOperator::symmetrized(a), HermitianOperator::symmetrized(b)};
}

Function2D random_polynomial(int deg, std::uint64_t seed) {
  if (deg < 0) throw ValidationError("random polynomial: negative degree");
  Xorshift64Star rng(seed);
  CMatrix a = CMatrix::Zero(deg + 1, deg + 1);
  double fact = 1.0;
  for (int s = 0; s <= deg; ++s) {
    if (s > 0) fact *= s;
    for (int j = 0; j <= s; ++j) a(j, s - j) = rng.complex_normal() / fact;
  }
  return Function2D::polynomial(a);
}

TrialSuite run_trial_suite(std::uint64_t seed, int trials, int max_dim, int max_degree) {
  if (trials < 1 || max_dim < 4 || max_degree < 1) throw ValidationError("trial suite: bad parameters");
  TrialSuite suite;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(t));
    Xorshift64Star rng(s);
    TrialRecord rec;
    rec.dim = rng.uniform_int(4, max_dim);
    rec.degree = rng.uniform_int(1, max_degree);
    rec.rank = rng.uniform_int(1, 3);
    const AlmostCommutingPair pair = almost_commuting_pair(rec.dim, rec.rank, 0.3, derive_seed(s, 1));
    const Function2D phi = random_polynomial(rec.degree, derive_seed(s, 2));
    const Function2D psi = random_polynomial(rec.degree, derive_seed(s, 3));
    const CMatrix q = random_complex_gaussian(rec.dim, rec.dim, rng);

    const CommutatorReport rep = verify_theorem_41(phi, pair.a, pair.b, q);
    rec.residual_ratio = rep.tolerance > 0.0 ? rep.residual_s1 / rep.tolerance : 0.0;
    rec.constant_commutator = rep.empirical_constant;
    for (const S1Certificate& c : rep.certificates) {
      ++suite.certificates_checked;
      if (!c.satisfied) ++rec.certificate_violations;
    }

    const FunctionCommutator fc = commutator_of_functions(phi, psi, pair.a, pair.b);
    rec.constant_pair = fc.report.empirical_constant;

    // One-variable inequality with f = phi(., 0).
    const Function1D f = Function1D::polynomial(phi.as_polynomial()->col(0));
    const OneVarCommutatorCheck ov = one_var_commutator_identity(f, pair.a, pair.b, q);
    const double fb = surrogate_besov_norm_1d(f, 1.0);
    rec.constant_one_var = fb * ov.commutator_s1 > 0.0 ? ov.lhs_s1 / (fb * ov.commutator_s1) : 0.0;

    rec.probe1 = probe_problem1(phi, psi, pair.a, pair.b);
    rec.probe2 = probe_problem2(phi, pair.a, pair.b);

    suite.max_residual_ratio = std::max(suite.max_residual_ratio, rec.residual_ratio);
    suite.max_constant_one_var = std::max(suite.max_constant_one_var, rec.constant_one_var);
    suite.max_constant_commutator = std::max(suite.max_constant_commutator, rec.constant_commutator);
    suite.max_constant_pair = std::max(suite.max_constant_pair, rec.constant_pair);
    suite.certificate_violations += rec.certificate_violations;
    suite.trials.push_back(rec);
  }
  return suite;
}

}  // namespace opintegral
