#include "opintegral/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "opintegral/besov.hpp"
#include "opintegral/commutator.hpp"
#include "opintegral/doi.hpp"
#include "opintegral/heltonhowe.hpp"
#include "opintegral/io.hpp"
#include "opintegral/models.hpp"
#include "opintegral/rng.hpp"
#include "opintegral/schur.hpp"

namespace opintegral::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

int thread_cap() {
  const char* v = std::getenv("OPINTEGRAL_THREADS");
  if (!v || !*v) return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1) throw ValidationError(std::string("OPINTEGRAL_THREADS must be a positive integer, got '") + v + "'");
  return static_cast<int>(n);
}

namespace {

// Non-finite doubles are not valid JSON; they are written as strings.
Json num(double v) {
  if (std::isfinite(v)) return v;
  return io::format_double(v);
}

Json string_list(const std::vector<std::string>& v) {
  Json a = Json::array();
  for (const auto& s : v) a.push_back(s);
  return a;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// Reports go to --out / --report when given; stdout gets the JSON in --json
// mode and the human summary otherwise.
void emit(const RunConfig& cfg, const Json& report, const std::string& human, std::ostream& out) {
  if (!cfg.output.empty()) io::write_text(cfg.output, dump(report));
  if (cfg.json)
    out << dump(report);
  else
    out << human;
}

const std::string& input(const RunConfig& cfg, const std::string& role) {
  const auto it = cfg.inputs.find(role);
  if (it == cfg.inputs.end() || it->second.empty()) throw ValidationError("missing required input --" + role);
  return it->second;
}

bool has_input(const RunConfig& cfg, const std::string& role) {
  const auto it = cfg.inputs.find(role);
  return it != cfg.inputs.end() && !it->second.empty();
}

HermitianOperator read_operator(const RunConfig& cfg, const std::string& role) {
  const std::string& path = input(cfg, role);
  try {
    return HermitianOperator(io::read_opmat(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

double parse_p(const std::string& s) {
  if (s == "inf" || s == "infinity") return kInf;
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || !(v >= 1.0)) throw ValidationError("p and q must be >= 1 or 'inf', got '" + s + "'");
  return v;
}

CommutatorPath parse_path(const std::string& s) {
  if (s == "auto") return CommutatorPath::Auto;
  if (s == "polynomial") return CommutatorPath::Polynomial;
  if (s == "spectral") return CommutatorPath::Spectral;
  if (s == "sinc") return CommutatorPath::Sinc;
  throw ValidationError("unknown path '" + s + "' (auto, polynomial, spectral, sinc)");
}

Json certificates_json(const std::vector<S1Certificate>& cs) {
  Json a = Json::array();
  for (const auto& c : cs)
    a.push_back({{"norm", c.norm}, {"lhs", num(c.lhs)}, {"bound", num(c.bound)}, {"rep_norm", num(c.rep_norm)},
                 {"satisfied", c.satisfied}});
  return a;
}

Json commutator_report_json(const CommutatorReport& r) {
  return {{"lhs_s1", num(r.lhs_s1)},
          {"rhs_s1", num(r.rhs_s1)},
          {"residual_s1", num(r.residual_s1)},
          {"tolerance", num(r.tolerance)},
          {"sup_norm", num(r.sup_norm)},
          {"q_norm", num(r.q_norm)},
          {"phi_besov", num(r.phi_besov)},
          {"psi_besov", num(r.psi_besov)},
          {"comm_aq_s1", num(r.comm_aq_s1)},
          {"comm_bq_s1", num(r.comm_bq_s1)},
          {"comm_ab_s1", num(r.comm_ab_s1)},
          {"empirical_constant", num(r.empirical_constant)},
          {"path", r.path},
          {"norm_note", r.norm_note},
          {"certificates", certificates_json(r.certificates)}};
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

// ---- besov-norm ----

int run_besov(const RunConfig& cfg, std::ostream& out) {
  const double s = cfg.s.value_or(1.0);
  if (!(s > 0.0)) throw ValidationError("smoothness s must be positive");
  const double p = cfg.p.value_or(kInf), q = cfg.q.value_or(1.0);
  std::optional<BandRange> range;
  if (cfg.band_lo || cfg.band_hi) {
    range = BandRange{cfg.band_lo.value_or(-10), cfg.band_hi.value_or(10)};
    if (range->lo > range->hi) throw ValidationError("band range is empty");
  }

  BesovNorm b;
  std::string source;
  if (has_input(cfg, "input")) {
    source = input(cfg, "input");
    b = besov_norm(io::read_opfun(source), s, p, q, range);
  } else {
    source = input(cfg, "phi");
    PeriodicGrid g;
    g.dim = 2;
    g.points = cfg.grid_points.value_or(512);
    g.period = cfg.period.value_or(64.0 * kPi);
    g.validate();
    b = besov_norm(io::function_argument(source), g, s, p, q, range);
  }

  Json terms = Json::array();
  for (std::size_t i = 0; i < b.band_terms.size(); ++i)
    terms.push_back({{"band", b.range.lo + static_cast<int>(i)}, {"term", num(b.band_terms[i])}});
  const Json report = {{"command", "besov-norm"},
                       {"input", source},
                       {"s", num(b.s)},
                       {"p", num(b.p)},
                       {"q", num(b.q)},
                       {"band_range", {b.range.lo, b.range.hi}},
                       {"value", num(b.value)},
                       {"band_terms", terms},
                       {"warnings", string_list(b.warnings)}};
  std::string human = fmt(b.value) + "\n";
  for (const auto& w : b.warnings) human += "warning: " + w + "\n";
  emit(cfg, report, human, out);
  return 0;
}

// ---- funcalc ----

int run_funcalc(const RunConfig& cfg, std::ostream& out) {
  const Function2D phi = io::function_argument(input(cfg, "phi"));
  const HermitianOperator a = read_operator(cfg, "A");
  const HermitianOperator b = read_operator(cfg, "B");
  if (a.dim() != b.dim()) throw ValidationError("A and B must have the same dimension");
  const CMatrix r = funcalc(phi, a, b);
  if (cfg.output.empty()) throw ValidationError("funcalc needs --out");
  io::write_opmat(cfg.output, r);
  if (cfg.json) {
    const Json report = {{"command", "funcalc"},      {"phi", phi.str()},
                         {"dim", a.dim()},            {"out", cfg.output},
                         {"op_norm", num(op_norm(r))}, {"trace_norm", num(trace_norm(r))}};
    out << dump(report);
  } else {
    out << "wrote " << cfg.output << " (" << a.dim() << "x" << a.dim() << ", operator norm " << fmt(op_norm(r))
        << ")\n";
  }
  return 0;
}

// ---- schur-norm ----

int run_schur(const RunConfig& cfg, std::ostream& out) {
  const CMatrix phi = io::read_opmat(input(cfg, "matrix"));
  SchurOptions opt;
  opt.tol = cfg.tol.value_or(1e-6);
  if (!(opt.tol > 0.0)) throw ValidationError("--tol must be positive");
  opt.seed = cfg.seed;
  const SchurMultiplierCertificate c = schur_multiplier_norm(phi, opt);
  const Json report = {{"command", "schur-norm"},
                       {"matrix", input(cfg, "matrix")},
                       {"upper", num(c.upper)},
                       {"lower", num(c.lower)},
                       {"gap", num(c.gap)},
                       {"tol", num(opt.tol)},
                       {"converged", c.converged},
                       {"upper_source", c.upper_source},
                       {"lower_source", c.lower_source},
                       {"witness_min_eig", num(c.witness_min_eig)},
                       {"bisection_steps", c.bisection_steps},
                       {"dykstra_iterations", c.dykstra_iterations}};
  std::string human = "upper " + fmt(c.upper) + "\nlower " + fmt(c.lower) + "\ngap " + fmt(c.gap) + "\n";
  if (!c.converged) human += "warning: gap exceeds tolerance " + fmt(opt.tol) + "\n";
  emit(cfg, report, human, out);
  return c.converged ? 0 : 2;
}

// ---- commutator-verify ----

int run_commutator(const RunConfig& cfg, std::ostream& out) {
  if (has_input(cfg, "A") || has_input(cfg, "B")) {
    const HermitianOperator a = read_operator(cfg, "A");
    const HermitianOperator b = read_operator(cfg, "B");
    if (a.dim() != b.dim()) throw ValidationError("A and B must have the same dimension");
    const Function2D phi = io::function_argument(input(cfg, "phi"));
    CommutatorOptions opt;
    opt.path = parse_path(cfg.path);
    if (cfg.J) opt.J = *cfg.J;
    if (cfg.sigma) opt.sigma = *cfg.sigma;

    CommutatorReport r;
    Json report = {{"command", "commutator-verify"}, {"mode", "single"}, {"phi", phi.str()}, {"dim", a.dim()}};
    if (has_input(cfg, "psi")) {
      const Function2D psi = io::function_argument(input(cfg, "psi"));
      r = commutator_of_functions(phi, psi, a, b, opt).report;
      report["psi"] = psi.str();
    } else if (has_input(cfg, "Q")) {
      r = verify_theorem_41(phi, a, b, io::read_opmat(input(cfg, "Q")), opt);
    } else {
      throw ValidationError("commutator-verify with --A/--B needs --psi or --Q");
    }
    report["report"] = commutator_report_json(r);
    int violations = 0;
    for (const auto& c : r.certificates) violations += c.satisfied ? 0 : 1;
    const bool ok = r.residual_s1 <= r.tolerance && violations == 0;
    report["passed"] = ok;
    emit(cfg, report,
         "residual " + fmt(r.residual_s1) + " (tolerance " + fmt(r.tolerance) + ")\nempirical constant " +
             fmt(r.empirical_constant) + "\ncertificate violations " + std::to_string(violations) + "\n" +
             (ok ? "" : "FAILED\n"),
         out);
    return ok ? 0 : 2;
  }

  const int trials = cfg.trials.value_or(50);
  const TrialSuite suite = run_trial_suite(cfg.seed, trials, cfg.dim.value_or(32), cfg.degree.value_or(4));
  Json rows = Json::array();
  for (const auto& t : suite.trials)
    rows.push_back({{"dim", t.dim},
                    {"degree", t.degree},
                    {"rank", t.rank},
                    {"residual_ratio", num(t.residual_ratio)},
                    {"constant_one_var", num(t.constant_one_var)},
                    {"constant_commutator", num(t.constant_commutator)},
                    {"constant_pair", num(t.constant_pair)},
                    {"probe1", num(t.probe1)},
                    {"probe2", num(t.probe2)},
                    {"certificate_violations", t.certificate_violations}});
  const bool ok = suite.max_residual_ratio <= 1.0 && suite.certificate_violations == 0;
  const Json report = {{"command", "commutator-verify"},
                       {"mode", "suite"},
                       {"seed", cfg.seed},
                       {"trials", trials},
                       {"max_residual_ratio", num(suite.max_residual_ratio)},
                       {"max_constant_one_var", num(suite.max_constant_one_var)},
                       {"max_constant_commutator", num(suite.max_constant_commutator)},
                       {"max_constant_pair", num(suite.max_constant_pair)},
                       {"certificates_checked", suite.certificates_checked},
                       {"certificate_violations", suite.certificate_violations},
                       {"passed", ok},
                       {"trial_records", rows}};
  if (!cfg.csv.empty()) {
    std::string csv = "trial,dim,degree,rank,residual_ratio,constant_one_var,constant_commutator,constant_pair,probe1,probe2\n";
    for (std::size_t i = 0; i < suite.trials.size(); ++i) {
      const auto& t = suite.trials[i];
      csv += std::to_string(i) + "," + std::to_string(t.dim) + "," + std::to_string(t.degree) + "," +
             std::to_string(t.rank) + "," + io::format_double(t.residual_ratio) + "," +
             io::format_double(t.constant_one_var) + "," + io::format_double(t.constant_commutator) + "," +
             io::format_double(t.constant_pair) + "," + io::format_double(t.probe1) + "," +
             io::format_double(t.probe2) + "\n";
    }
    io::write_text(cfg.csv, csv);
  }
  emit(cfg, report,
       std::to_string(trials) + " trials, max residual / tolerance " + fmt(suite.max_residual_ratio) + "\n" +
           "max constants: one-variable " + fmt(suite.max_constant_one_var) + ", commutator " + fmt(suite.max_constant_commutator) + ", function pair " +
           fmt(suite.max_constant_pair) + "\ncertificates " + std::to_string(suite.certificates_checked) +
           ", violations " + std::to_string(suite.certificate_violations) + "\n" + (ok ? "" : "FAILED\n"),
       out);
  return ok ? 0 : 2;
}

// ---- trace-formula ----

std::vector<int> int_list(const std::string& s, const std::string& key) {
  std::vector<int> v;
  std::istringstream is(s);
  std::string t;
  while (is >> t) {
    try {
      std::size_t pos = 0;
      v.push_back(std::stoi(t, &pos));
      if (pos != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw ValidationError("'" + key + "' must be a list of integers");
    }
  }
  return v;
}

Symbol config_symbol(const io::KeyValues& kv) {
  const std::string v = kv.get_or("symbol", "shift");
  if (v == "shift") return Symbol::monomial(1);
  const fs::path file = kv.base_dir() / v;
  std::error_code ec;
  if (fs::is_regular_file(file, ec)) return io::read_symbol(file);
  // Inline terms "k re im" separated by ';'.
  int deg = 0;
  std::string body;
  std::istringstream is(v);
  std::string term;
  while (std::getline(is, term, ';')) {
    std::istringstream ts(term);
    int k = 0;
    if (!(ts >> k)) throw ValidationError("symbol terms must be 'k re im' separated by ';'");
    deg = std::max(deg, std::abs(k));
    body += term + "\n";
  }
  return io::parse_symbol("deg " + std::to_string(deg) + "\n" + body, kv.origin() + " key 'symbol'");
}

Function2D config_function(const io::KeyValues& kv, const std::string& key, const std::string& fallback) {
  const std::string v = kv.get_or(key, fallback);
  const fs::path file = kv.base_dir() / v;
  std::error_code ec;
  if (fs::is_regular_file(file, ec)) return io::read_function(file);
  return Function2D::parse(v);
}

int run_trace(const RunConfig& cfg, std::ostream& out) {
  const io::KeyValues kv = io::KeyValues::read(input(cfg, "config"));
  TraceExperimentConfig tc;
  tc.symbol = config_symbol(kv);
  tc.phi = config_function(kv, "phi", "x");
  tc.psi = config_function(kv, "psi", "y");
  tc.n = cfg.n.value_or(kv.get_int("n", tc.n));
  tc.m = cfg.m.value_or(kv.get_int("m", 0));
  tc.resolution = kv.get_int("resolution", tc.resolution);
  const std::string g = kv.get_or("g", "winding");
  if (g == "flat") {
    tc.flat_g = true;
    std::istringstream is(kv.get("flat_box"));
    if (!(is >> tc.flat_box.x0 >> tc.flat_box.x1 >> tc.flat_box.y0 >> tc.flat_box.y1) ||
        !(tc.flat_box.x0 < tc.flat_box.x1 && tc.flat_box.y0 < tc.flat_box.y1))
      throw ValidationError("flat_box must be 'x0 x1 y0 y1' with x0 < x1 and y0 < y1");
  } else if (g != "winding") {
    throw ValidationError("g must be 'winding' or 'flat'");
  }
  if (kv.has("table_sizes")) tc.table_sizes = int_list(kv.get("table_sizes"), "table_sizes");
  if (kv.has("table_divisors")) tc.table_divisors = int_list(kv.get("table_divisors"), "table_divisors");
  if (const auto u = kv.unused(); !u.empty()) throw ValidationError(kv.origin() + ": unexpected key '" + u.front() + "'");
  if (tc.n < 2) throw ValidationError("n must be at least 2");

  const TraceReport r = trace_formula_experiment(tc);
  Json table = Json::array();
  for (const auto& c : r.table)
    table.push_back({{"n", c.n}, {"m", c.m}, {"lhs", num(c.lhs)}, {"abs_err", num(c.abs_err)}, {"rel_err", num(c.rel_err)}});
  const Json report = {{"command", "trace-formula"},
                       {"config", input(cfg, "config")},
                       {"symbol", io::format_symbol(tc.symbol)},
                       {"phi", tc.phi.str()},
                       {"psi", tc.psi.str()},
                       {"n", r.n},
                       {"m", r.m},
                       {"g_mode", r.g_mode},
                       {"lhs", num(r.lhs)},
                       {"lhs_imag", num(r.lhs_imag)},
                       {"rhs", num(r.rhs)},
                       {"rhs_imag", num(r.rhs_imag)},
                       {"abs_err", num(r.abs_err)},
                       {"rel_err", num(r.rel_err)},
                       {"convergence", table},
                       {"warnings", string_list(r.warnings)}};
  if (!cfg.csv.empty()) {
    std::string csv = "n,m,lhs,rhs,abs_err,rel_err\n";
    for (const auto& c : r.table)
      csv += std::to_string(c.n) + "," + std::to_string(c.m) + "," + io::format_double(c.lhs) + "," +
             io::format_double(r.rhs) + "," + io::format_double(c.abs_err) + "," + io::format_double(c.rel_err) + "\n";
    io::write_text(cfg.csv, csv);
  }
  std::string human = "N " + std::to_string(r.n) + ", M " + std::to_string(r.m) + ", g " + r.g_mode + "\nlhs " +
                      fmt(r.lhs) + "\nrhs " + fmt(r.rhs) + "\nabs err " + fmt(r.abs_err) + "\n";
  for (const auto& c : r.table)
    human += "  N " + std::to_string(c.n) + " M " + std::to_string(c.m) + ": lhs " + fmt(c.lhs) + ", rel err " +
             fmt(c.rel_err) + "\n";
  for (const auto& w : r.warnings) human += "warning: " + w + "\n";
  emit(cfg, report, human, out);
  return 0;
}

// ---- probe ----

int run_probe(const RunConfig& cfg, std::ostream& out) {
  const Function2D phi = io::function_argument(input(cfg, "phi"));
  const Function2D psi = has_input(cfg, "psi") ? io::function_argument(input(cfg, "psi")) : phi.conj();
  Json rows = Json::array();
  std::string human;
  auto record = [&](int dim, double p1, double p2) {
    rows.push_back({{"dim", dim}, {"problem1", num(p1)}, {"problem2", num(p2)}});
    human += "dim " + std::to_string(dim) + ": product defect " + fmt(p1) + ", adjoint defect " + fmt(p2) + "\n";
  };
  if (has_input(cfg, "A") || has_input(cfg, "B")) {
    const HermitianOperator a = read_operator(cfg, "A");
    const HermitianOperator b = read_operator(cfg, "B");
    if (a.dim() != b.dim()) throw ValidationError("A and B must have the same dimension");
    record(a.dim(), probe_problem1(phi, psi, a, b), probe_problem2(phi, a, b));
  } else {
    const int trials = cfg.trials.value_or(10);
    const int dim = cfg.dim.value_or(16);
    const int rank = cfg.rank.value_or(1);
    if (trials < 1 || dim < 2 || rank < 0) throw ValidationError("probe: bad trial parameters");
    for (int t = 0; t < trials; ++t) {
      const AlmostCommutingPair pair = almost_commuting_pair(dim, rank, 0.3, derive_seed(cfg.seed, t));
      record(dim, probe_problem1(phi, psi, pair.a, pair.b), probe_problem2(phi, pair.a, pair.b));
    }
  }
  const Json report = {{"command", "probe"}, {"phi", phi.str()}, {"psi", psi.str()}, {"seed", cfg.seed}, {"records", rows}};
  emit(cfg, report, human, out);
  return 0;
}

// ---- selftest ----

struct Check {
  std::string name;
  double value = 0, limit = 0;
  bool pass() const { return value <= limit; }
};

std::vector<Check> invariant_suite(std::uint64_t seed) {
  std::vector<Check> checks;
  Xorshift64Star rng(seed);

  {
    const HermitianOperator h(random_hermitian(8, rng));
    const SpectralDecomposition d = decompose(h);
    CMatrix sum = CMatrix::Zero(8, 8);
    for (int c = 0; c < static_cast<int>(d.clusters.size()); ++c) sum += spectral_projection(d, c);
    checks.push_back({"resolution of identity", max_abs_entry(sum - CMatrix::Identity(8, 8)), 1e-10});
    checks.push_back({"eigen reconstruction", max_abs_entry(d.reconstruct() - h.matrix()), 1e-10});
  }
  {
    const CMatrix m = random_complex_gaussian(6, 6, rng);
    const CMatrix u = random_unitary(6, rng), v = random_unitary(6, rng);
    checks.push_back({"schatten unitary invariance", std::abs(trace_norm(u * m * v) - trace_norm(m)), 1e-10});
    double worst = 0;
    for (double p : {1.0, 1.5, 2.0, 4.0}) worst = std::max(worst, schatten_norm(m, p * 2) - schatten_norm(m, p));
    checks.push_back({"schatten monotonicity", std::max(worst, 0.0), 1e-12});
  }
  {
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
      const double t = std::exp(rng.uniform(-6.0, 6.0));
      double s = 0;
      for (int n = -12; n <= 12; ++n) s += window_eval(t / std::ldexp(1.0, n));
      worst = std::max(worst, std::abs(s - 1.0));
    }
    checks.push_back({"window partition of unity", worst, 1e-10});
  }
  {
    PeriodicGrid g;
    CVector v(g.points);
    for (int i = 0; i < g.points; ++i) v(i) = std::sin(g.coord(i));
    checks.push_back({"besov norm of sin", std::abs(besov_norm(SampledFunction::from_1d(g, v)).value - 1.0), 1e-6});
  }
  {
    Symbol f = Symbol::monomial(1, {0.5, 0.0}) + Symbol::monomial(-1, {0.5, 0.0}) + Symbol::monomial(2, {0.2, 0.0}) +
               Symbol::monomial(-2, {0.2, 0.0});
    Symbol g = Symbol::monomial(1, {0.0, -0.5}) + Symbol::monomial(-1, {0.0, 0.5});
    const HankelIdentityCheck h = verify_hankel_identity(f, g, 32, 24);
    checks.push_back({"toeplitz-hankel identity", h.residual, 1e-12});
  }
  {
    const SchurMultiplierCertificate c = schur_multiplier_norm(CMatrix::Ones(3, 3));
    checks.push_back({"schur norm of all-ones", std::abs(c.upper - 1.0) + std::abs(c.lower - 1.0), 1e-9});
  }
  {
    const TrialSuite s = run_trial_suite(seed, 5, 12, 3);
    checks.push_back({"commutator identity residual ratio", s.max_residual_ratio, 1.0});
    checks.push_back({"certificate violations", static_cast<double>(s.certificate_violations), 0.0});
  }
  {
    TraceExperimentConfig tc;
    tc.n = 64;
    tc.resolution = 512;
    const TraceReport r = trace_formula_experiment(tc);
    checks.push_back({"corner trace of [x, y] on the shift", std::abs(r.lhs - 0.5), 1e-8});
  }
  return checks;
}

int run_selftest(const RunConfig& cfg, std::ostream& out) {
  const auto checks = invariant_suite(cfg.seed);
  Json rows = Json::array();
  std::string human;
  bool ok = true;
  for (const auto& c : checks) {
    ok = ok && c.pass();
    rows.push_back({{"name", c.name}, {"value", num(c.value)}, {"limit", num(c.limit)}, {"pass", c.pass()}});
    human += std::string(c.pass() ? "ok    " : "FAIL  ") + c.name + " (" + fmt(c.value) + " <= " + fmt(c.limit) + ")\n";
  }
  emit(cfg, {{"command", "selftest"}, {"seed", cfg.seed}, {"checks", rows}, {"passed", ok}}, human, out);
  return ok ? 0 : 2;
}

void require_paths(const RunConfig& cfg) {
  // Function arguments may be inline expressions; everything else is a file.
  for (const auto& [role, value] : cfg.inputs) {
    if (value.empty() || role == "phi" || role == "psi") continue;
    std::error_code ec;
    if (!fs::is_regular_file(value, ec)) throw ValidationError("--" + role + ": no such file '" + value + "'");
  }
}

}  // namespace

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Operator integrals and trace formulas for almost commuting self-adjoint matrices", "opintegral"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto add_json = [&](CLI::App* sub) { sub->add_flag("--json", cfg.json, "Machine-readable JSON on stdout only"); };
  auto add_input = [&](CLI::App* sub, const std::string& role, const std::string& help, bool required = false) {
    auto* o = sub->add_option("--" + role, cfg.inputs[role], help);
    if (required) o->required();
  };
  std::string p_text, q_text;

  auto* besov = app.add_subcommand("besov-norm", "Besov norm of a sampled or closed-form function");
  add_input(besov, "input", "Sampled function (.opfun)");
  add_input(besov, "phi", "Function spec or expression in x, y (sampled on a 2D grid)");
  besov->add_option("--s", cfg.s, "Smoothness (default 1)");
  besov->add_option("--p", p_text, "Integrability: number >= 1 or inf (default inf)");
  besov->add_option("--q", q_text, "Summability: number >= 1 or inf (default 1)");
  besov->add_option("--band-lo", cfg.band_lo, "Lowest dyadic band");
  besov->add_option("--band-hi", cfg.band_hi, "Highest dyadic band");
  besov->add_option("--grid-points", cfg.grid_points, "Points per axis when sampling --phi (default 512)");
  besov->add_option("--period", cfg.period, "Grid period when sampling --phi (default 64 pi)");
  besov->add_option("--out", cfg.output, "Write the JSON report here");
  add_json(besov);

  auto* fc = app.add_subcommand("funcalc", "phi(A, B) for Hermitian A, B");
  add_input(fc, "phi", "Function spec or expression in x, y", true);
  add_input(fc, "A", "Hermitian matrix (.opmat)", true);
  add_input(fc, "B", "Hermitian matrix (.opmat)", true);
  fc->add_option("--out", cfg.output, "Output matrix (.opmat)")->required();
  add_json(fc);

  auto* schur = app.add_subcommand("schur-norm", "Two-sided bound on a Schur multiplier norm");
  add_input(schur, "matrix", "Multiplier matrix (.opmat)", true);
  schur->add_option("--tol", cfg.tol, "Target gap (default 1e-6)");
  schur->add_option("--seed", cfg.seed, "Seed for random test contractions");
  schur->add_option("--out", cfg.output, "Write the JSON report here");
  add_json(schur);

  auto* comm = app.add_subcommand("commutator-verify", "Check the commutator representation and its inequalities");
  add_input(comm, "phi", "Function spec or expression (single mode)");
  add_input(comm, "psi", "Second function; Q = psi(A, B)");
  add_input(comm, "A", "Hermitian matrix (.opmat); omit for the random suite");
  add_input(comm, "B", "Hermitian matrix (.opmat)");
  add_input(comm, "Q", "Matrix Q (.opmat) when --psi is absent");
  comm->add_option("--trials", cfg.trials, "Random trials (default 50)");
  comm->add_option("--max-dim", cfg.dim, "Largest trial dimension (default 32)");
  comm->add_option("--max-degree", cfg.degree, "Largest polynomial degree (default 4)");
  comm->add_option("--seed", cfg.seed, "Base seed");
  comm->add_option("--path", cfg.path, "auto, polynomial, spectral or sinc");
  comm->add_option("--J", cfg.J, "Lattice half-width for the sinc path");
  comm->add_option("--sigma", cfg.sigma, "Band limit of phi for the sinc path");
  comm->add_option("--report", cfg.output, "Write the JSON report here");
  comm->add_option("--csv", cfg.csv, "Per-trial CSV table");
  add_json(comm);

  auto* trace = app.add_subcommand("trace-formula", "Corner trace against the principal-function integral");
  add_input(trace, "config", "Experiment config (key = value)", true);
  trace->add_option("--n", cfg.n, "Override the truncation size");
  trace->add_option("--m", cfg.m, "Override the corner size");
  trace->add_option("--out", cfg.output, "Write the JSON report here");
  trace->add_option("--csv", cfg.csv, "Convergence table as CSV");
  add_json(trace);

  auto* probe = app.add_subcommand("probe", "Product and adjoint defects of the functional calculus");
  add_input(probe, "phi", "Function spec or expression", true);
  add_input(probe, "psi", "Second function (default conj(phi))");
  add_input(probe, "A", "Hermitian matrix (.opmat); omit for random pairs");
  add_input(probe, "B", "Hermitian matrix (.opmat)");
  probe->add_option("--trials", cfg.trials, "Random pairs (default 10)");
  probe->add_option("--dim", cfg.dim, "Dimension of random pairs (default 16)");
  probe->add_option("--rank", cfg.rank, "Rank of the non-commuting part (default 1)");
  probe->add_option("--seed", cfg.seed, "Base seed");
  probe->add_option("--out", cfg.output, "Write the JSON report here");
  add_json(probe);

  auto* self = app.add_subcommand("selftest", "Run the invariant suite");
  self->add_option("--seed", cfg.seed, "Seed");
  self->add_option("--out", cfg.output, "Write the JSON report here");
  add_json(self);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return 1;
  }

  try {
    cfg.threads = thread_cap();
    cfg.subcommand = app.get_subcommands().front()->get_name();
    if (!p_text.empty()) cfg.p = parse_p(p_text);
    if (!q_text.empty()) cfg.q = parse_p(q_text);
    require_paths(cfg);
    if (cfg.subcommand == "besov-norm") return run_besov(cfg, out);
    if (cfg.subcommand == "funcalc") return run_funcalc(cfg, out);
    if (cfg.subcommand == "schur-norm") return run_schur(cfg, out);
    if (cfg.subcommand == "commutator-verify") return run_commutator(cfg, out);
    if (cfg.subcommand == "trace-formula") return run_trace(cfg, out);
    if (cfg.subcommand == "probe") return run_probe(cfg, out);
    return run_selftest(cfg, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const ToleranceError& e) {
    err << "tolerance failure: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace opintegral::cli
