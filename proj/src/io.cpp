#include "opintegral/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <tuple>

namespace opintegral::io {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

// Non-empty lines with '#' comments removed, paired with 1-based line numbers.
std::vector<std::pair<int, std::string>> content_lines(const std::string& text) {
  std::vector<std::pair<int, std::string>> out;
  std::istringstream is(text);
  std::string line;
  int no = 0;
  while (std::getline(is, line)) {
    ++no;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (!line.empty()) out.emplace_back(no, line);
  }
  return out;
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
  std::ostringstream os;
  os << origin;
  if (line > 0) os << ":" << line;
  os << ": " << what;
  throw ValidationError(os.str());
}

double parse_number(const std::string& tok, const std::string& origin, int line) {
  double v = 0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) {
    // from_chars rejects "inf"/"nan" spellings with signs on some libraries; fall back to strtod.
    char* end = nullptr;
    v = std::strtod(tok.c_str(), &end);
    if (tok.empty() || end != tok.c_str() + tok.size()) fail(origin, line, "not a number: '" + tok + "'");
  }
  return v;
}

long parse_integer(const std::string& tok, const std::string& origin, int line) {
  long v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) fail(origin, line, "not an integer: '" + tok + "'");
  return v;
}

std::vector<std::string> tokens(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

Complex parse_complex_line(const std::string& line, bool allow_real, const std::string& origin, int no) {
  const auto t = tokens(line);
  if (t.size() == 2) return {parse_number(t[0], origin, no), parse_number(t[1], origin, no)};
  if (allow_real && t.size() == 1) return {parse_number(t[0], origin, no), 0.0};
  fail(origin, no, allow_real ? "expected 're' or 're im'" : "expected 're im'");
}

}  // namespace

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
  if (!out) throw ValidationError("write failed: " + path.string());
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

// ---- .opmat ----

CMatrix parse_opmat(const std::string& text, const std::string& origin) {
  const auto lines = content_lines(text);
  if (lines.empty()) fail(origin, 0, "empty matrix file");
  const auto head = tokens(lines[0].second);
  if (head.size() != 3 || head[0] != "dim" || head[2] != "complex")
    fail(origin, lines[0].first, "header must be 'dim n complex'");
  const long n = parse_integer(head[1], origin, lines[0].first);
  if (n < 1) fail(origin, lines[0].first, "dimension must be positive");
  if (static_cast<long>(lines.size()) - 1 != n * n) {
    std::ostringstream os;
    os << "expected " << n * n << " entries, found " << lines.size() - 1;
    fail(origin, 0, os.str());
  }
  CMatrix m(n, n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) {
      const auto& [no, line] = lines[1 + i * n + j];
      m(i, j) = parse_complex_line(line, false, origin, no);
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) fail(origin, no, "non-finite entry");
    }
  return m;
}

CMatrix read_opmat(const fs::path& path) { return parse_opmat(read_text(path), path.string()); }

std::string format_opmat(const CMatrix& m) {
  if (m.rows() != m.cols()) throw ValidationError("only square matrices can be written as .opmat");
  std::string out = "dim " + std::to_string(m.rows()) + " complex\n";
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      out += format_double(m(i, j).real()) + " " + format_double(m(i, j).imag()) + "\n";
  return out;
}

void write_opmat(const fs::path& path, const CMatrix& m) { write_text(path, format_opmat(m)); }

// ---- .opfun ----

SampledFunction parse_opfun(const std::string& text, const std::string& origin) {
  const auto lines = content_lines(text);
  if (lines.empty()) fail(origin, 0, "empty sampled-function file");
  const auto head = tokens(lines[0].second);
  if (head.size() != 4 || head[0] != "grid") fail(origin, lines[0].first, "header must be 'grid d L N'");
  PeriodicGrid g;
  g.dim = static_cast<int>(parse_integer(head[1], origin, lines[0].first));
  g.period = parse_number(head[2], origin, lines[0].first);
  g.points = static_cast<int>(parse_integer(head[3], origin, lines[0].first));
  try {
    g.validate();
  } catch (const ValidationError& e) {
    fail(origin, lines[0].first, e.what());
  }
  const long count = g.dim == 1 ? g.points : static_cast<long>(g.points) * g.points;
  if (static_cast<long>(lines.size()) - 1 != count) {
    std::ostringstream os;
    os << "expected " << count << " values, found " << lines.size() - 1;
    fail(origin, 0, os.str());
  }
  SampledFunction f;
  f.grid = g;
  if (g.dim == 1) {
    f.values.resize(g.points, 1);
    for (int i = 0; i < g.points; ++i) f.values(i, 0) = parse_complex_line(lines[1 + i].second, true, origin, lines[1 + i].first);
  } else {
    f.values.resize(g.points, g.points);
    for (int i = 0; i < g.points; ++i)
      for (int j = 0; j < g.points; ++j) {
        const auto& [no, line] = lines[1 + static_cast<long>(i) * g.points + j];
        f.values(i, j) = parse_complex_line(line, true, origin, no);
      }
  }
  f.validate();
  return f;
}

SampledFunction read_opfun(const fs::path& path) { return parse_opfun(read_text(path), path.string()); }

std::string format_opfun(const SampledFunction& f) {
  std::string out = "grid " + std::to_string(f.grid.dim) + " " + format_double(f.grid.period) + " " +
                    std::to_string(f.grid.points) + "\n";
  auto put = [&](Complex z) {
    out += format_double(z.real());
    if (z.imag() != 0.0) out += " " + format_double(z.imag());
    out += "\n";
  };
  if (f.grid.dim == 1) {
    for (int i = 0; i < f.values.rows(); ++i) put(f.values(i, 0));
  } else {
    for (int i = 0; i < f.values.rows(); ++i)
      for (int j = 0; j < f.values.cols(); ++j) put(f.values(i, j));
  }
  return out;
}

// ---- symbols ----

Symbol parse_symbol(const std::string& text, const std::string& origin) {
  const auto lines = content_lines(text);
  if (lines.empty()) fail(origin, 0, "empty symbol file");
  const auto head = tokens(lines[0].second);
  if (head.size() != 2 || head[0] != "deg") fail(origin, lines[0].first, "header must be 'deg d'");
  const long deg = parse_integer(head[1], origin, lines[0].first);
  if (deg < 0) fail(origin, lines[0].first, "degree must be non-negative");
  std::map<int, Complex> c;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& [no, line] = lines[i];
    const auto t = tokens(line);
    if (t.size() != 3) fail(origin, no, "expected 'k re im'");
    const long k = parse_integer(t[0], origin, no);
    if (std::abs(k) > deg) fail(origin, no, "coefficient index exceeds the declared degree");
    if (c.count(static_cast<int>(k))) fail(origin, no, "duplicate coefficient index");
    c[static_cast<int>(k)] = {parse_number(t[1], origin, no), parse_number(t[2], origin, no)};
  }
  return Symbol(std::move(c));
}

Symbol read_symbol(const fs::path& path) { return parse_symbol(read_text(path), path.string()); }

std::string format_symbol(const Symbol& f) {
  std::string out = "deg " + std::to_string(f.degree()) + "\n";
  for (const auto& [k, v] : f.coeffs())
    out += std::to_string(k) + " " + format_double(v.real()) + " " + format_double(v.imag()) + "\n";
  return out;
}

// ---- key = value ----

KeyValues KeyValues::parse(const std::string& text, const std::string& origin) {
  KeyValues kv;
  kv.origin_ = origin;
  for (const auto& [no, line] : content_lines(text)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(origin, no, "expected 'key = value'");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) fail(origin, no, "empty key");
    if (!kv.values_.count(key)) kv.order_.push_back(key);
    kv.values_[key].push_back(value);
  }
  return kv;
}

KeyValues KeyValues::read(const fs::path& path) {
  KeyValues kv = parse(read_text(path), path.string());
  kv.base_ = path.parent_path();
  return kv;
}

const std::vector<std::string>& KeyValues::all(const std::string& key) const {
  static const std::vector<std::string> none;
  used_[key] = true;
  const auto it = values_.find(key);
  return it == values_.end() ? none : it->second;
}

const std::string& KeyValues::get(const std::string& key) const {
  const auto& v = all(key);
  if (v.empty()) fail(origin_, 0, "missing key '" + key + "'");
  return v.back();
}

std::string KeyValues::get_or(const std::string& key, const std::string& fallback) const {
  const auto& v = all(key);
  return v.empty() ? fallback : v.back();
}

int KeyValues::get_int(const std::string& key, int fallback) const {
  const auto& v = all(key);
  return v.empty() ? fallback : static_cast<int>(parse_integer(v.back(), origin_ + " key '" + key + "'", 0));
}

double KeyValues::get_double(const std::string& key, double fallback) const {
  const auto& v = all(key);
  return v.empty() ? fallback : parse_number(v.back(), origin_ + " key '" + key + "'", 0);
}

std::vector<std::string> KeyValues::keys() const { return order_; }

std::vector<std::string> KeyValues::unused() const {
  std::vector<std::string> out;
  for (const auto& k : order_)
    if (!used_.count(k)) out.push_back(k);
  return out;
}

// ---- function specs ----

Function2D parse_function_spec(const std::string& text, const fs::path& base_dir, const std::string& origin) {
  const auto lines = content_lines(text);
  if (lines.empty()) fail(origin, 0, "empty function spec");
  const bool structured =
      std::any_of(lines.begin(), lines.end(), [](const auto& l) { return l.second.find('=') != std::string::npos; });
  if (!structured) {
    std::string expr;
    for (const auto& l : lines) expr += l.second + " ";
    return Function2D::parse(expr);
  }
  const KeyValues kv = KeyValues::parse(text, origin);
  const std::string variant = kv.get("variant");
  Function2D out = Function2D::parse("0");
  if (variant == "polynomial") {
    int deg = 0;
    std::vector<std::tuple<int, int, Complex>> terms;
    for (const auto& c : kv.all("coeff")) {
      const auto t = tokens(c);
      if (t.size() != 3 && t.size() != 4) fail(origin, 0, "coeff must be 'j k re [im]'");
      const int j = static_cast<int>(parse_integer(t[0], origin, 0));
      const int k = static_cast<int>(parse_integer(t[1], origin, 0));
      if (j < 0 || k < 0) fail(origin, 0, "monomial exponents must be non-negative");
      const Complex v(parse_number(t[2], origin, 0), t.size() == 4 ? parse_number(t[3], origin, 0) : 0.0);
      deg = std::max({deg, j, k});
      terms.emplace_back(j, k, v);
    }
    CMatrix a = CMatrix::Zero(deg + 1, deg + 1);
    for (const auto& [j, k, v] : terms) a(j, k) += v;
    out = Function2D::polynomial(a);
  } else if (variant == "expr" || variant == "closed_form") {
    out = Function2D::parse(kv.get("expr"));
  } else if (variant == "product") {
    out = Function2D::product(Function1D::parse(kv.get("u")), Function1D::parse(kv.get("v")));
  } else if (variant == "sampled") {
    const fs::path file = base_dir / kv.get("file");
    const SampledFunction s = read_opfun(file);
    if (s.grid.dim != 2) fail(origin, 0, "sampled function spec needs a 2D grid");
    out = Function2D::sampled(s.grid, s.values);
  } else {
    fail(origin, 0, "unknown variant '" + variant + "'");
  }
  if (const auto u = kv.unused(); !u.empty()) fail(origin, 0, "unexpected key '" + u.front() + "'");
  return out;
}

Function2D read_function(const fs::path& path) {
  return parse_function_spec(read_text(path), path.parent_path(), path.string());
}

Function2D function_argument(const std::string& arg) {
  std::error_code ec;
  if (fs::is_regular_file(arg, ec)) return read_function(arg);
  return Function2D::parse(arg);
}

// ---- representations ----

namespace {

std::vector<Function1D> factor_list(const KeyValues& kv, const std::string& key, int expected) {
  const auto items = split(kv.get(key), ';');
  if (static_cast<int>(items.size()) != expected) {
    std::ostringstream os;
    os << "'" << key << "' lists " << items.size() << " factors, expected " << expected;
    fail(kv.origin(), 0, os.str());
  }
  std::vector<Function1D> out;
  for (const auto& e : items) out.push_back(Function1D::parse(e));
  return out;
}

MatrixFactorFamily matrix_family(const KeyValues& kv, int rows, int cols) {
  std::vector<std::vector<Function1D>> g;
  for (int j = 0; j < rows; ++j) g.push_back(factor_list(kv, "g." + std::to_string(j), cols));
  return MatrixFactorFamily::from_functions(std::move(g));
}

}  // namespace

HaagerupRep parse_representation(const std::string& text, const std::string& origin) {
  const KeyValues kv = KeyValues::parse(text, origin);
  const RepKind kind = rep_kind_from_string(kv.get("kind"));
  const int j = kv.get_int("J", 0);
  const int k = kv.get_int("K", kind == RepKind::Projective ? j : 0);
  if (j < 1 || k < 1) fail(origin, 0, "J and K must be positive");
  HaagerupRep rep;
  switch (kind) {
    case RepKind::Projective:
      rep = make_projective(FactorFamily::from_functions(factor_list(kv, "f1", j)),
                            FactorFamily::from_functions(factor_list(kv, "f2", j)),
                            FactorFamily::from_functions(factor_list(kv, "f3", j)));
      break;
    case RepKind::Haagerup:
      rep = make_haagerup(FactorFamily::from_functions(factor_list(kv, "f1", j)), matrix_family(kv, j, k),
                          FactorFamily::from_functions(factor_list(kv, "f3", k)));
      break;
    case RepKind::FirstKind:
      rep = make_first_kind(FactorFamily::from_functions(factor_list(kv, "f1", j)),
                            FactorFamily::from_functions(factor_list(kv, "f2", k)), matrix_family(kv, j, k));
      break;
    case RepKind::SecondKind:
      rep = make_second_kind(matrix_family(kv, j, k), FactorFamily::from_functions(factor_list(kv, "f2", j)),
                             FactorFamily::from_functions(factor_list(kv, "f3", k)));
      break;
  }
  rep.description = kv.get_or("description", origin);
  if (const auto u = kv.unused(); !u.empty()) fail(origin, 0, "unexpected key '" + u.front() + "'");
  rep.validate();
  return rep;
}

HaagerupRep read_representation(const fs::path& path) {
  return parse_representation(read_text(path), path.string());
}

}  // namespace opintegral::io
