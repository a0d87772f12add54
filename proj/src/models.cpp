#include "opintegral/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace opintegral {

Symbol::Symbol(std::map<int, Complex> coeffs) {
  for (const auto& [k, v] : coeffs)
    if (v != 0.0) {
      c_[k] = v;
      degree_ = std::max(degree_, std::abs(k));
    }
}

Symbol Symbol::monomial(int k, Complex c) { return Symbol({{k, c}}); }
Symbol Symbol::cos_theta() { return Symbol({{1, 0.5}, {-1, 0.5}}); }
Symbol Symbol::sin_theta() { return Symbol({{1, Complex(0.0, -0.5)}, {-1, Complex(0.0, 0.5)}}); }

Complex Symbol::coeff(int k) const {
  const auto it = c_.find(k);
  return it == c_.end() ? Complex(0.0) : it->second;
}

Complex Symbol::operator()(double theta) const {
  Complex acc = 0.0;
  for (const auto& [k, v] : c_) acc += v * Complex(std::cos(k * theta), std::sin(k * theta));
  return acc;
}

bool Symbol::is_real(double tol) const {
  for (const auto& [k, v] : c_)
    if (std::abs(v - std::conj(coeff(-k))) > tol) return false;
  return true;
}

Symbol Symbol::conj() const {
  std::map<int, Complex> c;
  for (const auto& [k, v] : c_) c[-k] = std::conj(v);
  return Symbol(std::move(c));
}

Symbol Symbol::real_part() const { return (*this + conj()).scaled(0.5); }
Symbol Symbol::imag_part() const { return (*this + conj().scaled(-1.0)).scaled(Complex(0.0, -0.5)); }

Symbol Symbol::operator+(const Symbol& o) const {
  std::map<int, Complex> c = c_;
  for (const auto& [k, v] : o.c_) c[k] += v;
  return Symbol(std::move(c));
}

Symbol Symbol::operator*(const Symbol& o) const {
  std::map<int, Complex> c;
  for (const auto& [k, v] : c_)
    for (const auto& [l, w] : o.c_) c[k + l] += v * w;
  return Symbol(std::move(c));
}

Symbol Symbol::scaled(Complex s) const {
  std::map<int, Complex> c;
  for (const auto& [k, v] : c_) c[k] = s * v;
  return Symbol(std::move(c));
}

CMatrix toeplitz_matrix(const Symbol& f, int n) {
  if (n <= f.degree()) {
    std::ostringstream os;
    os << "Toeplitz truncation size " << n << " must exceed the symbol degree " << f.degree();
    throw ValidationError(os.str());
  }
  CMatrix t = CMatrix::Zero(n, n);
  for (const auto& [k, v] : f.coeffs())
    for (int j = std::max(0, k); j < n && j - k < n; ++j) t(j, j - k) = v;
  return t;
}

CMatrix hankel_matrix(const Symbol& f, int n) {
  if (n <= f.degree()) {
    std::ostringstream os;
    os << "Hankel truncation size " << n << " must exceed the symbol degree " << f.degree();
    throw ValidationError(os.str());
  }
  CMatrix h = CMatrix::Zero(n, n);
  for (const auto& [k, v] : f.coeffs()) {
    const int s = -k - 1;  // j + k' = s
    for (int j = 0; j <= s && j < n; ++j)
      if (s - j < n) h(j, s - j) = v;
  }
  return h;
}

HankelIdentityCheck verify_hankel_identity(const Symbol& f, const Symbol& g, int n, int m) {
  const int df = f.degree(), dg = g.degree();
  if (n < 2 * (df + dg)) throw ValidationError("Hankel identity: N must be at least 2 (deg f + deg g)");
  if (m > n - df - dg || m < 1) {
    std::ostringstream os;
    os << "Hankel identity: window " << m << " exceeds N - deg f - deg g = " << n - df - dg;
    throw ValidationError(os.str());
  }
  const CMatrix tf = toeplitz_matrix(f, n), tg = toeplitz_matrix(g, n);
  const CMatrix lhs = tf * tg - tg * tf;
  const CMatrix rhs = hankel_matrix(g.conj(), n).adjoint() * hankel_matrix(f, n) -
                      hankel_matrix(f.conj(), n).adjoint() * hankel_matrix(g, n);
  HankelIdentityCheck r;
  r.residual = max_abs_entry(lhs.topLeftCorner(m, m) - rhs.topLeftCorner(m, m));
  r.scale = max_abs_entry(lhs.topLeftCorner(m, m));
  return r;
}

namespace {

std::vector<Complex> sample_curve(const Symbol& f) {
  std::vector<Complex> c(kCurvePoints);
  for (int t = 0; t < kCurvePoints; ++t) c[t] = f(2.0 * kPi * t / kCurvePoints);
  return c;
}

int winding_of_samples(const std::vector<Complex>& curve, Complex lambda) {
  double total = 0.0;
  double closest = std::abs(curve[0] - lambda);
  for (std::size_t t = 0; t < curve.size(); ++t) {
    const Complex a = curve[t] - lambda;
    const Complex b = curve[(t + 1) % curve.size()] - lambda;
    closest = std::min(closest, std::abs(b));
    total += std::arg(b / a);
  }
  if (closest <= kCurveProximity) {
    std::ostringstream os;
    os.precision(17);
    os << "point " << lambda.real() << (lambda.imag() < 0 ? " - " : " + ") << std::abs(lambda.imag())
       << "i is within " << kCurveProximity << " of the symbol curve";
    throw ValidationError(os.str());
  }
  const double turns = total / (2.0 * kPi);
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 1e-6) {
    std::ostringstream os;
    os << "winding number drifted: accumulated " << turns << " turns";
    throw ToleranceError(os.str());
  }
  return static_cast<int>(rounded);
}

}  // namespace

int winding_number(const Symbol& f, Complex lambda) { return winding_of_samples(sample_curve(f), lambda); }

PrincipalFunction::PrincipalFunction(Symbol f) : f_(std::move(f)), curve_(sample_curve(f_)) {
  box_ = {curve_[0].real(), curve_[0].real(), curve_[0].imag(), curve_[0].imag()};
  for (const Complex& z : curve_) {
    box_.x0 = std::min(box_.x0, z.real());
    box_.x1 = std::max(box_.x1, z.real());
    box_.y0 = std::min(box_.y0, z.imag());
    box_.y1 = std::max(box_.y1, z.imag());
  }
}

std::optional<int> PrincipalFunction::operator()(double x, double y) const {
  if (x < box_.x0 || x > box_.x1 || y < box_.y0 || y > box_.y1) return 0;
  try {
    return winding_of_samples(curve_, Complex(x, y));
  } catch (const ValidationError&) {
    return std::nullopt;
  }
}

Eigen::MatrixXi PrincipalFunction::rasterize(const Box& box, int res) const {
  if (res < 1) throw ValidationError("rasterize: resolution must be positive");
  Eigen::MatrixXi g = Eigen::MatrixXi::Zero(res, res);
  const double dx = (box.x1 - box.x0) / res, dy = (box.y1 - box.y0) / res;
  std::vector<std::pair<double, int>> crossings;
  for (int j = 0; j < res; ++j) {
    const double y = box.y0 + (j + 0.5) * dy;
    crossings.clear();
    for (std::size_t t = 0; t < curve_.size(); ++t) {
      const Complex a = curve_[t], b = curve_[(t + 1) % curve_.size()];
      // Half-open rule so a vertex on the scanline is counted once.
      const bool up = a.imag() <= y && b.imag() > y;
      const bool down = a.imag() > y && b.imag() <= y;
      if (!up && !down) continue;
      const double s = (y - a.imag()) / (b.imag() - a.imag());
      crossings.emplace_back(a.real() + s * (b.real() - a.real()), up ? 1 : -1);
    }
    std::sort(crossings.begin(), crossings.end());
    // Winding at x is the signed count of crossings to its right.
    int right = 0;
    for (const auto& c : crossings) right += c.second;
    std::size_t next = 0;
    for (int i = 0; i < res; ++i) {
      const double x = box.x0 + (i + 0.5) * dx;
      while (next < crossings.size() && crossings[next].first <= x) right -= crossings[next++].second;
      g(i, j) = right;
    }
  }
  return g;
}

}  // namespace opintegral
