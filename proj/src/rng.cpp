#include "opintegral/rng.hpp"

#include <cmath>

namespace opintegral {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

Xorshift64Star::Xorshift64Star(std::uint64_t seed) : state_(splitmix64(seed)) {
  if (state_ == 0) state_ = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t Xorshift64Star::next_u64() {
  state_ ^= state_ >> 12;
  state_ ^= state_ << 25;
  state_ ^= state_ >> 27;
  return state_ * 0x2545F4914F6CDD1DULL;
}

double Xorshift64Star::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Xorshift64Star::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * kPi * u2);
  has_spare_ = true;
  return r * std::cos(2.0 * kPi * u2);
}

Complex Xorshift64Star::complex_normal() {
  const double re = normal();
  const double im = normal();
  return {re / std::sqrt(2.0), im / std::sqrt(2.0)};
}

int Xorshift64Star::uniform_int(int lo, int hi_inclusive) {
  const auto span = static_cast<std::uint64_t>(hi_inclusive - lo + 1);
  return lo + static_cast<int>(next_u64() % span);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64(base ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

CMatrix random_complex_gaussian(int rows, int cols, Xorshift64Star& rng) {
  CMatrix m(rows, cols);
  // Row-major fill so the draw order matches the matrix file layout.
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.complex_normal();
  return m;
}

CMatrix random_hermitian(int n, Xorshift64Star& rng) {
  const CMatrix g = random_complex_gaussian(n, n, rng);
  return (g + g.adjoint()) / 2.0;
}

CMatrix random_unitary(int n, Xorshift64Star& rng) {
  const CMatrix g = random_complex_gaussian(n, n, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const double a = std::abs(r(j, j));
    if (a > 0) q.col(j) *= r(j, j) / a;
  }
  return q;
}

}  // namespace opintegral
