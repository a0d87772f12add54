#include "opintegral/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace opintegral {

HermitianOperator::HermitianOperator(CMatrix entries, double rel_tol) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw ValidationError("HermitianOperator: matrix must be square and non-empty");
  }
  const double scale = std::max(1.0, max_abs_entry(entries_));
  const int n = dim();
  double worst = 0.0;
  int wi = 0, wj = 0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i <= j; ++i) {
      const double d = std::abs(entries_(i, j) - std::conj(entries_(j, i)));
      if (d > worst) {
        worst = d;
        wi = i;
        wj = j;
      }
    }
  }
  if (worst > rel_tol * scale) {
    std::ostringstream os;
    os << "HermitianOperator: entries (" << wi << "," << wj << ") and (" << wj << "," << wi
       << ") violate Hermitian symmetry by " << worst << " (tolerance " << rel_tol * scale << ")";
    throw ValidationError(os.str());
  }
  // Exact symmetry downstream; the diagonal is real.
  entries_ = (entries_ + entries_.adjoint()).eval() / 2.0;
}

HermitianOperator HermitianOperator::symmetrized(const CMatrix& entries) {
  if (entries.rows() != entries.cols() || entries.rows() == 0) {
    throw ValidationError("HermitianOperator: matrix must be square and non-empty");
  }
  return HermitianOperator(CMatrix((entries + entries.adjoint()) / 2.0), Unchecked{});
}

CMatrix SpectralDecomposition::reconstruct() const {
  return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
}

double SpectralDecomposition::spectral_radius() const {
  return dim() == 0 ? 0.0 : eigenvalues.cwiseAbs().maxCoeff();
}

namespace {

double off_diagonal_norm(const CMatrix& a) {
  double s = 0.0;
  const int n = static_cast<int>(a.rows());
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

struct Rotation {
  int p, q;
  double c;
  Complex jpq;  // J(p, q) = s e^{i arg a_pq}
  Complex jqp;  // J(q, p) = -s e^{-i arg a_pq}
  double new_pp, new_qq;
};

// Rotation zeroing a(p, q) after reducing the pivot to a real number by a
// phase: theta = (a_qq - a_pp) / (2|a_pq|), t the smaller root.
Rotation make_rotation(const CMatrix& a, int p, int q) {
  const Complex apq = a(p, q);
  const double r = std::abs(apq);
  const Complex e = apq / r;
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double theta = (aqq - app) / (2.0 * r);
  double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  if (theta < 0.0) t = -t;
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  return {p, q, c, s * e, -s * std::conj(e), app - t * r, aqq + t * r};
}

// Round-robin pairing: round r of (m - 1) pairs every index exactly once,
// so the rotations of a round act on disjoint index pairs and commute.
std::vector<std::vector<std::pair<int, int>>> tournament(int n) {
  const int m = n + (n % 2);
  std::vector<int> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<std::vector<std::pair<int, int>>> rounds;
  for (int r = 0; r < m - 1; ++r) {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < m / 2; ++i) {
      int p = idx[i], q = idx[m - 1 - i];
      if (p >= n || q >= n) continue;
      if (p > q) std::swap(p, q);
      pairs.emplace_back(p, q);
    }
    std::sort(pairs.begin(), pairs.end());
    rounds.push_back(std::move(pairs));
    std::rotate(idx.begin() + 1, idx.end() - 1, idx.end());
  }
  return rounds;
}

// A <- J* A J and V <- V J for a set of disjoint rotations. Both passes walk
// columns contiguously.
void apply_round(CMatrix& a, CMatrix& v, const std::vector<Rotation>& rots) {
  const int n = static_cast<int>(a.rows());
  for (const auto& g : rots) {
    Complex* cp = a.col(g.p).data();
    Complex* cq = a.col(g.q).data();
    Complex* vp = v.col(g.p).data();
    Complex* vq = v.col(g.q).data();
    for (int k = 0; k < n; ++k) {
      const Complex x = cp[k], y = cq[k];
      cp[k] = g.c * x + g.jqp * y;
      cq[k] = g.jpq * x + g.c * y;
      const Complex vx = vp[k], vy = vq[k];
      vp[k] = g.c * vx + g.jqp * vy;
      vq[k] = g.jpq * vx + g.c * vy;
    }
  }
  for (int k = 0; k < n; ++k) {
    Complex* col = a.col(k).data();
    for (const auto& g : rots) {
      const Complex x = col[g.p], y = col[g.q];
      col[g.p] = g.c * x + std::conj(g.jqp) * y;
      col[g.q] = std::conj(g.jpq) * x + g.c * y;
    }
  }
  for (const auto& g : rots) {
    a(g.p, g.p) = g.new_pp;
    a(g.q, g.q) = g.new_qq;
    a(g.p, g.q) = 0.0;
    a(g.q, g.p) = 0.0;
  }
}

}  // namespace

SpectralDecomposition decompose(const HermitianOperator& h, double cluster_tol) {
  constexpr double kOffTol = 1e-13;
  constexpr int kMaxSweeps = 60;

  CMatrix a = h.matrix();
  const int n = h.dim();
  CMatrix v = CMatrix::Identity(n, n);
  const double fro = a.norm();
  const auto rounds = tournament(n);

  int sweeps = 0;
  bool polish_done = false;
  std::vector<Rotation> rots;
  while (sweeps < kMaxSweeps) {
    const double off = off_diagonal_norm(a);
    if (off <= kOffTol * fro || off == 0.0) {
      // One extra sweep past the tolerance drives the residual to rounding level.
      if (polish_done || off == 0.0) break;
      polish_done = true;
    }
    ++sweeps;
    for (const auto& pairs : rounds) {
      rots.clear();
      for (auto [p, q] : pairs) {
        const double r = std::abs(a(p, q));
        if (r == 0.0) continue;
        const double dp = std::abs(a(p, p).real());
        const double dq = std::abs(a(q, q).real());
        // Negligible relative to both diagonal entries: drop it.
        if (sweeps > 3 && dp + 1e3 * r == dp && dq + 1e3 * r == dq) {
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          continue;
        }
        rots.push_back(make_rotation(a, p, q));
      }
      if (!rots.empty()) apply_round(a, v, rots);
    }
  }
  if (fro > 0 && off_diagonal_norm(a) > kOffTol * fro) {
    throw ToleranceError("decompose: Jacobi iteration did not converge");
  }
  // Restore exact Hermitian symmetry lost to rounding in the two passes.
  a = ((a + a.adjoint()) / 2.0).eval();

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return a(i, i).real() < a(j, j).real(); });

  SpectralDecomposition dec;
  dec.sweeps = sweeps;
  dec.eigenvalues.resize(n);
  dec.eigenvectors.resize(n, n);
  for (int k = 0; k < n; ++k) {
    dec.eigenvalues(k) = a(order[k], order[k]).real();
    dec.eigenvectors.col(k) = v.col(order[k]);
  }

  const double radius = dec.spectral_radius();
  dec.cluster_tol = cluster_tol < 0.0 ? 1e-8 * radius : cluster_tol;
  for (int k = 0; k < n; ++k) {
    if (dec.clusters.empty() ||
        dec.eigenvalues(k) - dec.eigenvalues(dec.clusters.back().front()) > dec.cluster_tol) {
      dec.clusters.push_back({k});
    } else {
      dec.clusters.back().push_back(k);
    }
  }
  return dec;
}

CMatrix spectral_projection(const SpectralDecomposition& dec, int cluster_index) {
  if (cluster_index < 0 || cluster_index >= static_cast<int>(dec.clusters.size())) {
    std::ostringstream os;
    os << "spectral_projection: cluster index " << cluster_index << " out of range [0, "
       << dec.clusters.size() << ")";
    throw ValidationError(os.str());
  }
  const auto& idx = dec.clusters[cluster_index];
  CMatrix u(dec.dim(), static_cast<int>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) u.col(static_cast<int>(k)) = dec.eigenvectors.col(idx[k]);
  return u * u.adjoint();
}

RVector singular_values(const CMatrix& m) {
  if (m.size() == 0) return RVector();
  Eigen::BDCSVD<CMatrix> svd(m);
  return svd.singularValues();
}

double schatten_norm(const CMatrix& m, double p) {
  if (!(p >= 1.0)) {
    std::ostringstream os;
    os << "schatten_norm: p must lie in [1, inf], got " << p;
    throw ValidationError(os.str());
  }
  const RVector s = singular_values(m);
  if (s.size() == 0) return 0.0;
  const double smax = s.maxCoeff();
  if (std::isinf(p) || smax == 0.0) return smax;
  if (p == 1.0) return s.sum();
  double acc = 0.0;
  for (int i = 0; i < s.size(); ++i) acc += std::pow(s(i) / smax, p);
  return smax * std::pow(acc, 1.0 / p);
}

}  // namespace opintegral
