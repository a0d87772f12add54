#pragma once

// Random integrands with several equivalent finite representations, shared
// by the unit tests and the acceptance runner.

#include <string>
#include <vector>

#include "opintegral/rng.hpp"
#include "opintegral/toi.hpp"

namespace opintegral::testing {

// A random one-variable factor: a cubic polynomial or a damped oscillation.
inline Function1D random_factor(Xorshift64Star& rng) {
  if (rng.uniform() < 0.5) {
    CVector c(4);
    for (int i = 0; i < 4; ++i) c(i) = rng.complex_normal() / (1.0 + i);
    return Function1D::polynomial(c);
  }
  const double a = rng.uniform(0.5, 2.0), b = rng.uniform(-1.0, 1.0);
  return Function1D::parse(std::to_string(b) + " + cos(" + std::to_string(a) + "*x) * exp(-x^2/4)");
}

inline std::vector<Function1D> random_factors(int n, Xorshift64Star& rng) {
  std::vector<Function1D> out;
  for (int i = 0; i < n; ++i) out.push_back(random_factor(rng));
  return out;
}

// Psi(x1, x2, x3) = sum_n u_n(x1) v_n(x2) w_n(x3) written four ways.
struct SeparableIntegrand {
  std::vector<Function1D> u, v, w;

  HaagerupRep projective() const {
    return make_projective(FactorFamily::from_functions(u), FactorFamily::from_functions(v),
                           FactorFamily::from_functions(w));
  }
  // Diagonal middle factor.
  HaagerupRep haagerup() const {
    return make_haagerup(FactorFamily::from_functions(u), MatrixFactorFamily::diagonal(FactorFamily::from_functions(v)),
                         FactorFamily::from_functions(w));
  }
  // Diagonal third factor, sum over j = k.
  HaagerupRep first_kind() const {
    return make_first_kind(FactorFamily::from_functions(u), FactorFamily::from_functions(v),
                           MatrixFactorFamily::diagonal(FactorFamily::from_functions(w)));
  }
  HaagerupRep second_kind() const {
    return make_second_kind(MatrixFactorFamily::diagonal(FactorFamily::from_functions(u)),
                            FactorFamily::from_functions(v), FactorFamily::from_functions(w));
  }
  TripleFunction direct() const {
    return [u = u, v = v, w = w](double a, double b, double c) {
      Complex s = 0.0;
      for (std::size_t n = 0; n < u.size(); ++n) s += u[n](a) * v[n](b) * w[n](c);
      return s;
    };
  }
};

inline SeparableIntegrand random_separable(int terms, Xorshift64Star& rng) {
  return {random_factors(terms, rng), random_factors(terms, rng), random_factors(terms, rng)};
}

// Psi = sum_{j,k} a_j(x1) g_jk(x2) c_k(x3) with a full middle factor, and
// the same integrand as a projective sum over the pairs (j, k).
struct CoupledIntegrand {
  std::vector<Function1D> a, c;
  std::vector<std::vector<Function1D>> g;

  HaagerupRep haagerup() const {
    return make_haagerup(FactorFamily::from_functions(a), MatrixFactorFamily::from_functions(g),
                         FactorFamily::from_functions(c));
  }
  HaagerupRep projective() const {
    std::vector<Function1D> p1, p2, p3;
    for (std::size_t j = 0; j < a.size(); ++j)
      for (std::size_t k = 0; k < c.size(); ++k) {
        p1.push_back(a[j]);
        p2.push_back(g[j][k]);
        p3.push_back(c[k]);
      }
    return make_projective(FactorFamily::from_functions(p1), FactorFamily::from_functions(p2),
                           FactorFamily::from_functions(p3));
  }
};

inline CoupledIntegrand random_coupled(int rows, int cols, Xorshift64Star& rng) {
  CoupledIntegrand out{random_factors(rows, rng), random_factors(cols, rng), {}};
  for (int j = 0; j < rows; ++j) out.g.push_back(random_factors(cols, rng));
  return out;
}

}  // namespace opintegral::testing
