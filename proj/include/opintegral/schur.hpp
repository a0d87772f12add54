#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "opintegral/types.hpp"

namespace opintegral {

struct SchurOptions {
  double tol = 1e-6;               // target gap between upper and lower
  int iteration_budget = 5000;     // Dykstra iterations per feasibility solve
  double feasibility_tol = 1e-9;
  int random_contractions = 200;
  std::uint64_t seed = 0x5EED;
  // Optional factorization phi_hat = L * R, used as one more upper witness
  // (e.g. from a known projective decomposition).
  std::optional<CMatrix> hint_left, hint_right;
};

// Two-sided bound on the Schur (Hadamard) multiplier norm of phi_hat.
struct SchurMultiplierCertificate {
  CMatrix phi_hat;
  double upper = 0;
  double lower = 0;
  double gap = 0;
  CMatrix x, y;                 // [[X, phi_hat], [phi_hat*, Y]] is PSD
  double witness_min_eig = 0;   // smallest eigenvalue of that block, relative
  std::string upper_source;     // which witness produced `upper`
  std::string lower_source;
  int bisection_steps = 0;
  int dykstra_iterations = 0;
  bool converged = false;       // gap <= tol
};

SchurMultiplierCertificate schur_multiplier_norm(const CMatrix& phi_hat, const SchurOptions& opt = {});

// ||phi o Z||_op for a contraction Z (helper for lower bounds and tests).
double schur_ratio(const CMatrix& phi_hat, const CMatrix& z);

}  // namespace opintegral
