#pragma once

#include <optional>
#include <string>
#include <vector>

#include "opintegral/besov.hpp"
#include "opintegral/models.hpp"
#include "opintegral/spectral.hpp"

namespace opintegral {

// A = T_{Re f}, B = T_{Im f} truncated to N x N; f = e^{i theta} is the shift model.
struct TruncatedModel {
  int n = 0;
  Symbol symbol;
  HermitianOperator a, b;
  SpectralDecomposition da, db;
};

TruncatedModel truncated_model(const Symbol& f, int n);

struct CornerTrace {
  double value = 0;         // real part of sum_{k<M} K_kk, K = i[phi(A,B), psi(A,B)]
  double imag_residue = 0;  // imaginary part, discarded after the check
  double scale = 0;         // ||K restricted to its first M rows||
  bool imag_ok = true;      // |imag_residue| <= 1e-10 * scale
  std::vector<std::string> warnings;
};

CornerTrace lhs_corner_trace(const TruncatedModel& model, const Function2D& phi, const Function2D& psi, int m);

// (1/2pi) iint (phi_x psi_y - phi_y psi_x) g over the curve's bounding box,
// midpoint rule on res x res cells.
Complex rhs_integral(const Function2D& phi, const Function2D& psi, const PrincipalFunction& g, int res);
// Same with g = 1 on `box`.
Complex rhs_integral_flat(const Function2D& phi, const Function2D& psi, const Box& box, int res);

struct TraceExperimentConfig {
  Symbol symbol = Symbol::monomial(1);
  Function2D phi = Function2D::parse("x");
  Function2D psi = Function2D::parse("y");
  int n = 128;
  int m = 0;  // 0 selects n / 4
  int resolution = 2048;
  bool flat_g = false;              // g = 1 on flat_box instead of the winding function
  Box flat_box;
  std::vector<int> table_sizes;     // empty: no convergence table
  std::vector<int> table_divisors = {8, 4, 2};
};

struct ConvergenceCell {
  int n = 0, m = 0;
  double lhs = 0;
  double abs_err = 0;
  double rel_err = 0;
};

struct TraceReport {
  int n = 0, m = 0;
  double lhs = 0;
  double lhs_imag = 0;
  double rhs = 0;
  double rhs_imag = 0;
  double abs_err = 0;
  double rel_err = 0;
  std::string g_mode;
  std::vector<ConvergenceCell> table;
  std::vector<std::string> warnings;
};

TraceReport trace_formula_experiment(const TraceExperimentConfig& cfg);

// Both sides computed band by band (phi_n, psi_m from the Littlewood-Paley
// decomposition on `grid`) and summed, against the totals for phi and psi.
struct BandAdditivity {
  std::vector<int> phi_bands, psi_bands;
  RMatrix lhs_parts, rhs_parts;  // (phi band, psi band)
  double lhs_total = 0, lhs_sum = 0;
  double rhs_total = 0, rhs_sum = 0;
  double lhs_defect = 0, rhs_defect = 0;
};

BandAdditivity band_additivity(const TraceExperimentConfig& cfg, const PeriodicGrid& grid,
                               std::optional<BandRange> range = std::nullopt, int band_resolution = 256);

}  // namespace opintegral
