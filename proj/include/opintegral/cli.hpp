#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace opintegral::cli {

// Everything a subcommand needs after argument parsing. Paths are checked
// for existence before the subcommand runs.
struct RunConfig {
  std::string subcommand;
  std::map<std::string, std::string> inputs;  // role ("A", "phi", "config", ...) -> path or inline text
  std::string output;                         // primary output file (matrix or JSON report)
  std::string csv;                            // optional CSV table
  bool json = false;                          // machine output only on stdout

  // Numeric parameters; unset ones fall back to per-subcommand defaults.
  std::optional<int> n, m, J, trials, dim, degree, rank, grid_points;
  std::optional<int> band_lo, band_hi;
  std::optional<double> s, p, q, tol, period, sigma;
  std::uint64_t seed = 0x5EED;
  std::string path = "auto";  // commutator evaluation path
  int threads = 1;            // from OPINTEGRAL_THREADS
};

// Parses argv, runs the subcommand and returns the exit code:
// 0 success, 1 validation error or bad usage, 2 numerical tolerance failure.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Value of OPINTEGRAL_THREADS (default 1). The library is single threaded,
// so this only caps; a malformed value is a validation error.
int thread_cap();

}  // namespace opintegral::cli
