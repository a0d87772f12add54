#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "opintegral/besov.hpp"
#include "opintegral/models.hpp"
#include "opintegral/toi.hpp"

namespace opintegral::io {

namespace fs = std::filesystem;

// .opmat: "dim n complex", then n*n lines "re im" in row-major order.
CMatrix read_opmat(const fs::path& path);
CMatrix parse_opmat(const std::string& text, const std::string& origin = "<string>");
void write_opmat(const fs::path& path, const CMatrix& m);
std::string format_opmat(const CMatrix& m);

// .opfun: "grid d L N", then N^d values row-major, one per line as "re" or "re im".
SampledFunction read_opfun(const fs::path& path);
SampledFunction parse_opfun(const std::string& text, const std::string& origin = "<string>");
std::string format_opfun(const SampledFunction& f);

// Symbol files: "deg d", then lines "k re im".
Symbol read_symbol(const fs::path& path);
Symbol parse_symbol(const std::string& text, const std::string& origin = "<string>");
std::string format_symbol(const Symbol& f);

// Flat "key = value" text. '#' starts a comment, blank lines are skipped,
// repeated keys accumulate in order.
class KeyValues {
 public:
  static KeyValues parse(const std::string& text, const std::string& origin = "<string>");
  static KeyValues read(const fs::path& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  // Last value of a key; ValidationError when missing.
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  const std::vector<std::string>& all(const std::string& key) const;
  int get_int(const std::string& key, int fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::vector<std::string> keys() const;
  // Keys never read through get/get_or/all/get_int/get_double.
  std::vector<std::string> unused() const;
  const std::string& origin() const { return origin_; }
  const fs::path& base_dir() const { return base_; }

 private:
  std::map<std::string, std::vector<std::string>> values_;
  std::vector<std::string> order_;
  mutable std::map<std::string, bool> used_;
  std::string origin_;
  fs::path base_;
};

// Function spec files:
//   variant = polynomial   coeff = j k re [im]   (repeatable; x^j y^k)
//   variant = expr         expr = <expression in x, y>
//   variant = product      u = <expression in x>   v = <expression in x>
//   variant = sampled      file = <path to .opfun>
// A file without '=' is read as a bare expression.
Function2D read_function(const fs::path& path);
Function2D parse_function_spec(const std::string& text, const fs::path& base_dir = {},
                               const std::string& origin = "<string>");
// A path to an existing file, or else an inline expression.
Function2D function_argument(const std::string& arg);

// Representation files:
//   kind = projective | haagerup | first_kind | second_kind
//   J = <int>   K = <int>
//   f1 = e_0 ; e_1 ; ...    f2 = ...    f3 = ...
//   g.<j> = e_0 ; ... ; e_{K-1}     (one line per row j < J)
// with factors given as expressions in x. Which families are read follows
// the kind: projective f1 f2 f3 (J each); haagerup f1 (J) g f3 (K);
// first kind f1 (J) f2 (K) g; second kind g f2 (J) f3 (K).
HaagerupRep read_representation(const fs::path& path);
HaagerupRep parse_representation(const std::string& text, const std::string& origin = "<string>");

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

}  // namespace opintegral::io
