#pragma once

// Run configuration files.
//
//   file     := { line }
//   line     := ws [ section | entry ] ws [ '#' comment ] newline
//   section  := '[' name ']'
//   entry    := key ws '=' ws value
//   value    := '"' expression '"'            (data and initial fields)
//             | number-list                   (numeric keys)
//             | word                          (problem.kind)
//   number-list := constant-expression { ',' constant-expression }
//
// Numeric values may be constant expressions such as `2*pi`. Section and key
// reference:
//
//   [problem]     kind = product_flow | prescribed_mc | weighted_mcf | slice_ode
//   [grid]        dim, resolution, period, sigma (1 or n*n entries)
//   [data]        h, g, f, phi
//   [domain]      lower, upper, profile_lower, profile_upper
//   [initial]     u
//   [integrator]  cfl, tol, t_max, stride, max_steps, dt
//   [output]      dir
//   [slice]       r0, t_end, dt, n

#include "gmcf/expr.hpp"
#include "gmcf/flow.hpp"
#include "gmcf/grid.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gmcf {

enum class ProblemKind { product_flow, prescribed_mc, weighted_mcf, slice_ode };

std::string to_string(ProblemKind kind);

/// Malformed or inconsistent configuration. `line` is 0 for errors that do
/// not belong to a single line (missing keys, command-line overrides).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line = 0, int column = 0);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct GridSpec {
  int dim = 1;
  std::vector<std::size_t> resolution{128};
  std::vector<double> period{6.283185307179586};
  std::vector<double> sigma{1.0};

  bool operator==(const GridSpec&) const = default;
};

struct SliceSpec {
  std::optional<double> r0;
  std::optional<double> t_end;
  std::optional<double> dt;
  std::optional<int> n;

  bool operator==(const SliceSpec&) const = default;
};

struct RunConfig {
  ProblemKind kind = ProblemKind::product_flow;
  GridSpec grid;
  // Expression sources; empty when absent.
  std::string h, g, f, phi;
  std::optional<double> lower, upper;
  std::optional<double> profile_lower, profile_upper;
  std::string initial;
  double cfl = 0.4;
  double tol = 1e-8;
  double t_max = 200.0;
  std::size_t stride = 50;
  std::optional<std::size_t> max_steps;
  std::optional<double> dt;
  std::string output_dir = "out";
  SliceSpec slice;

  bool operator==(const RunConfig&) const = default;

  PeriodicGrid make_grid() const;
  IntegratorSettings integrator() const;
  /// Profile domain: explicit profile bounds, otherwise the slab widened by
  /// a quarter of its width on each side.
  double domain_lower() const;
  double domain_upper() const;
};

/// Parses and validates. Overrides are `section.key=value` strings applied
/// on top of the file before validation.
RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Canonical text form; parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& config);

/// Checks kind-specific required keys, expression variables and ranges.
void validate(const RunConfig& config);

/// Parses an expression-valued key; `key` names it in error messages.
Expr parse_data(const std::string& source, const std::string& key);

}  // namespace gmcf
