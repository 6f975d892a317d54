#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gelfand/extremal.hpp"

namespace gelfand {

struct TrendVerdict {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// One table per sweep. rows[i] lines up with columns and describes points[i].
struct SweepResult {
  std::string axis;
  std::vector<double> points;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<TrendVerdict> verdicts;
  /// Things the sweep skipped or clipped, e.g. A values past the log budget.
  std::vector<std::string> notes;
  /// Invariant counters summed over every solve behind the table.
  IterationAudit audit;
  int intervals = 0;
  double tol_iteration = 0.0;
  double tol_bisection = 0.0;

  bool all_pass() const;
  /// Column by name; throws std::out_of_range for an unknown name.
  std::vector<double> column(const std::string& name) const;
};

struct SweepOptions {
  int intervals = 1024;
  BisectionOptions bisection{};
  /// Worker threads for independent sweep points; 1 runs inline.
  int jobs = 1;
};

/// Torsion maximum, basic bounds and the bisection interval for each A.
/// Amplitudes whose weight g^A leaves the log-space budget are dropped and
/// listed in notes. Verdicts follow the profile's regime.
SweepResult sweep_A(const FlowProfile& profile, int dim, const std::vector<double>& amplitudes,
                    const Nonlinearity& nl, const SweepOptions& opts = {});

/// Extremal interval for f_p(u) = f(u^p) at each p, the limit target
/// 1/(f(0) psi_max) and u_max of the witness at lambda_lo.
SweepResult sweep_p(const FlowProfile& profile, double amplitude, int dim,
                    const Nonlinearity& base, const std::vector<double>& exponents,
                    const SweepOptions& opts = {});

/// Minimal solutions at fraction * lambda_lo. Records the branch columns, the
/// distance e = ||F(u)/lambda - psi|| to the discrete torsion, and the uniform
/// bound u_max <= F^{-1}(fraction F_total).
SweepResult branch_scan(const ProblemSetup& setup, const std::vector<double>& fractions,
                        const SweepOptions& opts = {});

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& text);
/// fnv1a64 as 16 lowercase hex digits.
std::string config_hash(const std::string& config_text);

/// Formats with 17 significant digits; non-finite values as nan/inf/-inf and
/// both zeros as 0.
std::string format_number(double value);

/// Writes "# config-hash: <hex>", "# config: <text>", one "# note:" line per
/// note and one "# verdict:" line per verdict, then the header row and one
/// line per point. config_text must be a single line.
void write_csv(std::ostream& out, const SweepResult& result, const std::string& config_text);

}  // namespace gelfand
