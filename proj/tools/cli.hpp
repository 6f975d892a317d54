#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "gelfand/extremal.hpp"

namespace gelfand::cli {

/// Everything a run needs. Defaults are the built-in layer; a JSON config
/// file and then command-line flags are applied on top.
struct RunConfig {
  std::string subcommand;

  std::string profile = "constant";  // constant | inverse-quadratic | plateau | table
  double rho_c = 0.0;
  double plateau_a = 0.5;
  double plateau_b = 1.0;
  double plateau_outer = 1.0;
  std::vector<double> table_radii;
  std::vector<double> table_values;
  double table_lipschitz = 10.0;

  double A = 0.0;
  int N = 2;
  int M = 1024;
  std::string f = "exp";  // exp | power | mems | power-composite
  double p = 2.0;
  double q = 2.0;

  double tol_iter = 1e-10;
  double tol_bisect = 1e-6;
  double tol_eig = 1e-11;
  int alpha_points = 128;

  std::vector<double> A_list = {0.0, 10.0, 50.0, 100.0};
  std::vector<double> p_list = {1.0, 2.0, 4.0, 8.0};
  std::vector<double> fractions = {0.0625, 0.125, 0.25, 0.5};

  std::string out = "-";
  std::string format;  // csv | json; empty picks the subcommand's default
  int jobs = 1;
};

inline const std::vector<std::string> kSubcommands = {
    "torsion", "bounds", "lambda-star", "branch", "sweep-a", "sweep-p", "verify"};

nlohmann::json to_json(const RunConfig& cfg);

/// Overlays the keys present in `j`. Throws ConfigError naming the offending
/// key path for unknown keys and wrong types.
void apply_json(RunConfig& cfg, const nlohmann::json& j);

/// Fills the default format and checks ranges. Throws ConfigError.
void finalize(RunConfig& cfg);

FlowProfile make_profile(const RunConfig& cfg);
Nonlinearity make_nonlinearity(const RunConfig& cfg);
ProblemSetup make_setup(const RunConfig& cfg);

/// Parses argv, executes, writes results. Returns 0 on success, 1 on a
/// computation error or a failed verify, 2 on a configuration error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gelfand::cli
