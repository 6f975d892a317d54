#include "cli.hpp"

#include <unistd.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gelfand/errors.hpp"
#include "gelfand/experiments.hpp"
#include "gelfand/golden.hpp"

namespace gelfand::cli {

using nlohmann::json;

namespace {

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  return j.get<int>();
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> get_numbers(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(get_number(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

void check_increasing(const std::vector<double>& v, const std::string& path) {
  if (v.empty()) throw ConfigError(path, "must not be empty");
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) throw ConfigError(path, "must be strictly increasing");
  }
}

std::string default_format(const std::string& sub) {
  return (sub == "bounds" || sub == "lambda-star") ? "json" : "csv";
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

json audit_json(const IterationAudit& a) {
  return {{"steps_checked", a.steps_checked},
          {"monotonicity_violations", a.monotonicity_violations},
          {"domination_checked", a.domination_checked},
          {"domination_violations", a.domination_violations}};
}

json sweep_json(const SweepResult& r, const json& config) {
  json verdicts = json::array();
  for (const auto& v : r.verdicts) {
    verdicts.push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
  }
  return {{"config", config},
          {"axis", r.axis},
          {"columns", r.columns},
          {"rows", r.rows},
          {"verdicts", verdicts},
          {"notes", r.notes},
          {"grid", {{"M", r.intervals}}},
          {"tolerances", {{"iteration", r.tol_iteration}, {"bisection", r.tol_bisection}}},
          {"audit", audit_json(r.audit)}};
}

json verdict_summary(const SweepResult& r, const json& config) {
  json verdicts = json::array();
  for (const auto& v : r.verdicts) {
    verdicts.push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
  }
  return {{"config_hash", config_hash(config.dump())}, {"verdicts", verdicts},
          {"all_pass", r.all_pass()}};
}

void write_key_values(std::ostream& os, const std::string& config_text,
                      const std::vector<std::pair<std::string, double>>& rows) {
  os << "# config-hash: " << config_hash(config_text) << "\n# config: " << config_text
     << "\nkey,value\n";
  for (const auto& [k, v] : rows) os << k << "," << format_number(v) << "\n";
}

struct Sink {
  std::ofstream file;
  std::ostream* stream = nullptr;
  bool to_file = false;
};

void open_sink(Sink& sink, const std::string& path, std::ostream& fallback) {
  if (path == "-") {
    sink.stream = &fallback;
    return;
  }
  sink.file.open(path, std::ios::binary | std::ios::trunc);
  if (!sink.file) throw ConfigError("out", "cannot open " + path + " for writing");
  sink.stream = &sink.file;
  sink.to_file = true;
}

// Tags computation errors with the module that raised them.
template <class F>
auto in_module(const char* module, F&& body) {
  try {
    return body();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw Error(std::string(module) + ": " + e.what());
  }
}

int execute(const RunConfig& cfg, std::ostream& out) {
  const json config = to_json(cfg);
  const std::string config_text = config.dump();
  Sink sink;
  open_sink(sink, cfg.out, out);
  std::ostream& os = *sink.stream;
  const bool as_json = cfg.format == "json";

  SweepOptions sweep;
  sweep.intervals = cfg.M;
  sweep.jobs = cfg.jobs;
  sweep.bisection.tol = cfg.tol_bisect;
  sweep.bisection.iteration.tol = cfg.tol_iter;
  sweep.bisection.iteration.eig_tol = cfg.tol_eig;

  const auto& sub = cfg.subcommand;
  if (sub == "torsion") {
    const auto tp = in_module("radial_flow", [&] {
      return torsion(make_profile(cfg), cfg.A, cfg.N, cfg.M);
    });
    if (as_json) {
      os << json{{"config", config},
                 {"psi_max", tp.psi_max},
                 {"grid", {{"M", cfg.M}, {"N", cfg.N}}},
                 {"r", tp.nodes},
                 {"psi", tp.psi},
                 {"dpsi", tp.dpsi}}
                .dump(2)
         << "\n";
    } else {
      SweepResult table;
      table.columns = {"r", "psi", "dpsi"};
      table.notes.push_back("psi_max = " + format_number(tp.psi_max));
      for (std::size_t i = 0; i < tp.nodes.size(); ++i) {
        table.rows.push_back({tp.nodes[i], tp.psi[i], tp.dpsi[i]});
      }
      write_csv(os, table, config_text);
    }
    return 0;
  }

  if (sub == "bounds") {
    BoundsOptions bo;
    bo.intervals = cfg.M;
    bo.alpha_points = cfg.alpha_points;
    bo.bisection = sweep.bisection;
    bo.eig_tol = cfg.tol_eig;
    const auto rep = in_module("extremal", [&] { return bounds_report(make_setup(cfg), bo); });
    if (as_json) {
      json checks = json::object();
      for (const auto& [name, ok] : rep.sandwich_checks) checks[name] = ok;
      os << json{{"config", config},
                 {"lower_basic", rep.lower_basic},
                 {"lower_alpha", rep.lower_alpha},
                 {"alpha_hat", rep.alpha_hat},
                 {"upper_F", rep.upper_F},
                 {"upper_mu1", rep.upper_mu1},
                 {"lambda_lo", rep.lambda_star.lo},
                 {"lambda_hi", rep.lambda_star.hi},
                 {"sandwich_ok", rep.sandwich_ok},
                 {"sandwich_checks", checks},
                 {"grid", {{"M", rep.intervals}, {"N", cfg.N}}},
                 {"psi_max", rep.psi_max},
                 {"sup_ratio", rep.sup_ratio},
                 {"t_hat", rep.t_hat},
                 {"F_total", rep.F_total},
                 {"mu1", rep.mu1},
                 {"mu1_refinement_delta", rep.mu1_refinement_delta},
                 {"audit", audit_json(rep.lambda_star.audit)}}
                .dump(2)
         << "\n";
    } else {
      write_key_values(os, config_text,
                       {{"lower_basic", rep.lower_basic},
                        {"lower_alpha", rep.lower_alpha},
                        {"alpha_hat", rep.alpha_hat},
                        {"upper_F", rep.upper_F},
                        {"upper_mu1", rep.upper_mu1},
                        {"lambda_lo", rep.lambda_star.lo},
                        {"lambda_hi", rep.lambda_star.hi},
                        {"sandwich_ok", rep.sandwich_ok ? 1.0 : 0.0},
                        {"psi_max", rep.psi_max},
                        {"mu1", rep.mu1}});
    }
    return 0;
  }

  if (sub == "lambda-star") {
    const auto iv = in_module("extremal", [&] {
      return lambda_star_bisect(make_setup(cfg), RadialGrid(cfg.N, cfg.M), sweep.bisection);
    });
    if (as_json) {
      os << json{{"config", config},
                 {"lambda_lo", iv.lo},
                 {"lambda_hi", iv.hi},
                 {"lambda_mid", iv.mid()},
                 {"steps", iv.steps},
                 {"grid", {{"M", iv.intervals}, {"N", cfg.N}}},
                 {"witness",
                  {{"u_max", iv.witness.u_max()},
                   {"iterations", iv.witness.iterations},
                   {"residual", iv.witness.residual},
                   {"kappa1", iv.witness.kappa1}}},
                 {"certificate", iv.certificate.describe()},
                 {"audit", audit_json(iv.audit)}}
                .dump(2)
         << "\n";
    } else {
      write_key_values(os, config_text,
                       {{"lambda_lo", iv.lo},
                        {"lambda_hi", iv.hi},
                        {"steps", double(iv.steps)},
                        {"u_max", iv.witness.u_max()},
                        {"kappa1", iv.witness.kappa1}});
    }
    return 0;
  }

  if (sub == "branch" || sub == "sweep-a" || sub == "sweep-p") {
    const auto result = in_module("experiments", [&] {
      if (sub == "branch") return branch_scan(make_setup(cfg), cfg.fractions, sweep);
      if (sub == "sweep-a") {
        return sweep_A(make_profile(cfg), cfg.N, cfg.A_list, make_nonlinearity(cfg), sweep);
      }
      return sweep_p(make_profile(cfg), cfg.A, cfg.N, make_nonlinearity(cfg), cfg.p_list,
                     sweep);
    });
    if (as_json) {
      os << sweep_json(result, config).dump(2) << "\n";
    } else {
      write_csv(os, result, config_text);
      if (sink.to_file) out << verdict_summary(result, config).dump(2) << "\n";
    }
    return 0;
  }

  // verify
  GoldenOptions go;
  go.jobs = cfg.jobs;
  const auto results = run_golden_suite(go);
  bool all = true;
  for (const auto& r : results) all = all && r.pass;
  if (as_json) {
    json arr = json::array();
    for (const auto& r : results) {
      arr.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}, {"detail", r.detail}});
    }
    os << json{{"config", config}, {"criteria", arr}, {"all_pass", all}}.dump(2) << "\n";
  } else {
    os << "# config-hash: " << config_hash(config_text) << "\n# config: " << config_text
       << "\nid,title,pass,detail\n";
    for (const auto& r : results) {
      os << r.id << "," << csv_quote(r.title) << "," << (r.pass ? "pass" : "fail") << ","
         << csv_quote(r.detail) << "\n";
    }
  }
  return all ? 0 : 1;
}

}  // namespace

json to_json(const RunConfig& c) {
  return {{"subcommand", c.subcommand},
          {"profile", c.profile},
          {"rho_c", c.rho_c},
          {"plateau", {c.plateau_a, c.plateau_b}},
          {"plateau_outer", c.plateau_outer},
          {"table", {{"radii", c.table_radii}, {"values", c.table_values},
                     {"lipschitz", c.table_lipschitz}}},
          {"A", c.A},
          {"N", c.N},
          {"M", c.M},
          {"f", c.f},
          {"p", c.p},
          {"q", c.q},
          {"tol_iter", c.tol_iter},
          {"tol_bisect", c.tol_bisect},
          {"tol_eig", c.tol_eig},
          {"alpha_points", c.alpha_points},
          {"A_list", c.A_list},
          {"p_list", c.p_list},
          {"fractions", c.fractions},
          {"out", c.out},
          {"format", c.format},
          {"jobs", c.jobs}};
}

void apply_json(RunConfig& c, const json& j) {
  if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "subcommand") {
      c.subcommand = get_string(v, key);
    } else if (key == "profile") {
      c.profile = get_string(v, key);
    } else if (key == "rho_c") {
      c.rho_c = get_number(v, key);
    } else if (key == "plateau") {
      const auto ab = get_numbers(v, key);
      if (ab.size() != 2) throw ConfigError(key, "expected [a, b]");
      c.plateau_a = ab[0];
      c.plateau_b = ab[1];
    } else if (key == "plateau_outer") {
      c.plateau_outer = get_number(v, key);
    } else if (key == "table") {
      if (!v.is_object()) throw ConfigError(key, "expected an object");
      for (const auto& [tk, tv] : v.items()) {
        const std::string path = "table." + tk;
        if (tk == "radii") {
          c.table_radii = get_numbers(tv, path);
        } else if (tk == "values") {
          c.table_values = get_numbers(tv, path);
        } else if (tk == "lipschitz") {
          c.table_lipschitz = get_number(tv, path);
        } else {
          throw ConfigError(path, "unknown key");
        }
      }
    } else if (key == "A") {
      c.A = get_number(v, key);
    } else if (key == "N") {
      c.N = get_int(v, key);
    } else if (key == "M") {
      c.M = get_int(v, key);
    } else if (key == "f") {
      c.f = get_string(v, key);
    } else if (key == "p") {
      c.p = get_number(v, key);
    } else if (key == "q") {
      c.q = get_number(v, key);
    } else if (key == "tol_iter") {
      c.tol_iter = get_number(v, key);
    } else if (key == "tol_bisect") {
      c.tol_bisect = get_number(v, key);
    } else if (key == "tol_eig") {
      c.tol_eig = get_number(v, key);
    } else if (key == "alpha_points") {
      c.alpha_points = get_int(v, key);
    } else if (key == "A_list") {
      c.A_list = get_numbers(v, key);
    } else if (key == "p_list") {
      c.p_list = get_numbers(v, key);
    } else if (key == "fractions") {
      c.fractions = get_numbers(v, key);
    } else if (key == "out") {
      c.out = get_string(v, key);
    } else if (key == "format") {
      c.format = get_string(v, key);
    } else if (key == "jobs") {
      c.jobs = get_int(v, key);
    } else {
      throw ConfigError(key, "unknown key");
    }
  }
}

void finalize(RunConfig& c) {
  if (std::find(kSubcommands.begin(), kSubcommands.end(), c.subcommand) == kSubcommands.end()) {
    throw ConfigError("subcommand", "unknown subcommand '" + c.subcommand + "'");
  }
  if (c.format.empty()) c.format = default_format(c.subcommand);
  if (c.format != "csv" && c.format != "json") {
    throw ConfigError("format", "must be csv or json");
  }
  if (c.profile != "constant" && c.profile != "inverse-quadratic" && c.profile != "plateau" &&
      c.profile != "table") {
    throw ConfigError("profile", "must be constant, inverse-quadratic, plateau or table");
  }
  if (c.f != "exp" && c.f != "power" && c.f != "mems" && c.f != "power-composite") {
    throw ConfigError("f", "must be exp, power, mems or power-composite");
  }
  if (c.N < 2) throw ConfigError("N", "must be >= 2");
  if (c.M < 16) throw ConfigError("M", "must be >= 16");
  if (!(c.A >= 0.0) || !std::isfinite(c.A)) throw ConfigError("A", "must be finite and >= 0");
  if (!(c.tol_iter > 0.0)) throw ConfigError("tol_iter", "must be > 0");
  if (!(c.tol_bisect > 0.0)) throw ConfigError("tol_bisect", "must be > 0");
  if (!(c.tol_eig > 0.0)) throw ConfigError("tol_eig", "must be > 0");
  if (c.alpha_points < 64) throw ConfigError("alpha_points", "must be >= 64");
  if (c.jobs < 1) throw ConfigError("jobs", "must be >= 1");
  if (c.subcommand == "sweep-a") check_increasing(c.A_list, "A_list");
  if (c.subcommand == "sweep-p") check_increasing(c.p_list, "p_list");
  if (c.subcommand == "branch") {
    auto sorted = c.fractions;
    std::sort(sorted.begin(), sorted.end());
    check_increasing(sorted, "fractions");
    if (!(sorted.front() > 0.0) || !(sorted.back() < 1.0)) {
      throw ConfigError("fractions", "must lie in (0, 1)");
    }
  }
  if (c.out != "-") {
    namespace fs = std::filesystem;
    fs::path dir = fs::path(c.out).parent_path();
    if (dir.empty()) dir = ".";
    std::error_code ec;
    if (!fs::is_directory(dir, ec) || ::access(dir.c_str(), W_OK) != 0) {
      throw ConfigError("out", "directory " + dir.string() + " is not writable");
    }
  }
}

FlowProfile make_profile(const RunConfig& c) {
  try {
    if (c.profile == "constant") return FlowProfile::constant(c.rho_c);
    if (c.profile == "inverse-quadratic") return FlowProfile::inverse_quadratic();
    if (c.profile == "plateau") {
      return FlowProfile::plateau(c.plateau_a, c.plateau_b, c.plateau_outer);
    }
    return FlowProfile::tabulated(c.table_radii, c.table_values, c.table_lipschitz);
  } catch (const DomainError& e) {
    const bool shaped = c.profile == "table" || c.profile == "plateau";
    throw ConfigError(shaped ? c.profile : "profile", e.what());
  }
}

Nonlinearity make_nonlinearity(const RunConfig& c) {
  try {
    if (c.f == "exp") return Nonlinearity::exponential();
    if (c.f == "power") return Nonlinearity::power(c.p);
    if (c.f == "mems") return Nonlinearity::mems(c.q);
    return Nonlinearity::exponential().compose_power(c.p);
  } catch (const DomainError& e) {
    throw ConfigError(c.f == "mems" ? "q" : "p", e.what());
  }
}

ProblemSetup make_setup(const RunConfig& c) {
  return {make_profile(c), c.A, c.N, make_nonlinearity(c)};
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Extremal parameters of L_A u = lambda f(u) on the unit ball with radial drift",
               "gelfand"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  RunConfig flags;
  std::vector<double> plateau;
  auto* o_config = app.add_option("--config", config_path, "JSON config file");
  auto* o_profile = app.add_option("--profile", flags.profile,
                                   "constant | inverse-quadratic | plateau | table");
  auto* o_rho = app.add_option("--rho-c", flags.rho_c, "value of a constant profile");
  auto* o_plateau = app.add_option("--plateau", plateau, "plateau a b")->expected(2);
  auto* o_A = app.add_option("--A", flags.A, "drift amplitude A >= 0");
  auto* o_N = app.add_option("--N", flags.N, "dimension N >= 2");
  auto* o_M = app.add_option("--M", flags.M, "grid intervals M >= 16");
  auto* o_f = app.add_option("--f", flags.f, "exp | power | mems | power-composite");
  auto* o_p = app.add_option("--p", flags.p, "exponent for power and power-composite");
  auto* o_q = app.add_option("--q", flags.q, "exponent for mems");
  auto* o_ti = app.add_option("--tol-iter", flags.tol_iter, "monotone iteration tolerance");
  auto* o_tb = app.add_option("--tol-bisect", flags.tol_bisect, "relative bisection tolerance");
  auto* o_ap = app.add_option("--alpha-points", flags.alpha_points, "alpha grid size (>= 64)");
  auto* o_Al = app.add_option("--A-list", flags.A_list, "amplitudes for sweep-a")->delimiter(',');
  auto* o_pl = app.add_option("--p-list", flags.p_list, "exponents for sweep-p")->delimiter(',');
  auto* o_fr = app.add_option("--fractions", flags.fractions, "fractions of lambda_lo for branch")
                   ->delimiter(',');
  auto* o_out = app.add_option("--out", flags.out, "output path, - for stdout");
  auto* o_fmt = app.add_option("--format", flags.format, "csv | json");
  auto* o_jobs = app.add_option("--jobs", flags.jobs, "worker threads for sweep points");

  for (const auto& name : kSubcommands) app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "gelfand: " << e.what() << "\n" << app.help();
    return 2;
  }

  RunConfig cfg;
  try {
    if (o_config->count() > 0) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("config", "cannot read " + config_path);
      json j;
      try {
        in >> j;
      } catch (const json::parse_error& e) {
        throw ConfigError("config", e.what());
      }
      apply_json(cfg, j);
    }
    cfg.subcommand = app.get_subcommands().front()->get_name();
    if (o_profile->count()) cfg.profile = flags.profile;
    if (o_rho->count()) cfg.rho_c = flags.rho_c;
    if (o_plateau->count()) {
      cfg.plateau_a = plateau[0];
      cfg.plateau_b = plateau[1];
    }
    if (o_A->count()) cfg.A = flags.A;
    if (o_N->count()) cfg.N = flags.N;
    if (o_M->count()) cfg.M = flags.M;
    if (o_f->count()) cfg.f = flags.f;
    if (o_p->count()) cfg.p = flags.p;
    if (o_q->count()) cfg.q = flags.q;
    if (o_ti->count()) cfg.tol_iter = flags.tol_iter;
    if (o_tb->count()) cfg.tol_bisect = flags.tol_bisect;
    if (o_ap->count()) cfg.alpha_points = flags.alpha_points;
    if (o_Al->count()) cfg.A_list = flags.A_list;
    if (o_pl->count()) cfg.p_list = flags.p_list;
    if (o_fr->count()) cfg.fractions = flags.fractions;
    if (o_out->count()) cfg.out = flags.out;
    if (o_fmt->count()) cfg.format = flags.format;
    if (o_jobs->count()) cfg.jobs = flags.jobs;
    finalize(cfg);
    // Surface bad profile or nonlinearity parameters as config errors.
    make_setup(cfg);
    return execute(cfg, out);
  } catch (const ConfigError& e) {
    err << "gelfand: config error at " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "gelfand: computation error in " << e.what() << "\n";
    return 1;
  }
}

}  // namespace gelfand::cli
