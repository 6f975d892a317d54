#include "gelfand/golden.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "gelfand/errors.hpp"
#include "gelfand/experiments.hpp"

namespace gelfand {

namespace {

constexpr int kFine = 4096;
constexpr int kSweepGrid = 1024;

double rel_err(double value, double reference) {
  return std::abs(value - reference) / std::abs(reference);
}

std::string num(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

// Closed forms on the unit ball with rho = 2 / (1 + r^2), A = 1.
double example_psi(int dim, double r) {
  return (dim * (1.0 - r * r) + 2.0 * std::log(2.0 / (1.0 + r * r))) /
         (2.0 * dim * (dim + 2));
}
double example_psi_max(int dim) {
  return (dim + std::log(4.0)) / (2.0 * dim * (dim + 2));
}

ProblemSetup drift_exp() {
  return {FlowProfile::inverse_quadratic(), 1.0, 2, Nonlinearity::exponential()};
}
ProblemSetup drift_mems() {
  return {FlowProfile::inverse_quadratic(), 1.0, 2, Nonlinearity::mems(2.0)};
}
ProblemSetup laplacian10() {
  return {FlowProfile::constant(0.0), 0.0, 10, Nonlinearity::exponential()};
}

std::vector<FlowProfile> builtin_profiles() {
  return {FlowProfile::constant(0.0),
          FlowProfile::constant(1.0),
          FlowProfile::constant(-4.0),
          FlowProfile::inverse_quadratic(),
          FlowProfile::plateau(0.5, 1.0, 1.0),
          FlowProfile::tabulated({0.0, 0.25, 0.5, 0.75, 1.0}, {1.0, 0.5, 0.0, -0.25, 0.5},
                                 10.0)};
}

struct Suite {
  GoldenOptions opts;
  IterationAudit audit;
  std::vector<BoundsReport> reports;  // drift_exp, drift_mems, laplacian10
  std::vector<CriterionResult> results;

  BisectionOptions bisection() const {
    BisectionOptions b;
    b.tol = 1e-7;
    return b;
  }

  void record(int id, std::string title, const std::function<void(CriterionResult&)>& body) {
    CriterionResult r{id, std::move(title), false, {}};
    try {
      body(r);
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    results.push_back(std::move(r));
  }

  const BoundsReport& report(std::size_t which) {
    if (reports.empty()) {
      BoundsOptions bo;
      bo.intervals = kFine;
      bo.bisection = bisection();
      for (const auto& s : {drift_exp(), drift_mems(), laplacian10()}) {
        reports.push_back(bounds_report(s, bo));
        audit += reports.back().lambda_star.audit;
      }
    }
    return reports.at(which);
  }
};

void torsion_golden(CriterionResult& r) {
  double worst_max = 0.0, worst_node = 0.0;
  for (int dim : {2, 3, 10}) {
    const auto tp = torsion(FlowProfile::inverse_quadratic(), 1.0, dim, kFine);
    worst_max = std::max(worst_max, rel_err(tp.psi_max, example_psi_max(dim)));
    for (std::size_t i = 0; i + 1 < tp.nodes.size(); ++i) {
      worst_node = std::max(worst_node, rel_err(tp.psi[i], example_psi(dim, tp.nodes[i])));
    }
  }
  r.pass = worst_max <= 1e-6 && worst_node <= 1e-6;
  r.detail = "max rel err " + num(worst_max) + ", nodewise " + num(worst_node);
}

void laplacian_torsion(CriterionResult& r) {
  double worst = 0.0;
  for (double A : {0.0, 1.0, 10.0}) {
    for (int dim : {2, 3, 10}) {
      const auto tp = torsion(FlowProfile::constant(0.0), A, dim, kFine);
      worst = std::max(worst, std::abs(tp.psi_max - 1.0 / (2.0 * dim)));
      for (std::size_t i = 0; i < tp.nodes.size(); ++i) {
        const double r0 = tp.nodes[i];
        worst = std::max(worst, std::abs(tp.psi[i] - (1.0 - r0 * r0) / (2.0 * dim)));
      }
    }
  }
  r.pass = worst <= 1e-10;
  r.detail = "max abs err " + num(worst);
}

// Finite differences on M and 2M combined by Richardson extrapolation.
void oracle_equivalence(CriterionResult& r) {
  double worst = 0.0;
  std::string where;
  for (const auto& profile : builtin_profiles()) {
    for (double A : {0.0, 1.0, 10.0}) {
      for (int dim : {2, 3, 10}) {
        const auto tp = torsion(profile, A, dim, kFine);
        const auto coarse = discrete_torsion(assemble(profile, A, RadialGrid(dim, kFine)));
        const auto fine = discrete_torsion(assemble(profile, A, RadialGrid(dim, 2 * kFine)));
        for (int i = 1; i < kFine; ++i) {
          const double extrapolated = (4.0 * fine[2 * i] - coarse[i]) / 3.0;
          const double e = rel_err(extrapolated, tp.psi[i]);
          if (e > worst) {
            worst = e;
            where = profile.name() + " A=" + num(A) + " N=" + std::to_string(dim);
          }
        }
      }
    }
  }
  r.pass = worst <= 1e-6;
  r.detail = "max rel err " + num(worst) + " (" + where + ")";
}

void exp_bounds(Suite& s, CriterionResult& r) {
  const auto& rep = s.report(0);
  const int n = 2;
  const double upper = 2.0 * n * (n + 2) / (n + std::log(4.0));
  const double lower = upper / std::numbers::e;
  const double beta_ref = double((n + 1) * (n + 1)) / (n * n * (n + 2) * (n + 2));
  const double alpha_end = 2.0 * n * n * (n + 2) / double((n + 1) * (n + 1));

  const auto tp = torsion(drift_exp().profile, 1.0, n, kFine);
  double beta_err = 0.0;
  for (int k = 0; k <= 16; ++k) {
    const double alpha = alpha_end * (1.0 - 1e-3) * k / 16.0;
    beta_err = std::max(beta_err, std::abs(beta_of_alpha(tp, drift_exp().nonlinearity, alpha) -
                                           beta_ref));
  }
  const bool ok_basic = rel_err(rep.lower_basic, lower) <= 1e-6;
  const bool ok_upper = rel_err(rep.upper_F, upper) <= 1e-6;
  const bool ok_alpha = std::abs(rep.lower_alpha - 16.0 / 9.0) <= 1e-4;
  const bool ok_beta = beta_err <= 1e-6;
  r.pass = ok_basic && ok_upper && ok_alpha && ok_beta;
  r.detail = "lower_basic=" + num(rep.lower_basic) + " upper_F=" + num(rep.upper_F) +
             " lower_alpha=" + num(rep.lower_alpha) + " beta err=" + num(beta_err);
}

void mems_bounds(Suite& s, CriterionResult& r) {
  const auto& rep = s.report(1);
  const int n = 2;
  const double denom = n + std::log(4.0);
  const double lower = 8.0 * n * (n + 2) / (27.0 * denom);
  const double upper = 2.0 * n * (n + 2) / (3.0 * denom);
  const double target = 64.0 / 81.0;

  // The same supremum restricted to the range where beta is constant.
  const auto tp = torsion(drift_mems().profile, 1.0, n, kFine);
  const double alpha_end = 2.0 * n * n * (n + 2) / (3.0 * (n + 1) * (n + 1));
  double restricted = 0.0;
  for (int k = 1; k <= 2048; ++k) {
    restricted = std::max(restricted,
                          lambda_of_alpha(tp, drift_mems().nonlinearity, alpha_end * k / 2048.0));
  }

  const bool ok_basic = rel_err(rep.lower_basic, lower) <= 1e-6;
  const bool ok_upper = rel_err(rep.upper_F, upper) <= 1e-6;
  const bool ok_alpha = std::abs(rep.lower_alpha - target) <= 1e-4;
  r.pass = ok_basic && ok_upper && ok_alpha;
  r.detail = "lower_basic=" + num(rep.lower_basic) + " upper_F=" + num(rep.upper_F) +
             " lower_alpha=" + num(rep.lower_alpha) + " at alpha=" + num(rep.alpha_hat) +
             " (sup over alpha<=" + num(alpha_end) + " is " + num(restricted) + ")";
}

void laplacian_star(Suite& s, CriterionResult& r) {
  const auto& iv = s.report(2).lambda_star;
  r.pass = iv.lo <= 16.0 && 16.0 <= iv.hi && rel_err(iv.mid(), 16.0) <= 0.02;
  r.detail = "[" + num(iv.lo) + ", " + num(iv.hi) + "] at M=" + std::to_string(iv.intervals);
}

void sandwich(Suite& s, CriterionResult& r) {
  r.pass = true;
  const char* names[] = {"drift exp", "drift mems(2)", "laplacian N=10"};
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& rep = s.report(k);
    r.pass = r.pass && rep.sandwich_ok;
    for (const auto& [check, ok] : rep.sandwich_checks) {
      if (!ok) r.detail += std::string(names[k]) + ": " + check + " fails; ";
    }
  }
  if (r.pass) r.detail = "all checks hold for 3 setups";
}

void pointwise_suite(Suite& s, CriterionResult& r) {
  r.pass = true;
  int checks = 0;
  const ProblemSetup setups[] = {drift_exp(), drift_mems(), laplacian10()};
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& setup = setups[k];
    const auto& rep = s.report(k);
    const RadialGrid grid(setup.dim, kFine);
    const auto op = assemble(setup.profile, setup.amplitude, grid);
    const auto tp = torsion(setup.profile, setup.amplitude, setup.dim, kFine);
    for (double fraction : {0.25, 0.5, 0.75}) {
      const double lambda = fraction * rep.lambda_star.lo;
      auto outcome = minimal_solution(op, setup.nonlinearity, lambda);
      if (const auto* miss = std::get_if<NoConvergence>(&outcome)) {
        s.audit += miss->audit;
        r.pass = false;
        r.detail += miss->describe() + "; ";
        continue;
      }
      const auto& bp = std::get<BranchPoint>(outcome);
      s.audit += bp.audit;
      for (const auto& v : verify_pointwise(bp, tp, setup.nonlinearity, rep.lambda_star.hi)) {
        if (!v.applicable) continue;
        ++checks;
        if (!v.pass) {
          r.pass = false;
          r.detail += "setup " + std::to_string(k + 1) + " " + v.name + " at lambda=" +
                      num(lambda) + " margin " + num(v.worst_margin) + "; ";
        }
      }
      if (k == 2) {
        ++checks;
        const double cap = std::log(16.0 / (16.0 - lambda));
        if (bp.u_max() > cap + 1e-8) {
          r.pass = false;
          r.detail += "u_max above ln(16/(16-lambda)) at lambda=" + num(lambda) + "; ";
        }
      }
    }
  }
  if (r.pass) r.detail = std::to_string(checks) + " pointwise checks hold";
}

void trichotomy(Suite& s, CriterionResult& r) {
  SweepOptions so;
  so.intervals = kSweepGrid;
  so.jobs = s.opts.jobs;
  const auto nl = Nonlinearity::exponential();
  const std::vector<double> amps = {0.0, 10.0, 50.0, 100.0};

  const auto neg = sweep_A(FlowProfile::constant(-4.0), 2, amps, nl, so);
  const auto pos1 = sweep_A(FlowProfile::constant(1.0), 2, amps, nl, so);
  const auto posq = sweep_A(FlowProfile::inverse_quadratic(), 2, amps, nl, so);
  const auto flat = sweep_A(FlowProfile::plateau(0.5, 1.0, 1.0), 2, {0.0, 1.0, 10.0, 100.0},
                            nl, so);
  for (const auto* sw : {&neg, &pos1, &posq, &flat}) s.audit += sw->audit;

  auto psi = [](const SweepResult& sw) { return sw.column("psi_max"); };
  auto increasing = [](const std::vector<double>& v, bool up) {
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (up ? !(v[i] > v[i - 1]) : !(v[i] < v[i - 1])) return false;
    }
    return v.size() == 4;
  };
  const auto pn = psi(neg), p1 = psi(pos1), pq = psi(posq), pf = psi(flat);
  const bool ok_i = increasing(pn, true) && pn[3] > 10.0 * pn[1];
  const bool ok_ii = increasing(p1, false) && p1[3] < 0.1 * p1[0] && increasing(pq, false) &&
                     pq[3] < 0.1 * pq[0];
  const double lo = plateau_lower_constant(0.5, 1.0, 2);
  const double hi = plateau_upper_constant(2);
  bool ok_iii = pf.size() == 4;
  for (double x : pf) ok_iii = ok_iii && x >= lo && x <= hi;
  r.pass = ok_i && ok_ii && ok_iii;
  r.detail = "(i) " + std::string(ok_i ? "ok" : "FAIL") + " ratio " + num(pn[3] / pn[1]) +
             "; (ii) " + (ok_ii ? "ok" : "FAIL") + "; (iii) " + (ok_iii ? "ok" : "FAIL") +
             " bracket [" + num(lo) + ", " + num(hi) + "]";
}

void p_limit(Suite& s, CriterionResult& r) {
  SweepOptions so;
  so.intervals = kSweepGrid;
  so.jobs = s.opts.jobs;
  so.bisection = s.bisection();
  const auto sw = sweep_p(FlowProfile::constant(0.0), 0.0, 3, Nonlinearity::exponential(),
                          {1.0, 2.0, 4.0, 8.0}, so);
  s.audit += sw.audit;
  r.pass = sw.all_pass();
  const auto err = sw.column("abs_error");
  const auto umax = sw.column("u_max");
  for (const auto& v : sw.verdicts) {
    r.detail += v.name + ": " + (v.pass ? "ok" : "FAIL (" + v.detail + ")") + "; ";
  }
  r.detail += "u_max =";
  for (double u : umax) r.detail += " " + num(u);
}

void branch_properties(Suite& s, CriterionResult& r) {
  SweepOptions so;
  so.intervals = kSweepGrid;
  so.jobs = s.opts.jobs;
  so.bisection = s.bisection();
  const auto sw = branch_scan(drift_exp(), {0.0625, 0.125, 0.25, 0.5}, so);
  s.audit += sw.audit;
  r.pass = sw.verdicts.at(0).pass && sw.verdicts.at(1).pass;
  r.detail = "e(lambda) =";
  for (double e : sw.column("torsion_error")) r.detail += " " + num(e);
  if (!r.pass) r.detail += "; " + sw.verdicts[0].detail + "; " + sw.verdicts[1].detail;
}

void grid_convergence(Suite& s, CriterionResult& r) {
  const auto setup = drift_exp();
  BisectionOptions b;
  b.tol = 1e-11;
  b.iteration.tol = 1e-13;
  std::vector<double> psi, lam;
  for (int m : {512, 1024, 2048}) {
    const RadialGrid grid(setup.dim, m);
    psi.push_back(discrete_torsion(assemble(setup.profile, setup.amplitude, grid)).front());
    const auto iv = lambda_star_bisect(setup, grid, b);
    s.audit += iv.audit;
    lam.push_back(iv.lo);
  }
  auto order = [](const std::vector<double>& v) {
    return std::log2(std::abs(v[1] - v[0]) / std::abs(v[2] - v[1]));
  };
  const double op = order(psi), ol = order(lam);
  r.pass = op >= 1.8 && ol >= 1.8;
  r.detail = "observed order psi_max " + num(op) + ", lambda_lo " + num(ol);
}

}  // namespace

std::vector<CriterionResult> run_golden_suite(const GoldenOptions& opts) {
  Suite s;
  s.opts = opts;
  s.record(1, "torsion golden value", torsion_golden);
  s.record(2, "laplacian torsion", laplacian_torsion);
  s.record(3, "quadrature vs finite differences", oracle_equivalence);
  s.record(4, "bounds, exponential example", [&](auto& r) { exp_bounds(s, r); });
  s.record(5, "bounds, singular example", [&](auto& r) { mems_bounds(s, r); });
  s.record(6, "lambda* = 2N-4 for N=10", [&](auto& r) { laplacian_star(s, r); });
  s.record(7, "sandwich", [&](auto& r) { sandwich(s, r); });
  s.record(8, "pointwise inequalities", [&](auto& r) { pointwise_suite(s, r); });
  s.record(9, "trichotomy trends", [&](auto& r) { trichotomy(s, r); });
  s.record(10, "large-p limit", [&](auto& r) { p_limit(s, r); });
  s.record(11, "small-lambda branch", [&](auto& r) { branch_properties(s, r); });
  s.record(13, "grid convergence", [&](auto& r) { grid_convergence(s, r); });
  s.record(12, "monotone-iteration invariants", [&](auto& r) {
    r.pass = s.audit.steps_checked > 0 && s.audit.monotonicity_violations == 0 &&
             s.audit.domination_violations == 0;
    r.detail = std::to_string(s.audit.steps_checked) + " steps, " +
               std::to_string(s.audit.monotonicity_violations) + " monotonicity and " +
               std::to_string(s.audit.domination_violations) + " domination violations";
  });
  std::sort(s.results.begin(), s.results.end(),
            [](const CriterionResult& a, const CriterionResult& b) { return a.id < b.id; });
  return s.results;
}

}  // namespace gelfand
