#pragma once

#include <string>
#include <vector>

#include "gelfand/grid_solver.hpp"
#include "gelfand/nonlinearity.hpp"
#include "gelfand/radial_flow.hpp"

namespace gelfand {

/// L_A u = lambda f(u) on the unit ball of R^N with drift profile rho.
struct ProblemSetup {
  FlowProfile profile = FlowProfile::constant(0.0);
  double amplitude = 0.0;
  int dim = 2;
  Nonlinearity nonlinearity = Nonlinearity::exponential();

  std::string describe() const;
};

struct BisectionOptions {
  /// Stop when lambda_hi - lambda_lo <= tol * lambda_hi.
  double tol = 1e-6;
  int max_steps = 200;
  IterationOptions iteration{};
};

struct LambdaStarInterval {
  double lo = 0.0;
  double hi = 0.0;
  int steps = 0;
  int intervals = 0;
  /// Converged minimal solution at lo.
  BranchPoint witness;
  /// Why the iteration failed at hi.
  NoConvergence certificate;
  IterationAudit audit;

  double mid() const { return 0.5 * (lo + hi); }
};

/// Bisection on "monotone iteration converges" over [lower_basic, upper_F],
/// both formed with the discrete torsion maximum (upper_mu1 stands in when
/// F(a_f) is infinite; the upper end is widened by 1.25 up to four times if
/// the iteration still converges there; the lower end backs off by up to half
/// if the iteration stalls on a fold sitting at the bound). Successive probes above a
/// converged lambda start from that solution, which is a sub-solution there.
/// Throws BracketError when the predicate fails at the lower end or holds at
/// the upper end.
LambdaStarInterval lambda_star_bisect(const ProblemSetup& setup, const RadialGrid& grid,
                                      const BisectionOptions& opts = {});

struct BoundsOptions {
  int intervals = 4096;
  int alpha_points = 128;
  bool bisect = true;
  BisectionOptions bisection{};
  double eig_tol = 1e-11;
};

struct BoundsReport {
  double psi_max = 0.0;
  double sup_ratio = 0.0;
  double t_hat = 0.0;
  double F_total = 0.0;
  double lower_basic = 0.0;  // sup(t/f) / psi_max
  double lower_alpha = 0.0;  // sup_alpha alpha - alpha^2 beta(alpha)
  double alpha_hat = 0.0;
  double upper_F = 0.0;      // F(a_f) / psi_max
  double upper_mu1 = 0.0;    // mu_1 sup(t/f)
  double mu1 = 0.0;
  /// mu_1(M) - mu_1(M/2), an estimate of the discretization bias of mu_1.
  double mu1_refinement_delta = 0.0;
  bool has_interval = false;
  LambdaStarInterval lambda_star;
  bool sandwich_ok = false;
  /// Pairwise checks behind sandwich_ok, in a fixed order.
  std::vector<std::pair<std::string, bool>> sandwich_checks;
  int intervals = 0;
};

/// lambda(alpha) = alpha - alpha^2 beta(alpha).
double lambda_of_alpha(const TorsionProfile& tp, const Nonlinearity& nl, double alpha);

struct AlphaMaximum {
  double alpha = 0.0;
  double value = 0.0;
};
/// Maximizes lambda(alpha) over a log-uniform grid on (0, F_total/psi_max)
/// and refines by golden section between the neighbours of the best point.
AlphaMaximum maximize_lambda_of_alpha(const TorsionProfile& tp, const Nonlinearity& nl,
                                      int alpha_points);

BoundsReport bounds_report(const ProblemSetup& setup, const BoundsOptions& opts = {});

/// Sandwich evaluation on precomputed numbers; relative slack -1e-6.
void evaluate_sandwich(BoundsReport& report, double slack = 1e-6);

struct PointwiseVerdict {
  std::string name;
  bool applicable = true;
  bool pass = true;
  double worst_margin = 0.0;  // min over nodes of (bound side) - (value side)
  double worst_radius = 0.0;
  double parameter = 0.0;     // lambda or alpha used by the check
};

/// Node-by-node checks of a converged branch point:
///   lower: F^{-1}(lambda psi) <= u
///   upper-alpha: u <= F^{-1}(alpha psi) for an alpha with lambda(alpha) = lambda
///   cap: u_max <= F^{-1}((lambda / lambda_star_hi) F_total)
/// Tolerance 1e-8 on each.
std::vector<PointwiseVerdict> verify_pointwise(const BranchPoint& bp,
                                               const TorsionProfile& tp,
                                               const Nonlinearity& nl,
                                               double lambda_star_hi);

/// Upper-alpha check at a prescribed alpha (u must be the branch point at
/// lambda(alpha)).
PointwiseVerdict verify_alpha_upper(const BranchPoint& bp, const TorsionProfile& tp,
                                    const Nonlinearity& nl, double alpha);

struct FprimeVerdict {
  double max_fprime = 0.0;
  double inf_growth = 0.0;   // inf f(t)/t
  double inf_argmin = 0.0;
  bool reached = false;      // lambda max f'(u) >= ... reported, not asserted
  std::string note;
};

/// Compares max_r f'(u(r)) at a near-extremal branch point with inf f(t)/t.
FprimeVerdict fprime_extremal_check(const BranchPoint& bp_near_star,
                                    const Nonlinearity& nl);

}  // namespace gelfand
