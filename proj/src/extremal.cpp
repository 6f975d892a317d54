#include "gelfand/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gelfand/errors.hpp"
#include "gelfand/quadrature.hpp"

namespace gelfand {

std::string ProblemSetup::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "profile=" << profile.name() << " A=" << amplitude << " N=" << dim
     << " f=" << nonlinearity.name();
  return os.str();
}

LambdaStarInterval lambda_star_bisect(const ProblemSetup& setup, const RadialGrid& grid,
                                      const BisectionOptions& opts) {
  if (!(opts.tol > 0.0)) throw DomainError("lambda_star_bisect: tol must be > 0");
  if (grid.dim != setup.dim) throw DomainError("lambda_star_bisect: grid dimension mismatch");
  const auto& nl = setup.nonlinearity;
  const auto op = assemble(setup.profile, setup.amplitude, grid);
  // The bracket comes from the discrete torsion so that both ends refer to
  // the same operator as the convergence predicate.
  const double psi_max = discrete_torsion(op).front();
  const double ratio = nl.sup_ratio().value;

  double lo = ratio / psi_max;
  double hi = nl.F_total() / psi_max;
  if (!std::isfinite(hi)) hi = adjoint_mu1(op) * ratio;

  IterationOptions iteration = opts.iteration;
  iteration.compute_kappa = false;

  LambdaStarInterval out;
  out.intervals = grid.intervals;

  // A solution exists at the lower end, but when the torsion is nearly flat
  // the fold sits right there and the iteration stalls. Anything below is
  // still a valid lower end.
  constexpr double kBackoff[] = {1.0, 1.0 - 1e-3, 1.0 - 1e-2, 0.9, 0.5};
  const double guaranteed = lo;
  bool started = false;
  std::string last_failure;
  for (double factor : kBackoff) {
    lo = guaranteed * factor;
    auto first = minimal_solution(op, nl, lo, iteration);
    if (auto* miss = std::get_if<NoConvergence>(&first)) {
      out.audit += miss->audit;
      last_failure = miss->describe();
      continue;
    }
    out.witness = std::get<BranchPoint>(std::move(first));
    out.audit += out.witness.audit;
    started = true;
    break;
  }
  if (!started) {
    std::ostringstream os;
    os << "lambda_star_bisect: no convergence at or below the guaranteed lower end "
       << guaranteed << ": " << last_failure;
    throw BracketError(os.str());
  }

  // The continuous upper bounds hold for the discrete problem only up to
  // O(h^2); widen a few times before giving up.
  constexpr int kMaxWidenings = 4;
  for (int widen = 0;; ++widen) {
    auto top = minimal_solution(op, nl, hi, iteration, out.witness.u);
    if (auto* miss = std::get_if<NoConvergence>(&top)) {
      out.certificate = *miss;
      out.audit += miss->audit;
      break;
    }
    auto& bp = std::get<BranchPoint>(top);
    out.audit += bp.audit;
    if (widen == kMaxWidenings) {
      std::ostringstream os;
      os << "lambda_star_bisect: iteration converges at the upper end " << hi
         << "; predicate not monotone across the bracket at M=" << grid.intervals;
      throw BracketError(os.str());
    }
    out.witness = std::move(bp);
    lo = hi;
    hi *= 1.25;
  }

  int steps = 0;
  while (hi - lo > opts.tol * hi && steps < opts.max_steps) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    ++steps;
    auto probe = minimal_solution(op, nl, mid, iteration, out.witness.u);
    if (auto* bp = std::get_if<BranchPoint>(&probe)) {
      out.audit += bp->audit;
      out.witness = std::move(*bp);
      lo = mid;
    } else {
      out.certificate = std::get<NoConvergence>(probe);
      out.audit += out.certificate.audit;
      hi = mid;
    }
  }
  out.lo = lo;
  out.hi = hi;
  out.steps = steps;
  if (opts.iteration.compute_kappa) {
    out.witness.kappa1 = linearized_kappa1(op, nl, lo, out.witness.u, opts.iteration.eig_tol);
  }
  return out;
}

double lambda_of_alpha(const TorsionProfile& tp, const Nonlinearity& nl, double alpha) {
  return alpha - alpha * alpha * beta_of_alpha(tp, nl, alpha);
}

AlphaMaximum maximize_lambda_of_alpha(const TorsionProfile& tp, const Nonlinearity& nl,
                                      int alpha_points) {
  if (alpha_points < 2) throw DomainError("maximize_lambda_of_alpha: need >= 2 points");
  double alpha_max = nl.F_total() / tp.psi_max;
  if (!std::isfinite(alpha_max)) {
    // beta is nondecreasing, so lambda(alpha) < 0 beyond 1/beta(0).
    alpha_max = 1.0 / beta_of_alpha(tp, nl, 0.0);
  }
  std::vector<double> alphas;
  alphas.reserve(alpha_points + 12);
  const double span = std::log(1e-6);
  for (int k = 0; k < alpha_points; ++k) {
    const double frac = static_cast<double>(k) / (alpha_points - 1);
    alphas.push_back(alpha_max * std::exp(span * (1.0 - frac)));
  }
  alphas.back() = alpha_max * (1.0 - 1e-12);
  // The supremum may sit at the right end of the range.
  for (int k = 1; k <= 11; ++k) alphas.push_back(alpha_max * (1.0 - std::pow(10.0, -k)));
  std::sort(alphas.begin(), alphas.end());
  alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());

  auto lambda = [&](double a) {
    if (!(a > 0.0) || !(a < alpha_max)) return -std::numeric_limits<double>::infinity();
    return lambda_of_alpha(tp, nl, a);
  };
  std::size_t best = 0;
  std::vector<double> values(alphas.size());
  for (std::size_t k = 0; k < alphas.size(); ++k) {
    values[k] = lambda(alphas[k]);
    if (values[k] > values[best]) best = k;
  }
  AlphaMaximum out{alphas[best], values[best]};
  const double left = best > 0 ? alphas[best - 1] : 0.5 * alphas[best];
  const double right = best + 1 < alphas.size() ? alphas[best + 1] : alphas[best];
  if (right > left) {
    const auto refined = quadrature::golden_section_max(lambda, left, right, 1e-13);
    if (refined.value > out.value) out = {refined.argument, refined.value};
  }
  return out;
}

void evaluate_sandwich(BoundsReport& r, double slack) {
  auto le = [slack](double a, double b) {
    return a <= b + slack * std::max(std::abs(a), std::abs(b));
  };
  r.sandwich_checks.clear();
  if (r.has_interval) {
    const double lo = r.lambda_star.lo;
    const double hi = r.lambda_star.hi;
    r.sandwich_checks = {
        {"lower_basic <= lambda_lo", le(r.lower_basic, lo)},
        {"lower_alpha <= lambda_lo", le(r.lower_alpha, lo)},
        {"lambda_lo <= lambda_hi", lo <= hi},
        {"lambda_hi <= upper_F", le(hi, r.upper_F)},
        {"lambda_hi <= upper_mu1", le(hi, r.upper_mu1)},
        {"lower_basic <= upper_F", le(r.lower_basic, r.upper_F)},
    };
  } else {
    r.sandwich_checks = {
        {"lower_basic <= upper_F", le(r.lower_basic, r.upper_F)},
        {"lower_basic <= upper_mu1", le(r.lower_basic, r.upper_mu1)},
        {"lower_alpha <= upper_F", le(r.lower_alpha, r.upper_F)},
        {"lower_alpha <= upper_mu1", le(r.lower_alpha, r.upper_mu1)},
    };
  }
  r.sandwich_ok = std::all_of(r.sandwich_checks.begin(), r.sandwich_checks.end(),
                              [](const auto& c) { return c.second; });
}

BoundsReport bounds_report(const ProblemSetup& setup, const BoundsOptions& opts) {
  if (opts.alpha_points < 64) throw DomainError("bounds_report: alpha_points must be >= 64");
  const auto& nl = setup.nonlinearity;
  BoundsReport r;
  r.intervals = opts.intervals;
  const auto tp = torsion(setup.profile, setup.amplitude, setup.dim, opts.intervals);
  const auto ratio = nl.sup_ratio();
  r.psi_max = tp.psi_max;
  r.sup_ratio = ratio.value;
  r.t_hat = ratio.argmax;
  r.F_total = nl.F_total();
  r.lower_basic = ratio.value / tp.psi_max;
  r.upper_F = r.F_total / tp.psi_max;

  const auto best = maximize_lambda_of_alpha(tp, nl, opts.alpha_points);
  r.lower_alpha = best.value;
  r.alpha_hat = best.alpha;

  const RadialGrid grid(setup.dim, opts.intervals);
  const auto op = assemble(setup.profile, setup.amplitude, grid);
  r.mu1 = adjoint_mu1(op, opts.eig_tol);
  if (opts.intervals / 2 >= 16) {
    const auto coarse = assemble(setup.profile, setup.amplitude,
                                 RadialGrid(setup.dim, opts.intervals / 2));
    r.mu1_refinement_delta = r.mu1 - adjoint_mu1(coarse, opts.eig_tol);
  }
  r.upper_mu1 = r.mu1 * ratio.value;

  if (opts.bisect) {
    r.lambda_star = lambda_star_bisect(setup, grid, opts.bisection);
    r.has_interval = true;
  }
  evaluate_sandwich(r);
  return r;
}

namespace {

constexpr double kPointwiseTol = 1e-8;

void check_sizes(const BranchPoint& bp, const TorsionProfile& tp) {
  if (bp.u.size() != tp.psi.size()) {
    throw DomainError("verify_pointwise: branch point and torsion grids differ");
  }
}

}  // namespace

PointwiseVerdict verify_alpha_upper(const BranchPoint& bp, const TorsionProfile& tp,
                                    const Nonlinearity& nl, double alpha) {
  check_sizes(bp, tp);
  PointwiseVerdict v{"upper-alpha", true, true, std::numeric_limits<double>::infinity(),
                     0.0, alpha};
  for (std::size_t i = 0; i < bp.u.size(); ++i) {
    const double bound = nl.F_inverse(alpha * tp.psi[i]);
    const double margin = bound - bp.u[i];
    if (margin < v.worst_margin) {
      v.worst_margin = margin;
      v.worst_radius = tp.nodes[i];
    }
  }
  v.pass = v.worst_margin >= -kPointwiseTol;
  return v;
}

std::vector<PointwiseVerdict> verify_pointwise(const BranchPoint& bp,
                                               const TorsionProfile& tp,
                                               const Nonlinearity& nl,
                                               double lambda_star_hi) {
  check_sizes(bp, tp);
  const double lambda = bp.lambda;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<PointwiseVerdict> out;

  PointwiseVerdict lower{"lower", true, true, inf, 0.0, lambda};
  for (std::size_t i = 0; i < bp.u.size(); ++i) {
    const double y = lambda * tp.psi[i];
    const double bound = y <= nl.F_total() ? nl.F_inverse(y) : inf;
    const double margin = bp.u[i] - bound;
    if (margin < lower.worst_margin) {
      lower.worst_margin = margin;
      lower.worst_radius = tp.nodes[i];
    }
  }
  lower.pass = lower.worst_margin >= -kPointwiseTol;
  out.push_back(lower);

  const auto best = maximize_lambda_of_alpha(tp, nl, 128);
  if (lambda > 0.0 && lambda <= best.value) {
    const double alpha = quadrature::bisect_root(
        [&](double a) { return a == 0.0 ? -lambda : lambda_of_alpha(tp, nl, a) - lambda; },
        0.0, best.alpha, 1e-15 * best.alpha);
    out.push_back(verify_alpha_upper(bp, tp, nl, alpha));
  } else {
    out.push_back({"upper-alpha", false, true, 0.0, 0.0, 0.0});
  }

  if (lambda > 0.0 && lambda < lambda_star_hi) {
    const double cap = nl.F_inverse(lambda / lambda_star_hi * nl.F_total());
    const double margin = cap - bp.u_max();
    out.push_back({"cap", true, margin >= -kPointwiseTol, margin, 0.0, lambda});
  } else {
    out.push_back({"cap", false, true, 0.0, 0.0, lambda});
  }
  return out;
}

FprimeVerdict fprime_extremal_check(const BranchPoint& bp, const Nonlinearity& nl) {
  FprimeVerdict v;
  for (double u : bp.u) v.max_fprime = std::max(v.max_fprime, nl.fprime(u));
  const auto growth = nl.inf_growth();
  v.inf_growth = growth.value;
  v.inf_argmin = growth.argmax;
  v.reached = v.max_fprime >= v.inf_growth;
  v.note = v.reached ? "max f'(u) at or above inf f(t)/t"
                     : "not yet at extremal regime";
  return v;
}

}  // namespace gelfand
