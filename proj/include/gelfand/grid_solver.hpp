#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gelfand/nonlinearity.hpp"
#include "gelfand/radial_flow.hpp"

namespace gelfand {

/// Uniform radial grid r_i = i h, h = 1/M, on [0, 1] in dimension N.
struct RadialGrid {
  int dim = 2;
  int intervals = 1024;

  RadialGrid(int dim, int intervals);
  double h() const { return 1.0 / intervals; }
  double node(int i) const { return static_cast<double>(i) / intervals; }
  int size() const { return intervals + 1; }
};

/// Tridiagonal matrix acting on the unknowns u_0 .. u_{M-1}; u_M = 0 is the
/// Dirichlet value and does not appear.
struct Tridiagonal {
  std::vector<double> sub;   // sub[i] couples row i to i-1 (sub[0] unused)
  std::vector<double> diag;
  std::vector<double> sup;   // sup[i] couples row i to i+1 (sup[n-1] is the boundary coupling)
  /// Optional row excess diag[i] + sub[i] + sup[i], held exactly. When present
  /// the solve forms its pivots from it instead of subtracting nearly equal
  /// numbers, which matters when the rows sum to zero and the drift is strong.
  std::vector<double> excess;

  std::size_t size() const { return diag.size(); }
  std::vector<double> apply(std::span<const double> x) const;
  /// Thomas algorithm. Throws SingularMatrixError on a zero pivot.
  std::vector<double> solve(std::span<const double> rhs) const;
  /// diag[i] += delta, keeping the row excess in step.
  void shift_diagonal(std::size_t i, double delta);
};

/// Finite-difference L_A u = -u'' - ((N-1)/r) u' - A r rho(r) u' on a grid.
struct DiscreteOperator {
  RadialGrid grid;
  double amplitude = 0.0;
  Tridiagonal matrix;
  /// Rows where the central first-derivative stencil broke the M-matrix sign
  /// pattern and was replaced by an upwind stencil.
  int upwinded_rows = 0;

  /// (L u)_i for i < M, with u given on all M+1 nodes (u_M is ignored).
  std::vector<double> apply(std::span<const double> u) const;
};

DiscreteOperator assemble(const FlowProfile& profile, double amplitude,
                          const RadialGrid& grid);

/// Solves L u = rhs on rows 0..M-1 with u_M = 0. rhs has M+1 entries; the
/// last is ignored. Returns all M+1 nodal values.
std::vector<double> solve_linear(const DiscreteOperator& op, std::span<const double> rhs);

struct IterationOptions {
  double tol = 1e-10;            // sup-norm increment at convergence
  int max_iterations = 100000;
  double stall_ratio = 0.999;    // increment ratio counted as stalling
  int stall_window = 500;        // consecutive stalling steps before giving up
  /// Converged residual must satisfy ||L u - lambda f(u)|| <= residual_tol *
  /// max(1, ||lambda f(u)||).
  double residual_tol = 1e-6;
  /// Ceiling on ||u|| for regular kinds; NaN selects F^{-1}(0.999999 F_total)
  /// when F_total is finite and 1e6 otherwise.
  double ceiling = std::numeric_limits<double>::quiet_NaN();
  /// Iterates of singular kinds may not exceed a_f minus this margin.
  double singular_cap = 1e-9;
  bool compute_kappa = true;
  double eig_tol = 1e-10;
};

/// Counters for the invariants checked on every monotone-iteration step.
struct IterationAudit {
  long steps_checked = 0;
  long monotonicity_violations = 0;
  bool domination_checked = false;
  long domination_violations = 0;
  double worst_monotonicity = 0.0;  // most negative u_{n+1} - u_n seen

  IterationAudit& operator+=(const IterationAudit& other);
};

struct BranchPoint {
  double lambda = 0.0;
  std::vector<double> u;
  int iterations = 0;
  double increment = 0.0;
  double residual = 0.0;
  double kappa1 = std::numeric_limits<double>::quiet_NaN();
  bool converged = false;
  IterationAudit audit;

  double u_max() const { return u.empty() ? 0.0 : u.front(); }
};

struct NoConvergence {
  enum class Reason { kSingularCap, kCeiling, kNonFinite, kStalled, kMaxIterations,
                      kResidual };
  Reason reason = Reason::kMaxIterations;
  double lambda = 0.0;
  int iterations = 0;
  double last_increment = 0.0;
  double u_max = 0.0;
  IterationAudit audit;

  std::string describe() const;
};

using BranchOutcome = std::variant<BranchPoint, NoConvergence>;

/// Monotone iteration u_{n+1} = L^{-1}(lambda f(u_n)) from u_0 = 0, or from a
/// supplied sub-solution (any converged minimal solution at a smaller lambda).
///
/// The iteration is advanced in increment form, u_{n+1} = u_n + L^{-1}(lambda
/// (f(u_n) - f(u_{n-1}))); the right-hand side is nonnegative and the solve
/// preserves sign, so the iterates are nondecreasing in floating point too.
BranchOutcome minimal_solution(const DiscreteOperator& op, const Nonlinearity& nl,
                               double lambda, const IterationOptions& opts = {},
                               std::span<const double> initial = {});

/// Principal eigenvalue of a tridiagonal Z-matrix (nonpositive off-diagonal),
/// bracketed by Collatz-Wielandt bounds and found by shifted inverse
/// iteration with the shift kept below the lower bound.
struct EigenEstimate {
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  int iterations = 0;
  std::vector<double> vector;  // positive eigenvector, sup-normalized
};
EigenEstimate principal_eigenvalue(const Tridiagonal& matrix, double tol = 1e-10,
                                   int max_iterations = 10000);

/// kappa_1 of L - lambda f'(u): the stability eigenvalue at a branch point.
double linearized_kappa1(const DiscreteOperator& op, const Nonlinearity& nl,
                         double lambda, std::span<const double> u, double tol = 1e-10);

/// Principal eigenvalue of L itself.
double principal_mu1(const DiscreteOperator& op, double tol = 1e-10);

/// The adjoint of the operator matrix with respect to sum_i u_i v_i w_i,
/// w_i = r_i^(N-1) h for i >= 1 and w_0 = (h/2)^N / N.
Tridiagonal adjoint_matrix(const DiscreteOperator& op);

/// Principal eigenvalue mu_1 of the discrete adjoint operator.
double adjoint_mu1(const DiscreteOperator& op, double tol = 1e-10);

/// Discrete torsion: L psi = 1, psi_M = 0.
std::vector<double> discrete_torsion(const DiscreteOperator& op);

}  // namespace gelfand
