#pragma once

#include <string>
#include <variant>
#include <vector>

#include "gelfand/nonlinearity.hpp"

namespace gelfand {

/// Theorem-style classification of a drift profile.
enum class Regime {
  kNegativeSomewhere,
  kPositiveNoPlateau,
  kPositiveWithPlateau,
};

struct RegimeInfo {
  Regime regime = Regime::kPositiveNoPlateau;
  /// Maximal zero interval [a, b]; meaningful for kPositiveWithPlateau.
  double plateau_a = 0.0;
  double plateau_b = 0.0;
  /// Set when a negative dip coexists with a zero plateau. The regime is then
  /// kNegativeSomewhere.
  bool ambiguous = false;
};

std::string to_string(Regime regime);

/// Radial drift profile rho on [0, 1]. The flow is c(x) = -x rho(|x|), so the
/// operator reads L_A u = -Laplace u - A rho(|x|) x . grad u.
class FlowProfile {
 public:
  struct Constant {
    double value;
  };
  struct InverseQuadratic {};  // rho(r) = 2 / (1 + r^2)
  struct Plateau {
    double a;
    double b;
    double outer;
  };
  struct Tabulated {
    std::vector<double> radii;
    std::vector<double> values;
    // Prefix integrals of s rho(s) at the sample radii.
    std::vector<double> prefix;
  };
  using Shape = std::variant<Constant, InverseQuadratic, Plateau, Tabulated>;

  static constexpr double kZeroTolerance = 1e-12;
  static constexpr double kMinPlateauLength = 1e-3;
  static constexpr int kClassifyGrid = 10000;

  static FlowProfile constant(double value);
  static FlowProfile inverse_quadratic();
  /// rho = outer on [0, a) and (b, 1], zero on [a, b]. At a jump the two-sided
  /// average is returned.
  static FlowProfile plateau(double a, double b, double outer);
  /// Piecewise-linear interpolation of samples covering [0, 1]. Adjacent
  /// samples must satisfy |drho/dr| <= lipschitz_budget.
  static FlowProfile tabulated(std::vector<double> radii, std::vector<double> values,
                               double lipschitz_budget);

  double rho(double r) const;
  /// ln g(r) = int_0^r s rho(s) ds.
  double log_weight(double r) const;
  /// g(r) = exp(int_0^r s rho(s) ds).
  double weight(double r) const;

  RegimeInfo classify() const;

  const Shape& shape() const { return shape_; }
  std::string name() const;

 private:
  explicit FlowProfile(Shape shape) : shape_(std::move(shape)) {}
  Shape shape_;
};

/// Radial torsion function psi_A of L_A on the unit ball of R^N, sampled on a
/// uniform grid r_i = i / M.
struct TorsionProfile {
  int dim = 2;
  double amplitude = 0.0;
  std::vector<double> nodes;
  std::vector<double> psi;
  std::vector<double> dpsi;
  double psi_max = 0.0;
};

/// Budget on A max|ln g| before exp(A ln g) leaves double range.
inline constexpr double kLogSpaceBudget = 700.0;

double weight_g(const FlowProfile& profile, double r);

/// Nested-quadrature torsion: psi(r) = int_r^1 q(t) dt with
/// q(t) = int_0^t (s/t)^(N-1) exp(A (ln g(s) - ln g(t))) ds.
/// Throws OverflowError when A max|ln g| exceeds kLogSpaceBudget.
TorsionProfile torsion(const FlowProfile& profile, double amplitude, int dim,
                       int intervals);

/// psi_A(0) by the same quadrature, accumulated without storing the profile.
double torsion_max(const FlowProfile& profile, double amplitude, int dim,
                   int intervals = 4096);

/// beta(alpha) = max_r f'(F^{-1}(alpha psi(r))) psi'(r)^2 over the grid, with
/// parabolic refinement around an interior maximizer.
/// Requires 0 <= alpha < F_total / psi_max.
double beta_of_alpha(const TorsionProfile& tp, const Nonlinearity& nl, double alpha);

/// C_{N,rho} = (1/N) int_a^b (t^N - a^N) / t^(N-1) dt, the A-uniform lower
/// bound on psi_max for a profile vanishing on [a, b].
double plateau_lower_constant(double a, double b, int dim);

/// The matching A-uniform upper bound 1/(2N) for nonnegative profiles.
inline double plateau_upper_constant(int dim) { return 1.0 / (2.0 * dim); }

}  // namespace gelfand
