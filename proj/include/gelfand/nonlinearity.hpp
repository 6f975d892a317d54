#pragma once

#include <memory>
#include <string>

namespace gelfand {

enum class NonlinearityKind {
  kExponential,     // e^t
  kPower,           // (1 + t)^p, p >= 1
  kSingularMems,    // (1 - t)^(-q), q > 1, domain [0, 1)
  kPowerComposite,  // f_base(t^p), p >= 1, regular base only
};

/// Supremum of t / f(t) over the open domain (0, a_f) and where it sits.
struct SupRatio {
  double value = 0.0;
  double argmax = 0.0;
  /// False when the ratio is still increasing at the end of the search range,
  /// i.e. the supremum is approached only towards a_f.
  bool attained = true;
};

/// A positive, nondecreasing, convex reaction term f with F(t) = int_0^t ds/f.
///
/// Instances are immutable values; copies share their precomputed tables.
class Nonlinearity {
 public:
  /// Iterates of singular kinds are refused beyond a_f minus this margin.
  static constexpr double kSingularGuard = 1e-12;

  static Nonlinearity exponential();
  static Nonlinearity power(double exponent);
  static Nonlinearity mems(double q);

  /// f_p(t) = f(t^p). Throws DomainError for singular bases or p < 1.
  Nonlinearity compose_power(double p) const;

  NonlinearityKind kind() const;
  /// The exponent parameter of the kind: p for power and composite, q for mems.
  double parameter() const;
  /// Base of a composite; nullptr otherwise.
  const Nonlinearity* base() const;
  bool is_singular() const;
  /// a_f: 1 for singular kinds, +inf otherwise.
  double domain_end() const;

  double f(double t) const;
  /// ln f(t). Finite wherever f would overflow.
  double log_f(double t) const;
  double fprime(double t) const;

  /// F(t) = int_0^t ds / f(s) for t in [0, a_f].
  double F(double t) const;
  /// Inverse of F on [0, F_total]; F_inverse(F_total) = a_f.
  double F_inverse(double y) const;
  /// F(a_f) = ||F||_inf.
  double F_total() const;
  /// Upper estimate of the neglected tail when F_total comes from truncated
  /// quadrature; zero for closed forms.
  double F_truncation_error() const;

  SupRatio sup_ratio() const;
  /// inf_{0<t<a_f} f(t)/t together with its minimizer.
  SupRatio inf_growth() const;

  /// Short human-readable tag, e.g. "mems(q=2)".
  std::string name() const;

  struct Impl;

 private:
  explicit Nonlinearity(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

}  // namespace gelfand
