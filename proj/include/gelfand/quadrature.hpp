#pragma once

#include <functional>

namespace gelfand::quadrature {

using Integrand = std::function<double(double)>;

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 1e-300;
  int max_depth = 60;
};

/// Adaptive composite Simpson rule on [a, b] with interval bisection.
///
/// Each panel is accepted when the Richardson-corrected difference between
/// one and two Simpson steps is below max(rel_tol * |whole integral estimate|,
/// abs_tol) scaled to the panel width.
double adaptive_simpson(const Integrand& f, double a, double b,
                        const Options& opts = {});

/// Golden-section search for the maximizer of a unimodal function on [lo, hi].
struct Extremum {
  double argument;
  double value;
};
Extremum golden_section_max(const Integrand& f, double lo, double hi,
                            double x_tol = 1e-12, int max_iter = 400);

/// Bisection on a sign change of g over [lo, hi]. Returns the midpoint of the
/// final bracket; g(lo) and g(hi) must differ in sign.
double bisect_root(const Integrand& g, double lo, double hi,
                   double x_tol = 1e-14, int max_iter = 400);

}  // namespace gelfand::quadrature
