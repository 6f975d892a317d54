#include "gelfand/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "gelfand/errors.hpp"

namespace gelfand::quadrature {

namespace {

struct Panel {
  double a, fa, m, fm, b, fb, whole;
};

double simpson(double a, double fa, double fm, double b, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double refine(const Integrand& f, const Panel& p, double tol, int depth) {
  const double lm = 0.5 * (p.a + p.m);
  const double rm = 0.5 * (p.m + p.b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(p.a, p.fa, flm, p.m, p.fm);
  const double right = simpson(p.m, p.fm, frm, p.b, p.fb);
  const double delta = left + right - p.whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol || !(p.b - p.a > 0.0)) {
    return left + right + delta / 15.0;
  }
  return refine(f, {p.a, p.fa, lm, flm, p.m, p.fm, left}, 0.5 * tol, depth - 1) +
         refine(f, {p.m, p.fm, rm, frm, p.b, p.fb, right}, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const Integrand& f, double a, double b,
                        const Options& opts) {
  if (a == b) return 0.0;
  if (b < a) return -adaptive_simpson(f, b, a, opts);

  // A coarse composite pass fixes the absolute target so that the relative
  // tolerance refers to the whole integral and not to each panel.
  constexpr int kSeedPanels = 16;
  const double width = (b - a) / kSeedPanels;
  double coarse = 0.0;
  Panel panels[kSeedPanels];
  double x0 = a;
  double f0 = f(a);
  for (int k = 0; k < kSeedPanels; ++k) {
    const double x1 = (k + 1 == kSeedPanels) ? b : a + (k + 1) * width;
    const double xm = 0.5 * (x0 + x1);
    const double fm = f(xm);
    const double f1 = f(x1);
    panels[k] = {x0, f0, xm, fm, x1, f1, simpson(x0, f0, fm, x1, f1)};
    coarse += std::abs(panels[k].whole);
    x0 = x1;
    f0 = f1;
  }
  const double target = std::max(opts.rel_tol * coarse, opts.abs_tol);
  double total = 0.0;
  for (const auto& p : panels) {
    total += refine(f, p, target / kSeedPanels, opts.max_depth);
  }
  return total;
}

Extremum golden_section_max(const Integrand& f, double lo, double hi,
                            double x_tol, int max_iter) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < max_iter && (b - a) > x_tol * (1.0 + std::abs(a)); ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  Extremum best = fc >= fd ? Extremum{c, fc} : Extremum{d, fd};
  // The endpoints are never sampled by the interior rule.
  for (double x : {lo, hi}) {
    const double v = f(x);
    if (v > best.value) best = {x, v};
  }
  return best;
}

double bisect_root(const Integrand& g, double lo, double hi, double x_tol,
                   int max_iter) {
  double glo = g(lo);
  const double ghi = g(hi);
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  if ((glo > 0) == (ghi > 0)) {
    throw DomainError("bisect_root: no sign change on bracket");
  }
  for (int it = 0; it < max_iter && (hi - lo) > x_tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm > 0) == (glo > 0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace gelfand::quadrature
