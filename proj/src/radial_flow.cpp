#include "gelfand/radial_flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "gelfand/errors.hpp"
#include "gelfand/quadrature.hpp"

namespace gelfand {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::kNegativeSomewhere:
      return "negative-somewhere";
    case Regime::kPositiveNoPlateau:
      return "positive-no-plateau";
    case Regime::kPositiveWithPlateau:
      return "positive-with-plateau";
  }
  return "unknown";
}

FlowProfile FlowProfile::constant(double value) {
  if (!std::isfinite(value)) throw DomainError("constant profile must be finite");
  return FlowProfile(Constant{value});
}

FlowProfile FlowProfile::inverse_quadratic() { return FlowProfile(InverseQuadratic{}); }

FlowProfile FlowProfile::plateau(double a, double b, double outer) {
  if (!(0.0 <= a && a < b && b <= 1.0)) {
    throw DomainError("plateau profile needs 0 <= a < b <= 1");
  }
  if (!std::isfinite(outer)) throw DomainError("plateau outer value must be finite");
  return FlowProfile(Plateau{a, b, outer});
}

FlowProfile FlowProfile::tabulated(std::vector<double> radii, std::vector<double> values,
                                   double lipschitz_budget) {
  if (radii.size() != values.size() || radii.size() < 2) {
    throw DomainError("tabulated profile needs >= 2 matching radius/value samples");
  }
  if (radii.front() != 0.0 || radii.back() != 1.0) {
    throw DomainError("tabulated profile must cover [0, 1] exactly");
  }
  for (std::size_t k = 0; k + 1 < radii.size(); ++k) {
    const double dr = radii[k + 1] - radii[k];
    if (!(dr > 0.0)) throw DomainError("tabulated radii must be strictly increasing");
    if (std::abs(values[k + 1] - values[k]) > lipschitz_budget * dr * (1 + 1e-12)) {
      std::ostringstream os;
      os << "tabulated profile exceeds Lipschitz budget between r=" << radii[k]
         << " and r=" << radii[k + 1];
      throw DomainError(os.str());
    }
  }
  std::vector<double> prefix(radii.size(), 0.0);
  for (std::size_t k = 0; k + 1 < radii.size(); ++k) {
    // s rho(s) is quadratic on a segment, so Simpson is exact.
    const double r0 = radii[k], r1 = radii[k + 1], rm = 0.5 * (r0 + r1);
    const double vm = 0.5 * (values[k] + values[k + 1]);
    prefix[k + 1] =
        prefix[k] + (r1 - r0) / 6.0 * (r0 * values[k] + 4.0 * rm * vm + r1 * values[k + 1]);
  }
  return FlowProfile(Tabulated{std::move(radii), std::move(values), std::move(prefix)});
}

double FlowProfile::rho(double r) const {
  return std::visit(
      Overloaded{
          [](const Constant& c) { return c.value; },
          [r](const InverseQuadratic&) { return 2.0 / (1.0 + r * r); },
          [r](const Plateau& p) {
            if (r > p.a && r < p.b) return 0.0;
            const bool at_a = r == p.a && p.a > 0.0;
            const bool at_b = r == p.b && p.b < 1.0;
            if (at_a || at_b) return 0.5 * p.outer;
            if (r >= p.a && r <= p.b) return 0.0;
            return p.outer;
          },
          [r](const Tabulated& t) {
            auto it = std::upper_bound(t.radii.begin(), t.radii.end(), r);
            std::size_t k = static_cast<std::size_t>(it - t.radii.begin());
            k = std::clamp<std::size_t>(k, 1, t.radii.size() - 1) - 1;
            const double w = (r - t.radii[k]) / (t.radii[k + 1] - t.radii[k]);
            return (1.0 - w) * t.values[k] + w * t.values[k + 1];
          },
      },
      shape_);
}

double FlowProfile::log_weight(double r) const {
  return std::visit(
      Overloaded{
          [r](const Constant& c) { return 0.5 * c.value * r * r; },
          [r](const InverseQuadratic&) { return std::log1p(r * r); },
          [r](const Plateau& p) {
            const double inner = std::min(r, p.a);
            double value = 0.5 * p.outer * inner * inner;
            if (r > p.b) value += 0.5 * p.outer * (r * r - p.b * p.b);
            return value;
          },
          [r](const Tabulated& t) {
            auto it = std::upper_bound(t.radii.begin(), t.radii.end(), r);
            std::size_t k = static_cast<std::size_t>(it - t.radii.begin());
            k = std::clamp<std::size_t>(k, 1, t.radii.size() - 1) - 1;
            const double r0 = t.radii[k];
            const double slope = (t.values[k + 1] - t.values[k]) / (t.radii[k + 1] - r0);
            // int_{r0}^{r} s (v0 + slope (s - r0)) ds
            const double v0 = t.values[k];
            const double partial = 0.5 * (v0 - slope * r0) * (r * r - r0 * r0) +
                                   slope * (r * r * r - r0 * r0 * r0) / 3.0;
            return t.prefix[k] + partial;
          },
      },
      shape_);
}

double FlowProfile::weight(double r) const { return std::exp(log_weight(r)); }

double weight_g(const FlowProfile& profile, double r) {
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("weight_g: r outside [0, 1]");
  return profile.weight(r);
}

RegimeInfo FlowProfile::classify() const {
  constexpr int n = kClassifyGrid;
  auto at = [n](int k) { return static_cast<double>(k) / n; };
  bool negative = false;
  int best_start = -1, best_end = -1;
  int run_start = -1;
  for (int k = 0; k <= n; ++k) {
    const double v = rho(at(k));
    if (v < -kZeroTolerance) negative = true;
    const bool zero = std::abs(v) <= kZeroTolerance;
    if (zero && run_start < 0) run_start = k;
    if ((!zero || k == n) && run_start >= 0) {
      const int run_end = zero ? k : k - 1;
      if (run_end - run_start > best_end - best_start) {
        best_start = run_start;
        best_end = run_end;
      }
      run_start = -1;
    }
  }

  RegimeInfo info;
  if (best_start >= 0) {
    auto is_zero = [this](double r) { return std::abs(rho(r)) <= kZeroTolerance; };
    // Push each edge of the zero run outwards to the actual transition.
    double a = at(best_start);
    if (best_start > 0) {
      double lo = at(best_start - 1), hi = a;
      for (int i = 0; i < 80 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        (is_zero(mid) ? hi : lo) = mid;
      }
      a = hi;
    }
    double b = at(best_end);
    if (best_end < n) {
      double lo = b, hi = at(best_end + 1);
      for (int i = 0; i < 80 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        (is_zero(mid) ? lo : hi) = mid;
      }
      b = lo;
    }
    if (b - a >= kMinPlateauLength) {
      info.plateau_a = a;
      info.plateau_b = b;
      info.regime = Regime::kPositiveWithPlateau;
    }
  }
  if (negative) {
    info.ambiguous = info.regime == Regime::kPositiveWithPlateau;
    info.regime = Regime::kNegativeSomewhere;
  }
  return info;
}

std::string FlowProfile::name() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&os](const Constant& c) { os << "constant(" << c.value << ")"; },
                 [&os](const InverseQuadratic&) { os << "inverse-quadratic"; },
                 [&os](const Plateau& p) {
                   os << "plateau(" << p.a << "," << p.b << "," << p.outer << ")";
                 },
                 [&os](const Tabulated& t) { os << "table(" << t.radii.size() << ")"; },
             },
             shape_);
  return os.str();
}

namespace {

// 16-point Gauss-Legendre on [0, 1].
struct GaussLegendre16 {
  std::array<double, 16> x{};
  std::array<double, 16> w{};
  GaussLegendre16() {
    constexpr int n = 16;
    for (int i = 0; i < n; ++i) {
      double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        const double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      x[i] = 0.5 * (1.0 - z);
      w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
  }
};

const GaussLegendre16& gauss16() {
  static const GaussLegendre16 rule;
  return rule;
}

// Outer integrand q(t) = I(t) / (t^(N-1) g^A(t)) on the 2M-interval grid.
//
// The inner integral advances panel by panel in scaled form: the factor
// (s/t)^(N-1) is integrated exactly against the quadratic interpolant of
// exp(A (ln g(s) - ln g(t))) (product Simpson), so the recurrence neither
// overflows for large A nor loses accuracy near the origin for large N.
std::vector<double> outer_integrand(const FlowProfile& profile, double amplitude,
                                    int dim, int intervals) {
  if (dim < 2) throw DomainError("torsion: dimension N must be >= 2");
  if (intervals < 16) throw DomainError("torsion: grid needs M >= 16");
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
    throw DomainError("torsion: amplitude A must be finite and >= 0");
  }
  const int fine = 2 * intervals;
  const int quarter = 4 * intervals;
  std::vector<double> lng(quarter + 1);
  double worst = 0.0;
  for (int k = 0; k <= quarter; ++k) {
    lng[k] = profile.log_weight(static_cast<double>(k) / quarter);
    worst = std::max(worst, std::abs(lng[k]));
  }
  if (amplitude * worst > kLogSpaceBudget) {
    std::ostringstream os;
    os << "torsion: A max|ln g| = " << amplitude * worst << " exceeds log-space budget "
       << kLogSpaceBudget;
    throw OverflowError(os.str());
  }

  const auto& gl = gauss16();
  const double hf = 1.0 / fine;
  const int m = dim - 1;
  std::vector<double> q(fine + 1, 0.0);
  for (int j = 0; j < fine; ++j) {
    const double c = static_cast<double>(j) / (j + 1);  // t0 / t1
    const double d = 1.0 - c;
    double w0 = 0.0, wm = 0.0, w1 = 0.0;
    for (int k = 0; k < 16; ++k) {
      const double x = gl.x[k];
      const double kernel = gl.w[k] * std::pow(c + d * x, m);
      w0 += kernel * 2.0 * (x - 0.5) * (x - 1.0);
      wm += kernel * -4.0 * x * (x - 1.0);
      w1 += kernel * 2.0 * x * (x - 0.5);
    }
    const double l0 = lng[2 * j], lm = lng[2 * j + 1], l1 = lng[2 * j + 2];
    const double panel = hf * (w0 * std::exp(amplitude * (l0 - l1)) +
                               wm * std::exp(amplitude * (lm - l1)) + w1);
    const double carry = j == 0 ? 0.0 : q[j] * std::pow(c, m) * std::exp(amplitude * (l0 - l1));
    q[j + 1] = carry + panel;
  }
  return q;
}

}  // namespace

TorsionProfile torsion(const FlowProfile& profile, double amplitude, int dim,
                       int intervals) {
  const auto q = outer_integrand(profile, amplitude, dim, intervals);
  const double h = 1.0 / intervals;
  TorsionProfile tp;
  tp.dim = dim;
  tp.amplitude = amplitude;
  tp.nodes.resize(intervals + 1);
  tp.psi.assign(intervals + 1, 0.0);
  tp.dpsi.resize(intervals + 1);
  for (int i = 0; i <= intervals; ++i) {
    tp.nodes[i] = static_cast<double>(i) / intervals;
    tp.dpsi[i] = -q[2 * i];
  }
  for (int i = intervals - 1; i >= 0; --i) {
    tp.psi[i] = tp.psi[i + 1] + h / 6.0 * (q[2 * i] + 4.0 * q[2 * i + 1] + q[2 * i + 2]);
  }
  tp.psi_max = tp.psi[0];
  return tp;
}

double torsion_max(const FlowProfile& profile, double amplitude, int dim, int intervals) {
  const auto q = outer_integrand(profile, amplitude, dim, intervals);
  const double h = 1.0 / intervals;
  double total = 0.0;
  for (int i = intervals - 1; i >= 0; --i) {
    total += h / 6.0 * (q[2 * i] + 4.0 * q[2 * i + 1] + q[2 * i + 2]);
  }
  return total;
}

double beta_of_alpha(const TorsionProfile& tp, const Nonlinearity& nl, double alpha) {
  const double limit = nl.F_total() / tp.psi_max;
  if (!(alpha >= 0.0) || !(alpha < limit)) {
    throw DomainError("beta_of_alpha: alpha must lie in [0, F_total / psi_max)");
  }
  const std::size_t n = tp.psi.size();
  std::vector<double> values(n, 0.0);
  std::size_t best = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double slope = tp.dpsi[i];
    if (slope == 0.0) continue;
    values[i] = nl.fprime(nl.F_inverse(alpha * tp.psi[i])) * slope * slope;
    if (values[i] > values[best]) best = i;
  }
  double result = values[best];
  if (best > 0 && best + 1 < n) {
    const double vl = values[best - 1], vr = values[best + 1];
    const double curvature = 2.0 * result - vl - vr;
    if (curvature > 0.0) result += (vr - vl) * (vr - vl) / (8.0 * curvature);
  }
  return result;
}

double plateau_lower_constant(double a, double b, int dim) {
  if (!(0.0 <= a && a < b && b <= 1.0)) {
    throw DomainError("plateau_lower_constant: need 0 <= a < b <= 1");
  }
  if (dim < 2) throw DomainError("plateau_lower_constant: N must be >= 2");
  const double n = dim;
  double tail = 0.0;  // a^N int_a^b t^(1-N) dt
  if (a > 0.0) {
    if (dim == 2) {
      tail = a * a * std::log(b / a);
    } else {
      tail = std::pow(a, n) * (std::pow(b, 2.0 - n) - std::pow(a, 2.0 - n)) / (2.0 - n);
    }
  }
  return ((b * b - a * a) / 2.0 - tail) / n;
}

}  // namespace gelfand
