#include "gelfand/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "gelfand/errors.hpp"
#include "gelfand/quadrature.hpp"

namespace gelfand {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// 1/f below this is treated as zero when truncating the improper integral.
constexpr double kTailCutoff = 1e-14;
constexpr int kTablePanels = 2048;

}  // namespace

struct Nonlinearity::Impl {
  NonlinearityKind kind;
  double param = 1.0;
  std::shared_ptr<const Impl> base;
  Nonlinearity base_value{nullptr};

  // Cumulative table of int 1/f over [0, table_end] (composite kinds only).
  double table_end = 0.0;
  std::vector<double> cumulative;
  double total = 0.0;
  double tail_error = 0.0;
  SupRatio sup{};

  Impl(NonlinearityKind k, double p, std::shared_ptr<const Impl> b)
      : kind(k), param(p), base(std::move(b)) {}

  bool singular() const { return kind == NonlinearityKind::kSingularMems; }

  double log_f(double t) const {
    switch (kind) {
      case NonlinearityKind::kExponential:
        return t;
      case NonlinearityKind::kPower:
        return param * std::log1p(t);
      case NonlinearityKind::kSingularMems:
        return -param * std::log1p(-t);
      case NonlinearityKind::kPowerComposite:
        return base->log_f(std::pow(t, param));
    }
    return 0.0;
  }

  double inv_f(double t) const { return std::exp(-log_f(t)); }

  double fprime(double t) const {
    switch (kind) {
      case NonlinearityKind::kExponential:
        return std::exp(t);
      case NonlinearityKind::kPower:
        return param * std::pow(1.0 + t, param - 1.0);
      case NonlinearityKind::kSingularMems:
        return param * std::pow(1.0 - t, -param - 1.0);
      case NonlinearityKind::kPowerComposite: {
        if (t == 0.0) return param == 1.0 ? base->fprime(0.0) : 0.0;
        const double tp = std::pow(t, param);
        return param * std::pow(t, param - 1.0) * base->fprime(tp);
      }
    }
    return 0.0;
  }

  double F(double t) const {
    switch (kind) {
      case NonlinearityKind::kExponential:
        return -std::expm1(-t);
      case NonlinearityKind::kPower:
        if (std::isinf(t)) return total;
        if (param == 1.0) return std::log1p(t);
        return -std::expm1((1.0 - param) * std::log1p(t)) / (param - 1.0);
      case NonlinearityKind::kSingularMems:
        return -std::expm1((param + 1.0) * std::log1p(-t)) / (param + 1.0);
      case NonlinearityKind::kPowerComposite:
        return table_F(t);
    }
    return 0.0;
  }

  double table_F(double t) const {
    if (t >= table_end) return total;
    const double width = table_end / kTablePanels;
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(t / width),
                                         kTablePanels - 1);
    const double left = static_cast<double>(k) * width;
    return cumulative[k] + partial(left, t);
  }

  double partial(double a, double b) const {
    return quadrature::adaptive_simpson([this](double s) { return inv_f(s); },
                                        a, b, {.rel_tol = 1e-13});
  }

  double F_inverse(double y) const {
    if (y >= total) return kInf;
    switch (kind) {
      case NonlinearityKind::kExponential:
        return -std::log1p(-y);
      case NonlinearityKind::kPower:
        if (param == 1.0) return std::expm1(y);
        return std::expm1(std::log1p(-(param - 1.0) * y) / (1.0 - param));
      case NonlinearityKind::kSingularMems:
        return -std::expm1(std::log1p(-(param + 1.0) * y) / (param + 1.0));
      case NonlinearityKind::kPowerComposite:
        return table_F_inverse(y);
    }
    return 0.0;
  }

  // Safeguarded Newton inside the table panel that brackets y.
  double table_F_inverse(double y) const {
    const double width = table_end / kTablePanels;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), y);
    std::size_t k = static_cast<std::size_t>(it - cumulative.begin());
    k = k == 0 ? 0 : k - 1;
    k = std::min<std::size_t>(k, kTablePanels - 1);
    double lo = static_cast<double>(k) * width;
    double hi = lo + width;
    const double base_value_at = cumulative[k];
    double t = 0.5 * (lo + hi);
    for (int it_count = 0; it_count < 100; ++it_count) {
      const double residual = base_value_at + partial(lo_anchor(k), t) - y;
      if (residual > 0) {
        hi = t;
      } else {
        lo = t;
      }
      double next = t - residual / inv_f(t);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      if (std::abs(next - t) <= 1e-15 * std::max(1.0, t) || hi - lo <= 1e-15) {
        return next;
      }
      t = next;
    }
    return t;
  }

  double lo_anchor(std::size_t k) const {
    return static_cast<double>(k) * (table_end / kTablePanels);
  }

  void build_table() {
    // Smallest T with 1/f(T) < cutoff, by doubling then bisection.
    const double log_cut = -std::log(kTailCutoff);
    double hi = 1.0;
    while (log_f(hi) < log_cut) hi *= 2.0;
    double lo = hi / 2.0;
    if (log_f(lo) >= log_cut) lo = 0.0;
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
      const double mid = 0.5 * (lo + hi);
      (log_f(mid) < log_cut ? lo : hi) = mid;
    }
    table_end = hi;
    cumulative.assign(kTablePanels + 1, 0.0);
    const double width = table_end / kTablePanels;
    for (int k = 0; k < kTablePanels; ++k) {
      cumulative[k + 1] = cumulative[k] + partial(k * width, (k + 1) * width);
    }
    total = cumulative.back();
    // Tail of int_T^inf ds/f(s) for log-convex growth: 1/(f(T) (ln f)'(T)).
    const double dlog = fprime(table_end) / std::exp(log_f(table_end));
    tail_error = dlog > 0 ? inv_f(table_end) / dlog : kInf;
  }

  SupRatio compute_sup() const {
    auto log_ratio = [this](double t) { return std::log(t) - log_f(t); };
    const double lo = 1e-8;
    double hi = 0.0;
    bool attained = true;
    if (singular()) {
      hi = 1.0 - kSingularGuard;
    } else {
      hi = 1.0;
      while (!(log_ratio(hi) < log_ratio(hi / 2.0))) {
        if (hi > 1e15) {
          attained = false;
          break;
        }
        hi *= 2.0;
      }
    }
    auto best = quadrature::golden_section_max(log_ratio, lo, hi, 1e-14);
    double t_hat = best.argument;

    // d/dt (t/f) has the sign of 1 - t f'/f; bisect on it near the golden
    // estimate when a sign change can be bracketed.
    auto slope_sign = [this](double t) {
      return 1.0 - t * fprime(t) * std::exp(-log_f(t));
    };
    if (attained) {
      double a = std::max(lo, t_hat * (1.0 - 1e-6));
      double b = std::min(hi, t_hat * (1.0 + 1e-6));
      if (slope_sign(a) > 0 && slope_sign(b) < 0) {
        t_hat = quadrature::bisect_root(slope_sign, a, b, 1e-16 * t_hat);
      }
    }
    return {t_hat * std::exp(-log_f(t_hat)), t_hat, attained};
  }
};

Nonlinearity::Nonlinearity(std::shared_ptr<const Impl> impl)
    : impl_(std::move(impl)) {}

namespace {

std::shared_ptr<Nonlinearity::Impl> finish(std::shared_ptr<Nonlinearity::Impl> impl) {
  switch (impl->kind) {
    case NonlinearityKind::kExponential:
      impl->total = 1.0;
      break;
    case NonlinearityKind::kPower:
      impl->total = impl->param == 1.0 ? kInf : 1.0 / (impl->param - 1.0);
      break;
    case NonlinearityKind::kSingularMems:
      impl->total = 1.0 / (impl->param + 1.0);
      break;
    case NonlinearityKind::kPowerComposite:
      impl->build_table();
      break;
  }
  impl->sup = impl->compute_sup();
  return impl;
}

}  // namespace

Nonlinearity Nonlinearity::exponential() {
  return Nonlinearity(
      finish(std::make_shared<Impl>(NonlinearityKind::kExponential, 1.0, nullptr)));
}

Nonlinearity Nonlinearity::power(double exponent) {
  if (!(exponent >= 1.0) || !std::isfinite(exponent)) {
    throw DomainError("power nonlinearity needs exponent >= 1");
  }
  return Nonlinearity(
      finish(std::make_shared<Impl>(NonlinearityKind::kPower, exponent, nullptr)));
}

Nonlinearity Nonlinearity::mems(double q) {
  if (!(q > 1.0) || !std::isfinite(q)) {
    throw DomainError("mems nonlinearity needs q > 1");
  }
  return Nonlinearity(
      finish(std::make_shared<Impl>(NonlinearityKind::kSingularMems, q, nullptr)));
}

Nonlinearity Nonlinearity::compose_power(double p) const {
  if (is_singular()) {
    throw DomainError("compose_power requires a regular base nonlinearity");
  }
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw DomainError("compose_power needs p >= 1");
  }
  auto impl = std::make_shared<Impl>(NonlinearityKind::kPowerComposite, p, impl_);
  impl->base_value = *this;
  return Nonlinearity(finish(std::move(impl)));
}

NonlinearityKind Nonlinearity::kind() const { return impl_->kind; }
double Nonlinearity::parameter() const { return impl_->param; }

const Nonlinearity* Nonlinearity::base() const {
  return impl_->base ? &impl_->base_value : nullptr;
}

bool Nonlinearity::is_singular() const { return impl_->singular(); }
double Nonlinearity::domain_end() const { return is_singular() ? 1.0 : kInf; }

namespace {

void check_f_domain(const Nonlinearity& nl, double t) {
  if (!(t >= 0.0)) throw DomainError("f: argument must be >= 0");
  if (nl.is_singular()) {
    if (t > 1.0 - Nonlinearity::kSingularGuard) {
      throw DomainError("f: argument beyond the singular guard of a_f = 1");
    }
  } else if (!std::isfinite(t)) {
    throw DomainError("f: argument must be finite");
  }
}

}  // namespace

double Nonlinearity::f(double t) const {
  check_f_domain(*this, t);
  return std::exp(impl_->log_f(t));
}

double Nonlinearity::log_f(double t) const {
  check_f_domain(*this, t);
  return impl_->log_f(t);
}

double Nonlinearity::fprime(double t) const {
  check_f_domain(*this, t);
  return impl_->fprime(t);
}

double Nonlinearity::F(double t) const {
  if (!(t >= 0.0) || t > domain_end()) {
    throw DomainError("F: argument outside [0, a_f]");
  }
  if (t == domain_end()) return impl_->total;
  return impl_->F(t);
}

double Nonlinearity::F_inverse(double y) const {
  const double total = impl_->total;
  if (!(y >= 0.0) || y > total) {
    throw DomainError("F_inverse: argument outside [0, F(a_f)]");
  }
  if (y == 0.0) return 0.0;
  if (y == total) return domain_end();
  return impl_->F_inverse(y);
}

double Nonlinearity::F_total() const { return impl_->total; }
double Nonlinearity::F_truncation_error() const { return impl_->tail_error; }
SupRatio Nonlinearity::sup_ratio() const { return impl_->sup; }

SupRatio Nonlinearity::inf_growth() const {
  const auto s = impl_->sup;
  return {1.0 / s.value, s.argmax, s.attained};
}

std::string Nonlinearity::name() const {
  std::ostringstream os;
  os.precision(17);
  switch (impl_->kind) {
    case NonlinearityKind::kExponential:
      os << "exp";
      break;
    case NonlinearityKind::kPower:
      os << "power(p=" << impl_->param << ")";
      break;
    case NonlinearityKind::kSingularMems:
      os << "mems(q=" << impl_->param << ")";
      break;
    case NonlinearityKind::kPowerComposite:
      os << "power-composite(" << impl_->base_value.name() << ", p=" << impl_->param
         << ")";
      break;
  }
  return os.str();
}

}  // namespace gelfand
