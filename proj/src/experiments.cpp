#include "gelfand/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "gelfand/errors.hpp"

namespace gelfand {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs body(i) for i in [0, count) on up to `jobs` threads. Results are
// written by index, so the outcome does not depend on scheduling.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
  const std::size_t workers =
      std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs)));
  std::vector<std::exception_ptr> errors(count);
  auto guarded = [&](std::size_t i) {
    try {
      body(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) guarded(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) guarded(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void require_increasing(const std::vector<double>& v, const char* what) {
  if (v.empty()) throw DomainError(std::string(what) + ": list must not be empty");
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) {
      throw DomainError(std::string(what) + ": list must be strictly increasing");
    }
  }
}

TrendVerdict strictly_monotone(const std::string& name, const std::vector<double>& v,
                               bool increasing) {
  TrendVerdict out{name, true, {}};
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      out.pass = false;
      out.detail = "missing value at row " + std::to_string(i);
      return out;
    }
    if (i == 0) continue;
    const bool ok = increasing ? v[i] > v[i - 1] : v[i] < v[i - 1];
    if (!ok) {
      out.pass = false;
      std::ostringstream os;
      os << "rows " << i - 1 << "," << i << ": " << format_number(v[i - 1]) << " then "
         << format_number(v[i]);
      out.detail = os.str();
      return out;
    }
  }
  out.detail = v.size() < 2 ? "fewer than two rows" : "holds on all rows";
  return out;
}

struct IntervalCells {
  double lo = kNaN;
  double hi = kNaN;
  double u_max = kNaN;
  IterationAudit audit;
  std::string failure;
};

IntervalCells try_bisect(const ProblemSetup& setup, const SweepOptions& opts) {
  IntervalCells cells;
  try {
    const auto iv = lambda_star_bisect(setup, RadialGrid(setup.dim, opts.intervals),
                                       opts.bisection);
    cells.lo = iv.lo;
    cells.hi = iv.hi;
    cells.u_max = iv.witness.u_max();
    cells.audit = iv.audit;
  } catch (const Error& e) {
    cells.failure = e.what();
  }
  return cells;
}

SweepResult make_result(std::string axis, std::vector<std::string> columns,
                        const SweepOptions& opts) {
  SweepResult out;
  out.axis = std::move(axis);
  out.columns = std::move(columns);
  out.intervals = opts.intervals;
  out.tol_iteration = opts.bisection.iteration.tol;
  out.tol_bisection = opts.bisection.tol;
  return out;
}

}  // namespace

bool SweepResult::all_pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(),
                     [](const TrendVerdict& v) { return v.pass; });
}

std::vector<double> SweepResult::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::out_of_range("SweepResult: no column " + name);
  const auto j = static_cast<std::size_t>(it - columns.begin());
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[j]);
  return out;
}

SweepResult sweep_A(const FlowProfile& profile, int dim, const std::vector<double>& amplitudes,
                    const Nonlinearity& nl, const SweepOptions& opts) {
  require_increasing(amplitudes, "sweep_A");
  auto out = make_result("A", {"A", "psi_max", "lower_basic", "upper_F", "lambda_lo",
                               "lambda_hi"}, opts);
  const double ratio = nl.sup_ratio().value;
  const double total = nl.F_total();

  struct Slot {
    bool kept = false;
    IterationAudit audit;
    std::vector<double> row;
    std::string note;
  };
  std::vector<Slot> slots(amplitudes.size());
  parallel_for(amplitudes.size(), opts.jobs, [&](std::size_t i) {
    const double A = amplitudes[i];
    double psi_max = 0.0;
    try {
      psi_max = torsion_max(profile, A, dim, opts.intervals);
    } catch (const OverflowError&) {
      slots[i].note = "A=" + format_number(A) + " exceeds the log-space budget; dropped";
      return;
    }
    const auto cells = try_bisect({profile, A, dim, nl}, opts);
    if (!cells.failure.empty()) {
      slots[i].note = "A=" + format_number(A) + ": " + cells.failure;
    } else if (cells.lo < (1.0 - 1e-6) * ratio / psi_max) {
      slots[i].note = "A=" + format_number(A) +
                      ": lambda_lo below lower_basic; the grid does not resolve this drift";
    }
    slots[i].kept = true;
    slots[i].audit = cells.audit;
    slots[i].row = {A, psi_max, ratio / psi_max, total / psi_max, cells.lo, cells.hi};
  });
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i].note.empty()) out.notes.push_back(slots[i].note);
    if (!slots[i].kept) continue;
    out.audit += slots[i].audit;
    out.points.push_back(amplitudes[i]);
    out.rows.push_back(std::move(slots[i].row));
  }

  const auto info = profile.classify();
  if (info.ambiguous) out.notes.push_back("regime classification is ambiguous");
  const auto psi = out.column("psi_max");
  switch (info.regime) {
    case Regime::kNegativeSomewhere:
      out.verdicts.push_back(strictly_monotone("psi_max increasing", psi, true));
      out.verdicts.push_back(
          strictly_monotone("lambda_hi decreasing", out.column("lambda_hi"), false));
      break;
    case Regime::kPositiveNoPlateau:
      out.verdicts.push_back(strictly_monotone("psi_max decreasing", psi, false));
      out.verdicts.push_back(
          strictly_monotone("lambda_lo increasing", out.column("lambda_lo"), true));
      break;
    case Regime::kPositiveWithPlateau: {
      const double lower = plateau_lower_constant(info.plateau_a, info.plateau_b, dim);
      const double upper = plateau_upper_constant(dim);
      TrendVerdict v{"psi_max within plateau bracket", true, {}};
      for (double x : psi) v.pass = v.pass && x >= lower && x <= upper;
      v.detail = "[" + format_number(lower) + ", " + format_number(upper) + "]";
      out.verdicts.push_back(std::move(v));
      break;
    }
  }
  return out;
}

SweepResult sweep_p(const FlowProfile& profile, double amplitude, int dim,
                    const Nonlinearity& base, const std::vector<double>& exponents,
                    const SweepOptions& opts) {
  require_increasing(exponents, "sweep_p");
  if (base.is_singular()) throw DomainError("sweep_p: base nonlinearity must be regular");
  if (exponents.front() < 1.0) throw DomainError("sweep_p: exponents must be >= 1");
  auto out = make_result("p", {"p", "lambda_lo", "lambda_hi", "lambda_mid", "target",
                               "abs_error", "u_max"}, opts);

  // f_p(0) = f(0) for every p, so the target is shared.
  const double psi_max = torsion_max(profile, amplitude, dim, opts.intervals);
  const double target = 1.0 / (base.f(0.0) * psi_max);

  std::vector<IntervalCells> cells(exponents.size());
  parallel_for(exponents.size(), opts.jobs, [&](std::size_t i) {
    cells[i] = try_bisect({profile, amplitude, dim, base.compose_power(exponents[i])}, opts);
  });
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    const auto& c = cells[i];
    out.audit += c.audit;
    if (!c.failure.empty()) {
      out.notes.push_back("p=" + format_number(exponents[i]) + ": " + c.failure);
    }
    const double mid = 0.5 * (c.lo + c.hi);
    out.points.push_back(exponents[i]);
    out.rows.push_back({exponents[i], c.lo, c.hi, mid, target, std::abs(mid - target), c.u_max});
  }
  out.verdicts.push_back(
      strictly_monotone("error to target decreasing", out.column("abs_error"), false));
  out.verdicts.push_back(strictly_monotone("u_max increasing", out.column("u_max"), true));
  return out;
}

SweepResult branch_scan(const ProblemSetup& setup, const std::vector<double>& fractions,
                        const SweepOptions& opts) {
  std::vector<double> sorted = fractions;
  std::sort(sorted.begin(), sorted.end());
  require_increasing(sorted, "branch_scan");
  if (!(sorted.front() > 0.0) || !(sorted.back() < 1.0)) {
    throw DomainError("branch_scan: fractions must lie in (0, 1)");
  }
  auto out = make_result("lambda", {"lambda", "u_max", "residual", "kappa1", "iterations",
                                    "converged", "fraction", "torsion_error",
                                    "torsion_error_over_lambda", "uniform_bound"}, opts);

  const RadialGrid grid(setup.dim, opts.intervals);
  const auto star = lambda_star_bisect(setup, grid, opts.bisection);
  const auto op = assemble(setup.profile, setup.amplitude, grid);
  const auto psi = discrete_torsion(op);
  const auto& nl = setup.nonlinearity;
  out.audit += star.audit;

  std::vector<BranchOutcome> outcomes(sorted.size());
  parallel_for(sorted.size(), opts.jobs, [&](std::size_t i) {
    outcomes[i] = minimal_solution(op, nl, sorted[i] * star.lo, opts.bisection.iteration);
  });

  std::vector<std::vector<double>> scaled(sorted.size());
  std::vector<double> errors, bound_margin;
  bool all_converged = true;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double lambda = sorted[i] * star.lo;
    const double cap = nl.F_inverse(sorted[i] * nl.F_total());
    out.points.push_back(lambda);
    if (const auto* miss = std::get_if<NoConvergence>(&outcomes[i])) {
      all_converged = false;
      out.audit += miss->audit;
      out.notes.push_back("fraction " + format_number(sorted[i]) + ": " + miss->describe());
      out.rows.push_back({lambda, miss->u_max, kNaN, kNaN, double(miss->iterations), 0.0,
                          sorted[i], kNaN, kNaN, cap});
      errors.push_back(kNaN);
      bound_margin.push_back(kNaN);
      continue;
    }
    const auto& bp = std::get<BranchPoint>(outcomes[i]);
    out.audit += bp.audit;
    double err = 0.0;
    scaled[i].resize(bp.u.size());
    for (std::size_t k = 0; k < bp.u.size(); ++k) {
      scaled[i][k] = nl.F(bp.u[k]) / lambda;
      err = std::max(err, std::abs(scaled[i][k] - psi[k]));
    }
    errors.push_back(err);
    bound_margin.push_back(cap - bp.u_max());
    out.rows.push_back({lambda, bp.u_max(), bp.residual, bp.kappa1, double(bp.iterations),
                        bp.converged ? 1.0 : 0.0, sorted[i], err, err / lambda, cap});
  }

  out.verdicts.push_back(
      strictly_monotone("torsion error increasing in lambda", errors, true));

  TrendVerdict nodewise{"F(u)/lambda nondecreasing in lambda", all_converged, {}};
  if (!all_converged) nodewise.detail = "some branch points did not converge";
  for (std::size_t i = 1; nodewise.pass && i < scaled.size(); ++i) {
    for (std::size_t k = 0; k < scaled[i].size(); ++k) {
      const double slack = 1e-12 * std::max(1.0, std::abs(scaled[i][k]));
      if (scaled[i][k] < scaled[i - 1][k] - slack) {
        nodewise.pass = false;
        nodewise.detail = "fraction " + format_number(sorted[i]) + " node " +
                          std::to_string(k);
        break;
      }
    }
  }
  if (nodewise.pass) nodewise.detail = "holds at every node";
  out.verdicts.push_back(std::move(nodewise));

  TrendVerdict bound{"u_max within uniform bound", true, "holds on all rows"};
  for (std::size_t i = 0; i < bound_margin.size(); ++i) {
    if (!(bound_margin[i] >= -1e-10)) {
      bound.pass = false;
      bound.detail = "fraction " + format_number(sorted[i]);
      break;
    }
  }
  out.verdicts.push_back(std::move(bound));
  return out;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const std::string& config_text) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(config_text)));
  return buf;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_csv(std::ostream& out, const SweepResult& result, const std::string& config_text) {
  out << "# config-hash: " << config_hash(config_text) << "\n";
  out << "# config: " << config_text << "\n";
  for (const auto& note : result.notes) out << "# note: " << note << "\n";
  for (const auto& v : result.verdicts) {
    out << "# verdict: " << v.name << " = " << (v.pass ? "pass" : "fail") << " (" << v.detail
        << ")\n";
  }
  for (std::size_t j = 0; j < result.columns.size(); ++j) {
    out << (j ? "," : "") << result.columns[j];
  }
  out << "\n";
  for (const auto& row : result.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << format_number(row[j]);
    out << "\n";
  }
}

}  // namespace gelfand
