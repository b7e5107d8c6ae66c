#include "nads/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

namespace nads::scenarios {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct NumericField {
  const char* key;
  std::function<void(Scenario&, double)> set;
  std::function<double(const Scenario&)> get;
  bool integer = false;
};

#define NADS_FIELD(key, member) \
  NumericField { key, [](Scenario& s, double v) { s.member = v; }, \
                 [](const Scenario& s) { return static_cast<double>(s.member); } }
#define NADS_INT_FIELD(key, member)                                              \
  NumericField {                                                                 \
    key, [](Scenario& s, double v) { s.member = static_cast<int>(v); },          \
        [](const Scenario& s) { return static_cast<double>(s.member); }, true    \
  }

const std::vector<NumericField>& numeric_fields() {
  static const std::vector<NumericField> fields = {
      NADS_FIELD("pulse.omega_peak", pulse.omega_peak),
      NADS_FIELD("pulse.t0", pulse.t0),
      NADS_FIELD("pulse.tau", pulse.tau),
      NADS_FIELD("pulse.chirp_rate", pulse.chirp_rate),
      NADS_FIELD("pulse.detuning", pulse.detuning),
      NADS_FIELD("pulse.envelope_floor", pulse.envelope_floor),
      NADS_FIELD("system.omega1", system.omega1),
      NADS_FIELD("system.omega2", system.omega2),
      NADS_FIELD("system.gamma_broadening", system.gamma_broadening),
      NADS_FIELD("system.gamma_shift", system.gamma_shift),
      NumericField{"grid.start", [](Scenario& s, double v) { s.grid.start = v; },
                   [](const Scenario& s) { return s.grid.start.value_or(kNan); }},
      NumericField{"grid.end", [](Scenario& s, double v) { s.grid.end = v; },
                   [](const Scenario& s) { return s.grid.end.value_or(kNan); }},
      NADS_INT_FIELD("grid.points", grid.points),
      NADS_FIELD("numerics.rel_tol", numerics.rel_tol),
      NADS_FIELD("numerics.abs_tol", numerics.abs_tol),
      NADS_INT_FIELD("numerics.rk4_substeps", numerics.rk4_substeps),
      NADS_FIELD("numerics.anchor_fraction", numerics.anchor_fraction),
      NADS_FIELD("numerics.margin_fraction", numerics.margin_fraction),
      NADS_INT_FIELD("numerics.refinement", numerics.refinement),
      NADS_INT_FIELD("numerics.n_max", numerics.n_max),
      NADS_INT_FIELD("numerics.k_max", numerics.k_max),
      NADS_FIELD("numerics.virtual_ratio_threshold", numerics.virtual_ratio_threshold),
  };
  return fields;
}

#undef NADS_FIELD
#undef NADS_INT_FIELD

template <class F>
std::optional<F> find_field(const std::vector<F>& fields, std::string_view key) {
  for (const auto& f : fields)
    if (key == f.key) return f;
  return std::nullopt;
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

const dressed::AmplitudeSolution& need_analytic(const Bundle& b, std::string_view metric) {
  if (!b.analytic)
    throw ValidationError("metric '" + std::string(metric) +
                          "' needs the analytic trajectory in the scenario outputs");
  return *b.analytic;
}

Scenario make(std::string name, field::PulseSpec pulse, GridSpec grid) {
  Scenario s;
  s.name = std::move(name);
  s.pulse = std::move(pulse);
  s.grid = grid;
  return s;
}

field::PulseSpec constant_pulse(double omega, double detuning) {
  field::PulseSpec p;
  p.envelope = field::Envelope::constant;
  p.omega_peak = omega;
  p.detuning = detuning;
  return p;
}

field::PulseSpec shaped(field::Envelope e, double peak, double tau, double detuning) {
  field::PulseSpec p;
  p.envelope = e;
  p.omega_peak = peak;
  p.tau = tau;
  p.detuning = detuning;
  return p;
}

Scenario grischkowsky_scenario() {
  const double detuning = field::wavenumber_to_angular(0.8);
  const double bandwidth = field::wavenumber_to_angular(0.005);
  // Transform-limited Gaussian: intensity-spectrum FWHM = 2 sqrt(2 ln 2) / tau.
  const double tau = 2.0 * std::sqrt(2.0 * std::log(2.0)) / bandwidth;
  auto s = make("grischkowsky",
                shaped(field::Envelope::gaussian, 0.1 * detuning, tau, detuning),
                {std::nullopt, std::nullopt, 4001});
  s.system.omega1 = 0.0;
  s.system.omega2 = 1000.0 * detuning;
  s.numerics.anchor_fraction = 1e-3;
  return s;
}

}  // namespace

std::string_view to_string(Output o) {
  switch (o) {
    case Output::trajectory: return "trajectory";
    case Output::components: return "components";
    case Output::adiabaticity: return "adiabaticity";
    case Output::comparison: return "comparison";
    case Output::residual: return "residual";
  }
  return "?";
}

Output output_from_string(std::string_view name) {
  for (auto o : {Output::trajectory, Output::components, Output::adiabaticity,
                 Output::comparison, Output::residual})
    if (to_string(o) == name) return o;
  throw ValidationError("unknown output '" + std::string(name) +
                        "' (expected trajectory, components, adiabaticity, comparison "
                        "or residual)");
}

void validate(const Scenario& s) {
  field::validate(s.pulse);
  dressed::validate(s.system);
  if (s.outputs.empty()) throw ValidationError("scenario outputs must not be empty");
  if (s.grid.points < 2) throw ValidationError("grid.points must be >= 2");
  if (!field::is_pulsed(s.pulse) && (!s.grid.start || !s.grid.end))
    throw ValidationError("grid.start and grid.end are required for the constant envelope");
  const double lo = s.grid.start.value_or(s.pulse.t0 - 5.0 * s.pulse.tau);
  const double hi = s.grid.end.value_or(s.pulse.t0 + 5.0 * s.pulse.tau);
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo))
    throw ValidationError("grid requires finite start < end");
  if (!std::isfinite(std::abs(s.init_a1)) || !std::isfinite(std::abs(s.init_a2)) ||
      (s.init_a1 == Complex{} && s.init_a2 == Complex{}))
    throw ValidationError("initial amplitudes must be finite and not both zero");
  const auto& n = s.numerics;
  if (!(n.rel_tol > 0.0 && n.rel_tol <= 1e-3) || !(n.abs_tol > 0.0 && n.abs_tol <= 1e-3))
    throw ValidationError("numerics tolerances must lie in (0, 1e-3]");
  if (!(n.anchor_fraction > 0.0 && n.anchor_fraction < 1.0))
    throw ValidationError("numerics.anchor_fraction must lie in (0, 1)");
  if (!(n.margin_fraction >= 0.0 && n.margin_fraction <= 1.0))
    throw ValidationError("numerics.margin_fraction must lie in [0, 1]");
  if (!(n.virtual_ratio_threshold > 0.0))
    throw ValidationError("numerics.virtual_ratio_threshold must be > 0");
  if (n.refinement < 1) throw ValidationError("numerics.refinement must be >= 1");
  if (n.rk4_substeps < 1) throw ValidationError("numerics.rk4_substeps must be >= 1");
  if (n.n_max < 0 || n.n_max > 3) throw ValidationError("numerics.n_max must lie in 0..3");
  if (n.k_max < 0) throw ValidationError("numerics.k_max must be >= 0");
  if (field::is_pulsed(s.pulse) && n.anchor_fraction * s.pulse.omega_peak <=
                                       s.pulse.envelope_floor * s.pulse.omega_peak)
    throw ValidationError("numerics.anchor_fraction must exceed pulse.envelope_floor");
}

bool wants(const Scenario& s, Output o) {
  return std::find(s.outputs.begin(), s.outputs.end(), o) != s.outputs.end();
}

std::vector<double> effective_grid(const Scenario& s) {
  double lo = s.grid.start.value_or(s.pulse.t0 - 5.0 * s.pulse.tau);
  double hi = s.grid.end.value_or(s.pulse.t0 + 5.0 * s.pulse.tau);
  if (field::is_pulsed(s.pulse)) {
    if (!(s.pulse.omega_peak > 0.0))
      throw ValidationError("pulsed envelopes need pulse.omega_peak > 0");
    const auto w = field::support_window(s.pulse, s.numerics.anchor_fraction);
    lo = std::max(lo, w.lo);
    hi = std::min(hi, w.hi);
    if (!(hi > lo))
      throw ValidationError("grid window lies outside the pulse support");
  }
  const auto n = static_cast<size_t>(s.grid.points);
  std::vector<double> grid(n);
  for (size_t i = 0; i < n; ++i)
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  grid.back() = hi;
  return grid;
}

Bundle run_scenario(const Scenario& s) {
  try {
    validate(s);
    Bundle b;
    b.scenario = s;
    b.grid = effective_grid(s);

    const bool need_numeric = wants(s, Output::trajectory) || wants(s, Output::comparison);
    const bool need_analytic = need_numeric || wants(s, Output::components) ||
                               wants(s, Output::residual);
    const Amplitudes init(s.init_a1, s.init_a2);

    if (wants(s, Output::adiabaticity) || wants(s, Output::comparison)) {
      adiabaticity::Options opt;
      opt.n_max = s.numerics.n_max;
      opt.k_max = s.numerics.k_max;
      opt.margin_fraction = s.numerics.margin_fraction;
      b.adiabaticity = adiabaticity::evaluate(s.pulse, s.system, b.grid, opt);
    }
    if (need_analytic) {
      dressed::TrajectoryOptions opt;
      opt.refinement = s.numerics.refinement;
      b.analytic = dressed::analytic_trajectory(s.pulse, s.system, b.grid, init, opt);
      b.populations.reserve(b.grid.size());
      for (size_t i = 0; i < b.grid.size(); ++i)
        b.populations.push_back(dressed::project_onto_dressed_basis(
            b.analytic->amplitudes[i], b.analytic->snapshots[i]));
    }
    if (need_numeric) {
      oracle::IntegratorOptions opt;
      opt.rel_tol = s.numerics.rel_tol;
      opt.abs_tol = s.numerics.abs_tol;
      opt.method = s.numerics.integrator;
      opt.rk4_substeps = s.numerics.rk4_substeps;
      b.numeric = oracle::integrate_rwa(s.pulse, s.system, init, b.grid, opt);
      b.populations_numeric.reserve(b.grid.size());
      for (size_t i = 0; i < b.grid.size(); ++i)
        b.populations_numeric.push_back(dressed::project_onto_dressed_basis(
            b.numeric->amplitudes[i], b.analytic->snapshots[i]));
    }
    if (wants(s, Output::components))
      b.components = dressed::dressed_components(
          *b.analytic, s.system, dressed::carrier_frequency(s.system, s.pulse));
    if (wants(s, Output::comparison))
      b.comparison = oracle::compare(*b.analytic, *b.numeric, b.adiabaticity->margin);
    if (wants(s, Output::residual)) {
      b.residual = oracle::residual_normal_form(s.pulse, s.system, *b.analytic);
      b.neglected = oracle::neglected_term_ratio(s.pulse, s.system, b.grid);
    }
    return b;
  } catch (Error& e) {
    e.add_context("scenario '" + s.name + "'");
    throw;
  }
}

std::vector<std::string> builtin_names() {
  return {"static-rabi",  "static-detuned",    "static-damped", "static-detuned-damped",
          "gaussian-adiabatic", "chirped-gaussian", "damped-gaussian", "sech-pulse",
          "turn-on",      "grischkowsky"};
}

Scenario builtin(std::string_view name) {
  using field::Envelope;
  if (name == "static-rabi")
    return make("static-rabi", constant_pulse(1.0, 0.0), {0.0, 20.0, 401});
  if (name == "static-detuned")
    return make("static-detuned", constant_pulse(1.0, 3.0), {0.0, 20.0, 401});
  if (name == "static-damped") {
    auto s = make("static-damped", constant_pulse(1.0, 0.0), {0.0, 20.0, 401});
    s.system.gamma_broadening = 0.1;
    return s;
  }
  if (name == "static-detuned-damped") {
    auto s = make("static-detuned-damped", constant_pulse(1.0, 3.0), {0.0, 20.0, 401});
    s.system.gamma_broadening = 0.1;
    return s;
  }
  if (name == "gaussian-adiabatic")
    return make("gaussian-adiabatic", shaped(Envelope::gaussian, 0.1, 1000.0, 1.0),
                {std::nullopt, std::nullopt, 8001});
  if (name == "chirped-gaussian") {
    auto s = make("chirped-gaussian", shaped(Envelope::gaussian, 0.1, 1000.0, 1.0),
                  {std::nullopt, std::nullopt, 8001});
    s.pulse.phase = field::PhaseLaw::linear_chirp;
    s.pulse.chirp_rate = 2e-5;
    s.numerics.anchor_fraction = 1e-4;
    return s;
  }
  if (name == "damped-gaussian") {
    auto s = make("damped-gaussian", shaped(Envelope::gaussian, 0.1, 1000.0, 1.0),
                  {std::nullopt, std::nullopt, 8001});
    s.system.gamma_broadening = 1e-3;
    s.system.gamma_shift = 5e-4;
    return s;
  }
  if (name == "sech-pulse")
    return make("sech-pulse", shaped(Envelope::sech, 0.1, 60.0, 1.0),
                {std::nullopt, std::nullopt, 2001});
  if (name == "turn-on")
    return make("turn-on", shaped(Envelope::turn_on, 0.2, 50.0, 1.0),
                {std::nullopt, std::nullopt, 2001});
  if (name == "grischkowsky") return grischkowsky_scenario();
  throw ValidationError("unknown built-in scenario '" + std::string(name) + "'");
}

GrischkowskyResult run_grischkowsky(const Scenario& s) {
  GrischkowskyResult r;
  r.bundle = run_scenario(s);
  r.threshold = s.numerics.virtual_ratio_threshold;
  const auto& b = r.bundle;
  if (!b.analytic) throw ValidationError("grischkowsky run needs the analytic trajectory");
  for (size_t i = 0; i < b.grid.size(); ++i) {
    const double sin2 = std::norm(b.analytic->snapshots[i].sin_half);
    r.max_excited = std::max(r.max_excited, b.populations[i].excited);
    r.max_virtual = std::max(r.max_virtual, sin2 * b.populations[i].ground);
    if (!b.populations_numeric.empty()) {
      r.max_excited_numeric = std::max(r.max_excited_numeric, b.populations_numeric[i].excited);
      r.max_virtual_numeric =
          std::max(r.max_virtual_numeric, sin2 * b.populations_numeric[i].ground);
    }
  }
  r.ratio = adiabaticity::safe_ratio(r.max_excited, r.max_virtual);
  r.ratio_numeric = b.populations_numeric.empty()
                        ? kNan
                        : adiabaticity::safe_ratio(r.max_excited_numeric, r.max_virtual_numeric);
  r.margin = b.adiabaticity ? b.adiabaticity->margin : kNan;
  return r;
}

GrischkowskyResult run_grischkowsky() { return run_grischkowsky(grischkowsky_scenario()); }

std::vector<std::string> numeric_keys() {
  std::vector<std::string> keys;
  for (const auto& f : numeric_fields()) keys.emplace_back(f.key);
  return keys;
}

void set_numeric(Scenario& s, std::string_view key, double value) {
  const auto f = find_field(numeric_fields(), key);
  if (!f) throw ValidationError("unknown numeric parameter '" + std::string(key) + "'");
  if (f->integer &&
      !(std::isfinite(value) && value == std::trunc(value) && std::abs(value) < 1e9))
    throw ValidationError("'" + std::string(key) + "' needs an integer value");
  f->set(s, value);
}

double get_numeric(const Scenario& s, std::string_view key) {
  const auto f = find_field(numeric_fields(), key);
  if (!f) throw ValidationError("unknown numeric parameter '" + std::string(key) + "'");
  return f->get(s);
}

std::vector<std::string> metric_names() {
  return {"max_population_error", "rms_error_a1",       "max_error_a1",
          "max_error_a2",         "margin",             "final_abs_cos",
          "final_abs_sin",        "final_sin_sq",       "max_identity_error",
          "max_excited_population", "max_virtual_population", "final_population_2",
          "final_population_2_numeric", "max_residual", "max_neglected",
          "max_norm_drift"};
}

double metric(const Bundle& b, std::string_view name) {
  auto need_comparison = [&]() -> const oracle::ComparisonReport& {
    if (!b.comparison)
      throw ValidationError("metric '" + std::string(name) + "' needs the comparison output");
    return *b.comparison;
  };
  if (name == "max_population_error") return need_comparison().max_population_error;
  if (name == "rms_error_a1") return need_comparison().rms_error_a1;
  if (name == "max_error_a1") return need_comparison().max_error_a1;
  if (name == "max_error_a2") return need_comparison().max_error_a2;
  if (name == "margin") {
    if (!b.adiabaticity)
      throw ValidationError("metric 'margin' needs the adiabaticity output");
    return b.adiabaticity->margin;
  }
  if (name == "final_abs_cos") return std::abs(need_analytic(b, name).snapshots.back().cos_half);
  if (name == "final_abs_sin") return std::abs(need_analytic(b, name).snapshots.back().sin_half);
  if (name == "final_sin_sq") return std::norm(need_analytic(b, name).snapshots.back().sin_half);
  if (name == "max_identity_error") {
    double worst = 0.0;
    for (const auto& sn : need_analytic(b, name).snapshots)
      worst = std::max(worst, std::abs(sn.cos_half * sn.cos_half +
                                       sn.sin_half * sn.sin_half - 1.0));
    return worst;
  }
  if (name == "max_excited_population") {
    need_analytic(b, name);
    double m = 0.0;
    for (const auto& p : b.populations) m = std::max(m, p.excited);
    return m;
  }
  if (name == "max_virtual_population") {
    const auto& a = need_analytic(b, name);
    double m = 0.0;
    for (size_t i = 0; i < b.populations.size(); ++i)
      m = std::max(m, std::norm(a.snapshots[i].sin_half) * b.populations[i].ground);
    return m;
  }
  if (name == "final_population_2") return std::norm(need_analytic(b, name).amplitudes.back()(1));
  if (name == "final_population_2_numeric") {
    if (!b.numeric)
      throw ValidationError("metric '" + std::string(name) + "' needs the oracle trajectory");
    return std::norm(b.numeric->amplitudes.back()(1));
  }
  if (name == "max_residual" || name == "max_neglected") {
    if (b.residual.empty())
      throw ValidationError("metric '" + std::string(name) + "' needs the residual output");
    return max_of(name == "max_residual" ? b.residual : b.neglected);
  }
  if (name == "max_norm_drift") {
    if (!b.numeric)
      throw ValidationError("metric '" + std::string(name) + "' needs the oracle trajectory");
    double worst = 0.0;
    for (double n : b.numeric->step_norm)
      worst = std::max(worst, std::abs(n - b.numeric->step_norm.front()));
    return worst;
  }
  throw ValidationError("unknown metric '" + std::string(name) + "'");
}

void validate(const SweepSpec& sw) {
  validate(sw.base);
  if (sw.values.empty()) throw ValidationError("sweep.values must not be empty");
  for (double v : sw.values)
    if (!std::isfinite(v)) throw ValidationError("sweep.values must be finite");
  const auto keys = numeric_keys();
  if (std::find(keys.begin(), keys.end(), sw.parameter) == keys.end())
    throw ValidationError("sweep.parameter '" + sw.parameter + "' is not a numeric key");
  if (sw.metrics.empty()) throw ValidationError("sweep.metrics must not be empty");
  const auto names = metric_names();
  for (const auto& m : sw.metrics)
    if (std::find(names.begin(), names.end(), m) == names.end())
      throw ValidationError("unknown metric '" + m + "'");
  if (sw.workers < 0) throw ValidationError("sweep.workers must be >= 0");
}

std::vector<SweepRow> run_sweep(const SweepSpec& sw) {
  validate(sw);
  std::vector<SweepRow> rows(sw.values.size());
  std::atomic<size_t> next{0};

  auto work = [&] {
    for (size_t i = next++; i < rows.size(); i = next++) {
      SweepRow& row = rows[i];
      row.value = sw.values[i];
      row.metrics.assign(sw.metrics.size(), kNan);
      try {
        Scenario s = sw.base;
        set_numeric(s, sw.parameter, row.value);
        const Bundle b = run_scenario(s);
        for (size_t m = 0; m < sw.metrics.size(); ++m) row.metrics[m] = metric(b, sw.metrics[m]);
      } catch (const std::exception& e) {
        row.metrics.assign(sw.metrics.size(), kNan);
        row.error = e.what();
      }
    }
  };

  size_t workers = sw.workers > 0 ? static_cast<size_t>(sw.workers)
                                  : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, rows.size());
  std::vector<std::thread> pool;
  for (size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return rows;
}

}  // namespace nads::scenarios
