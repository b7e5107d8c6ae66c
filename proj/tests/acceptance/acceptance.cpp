// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance <path to the nads CLI>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "nads/adiabaticity.hpp"
#include "nads/dressed.hpp"
#include "nads/field.hpp"
#include "nads/oracle.hpp"
#include "nads/scenarios.hpp"

using namespace nads;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kIdentityTol = 1e-12;
constexpr double kSmallCosTol = 1e-5;
constexpr double kSmallSinTol = 1e-2;
constexpr double kLargeMixTol = 5e-4;
constexpr double kStaticPopTol = 1e-8;
constexpr double kStaticRelTol = 1e-10;
constexpr double kPiPulseTol = 1e-8;
constexpr double kEigenTol = 1e-12;
constexpr double kFamilyMarginGate = 1e-2;
constexpr double kFamilyErrorTol = 1e-2;
constexpr double kResidualTol = 1e-3;
constexpr double kNeglectedTol = 1e-3;
constexpr double kGrischkowskyMarginTol = 0.1;
constexpr double kGrischkowskyRatioTol = 1e-2;
constexpr double kNormFactor = 10.0;
constexpr double kStepRoundoff = 4.0 * 2.220446049250313e-16;
constexpr double kDerivativeTol = 1e-6;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

field::PulseSpec constant(double omega, double detuning) {
  field::PulseSpec p;
  p.omega_peak = omega;
  p.detuning = detuning;
  return p;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> g(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<size_t>(i)] = a + (b - a) * i / (n - 1);
  g.back() = b;
  return g;
}

Outcome identity() {
  double worst = 0.0;
  for (const auto& name : scenarios::builtin_names()) {
    auto s = scenarios::builtin(name);
    s.outputs = {scenarios::Output::components};
    worst = std::max(worst, scenarios::metric(scenarios::run_scenario(s), "max_identity_error"));
  }
  return {worst < kIdentityTol, "max |cos^2 + sin^2 - 1| = " + fmt(worst)};
}

Outcome asymptotics() {
  const auto weak = dressed::snapshot(constant(1e-3, 1.0), {}, 0.0);
  const auto strong = dressed::snapshot(constant(1e3, 1.0), {}, 0.0);
  const double r = std::sqrt(0.5);
  const double e1 = std::abs(weak.cos_half - 1.0);
  const double e2 = std::abs(weak.sin_half);
  const double e3 = std::abs(std::abs(strong.cos_half) - r);
  const double e4 = std::abs(std::abs(strong.sin_half) - r);
  return {e1 < kSmallCosTol && e2 < kSmallSinTol && e3 < kLargeMixTol && e4 < kLargeMixTol,
          "weak: |cos-1| = " + fmt(e1) + ", |sin| = " + fmt(e2) + "; strong: " + fmt(e3) +
              ", " + fmt(e4)};
}

Outcome static_exactness() {
  double worst = 0.0;
  for (const char* name :
       {"static-rabi", "static-detuned", "static-damped", "static-detuned-damped"}) {
    auto s = scenarios::builtin(name);
    s.numerics.rel_tol = kStaticRelTol;
    s.outputs = {scenarios::Output::comparison};
    worst = std::max(worst,
                     scenarios::metric(scenarios::run_scenario(s), "max_population_error"));
  }
  return {worst < kStaticPopTol, "max population error = " + fmt(worst)};
}

Outcome pi_pulse() {
  const double omega = 1.0;
  const auto grid = linspace(0.0, kPi / omega, 101);
  const auto p = constant(omega, 0.0);
  const auto a = dressed::analytic_trajectory(p, {}, grid, Amplitudes(1, 0));
  const auto o = oracle::integrate_rwa(p, {}, Amplitudes(1, 0), grid);
  const double ea = std::abs(std::norm(a.amplitudes.back()(1)) - 1.0);
  const double eo = std::abs(std::norm(o.amplitudes.back()(1)) - 1.0);
  return {ea < kPiPulseTol && eo < kPiPulseTol,
          "|1 - |a2|^2|: analytic " + fmt(ea) + ", oracle " + fmt(eo)};
}

Outcome eigen_reduction() {
  double worst = 0.0;
  for (double ratio : {1e-3, 1e-2, 0.3, 1.0, 4.0, 1e2, 1e3}) {
    for (double detuning : {-2.0, 0.5, 1.0}) {
      const double omega = ratio * std::abs(detuning);
      const auto s = dressed::snapshot(constant(omega, detuning), {}, 0.0);
      Eigen::Matrix2d h;
      h << 0.0, -0.5 * omega, -0.5 * omega, detuning;
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h);
      Eigen::Vector2d g = es.eigenvectors().col(0);
      if (g(0) < 0) g = -g;
      worst = std::max({worst, std::abs(s.cos_half - g(0)), std::abs(s.sin_half - g(1))});
    }
  }
  return {worst < kEigenTol, "max mixing-amplitude deviation = " + fmt(worst)};
}

Outcome monotone_family() {
  std::vector<double> errors, margins;
  std::string detail = "tau: err / margin";
  for (double tau : {250.0, 500.0, 1000.0, 2000.0}) {
    auto s = scenarios::builtin("gaussian-adiabatic");
    s.pulse.omega_peak = 0.2 * s.pulse.detuning;
    s.pulse.tau = tau;
    s.grid.points = 4001;
    s.outputs = {scenarios::Output::comparison};
    const auto b = scenarios::run_scenario(s);
    errors.push_back(b.comparison->max_population_error);
    margins.push_back(b.comparison->margin);
    detail += "; " + fmt(tau) + ": " + fmt(errors.back()) + " / " + fmt(margins.back());
  }
  bool ok = true;
  bool gated = false;
  for (size_t i = 1; i < errors.size(); ++i)
    ok = ok && errors[i] <= errors[i - 1] && margins[i] < margins[i - 1];
  for (size_t i = 0; i < errors.size(); ++i) {
    if (margins[i] <= kFamilyMarginGate) {
      gated = true;
      ok = ok && errors[i] <= kFamilyErrorTol;
    }
  }
  return {ok && gated, detail};
}

Outcome normal_form_residual() {
  auto s = scenarios::builtin("gaussian-adiabatic");
  s.outputs = {scenarios::Output::residual};
  const auto b = scenarios::run_scenario(s);
  const double r = scenarios::metric(b, "max_residual");
  const double n = scenarios::metric(b, "max_neglected");
  return {r < kResidualTol && n < kNeglectedTol,
          "max residual = " + fmt(r) + ", max neglected ratio = " + fmt(n)};
}

Outcome grischkowsky() {
  const auto g = scenarios::run_grischkowsky();
  const bool ok = g.margin < kGrischkowskyMarginTol && g.ratio < kGrischkowskyRatioTol &&
                  g.ratio_numeric < kGrischkowskyRatioTol;
  return {ok, "margin = " + fmt(g.margin) + ", max p_E / max virtual: closed form " +
                  fmt(g.ratio) + ", oracle " + fmt(g.ratio_numeric)};
}

Outcome norm_laws() {
  bool ok = true;
  double worst_drift = 0.0;
  for (const char* name : {"static-rabi", "static-detuned", "gaussian-adiabatic",
                           "chirped-gaussian", "sech-pulse", "turn-on"}) {
    auto s = scenarios::builtin(name);
    s.outputs = {scenarios::Output::trajectory};
    const auto b = scenarios::run_scenario(s);
    const double drift = scenarios::metric(b, "max_norm_drift");
    ok = ok && drift <= kNormFactor * s.numerics.rel_tol;
    worst_drift = std::max(worst_drift, drift);
  }
  double worst_increase = 0.0;
  for (const char* name : {"static-damped", "static-detuned-damped", "damped-gaussian"}) {
    auto s = scenarios::builtin(name);
    s.outputs = {scenarios::Output::trajectory};
    const auto b = scenarios::run_scenario(s);
    const auto& n = b.numeric->step_norm;
    for (size_t i = 1; i < n.size(); ++i) {
      const double up = n[i] - n[i - 1];
      worst_increase = std::max(worst_increase, up);
      ok = ok && up <= kStepRoundoff * n[i - 1];
    }
  }
  return {ok, "worst closed-system drift = " + fmt(worst_drift) +
                  ", worst damped step increase = " + fmt(worst_increase)};
}

Outcome derivative_contract() {
  double worst = 0.0;
  for (auto e : {field::Envelope::constant, field::Envelope::gaussian, field::Envelope::sech,
                 field::Envelope::turn_on}) {
    for (auto law :
         {field::PhaseLaw::none, field::PhaseLaw::linear_chirp, field::PhaseLaw::polynomial}) {
      field::PulseSpec p;
      p.envelope = e;
      p.omega_peak = 0.5;
      p.tau = 10.0;
      p.phase = law;
      p.chirp_rate = 0.01;
      p.phase_coefficients = {0.2, 0.1, -0.01, 1e-3, -1e-4};
      const double h = 1e-3 * p.tau;
      std::vector<double> grid;
      for (double t = -3.0 * p.tau; t <= 3.0 * p.tau; t += h) grid.push_back(t);
      worst = std::max(worst, field::verify_derivatives(p, grid, 4));
    }
  }
  return {worst < kDerivativeTol, "max relative derivative mismatch = " + fmt(worst)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism(const std::string& cli) {
  if (cli.empty()) return {false, "no CLI path given"};
  const auto root = fs::temp_directory_path() / "nads_acceptance_determinism";
  fs::remove_all(root);
  for (const char* sub : {"a", "b"}) {
    const std::string cmd = "\"" + cli + "\" run sech-pulse --out \"" +
                            (root / sub).string() + "\" > /dev/null";
    if (std::system(cmd.c_str()) != 0) return {false, "CLI run failed: " + cmd};
  }
  int compared = 0;
  for (const char* f : {"trajectory.csv", "adiabaticity.csv", "components.csv"}) {
    const auto a = slurp(root / "a" / f);
    if (a.empty() || a != slurp(root / "b" / f))
      return {false, std::string(f) + " differs between runs"};
    ++compared;
  }
  fs::remove_all(root);
  return {true, std::to_string(compared) + " CSV files byte-identical"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  struct Criterion {
    const char* id;
    const char* title;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {"AC1", "mixing identity on every built-in", identity},
      {"AC2", "weak and strong field asymptotics", asymptotics},
      {"AC3", "static exactness against the oracle", static_exactness},
      {"AC4", "resonant pi pulse", pi_pulse},
      {"AC5", "reduction to the static eigenvectors", eigen_reduction},
      {"AC6", "error falls with the margin across a tau family", monotone_family},
      {"AC7", "normal-form residual and neglected term", normal_form_residual},
      {"AC8", "virtual excitation dominates in the far-detuned pulse", grischkowsky},
      {"AC9", "norm conservation and decay", norm_laws},
      {"AC10", "field derivative contract", derivative_contract},
      {"AC11", "repeated CLI runs are byte-identical", [&] { return determinism(cli); }},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("%s %-4s %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.title,
                o.detail.c_str(), secs);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
