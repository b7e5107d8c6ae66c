// Named experiment configurations, the pipeline that joins every module on a
// shared grid, and the concurrent sweep engine.
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nads/adiabaticity.hpp"
#include "nads/dressed.hpp"
#include "nads/field.hpp"
#include "nads/oracle.hpp"

namespace nads::scenarios {

enum class Output { trajectory, components, adiabaticity, comparison, residual };

std::string_view to_string(Output o);
Output output_from_string(std::string_view name);

struct GridSpec {
  /// Unset ends default to t0 -+ 5 tau for pulsed envelopes.
  std::optional<double> start;
  std::optional<double> end;
  int points = 2001;

  bool operator==(const GridSpec&) const = default;
};

struct NumericOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  oracle::Method integrator = oracle::Method::dopri5;
  int rk4_substeps = 64;
  /// Pulsed grids are clipped to where Omega >= anchor_fraction * Omega_peak.
  double anchor_fraction = 1e-6;
  /// See adiabaticity::Options::margin_fraction.
  double margin_fraction = 0.5;
  int refinement = 1;
  int n_max = 3;
  int k_max = 2;
  /// Upper bound on max p_E / max virtual-state population in the
  /// far-detuned check.
  double virtual_ratio_threshold = 1e-2;

  bool operator==(const NumericOptions&) const = default;
};

struct Scenario {
  std::string name = "custom";
  field::PulseSpec pulse;
  dressed::SystemParams system;
  GridSpec grid;
  Complex init_a1{1.0, 0.0};
  Complex init_a2{0.0, 0.0};
  std::vector<Output> outputs{Output::trajectory, Output::components,
                              Output::adiabaticity, Output::comparison,
                              Output::residual};
  NumericOptions numerics;

  bool operator==(const Scenario&) const = default;
};

void validate(const Scenario& s);

bool wants(const Scenario& s, Output o);

/// Uniform grid over the requested window, clipped to the anchor support of
/// pulsed envelopes.
std::vector<double> effective_grid(const Scenario& s);

struct Bundle {
  Scenario scenario;
  std::vector<double> grid;
  std::optional<dressed::AmplitudeSolution> analytic;
  std::optional<oracle::OracleTrajectory> numeric;
  std::optional<adiabaticity::AdiabaticityReport> adiabaticity;
  std::optional<dressed::DressedStateComponents> components;
  std::optional<oracle::ComparisonReport> comparison;
  /// Dressed-basis populations of the analytic and the oracle amplitudes.
  std::vector<dressed::DressedPopulations> populations;
  std::vector<dressed::DressedPopulations> populations_numeric;
  std::vector<double> residual;
  std::vector<double> neglected;
};

Bundle run_scenario(const Scenario& s);

std::vector<std::string> builtin_names();
/// Throws ValidationError for an unknown name.
Scenario builtin(std::string_view name);

struct GrischkowskyResult {
  Bundle bundle;
  double detuning_wavenumber = 0.8;    // cm^-1
  double bandwidth_wavenumber = 0.005; // cm^-1, intensity FWHM
  double doppler_wavenumber = 0.04;    // cm^-1, metadata only
  double max_excited = 0.0;            // max_t p_E
  double max_virtual = 0.0;            // max_t |sin|^2 p_G
  double ratio = 0.0;
  double max_excited_numeric = 0.0;
  double max_virtual_numeric = 0.0;
  double ratio_numeric = 0.0;
  double margin = 0.0;
  double threshold = 1e-2;
};

GrischkowskyResult run_grischkowsky(const Scenario& s);
GrischkowskyResult run_grischkowsky();

/// Numeric scenario fields addressable by dotted key, e.g. "pulse.tau".
std::vector<std::string> numeric_keys();
void set_numeric(Scenario& s, std::string_view key, double value);
double get_numeric(const Scenario& s, std::string_view key);

std::vector<std::string> metric_names();
/// Throws ValidationError for an unknown metric, or when the bundle lacks the
/// output it needs.
double metric(const Bundle& b, std::string_view name);

struct SweepSpec {
  Scenario base;
  std::string parameter;
  std::vector<double> values;
  std::vector<std::string> metrics{"max_population_error", "margin"};
  /// 0 selects the hardware concurrency.
  int workers = 0;

  bool operator==(const SweepSpec&) const = default;
};

void validate(const SweepSpec& sw);

struct SweepRow {
  double value = 0.0;
  std::vector<double> metrics;  // in SweepSpec::metrics order; nan on failure
  std::string error;            // empty on success
};

std::vector<SweepRow> run_sweep(const SweepSpec& sw);

}  // namespace nads::scenarios
