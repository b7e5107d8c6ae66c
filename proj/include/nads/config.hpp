// Scenario and sweep config files.
//
// The dialect is a YAML subset: nested mappings of scalars, with flow or block
// sequences for lists. Recognized keys (dotted paths):
//
//   name                      string
//   base                      built-in scenario name, applied before all other keys
//   pulse.envelope            constant | gaussian | sech | turn-on
//   pulse.omega_peak, pulse.t0, pulse.tau, pulse.detuning, pulse.envelope_floor
//   pulse.phase               none | linear-chirp | polynomial
//   pulse.chirp_rate, pulse.phase_coefficients ([c0, c1, ...])
//   system.omega1, system.omega2, system.gamma_broadening, system.gamma_shift
//   grid.start, grid.end, grid.points
//   init.a1, init.a2          [re, im]
//   outputs                   list of trajectory | components | adiabaticity |
//                             comparison | residual
//   numerics.rel_tol, numerics.abs_tol, numerics.integrator (dopri5 | rk4),
//   numerics.rk4_substeps, numerics.anchor_fraction, numerics.margin_fraction,
//   numerics.refinement, numerics.n_max, numerics.k_max,
//   numerics.virtual_ratio_threshold
//   sweep.parameter, sweep.values, sweep.metrics, sweep.workers
//
// A `sweep` section turns the file into a sweep over the scenario it defines.
// Pulsed envelopes without grid.start / grid.end use t0 -+ 5 tau of the pulse
// actually run, so sweeps over tau rescale the window.
#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nads/scenarios.hpp"

namespace nads::config {

using Parsed = std::variant<scenarios::Scenario, scenarios::SweepSpec>;

/// `overrides` are "key=value" assignments applied after the file's own keys;
/// values use the same syntax as in the file.
Parsed parse_config(std::string_view text, const std::vector<std::string>& overrides = {});

/// Reads `source` as a file path, or as a built-in scenario name when no such
/// file exists.
Parsed load(const std::string& source, const std::vector<std::string>& overrides = {});

/// Full effective config; parse_config(emit_config(x)) == x.
std::string emit_config(const scenarios::Scenario& s);
std::string emit_config(const scenarios::SweepSpec& sw);
std::string emit_config(const Parsed& p);

/// Shortest text that reads back to the same double.
std::string format_double(double v);

}  // namespace nads::config
