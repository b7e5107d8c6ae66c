// Independent numerical ground truth: direct integration of the RWA
// equations of motion, plus residual diagnostics for the closed form.
#pragma once

#include <span>
#include <vector>

#include "nads/dressed.hpp"
#include "nads/field.hpp"

namespace nads::oracle {

enum class Method { dopri5, rk4 };

struct IntegratorOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  Method method = Method::dopri5;
  /// Fixed RK4 steps per grid interval (rk4 mode only).
  int rk4_substeps = 64;
};

struct OracleTrajectory {
  std::vector<double> grid;
  std::vector<Amplitudes> amplitudes;
  std::vector<double> norm;       // |a1|^2 + |a2|^2 on the grid
  std::vector<double> step_norm;  // same, after every accepted step
  size_t accepted = 0;
  size_t rejected = 0;
  double rel_tol = 0.0;
  double abs_tol = 0.0;
  Method method = Method::dopri5;
};

/// Right-hand side of the RWA equations; the phase dw*t - phi(t) is evaluated
/// exactly at t.
Amplitudes rwa_rhs(const field::PulseSpec& pulse, const dressed::SystemParams& sys,
                   double t, const Amplitudes& a);

/// Embedded Dormand-Prince 5(4) with dense output sampled on `grid`, or fixed
/// step RK4. Throws StepSizeUnderflow with the failing time.
OracleTrajectory integrate_rwa(const field::PulseSpec& pulse,
                               const dressed::SystemParams& sys, const Amplitudes& init,
                               std::span<const double> grid,
                               const IntegratorOptions& options = {});

/// f = a1 exp(+(i/2) int D dt) and its inverse, measured from `start`.
Complex to_normal_form(Complex a1, const dressed::InstantSnapshot& start,
                       const dressed::InstantSnapshot& s, const dressed::SystemParams& sys);
Complex from_normal_form(Complex f, const dressed::InstantSnapshot& start,
                         const dressed::InstantSnapshot& s,
                         const dressed::SystemParams& sys);

/// Relative residual |f'' + R^2 f / 4| / (|R^2 f / 4| + floor) of the closed
/// form at each grid point; f'' from a 5-point stencil at a tenth of the local
/// grid step.
std::vector<double> residual_normal_form(const field::PulseSpec& pulse,
                                         const dressed::SystemParams& sys,
                                         const dressed::AmplitudeSolution& solution);

/// |T''/T| / |R^2/4| with T = (R/2)^(-1/2): the term dropped by the closed
/// form. R' is analytic, R'' a 5-point central difference of R'.
std::vector<double> neglected_term_ratio(const field::PulseSpec& pulse,
                                         const dressed::SystemParams& sys,
                                         std::span<const double> grid);

struct ComparisonReport {
  double max_error_a1 = 0.0, rms_error_a1 = 0.0;
  double max_error_a2 = 0.0, rms_error_a2 = 0.0;
  double max_population_error = 0.0;
  /// arg(a1_analytic / a1_oracle) at the final grid point.
  double final_phase_error_a1 = 0.0;
  double margin = 0.0;
};

/// Throws GridMismatch unless both trajectories share the same grid.
ComparisonReport compare(const dressed::AmplitudeSolution& analytic,
                         const OracleTrajectory& numeric, double margin);

}  // namespace nads::oracle
