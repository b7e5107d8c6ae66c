// Closed-form non-adiabatic dressed-state solution of the damped, driven
// two-level system in the rotating-wave approximation.
//
// Equations of motion (interaction picture, dPhi = dw * t - phi(t)):
//   da1/dt = (i/2) Omega exp(-i dPhi) a2
//   da2/dt = -(gamma/2) a2 + (i/2) Omega exp(+i dPhi) a1,  gamma = g' - i g''
//
// Instantaneous quantities (L = Omega^-1 dOmega/dt):
//   D   = dw - phi' - g''/2 - i (g'/2 - L)          complex detuning
//   R   = sqrt(Omega^2 + D^2 - 2i dD/dt)            off-resonance Rabi frequency
//   Lambda_{1,2}  = (D +- R) / 2
//   Lambda~_{1,2} = Lambda_{1,2} - i (dR/dt) / (2R)
//   cos = sqrt(Lambda~_1 / R),  sin = sqrt(-Lambda~_2 / R)
//
// Every square root is branch-tracked along the time grid.
#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "nads/field.hpp"
#include "nads/types.hpp"

namespace nads::dressed {

struct SystemParams {
  double omega1 = 0.0;
  double omega2 = 1.0;
  /// gamma', level broadening (>= 0).
  double gamma_broadening = 0.0;
  /// gamma'', damping-induced shift.
  double gamma_shift = 0.0;

  bool operator==(const SystemParams&) const = default;
};

void validate(const SystemParams& sys);

/// gamma = gamma' - i gamma''.
inline Complex damping(const SystemParams& sys) {
  return {sys.gamma_broadening, -sys.gamma_shift};
}

/// Laser carrier omega = omega2 - omega1 - dw.
inline double carrier_frequency(const SystemParams& sys, const field::PulseSpec& pulse) {
  return sys.omega2 - sys.omega1 - pulse.detuning;
}

struct Branch {
  Complex value;
  bool ambiguous = false;
};

/// Square root of z on the branch continued from `prev`: the root nearer to
/// prev. Without prev, the root with Re >= 0 (ties toward Im >= 0). Flags
/// `ambiguous` when both roots are equidistant from prev within tolerance; the
/// principal root is then returned.
Branch continue_sqrt(Complex z, std::optional<Complex> prev);

Complex instantaneous_detuning(const field::FieldSample& f, double detuning,
                               const SystemParams& sys);

/// dD/dt and d^2D/dt^2 from the field derivatives.
std::pair<Complex, Complex> detuning_rates(const field::FieldSample& f);

Branch instantaneous_rabi(Complex detuning, Complex detuning_rate, double omega,
                          std::optional<Complex> prev);

/// dR/dt by the chain rule, (Omega Omega' + D D' - i D'') / R.
Complex rabi_rate(Complex rabi, double omega, double omega_rate, Complex detuning,
                  Complex detuning_rate, Complex detuning_accel);

struct Lambdas {
  Complex l1, l2;
  Complex l1_corrected, l2_corrected;
};

/// Throws DegenerateRabi when |R| is below tolerance.
Lambdas lambdas(Complex detuning, Complex rabi, Complex rabi_rate);

struct Mixing {
  Complex cos_half, sin_half;
  bool ambiguous = false;
};

Mixing mixing_amplitudes(Complex l1_corrected, Complex l2_corrected, Complex rabi,
                         std::optional<std::pair<Complex, Complex>> prev);

struct DressedFrequencies {
  Complex ground;        // omega_G = omega1 + Lambda_2
  Complex excited;       // omega_E = omega2 - Lambda_2
  Complex excited_inst;  // omega~'_E = omega_E - phi' - g''/2 - i(g'/2 - L)
};

DressedFrequencies dressed_frequencies(const SystemParams& sys, Complex lambda2,
                                       const field::FieldSample& f);

struct InstantSnapshot {
  double t = 0.0;
  double omega = 0.0;
  double bare_detuning = 0.0;
  double optical_phase = 0.0;  // phi(t)
  double delta_phase = 0.0;    // dw * t - phi(t)
  Complex detuning, detuning_rate, detuning_accel;
  Complex rabi, rabi_rate;
  Complex rabi_sqrt;  // branch-tracked sqrt(R), for the sqrt(2/R) prefactor
  Complex lambda1, lambda2, lambda1_corrected, lambda2_corrected;
  Complex cos_half, sin_half;
  Complex omega_g, omega_e, omega_e_inst;
  int ambiguities = 0;
};

/// Every derived quantity at t, continued from `prev` when given.
InstantSnapshot snapshot(const field::PulseSpec& pulse, const SystemParams& sys,
                         double t, const InstantSnapshot* prev = nullptr);

/// Constants (C1, C2) matching the closed form to `init` at the snapshot time.
std::pair<Complex, Complex> solve_constants(const InstantSnapshot& start,
                                            const Amplitudes& init);
std::pair<Complex, Complex> solve_constants(const field::PulseSpec& pulse,
                                            const SystemParams& sys, double t_start,
                                            const Amplitudes& init);

/// (a1, a2) from the constants and the accumulated integrals of Lambda_{1,2}.
Amplitudes evaluate_amplitudes(Complex c1, Complex c2, const InstantSnapshot& s,
                               Complex phase1, Complex phase2);

/// Integral of D from t_start, in closed form:
/// (dw - g''/2 - i g'/2)(t - ts) - (phi(t) - phi(ts)) + i ln(Omega(t)/Omega(ts)).
Complex detuning_integral(const InstantSnapshot& start, const InstantSnapshot& s,
                          const SystemParams& sys);

struct BranchWarning {
  size_t index = 0;
  double t = 0.0;
};

struct AmplitudeSolution {
  Complex c1, c2;
  std::vector<double> grid;
  std::vector<Complex> phase1, phase2;  // integrals of Lambda_{1,2} from grid[0]
  std::vector<Amplitudes> amplitudes;
  std::vector<InstantSnapshot> snapshots;
  std::vector<BranchWarning> warnings;
};

struct TrajectoryOptions {
  /// Simpson sub-panels per grid interval.
  int refinement = 1;
};

/// Closed-form amplitudes on `grid`. Throws (with the grid index in the
/// message) on envelope underflow or a degenerate Rabi frequency.
AmplitudeSolution analytic_trajectory(const field::PulseSpec& pulse,
                                      const SystemParams& sys,
                                      std::span<const double> grid,
                                      const Amplitudes& init,
                                      const TrajectoryOptions& options = {});

struct PointEvaluation {
  Amplitudes amplitudes;
  InstantSnapshot snapshot;
};

/// Closed-form amplitudes at an arbitrary time t near grid point `index`,
/// continued from that point's snapshot with a local Simpson integral.
PointEvaluation evaluate_at(const AmplitudeSolution& solution,
                            const field::PulseSpec& pulse, const SystemParams& sys,
                            size_t index, double t);

struct ComponentPhases {
  // Each component evolves as exp(-i * phase).
  Complex ground_real, ground_virtual, excited_real, excited_virtual;
};

struct DressedStateComponents {
  double carrier = 0.0;
  std::vector<double> grid;
  std::vector<ComponentPhases> phases;
  std::vector<double> weight_cos;  // |cos|^2: weight of |G>_r and |E>_r
  std::vector<double> weight_sin;  // |sin|^2: weight of |G>_v and |E>_v
  std::vector<double> optical_phase;
};

DressedStateComponents dressed_components(const AmplitudeSolution& solution,
                                          const SystemParams& sys, double carrier);

/// Real adiabatic mixing (cos(theta/2), sin(theta/2)) with tan(theta) = Omega/dw.
std::pair<double, double> adiabatic_mixing(double omega, double detuning);

struct DressedPopulations {
  double ground = 0.0;
  double excited = 0.0;
};

/// Populations in the orthonormal basis built from the real adiabatic mixing;
/// damping and field-derivative terms are dropped from the mixing only.
DressedPopulations project_onto_dressed_basis(const Amplitudes& a,
                                              const InstantSnapshot& s);

}  // namespace nads::dressed
