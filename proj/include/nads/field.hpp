// Driving-field model: envelope Omega(t) (the on-resonance Rabi frequency),
// optical phase phi(t) and their closed-form time derivatives.
#pragma once

#include <array>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nads/types.hpp"

namespace nads::field {

enum class Envelope { constant, gaussian, sech, turn_on };
enum class PhaseLaw { none, linear_chirp, polynomial };

std::string_view to_string(Envelope e);
std::string_view to_string(PhaseLaw p);
Envelope envelope_from_string(std::string_view name);
PhaseLaw phase_law_from_string(std::string_view name);

/// Analytic pulse description. Immutable once validated; all evaluation is pure.
///
/// Envelope families (x = (t - t0) / tau):
///   constant  Omega = peak
///   gaussian  Omega = peak * exp(-x^2)
///   sech      Omega = peak * sech(x)
///   turn_on   Omega = peak * (1 + tanh(x)) / 2
/// Phase laws (s = t - t0):
///   none          phi = 0
///   linear_chirp  phi = chirp_rate / 2 * s^2
///   polynomial    phi = sum_k coeffs[k] * s^k
struct PulseSpec {
  Envelope envelope = Envelope::constant;
  double omega_peak = 1.0;
  double t0 = 0.0;
  double tau = 1.0;
  PhaseLaw phase = PhaseLaw::none;
  double chirp_rate = 0.0;
  std::vector<double> phase_coefficients;
  /// Zero-field detuning omega2 - omega1 - omega.
  double detuning = 0.0;
  /// Log-derivative requests fail below envelope_floor * omega_peak.
  double envelope_floor = 1e-12;

  bool operator==(const PulseSpec&) const = default;
};

/// Throws ValidationError naming the violated invariant.
void validate(const PulseSpec& pulse);

inline bool is_pulsed(const PulseSpec& pulse) {
  return pulse.envelope != Envelope::constant;
}

/// Everything the dressed-state formulas need at one instant.
/// omega[n] = d^n Omega/dt^n, phi[n] = d^n phi/dt^n for n = 0..4;
/// log_rate[n] = d^n L/dt^n for n = 0..3 with L = Omega^-1 dOmega/dt.
struct FieldSample {
  double t = 0.0;
  std::array<double, 5> omega{};
  std::array<double, 5> phi{};
  std::array<double, 4> log_rate{};
};

double envelope(const PulseSpec& pulse, double t);
double phase(const PulseSpec& pulse, double t);

/// Closed-form derivatives. Throws EnvelopeUnderflow for pulsed families when
/// Omega(t) <= envelope_floor * omega_peak.
FieldSample sample(const PulseSpec& pulse, double t);

/// Worst deviation between analytic d^n f and a 5-point central difference of
/// the analytic d^(n-1) f, for f in {Omega, phi, L} and n = 1..order (L up to 3).
/// The stencil step is the smallest grid spacing. Deviations are relative to
/// the largest |d^n f| seen on the grid; grid points whose stencil leaves the
/// envelope support are skipped.
double verify_derivatives(const PulseSpec& pulse, std::span<const double> grid,
                          int order);

struct Window {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
};

/// Time interval on which Omega(t) >= fraction * omega_peak, fraction in (0, 1].
Window support_window(const PulseSpec& pulse, double fraction);

/// Speed of light in cm/ns: with it, wavenumbers map to rad/ns.
inline constexpr double kLightSpeedCmPerNs = 29.9792458;

/// nu [cm^-1] -> 2 pi c nu. The single conversion authority for wavenumbers.
inline double wavenumber_to_angular(double wavenumber,
                                    double light_speed = kLightSpeedCmPerNs) {
  return 2.0 * kPi * light_speed * wavenumber;
}

}  // namespace nads::field
