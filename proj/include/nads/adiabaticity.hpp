// Generalized adiabatic condition and its two classical special cases.
//
// For each (n, k) the ratio
//   |d^n/dt^n (phi' - i L)| / (|dw - i gamma/2|^(n+1-k) |Omega|^k)
// must be << 1, n = 0, 1, ..., k = 0..n+1.
#pragma once

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "nads/dressed.hpp"
#include "nads/field.hpp"

namespace nads::adiabaticity {

struct Options {
  int n_max = 3;
  /// Defaults to 2; k never exceeds n + 1.
  int k_max = 2;
  /// The scalar margin covers only grid points with
  /// Omega >= margin_fraction * omega_peak (0 keeps every point).
  double margin_fraction = 0.0;
};

struct AdiabaticityReport {
  std::vector<double> grid;
  std::map<std::pair<int, int>, std::vector<double>> ratios;
  std::vector<double> standard_ratio;
  std::vector<double> born_fock_ratio;
  /// Grid points where the envelope underflowed; ratios there are +inf.
  std::vector<bool> underflow;
  /// Points contributing to `margin`.
  std::vector<bool> in_window;
  double margin = 0.0;
  /// max over (n, k) at each grid point.
  std::vector<double> pointwise_max;
};

/// |lhs| / rhs with 0/0 := 0 (condition trivially met) and x/0 := inf.
double safe_ratio(double lhs, double rhs);

AdiabaticityReport evaluate(const field::PulseSpec& pulse,
                            const dressed::SystemParams& sys,
                            std::span<const double> grid, const Options& options = {});

/// |L| / |dw - i gamma| per point (note gamma, not gamma/2).
std::vector<double> standard_condition(const field::PulseSpec& pulse,
                                       const dressed::SystemParams& sys,
                                       std::span<const double> grid);

/// |d(1/Omega)/dt| = |L| / Omega per point.
std::vector<double> born_fock_condition(const field::PulseSpec& pulse,
                                        std::span<const double> grid);

}  // namespace nads::adiabaticity
