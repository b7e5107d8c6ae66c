#include "nads/adiabaticity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace nads::adiabaticity {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::optional<field::FieldSample> try_sample(const field::PulseSpec& pulse, double t) {
  try {
    return field::sample(pulse, t);
  } catch (const EnvelopeUnderflow&) {
    return std::nullopt;
  }
}

}  // namespace

double safe_ratio(double lhs, double rhs) {
  lhs = std::abs(lhs);
  if (lhs == 0.0) return 0.0;
  if (rhs == 0.0) return kInf;
  return lhs / rhs;
}

AdiabaticityReport evaluate(const field::PulseSpec& pulse,
                            const dressed::SystemParams& sys,
                            std::span<const double> grid, const Options& options) {
  if (options.n_max < 0 || options.n_max > 3)
    throw ValidationError("adiabaticity n_max must lie in 0..3 (field derivatives end at order 4)");
  if (options.k_max < 0) throw ValidationError("adiabaticity k_max must be >= 0");

  AdiabaticityReport report;
  report.grid.assign(grid.begin(), grid.end());
  const double detuning_scale =
      std::abs(Complex{pulse.detuning, 0.0} - 0.5 * kI * dressed::damping(sys));
  const double floor = options.margin_fraction * pulse.omega_peak;

  for (int n = 0; n <= options.n_max; ++n)
    for (int k = 0; k <= std::min(n + 1, options.k_max); ++k)
      report.ratios[{n, k}].reserve(grid.size());

  report.standard_ratio = standard_condition(pulse, sys, grid);
  report.born_fock_ratio = born_fock_condition(pulse, grid);

  for (double t : grid) {
    const auto f = try_sample(pulse, t);
    report.underflow.push_back(!f.has_value());
    double worst = 0.0;
    for (auto& [nk, series] : report.ratios) {
      const auto [n, k] = nk;
      double r = kInf;
      if (f) {
        const Complex lhs{f->phi[static_cast<size_t>(n + 1)],
                          -f->log_rate[static_cast<size_t>(n)]};
        const double rhs = std::pow(detuning_scale, n + 1 - k) * std::pow(f->omega[0], k);
        r = safe_ratio(std::abs(lhs), rhs);
      }
      series.push_back(r);
      worst = std::max(worst, r);
    }
    report.pointwise_max.push_back(worst);
    const bool in_window = f.has_value() ? f->omega[0] >= floor : floor <= 0.0;
    report.in_window.push_back(in_window);
    if (in_window) report.margin = std::max(report.margin, worst);
  }
  return report;
}

std::vector<double> standard_condition(const field::PulseSpec& pulse,
                                       const dressed::SystemParams& sys,
                                       std::span<const double> grid) {
  const double denom = std::abs(Complex{pulse.detuning, 0.0} - kI * dressed::damping(sys));
  std::vector<double> out;
  out.reserve(grid.size());
  for (double t : grid) {
    const auto f = try_sample(pulse, t);
    out.push_back(f ? safe_ratio(f->log_rate[0], denom) : kInf);
  }
  return out;
}

std::vector<double> born_fock_condition(const field::PulseSpec& pulse,
                                        std::span<const double> grid) {
  std::vector<double> out;
  out.reserve(grid.size());
  for (double t : grid) {
    const auto f = try_sample(pulse, t);
    out.push_back(f ? safe_ratio(f->omega[1], f->omega[0] * f->omega[0]) : kInf);
  }
  return out;
}

}  // namespace nads::adiabaticity
