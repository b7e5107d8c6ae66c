#include "nads/field.hpp"

#include <algorithm>
#include <cmath>

namespace nads::field {
namespace {

// Overflow-free sech(x).
double sech(double x) {
  const double e = std::exp(-std::abs(x));
  return 2.0 * e / (1.0 + e * e);
}

// Logistic 1 / (1 + exp(-y)) without overflow.
double logistic(double y) {
  if (y >= 0.0) return 1.0 / (1.0 + std::exp(-y));
  const double e = std::exp(y);
  return e / (1.0 + e);
}

std::vector<double> effective_coefficients(const PulseSpec& p) {
  switch (p.phase) {
    case PhaseLaw::none:
      return {};
    case PhaseLaw::linear_chirp:
      return {0.0, 0.0, 0.5 * p.chirp_rate};
    case PhaseLaw::polynomial:
      return p.phase_coefficients;
  }
  return {};
}

// d^n/ds^n of sum_k c_k s^k.
double polynomial_derivative(const std::vector<double>& c, double s, int n) {
  double acc = 0.0;
  for (int k = static_cast<int>(c.size()) - 1; k >= n; --k) {
    double falling = 1.0;
    for (int j = 0; j < n; ++j) falling *= static_cast<double>(k - j);
    acc = acc * s + c[static_cast<size_t>(k)] * falling;
  }
  return acc;
}

// L and its first three derivatives for the pulsed families.
std::array<double, 4> log_rate(const PulseSpec& p, double t) {
  const double tau = p.tau;
  const double x = (t - p.t0) / tau;
  switch (p.envelope) {
    case Envelope::constant:
      return {0.0, 0.0, 0.0, 0.0};
    case Envelope::gaussian:
      return {-2.0 * x / tau, -2.0 / (tau * tau), 0.0, 0.0};
    case Envelope::sech:
    case Envelope::turn_on: {
      const double th = std::tanh(x);
      const double se = sech(x);
      const double se2 = se * se;
      const double l0 = p.envelope == Envelope::sech
                            ? -th / tau
                            : 2.0 * logistic(-2.0 * x) / tau;
      return {l0, -se2 / (tau * tau), 2.0 * se2 * th / (tau * tau * tau),
              2.0 * (se2 * se2 - 2.0 * se2 * th * th) / (tau * tau * tau * tau)};
    }
  }
  return {};
}

}  // namespace

std::string_view to_string(Envelope e) {
  switch (e) {
    case Envelope::constant: return "constant";
    case Envelope::gaussian: return "gaussian";
    case Envelope::sech: return "sech";
    case Envelope::turn_on: return "turn-on";
  }
  return "?";
}

std::string_view to_string(PhaseLaw p) {
  switch (p) {
    case PhaseLaw::none: return "none";
    case PhaseLaw::linear_chirp: return "linear-chirp";
    case PhaseLaw::polynomial: return "polynomial";
  }
  return "?";
}

Envelope envelope_from_string(std::string_view name) {
  for (auto e : {Envelope::constant, Envelope::gaussian, Envelope::sech,
                 Envelope::turn_on})
    if (to_string(e) == name) return e;
  throw ValidationError("unknown envelope family '" + std::string(name) +
                        "' (expected constant, gaussian, sech or turn-on)");
}

PhaseLaw phase_law_from_string(std::string_view name) {
  for (auto p : {PhaseLaw::none, PhaseLaw::linear_chirp, PhaseLaw::polynomial})
    if (to_string(p) == name) return p;
  throw ValidationError("unknown phase law '" + std::string(name) +
                        "' (expected none, linear-chirp or polynomial)");
}

void validate(const PulseSpec& p) {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!finite(p.omega_peak) || p.omega_peak < 0.0)
    throw ValidationError("pulse.omega_peak must be finite and >= 0");
  if (is_pulsed(p) && !(finite(p.tau) && p.tau > 0.0))
    throw ValidationError("pulse.tau must be > 0 for pulsed envelopes");
  if (!finite(p.t0) || !finite(p.detuning) || !finite(p.chirp_rate))
    throw ValidationError("pulse parameters must be finite");
  if (!(p.envelope_floor >= 0.0 && p.envelope_floor < 1.0))
    throw ValidationError("pulse.envelope_floor must lie in [0, 1)");
  for (double c : p.phase_coefficients)
    if (!finite(c)) throw ValidationError("pulse.phase_coefficients must be finite");
}

double envelope(const PulseSpec& p, double t) {
  const double x = (t - p.t0) / p.tau;
  switch (p.envelope) {
    case Envelope::constant: return p.omega_peak;
    case Envelope::gaussian: return p.omega_peak * std::exp(-x * x);
    case Envelope::sech: return p.omega_peak * sech(x);
    case Envelope::turn_on: return p.omega_peak * logistic(2.0 * x);
  }
  return 0.0;
}

double phase(const PulseSpec& p, double t) {
  const double s = t - p.t0;
  switch (p.phase) {
    case PhaseLaw::none: return 0.0;
    case PhaseLaw::linear_chirp: return 0.5 * p.chirp_rate * s * s;
    case PhaseLaw::polynomial: return polynomial_derivative(p.phase_coefficients, s, 0);
  }
  return 0.0;
}

FieldSample sample(const PulseSpec& p, double t) {
  FieldSample out;
  out.t = t;
  const double omega = envelope(p, t);
  if (is_pulsed(p) && omega <= p.envelope_floor * p.omega_peak)
    throw EnvelopeUnderflow(t, omega, p.envelope_floor * p.omega_peak);

  const auto coeffs = effective_coefficients(p);
  for (int n = 0; n <= 4; ++n)
    out.phi[static_cast<size_t>(n)] = polynomial_derivative(coeffs, t - p.t0, n);

  const auto L = log_rate(p, t);
  out.log_rate = L;
  // Omega = exp(g) with g' = L: derivatives are complete Bell polynomials in L.
  const double l0 = L[0], l1 = L[1], l2 = L[2], l3 = L[3];
  out.omega[0] = omega;
  out.omega[1] = omega * l0;
  out.omega[2] = omega * (l0 * l0 + l1);
  out.omega[3] = omega * (l0 * l0 * l0 + 3.0 * l0 * l1 + l2);
  out.omega[4] = omega * (l0 * l0 * l0 * l0 + 6.0 * l0 * l0 * l1 + 4.0 * l0 * l2 +
                          3.0 * l1 * l1 + l3);
  return out;
}

double verify_derivatives(const PulseSpec& pulse, std::span<const double> grid,
                          int order) {
  if (grid.size() < 3) throw ValidationError("verify_derivatives needs >= 3 grid points");
  if (order < 1 || order > 4) throw ValidationError("derivative order must be in 1..4");

  double h = std::numeric_limits<double>::infinity();
  for (size_t i = 1; i < grid.size(); ++i) h = std::min(h, grid[i] - grid[i - 1]);
  if (!(h > 0.0)) throw ValidationError("grid must be strictly increasing");

  // Quantities indexed [family][n]: 0 = Omega, 1 = phi, 2 = L.
  struct Row {
    std::array<std::array<double, 5>, 3> analytic{};
    std::array<std::array<double, 5>, 3> finite_diff{};
  };
  auto value = [](const FieldSample& s, int family, int n) {
    if (family == 0) return s.omega[static_cast<size_t>(n)];
    if (family == 1) return s.phi[static_cast<size_t>(n)];
    return s.log_rate[static_cast<size_t>(n)];
  };
  auto max_order = [order](int family) { return family == 2 ? std::min(order, 3) : order; };

  std::vector<Row> rows;
  std::array<std::array<double, 5>, 3> scale{};
  for (double t : grid) {
    std::array<FieldSample, 5> st;
    try {
      for (int m = -2; m <= 2; ++m) st[static_cast<size_t>(m + 2)] = sample(pulse, t + m * h);
    } catch (const EnvelopeUnderflow&) {
      continue;
    }
    Row row;
    for (int f = 0; f < 3; ++f) {
      for (int n = 1; n <= max_order(f); ++n) {
        const double fd = (-value(st[4], f, n - 1) + 8.0 * value(st[3], f, n - 1) -
                           8.0 * value(st[1], f, n - 1) + value(st[0], f, n - 1)) /
                          (12.0 * h);
        const double an = value(st[2], f, n);
        row.analytic[f][n] = an;
        row.finite_diff[f][n] = fd;
        scale[f][n] = std::max(scale[f][n], std::abs(an));
      }
    }
    rows.push_back(row);
  }

  double worst = 0.0;
  for (const auto& row : rows)
    for (int f = 0; f < 3; ++f)
      for (int n = 1; n <= max_order(f); ++n) {
        const double diff = std::abs(row.finite_diff[f][n] - row.analytic[f][n]);
        worst = std::max(worst, scale[f][n] > 0.0 ? diff / scale[f][n] : diff);
      }
  return worst;
}

Window support_window(const PulseSpec& p, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw ValidationError("support fraction must lie in (0, 1]");
  Window w;
  switch (p.envelope) {
    case Envelope::constant:
      break;
    case Envelope::gaussian: {
      const double half = p.tau * std::sqrt(std::log(1.0 / fraction));
      w = {p.t0 - half, p.t0 + half};
      break;
    }
    case Envelope::sech: {
      const double half = p.tau * std::acosh(1.0 / fraction);
      w = {p.t0 - half, p.t0 + half};
      break;
    }
    case Envelope::turn_on:
      // logistic(2x) reaches 1 only asymptotically.
      if (fraction >= 1.0) return {std::numeric_limits<double>::infinity(),
                                   std::numeric_limits<double>::infinity()};
      w.lo = p.t0 - 0.5 * p.tau * std::log(1.0 / fraction - 1.0);
      break;
  }
  return w;
}

}  // namespace nads::field
