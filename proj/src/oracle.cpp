#include "nads/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace nads::oracle {
namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output coefficients (Hairer, Norsett & Wanner).
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

double norm2(const Amplitudes& a) { return a.squaredNorm(); }

// 5-point central stencils.
template <class T>
T first_derivative(const std::array<T, 5>& v, double h) {
  return (-v[4] + 8.0 * v[3] - 8.0 * v[1] + v[0]) / (12.0 * h);
}
template <class T>
T second_derivative(const std::array<T, 5>& v, double h) {
  return (-v[4] + 16.0 * v[3] - 30.0 * v[2] + 16.0 * v[1] - v[0]) / (12.0 * h * h);
}

// A tenth of the smaller neighbouring grid spacing.
double stencil_step(std::span<const double> grid, size_t i, const field::PulseSpec& pulse) {
  double h = std::numeric_limits<double>::infinity();
  if (i > 0) h = std::min(h, grid[i] - grid[i - 1]);
  if (i + 1 < grid.size()) h = std::min(h, grid[i + 1] - grid[i]);
  if (!std::isfinite(h)) h = field::is_pulsed(pulse) ? pulse.tau : 1.0;
  return 0.1 * h;
}

void check_grid(std::span<const double> grid) {
  if (grid.empty()) throw ValidationError("integration grid is empty");
  for (size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw ValidationError("integration grid must be strictly increasing");
}

OracleTrajectory integrate_rk4(const field::PulseSpec& pulse,
                               const dressed::SystemParams& sys, const Amplitudes& init,
                               std::span<const double> grid, int substeps) {
  OracleTrajectory out;
  Amplitudes y = init;
  out.amplitudes.push_back(y);
  out.norm.push_back(norm2(y));
  for (size_t i = 1; i < grid.size(); ++i) {
    const double h = (grid[i] - grid[i - 1]) / substeps;
    for (int k = 0; k < substeps; ++k) {
      const double t = grid[i - 1] + k * h;
      const Amplitudes k1 = rwa_rhs(pulse, sys, t, y);
      const Amplitudes k2 = rwa_rhs(pulse, sys, t + 0.5 * h, y + 0.5 * h * k1);
      const Amplitudes k3 = rwa_rhs(pulse, sys, t + 0.5 * h, y + 0.5 * h * k2);
      const Amplitudes k4 = rwa_rhs(pulse, sys, t + h, y + h * k3);
      y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      out.step_norm.push_back(norm2(y));
      ++out.accepted;
    }
    out.amplitudes.push_back(y);
    out.norm.push_back(norm2(y));
  }
  return out;
}

OracleTrajectory integrate_dopri5(const field::PulseSpec& pulse,
                                  const dressed::SystemParams& sys,
                                  const Amplitudes& init, std::span<const double> grid,
                                  double rtol, double atol) {
  OracleTrajectory out;
  out.amplitudes.push_back(init);
  out.norm.push_back(norm2(init));
  if (grid.size() == 1) return out;

  const double t_end = grid.back();
  double h_max = t_end - grid.front();
  if (field::is_pulsed(pulse)) h_max = std::min(h_max, 0.1 * pulse.tau);
  const double rate = std::abs(pulse.detuning) + pulse.omega_peak +
                      std::abs(dressed::damping(sys)) + std::abs(pulse.chirp_rate);
  double h = std::min(h_max, rate > 0.0 ? 1e-3 / rate : h_max);

  auto error_norm = [&](const Amplitudes& y0, const Amplitudes& y1, const Amplitudes& err) {
    double acc = 0.0;
    for (int j = 0; j < 2; ++j) {
      const double sc = atol + rtol * std::max(std::abs(y0(j)), std::abs(y1(j)));
      acc += std::norm(err(j)) / (sc * sc);
    }
    return std::sqrt(0.5 * acc);
  };

  double t = grid.front();
  Amplitudes y = init;
  Amplitudes k1 = rwa_rhs(pulse, sys, t, y);
  size_t next = 1;
  bool last_rejected = false;
  while (next < grid.size()) {
    const double min_step = 16.0 * std::numeric_limits<double>::epsilon() *
                            std::max(std::abs(t), 1.0);
    if (h < min_step) throw StepSizeUnderflow(t, h);
    const bool final_step = h >= t_end - t;
    if (final_step) h = t_end - t;

    const Amplitudes k2 = rwa_rhs(pulse, sys, t + c2 * h, y + h * a21 * k1);
    const Amplitudes k3 = rwa_rhs(pulse, sys, t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const Amplitudes k4 =
        rwa_rhs(pulse, sys, t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Amplitudes k5 = rwa_rhs(pulse, sys, t + c5 * h,
                                  y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Amplitudes k6 = rwa_rhs(
        pulse, sys, t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const Amplitudes y1 =
        y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const Amplitudes k7 = rwa_rhs(pulse, sys, t + h, y1);
    const Amplitudes err =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const double en = error_norm(y, y1, err);
    if (!std::isfinite(en)) throw StepSizeUnderflow(t, h);
    if (en > 1.0) {
      ++out.rejected;
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
      last_rejected = true;
      continue;
    }

    const double t1 = final_step ? t_end : t + h;
    // Dense output on [t, t1] for every grid point it covers.
    while (next < grid.size() && grid[next] <= t1) {
      Amplitudes value = y1;
      if (grid[next] < t1) {
        const double s = (grid[next] - t) / h;
        const Amplitudes r2 = y1 - y;
        const Amplitudes r3 = h * k1 - r2;
        const Amplitudes r4 = r2 - h * k7 - r3;
        const Amplitudes r5 =
            h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        value = y + s * (r2 + (1.0 - s) * (r3 + s * (r4 + (1.0 - s) * r5)));
      }
      out.amplitudes.push_back(value);
      out.norm.push_back(norm2(value));
      ++next;
    }

    ++out.accepted;
    t = t1;
    y = y1;
    k1 = k7;
    out.step_norm.push_back(norm2(y));

    double factor = en > 0.0 ? 0.9 * std::pow(en, -0.2) : 5.0;
    factor = std::clamp(factor, 0.2, 5.0);
    if (last_rejected) factor = std::min(factor, 1.0);
    last_rejected = false;
    h = std::min(h * factor, h_max);
  }
  return out;
}

}  // namespace

Amplitudes rwa_rhs(const field::PulseSpec& pulse, const dressed::SystemParams& sys,
                   double t, const Amplitudes& a) {
  const double omega = field::envelope(pulse, t);
  const double delta_phase = pulse.detuning * t - field::phase(pulse, t);
  const Complex rotation = std::polar(1.0, delta_phase);
  Amplitudes d;
  d(0) = 0.5 * kI * omega * std::conj(rotation) * a(1);
  d(1) = -0.5 * dressed::damping(sys) * a(1) + 0.5 * kI * omega * rotation * a(0);
  return d;
}

OracleTrajectory integrate_rwa(const field::PulseSpec& pulse,
                               const dressed::SystemParams& sys, const Amplitudes& init,
                               std::span<const double> grid,
                               const IntegratorOptions& options) {
  check_grid(grid);
  if (!(options.rel_tol > 0.0 && options.rel_tol <= 1e-3) ||
      !(options.abs_tol > 0.0 && options.abs_tol <= 1e-3))
    throw ValidationError("integrator tolerances must lie in (0, 1e-3]");
  OracleTrajectory out =
      options.method == Method::rk4
          ? integrate_rk4(pulse, sys, init, grid, std::max(1, options.rk4_substeps))
          : integrate_dopri5(pulse, sys, init, grid, options.rel_tol, options.abs_tol);
  out.grid.assign(grid.begin(), grid.end());
  out.rel_tol = options.rel_tol;
  out.abs_tol = options.abs_tol;
  out.method = options.method;
  return out;
}

Complex to_normal_form(Complex a1, const dressed::InstantSnapshot& start,
                       const dressed::InstantSnapshot& s, const dressed::SystemParams& sys) {
  return a1 * std::exp(0.5 * kI * dressed::detuning_integral(start, s, sys));
}

Complex from_normal_form(Complex f, const dressed::InstantSnapshot& start,
                         const dressed::InstantSnapshot& s,
                         const dressed::SystemParams& sys) {
  return f * std::exp(-0.5 * kI * dressed::detuning_integral(start, s, sys));
}

std::vector<double> residual_normal_form(const field::PulseSpec& pulse,
                                         const dressed::SystemParams& sys,
                                         const dressed::AmplitudeSolution& solution) {
  constexpr double kFloor = 1e-300;
  const auto& start = solution.snapshots.front();
  std::vector<double> out;
  out.reserve(solution.grid.size());
  for (size_t i = 0; i < solution.grid.size(); ++i) {
    const double h = stencil_step(solution.grid, i, pulse);
    std::array<Complex, 5> f;
    for (int m = -2; m <= 2; ++m) {
      const auto e = dressed::evaluate_at(solution, pulse, sys, i, solution.grid[i] + m * h);
      f[static_cast<size_t>(m + 2)] = to_normal_form(e.amplitudes(0), start, e.snapshot, sys);
    }
    const Complex rabi = solution.snapshots[i].rabi;
    const Complex potential = 0.25 * rabi * rabi * f[2];
    out.push_back(std::abs(second_derivative(f, h) + potential) /
                  (std::abs(potential) + kFloor));
  }
  return out;
}

std::vector<double> neglected_term_ratio(const field::PulseSpec& pulse,
                                         const dressed::SystemParams& sys,
                                         std::span<const double> grid) {
  check_grid(grid);
  std::vector<double> out;
  out.reserve(grid.size());
  dressed::InstantSnapshot prev;
  for (size_t i = 0; i < grid.size(); ++i) {
    const double h = stencil_step(grid, i, pulse);
    const auto centre = dressed::snapshot(pulse, sys, grid[i], i > 0 ? &prev : nullptr);
    std::array<Complex, 5> rate;
    rate[2] = centre.rabi_rate;
    for (int side : {-1, 1}) {
      const auto inner = dressed::snapshot(pulse, sys, grid[i] + side * h, &centre);
      const auto outer = dressed::snapshot(pulse, sys, grid[i] + 2 * side * h, &inner);
      rate[static_cast<size_t>(2 + side)] = inner.rabi_rate;
      rate[static_cast<size_t>(2 + 2 * side)] = outer.rabi_rate;
    }
    const Complex r = centre.rabi;
    const Complex r1 = centre.rabi_rate;
    const Complex r2 = first_derivative(rate, h);
    const Complex t_ratio = 0.75 * (r1 / r) * (r1 / r) - 0.5 * r2 / r;
    out.push_back(std::abs(t_ratio) / std::abs(0.25 * r * r));
    prev = centre;
  }
  return out;
}

ComparisonReport compare(const dressed::AmplitudeSolution& analytic,
                         const OracleTrajectory& numeric, double margin) {
  if (analytic.grid != numeric.grid)
    throw GridMismatch("analytic and oracle trajectories are on different grids");
  ComparisonReport r;
  r.margin = margin;
  const size_t n = analytic.grid.size();
  if (n == 0) return r;
  double sum1 = 0.0, sum2 = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const auto& a = analytic.amplitudes[i];
    const auto& o = numeric.amplitudes[i];
    const double err1 = std::abs(a(0) - o(0));
    const double err2 = std::abs(a(1) - o(1));
    r.max_error_a1 = std::max(r.max_error_a1, err1);
    r.max_error_a2 = std::max(r.max_error_a2, err2);
    sum1 += err1 * err1;
    sum2 += err2 * err2;
    const double pop = std::max(std::abs(std::norm(a(0)) - std::norm(o(0))),
                                std::abs(std::norm(a(1)) - std::norm(o(1))));
    r.max_population_error = std::max(r.max_population_error, pop);
  }
  r.rms_error_a1 = std::sqrt(sum1 / static_cast<double>(n));
  r.rms_error_a2 = std::sqrt(sum2 / static_cast<double>(n));
  const Complex fa = analytic.amplitudes.back()(0);
  const Complex fo = numeric.amplitudes.back()(0);
  if (std::abs(fa) > 0.0 && std::abs(fo) > 0.0) r.final_phase_error_a1 = std::arg(fa * std::conj(fo));
  return r;
}

}  // namespace nads::oracle
