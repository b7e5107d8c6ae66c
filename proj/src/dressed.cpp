#include "nads/dressed.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nads::dressed {
namespace {

constexpr double kAmbiguityTol = 1e-8;
constexpr double kDegenerateTol = 1e-12;

// Panel integral of Lambda_{1,2} over [a.t, b.t] with midpoint m.
std::pair<Complex, Complex> simpson(const InstantSnapshot& a, const InstantSnapshot& m,
                                    const InstantSnapshot& b) {
  const double w = (b.t - a.t) / 6.0;
  return {w * (a.lambda1 + 4.0 * m.lambda1 + b.lambda1),
          w * (a.lambda2 + 4.0 * m.lambda2 + b.lambda2)};
}

}  // namespace

void validate(const SystemParams& sys) {
  if (!std::isfinite(sys.omega1) || !std::isfinite(sys.omega2) ||
      !std::isfinite(sys.gamma_broadening) || !std::isfinite(sys.gamma_shift))
    throw ValidationError("system parameters must be finite");
  if (!(sys.omega2 > sys.omega1))
    throw ValidationError("system.omega2 must exceed system.omega1");
  if (sys.gamma_broadening < 0.0)
    throw ValidationError("system.gamma_broadening must be >= 0");
}

Branch continue_sqrt(Complex z, std::optional<Complex> prev) {
  Complex root = std::sqrt(z);  // principal: Re >= 0
  if (!prev) {
    if (root.real() == 0.0 && root.imag() < 0.0) root = -root;
    return {root, false};
  }
  const double d_same = std::abs(root - *prev);
  const double d_flip = std::abs(-root - *prev);
  const double scale = std::abs(root) + std::abs(*prev);
  if (scale > 0.0 && std::abs(d_same - d_flip) <= kAmbiguityTol * scale)
    return {root, true};
  return {d_same <= d_flip ? root : -root, false};
}

Complex instantaneous_detuning(const field::FieldSample& f, double detuning,
                               const SystemParams& sys) {
  return {detuning - f.phi[1] - 0.5 * sys.gamma_shift,
          -(0.5 * sys.gamma_broadening - f.log_rate[0])};
}

std::pair<Complex, Complex> detuning_rates(const field::FieldSample& f) {
  return {Complex{-f.phi[2], f.log_rate[1]}, Complex{-f.phi[3], f.log_rate[2]}};
}

Branch instantaneous_rabi(Complex detuning, Complex detuning_rate, double omega,
                          std::optional<Complex> prev) {
  const Complex squared = omega * omega + detuning * detuning - 2.0 * kI * detuning_rate;
  return continue_sqrt(squared, prev);
}

Complex rabi_rate(Complex rabi, double omega, double omega_rate, Complex detuning,
                  Complex detuning_rate, Complex detuning_accel) {
  return (omega * omega_rate + detuning * detuning_rate - kI * detuning_accel) / rabi;
}

Lambdas lambdas(Complex detuning, Complex rabi, Complex rabi_rate) {
  const double scale = std::max({1.0, std::abs(detuning), std::abs(rabi_rate)});
  if (!(std::abs(rabi) > kDegenerateTol * scale))
    throw DegenerateRabi("off-resonance Rabi frequency vanishes (|R| = " +
                         std::to_string(std::abs(rabi)) + "); closed form undefined");
  Lambdas out;
  out.l1 = 0.5 * (detuning + rabi);
  out.l2 = 0.5 * (detuning - rabi);
  const Complex correction = kI * rabi_rate / (2.0 * rabi);
  out.l1_corrected = out.l1 - correction;
  out.l2_corrected = out.l2 - correction;
  return out;
}

Mixing mixing_amplitudes(Complex l1_corrected, Complex l2_corrected, Complex rabi,
                         std::optional<std::pair<Complex, Complex>> prev) {
  if (!(std::abs(rabi) > 0.0))
    throw DegenerateRabi("mixing amplitudes undefined at R = 0");
  const auto c = continue_sqrt(l1_corrected / rabi,
                               prev ? std::optional<Complex>(prev->first) : std::nullopt);
  const auto s = continue_sqrt(-l2_corrected / rabi,
                               prev ? std::optional<Complex>(prev->second) : std::nullopt);
  return {c.value, s.value, c.ambiguous || s.ambiguous};
}

DressedFrequencies dressed_frequencies(const SystemParams& sys, Complex lambda2,
                                       const field::FieldSample& f) {
  DressedFrequencies out;
  out.ground = sys.omega1 + lambda2;
  out.excited = sys.omega2 - lambda2;
  out.excited_inst = out.excited - f.phi[1] - 0.5 * sys.gamma_shift -
                     kI * (0.5 * sys.gamma_broadening - f.log_rate[0]);
  return out;
}

InstantSnapshot snapshot(const field::PulseSpec& pulse, const SystemParams& sys,
                         double t, const InstantSnapshot* prev) {
  const auto f = field::sample(pulse, t);
  InstantSnapshot s;
  s.t = t;
  s.omega = f.omega[0];
  if (!(s.omega > 0.0)) throw EnvelopeUnderflow(t, s.omega, 0.0);
  s.bare_detuning = pulse.detuning;
  s.optical_phase = f.phi[0];
  s.delta_phase = pulse.detuning * t - f.phi[0];

  s.detuning = instantaneous_detuning(f, pulse.detuning, sys);
  std::tie(s.detuning_rate, s.detuning_accel) = detuning_rates(f);

  const auto rabi = instantaneous_rabi(s.detuning, s.detuning_rate, s.omega,
                                       prev ? std::optional(prev->rabi) : std::nullopt);
  s.rabi = rabi.value;
  s.rabi_rate = rabi_rate(s.rabi, s.omega, f.omega[1], s.detuning, s.detuning_rate,
                          s.detuning_accel);
  const auto root = continue_sqrt(s.rabi, prev ? std::optional(prev->rabi_sqrt)
                                               : std::nullopt);
  s.rabi_sqrt = root.value;

  const auto l = lambdas(s.detuning, s.rabi, s.rabi_rate);
  s.lambda1 = l.l1;
  s.lambda2 = l.l2;
  s.lambda1_corrected = l.l1_corrected;
  s.lambda2_corrected = l.l2_corrected;

  const auto mix = mixing_amplitudes(
      l.l1_corrected, l.l2_corrected, s.rabi,
      prev ? std::optional(std::pair{prev->cos_half, prev->sin_half}) : std::nullopt);
  s.cos_half = mix.cos_half;
  s.sin_half = mix.sin_half;

  const auto freq = dressed_frequencies(sys, s.lambda2, f);
  s.omega_g = freq.ground;
  s.omega_e = freq.excited;
  s.omega_e_inst = freq.excited_inst;

  s.ambiguities = int(rabi.ambiguous) + int(root.ambiguous) + int(mix.ambiguous);
  return s;
}

std::pair<Complex, Complex> solve_constants(const InstantSnapshot& start,
                                            const Amplitudes& init) {
  if (!(std::abs(start.rabi) > 0.0))
    throw DegenerateRabi("singular constant system: R(0) = 0");
  const Complex prefactor = std::sqrt(2.0) / start.rabi_sqrt;
  Eigen::Vector2cd rhs;
  rhs << init(0) / prefactor,
      -init(1) * start.omega * std::exp(-kI * start.delta_phase) / (2.0 * prefactor);
  Eigen::Matrix2cd system;
  system << 1.0, 1.0, start.lambda1_corrected, start.lambda2_corrected;
  const Eigen::Vector2cd c = system.fullPivLu().solve(rhs);
  return {c(0), c(1)};
}

std::pair<Complex, Complex> solve_constants(const field::PulseSpec& pulse,
                                            const SystemParams& sys, double t_start,
                                            const Amplitudes& init) {
  return solve_constants(snapshot(pulse, sys, t_start), init);
}

Amplitudes evaluate_amplitudes(Complex c1, Complex c2, const InstantSnapshot& s,
                               Complex phase1, Complex phase2) {
  const Complex prefactor = std::sqrt(2.0) / s.rabi_sqrt;
  const Complex e1 = c1 * std::exp(-kI * phase1);
  const Complex e2 = c2 * std::exp(-kI * phase2);
  Amplitudes a;
  a(0) = prefactor * (e1 + e2);
  a(1) = -(2.0 / s.omega) * prefactor *
         (s.lambda1_corrected * e1 + s.lambda2_corrected * e2) *
         std::exp(kI * s.delta_phase);
  return a;
}

Complex detuning_integral(const InstantSnapshot& start, const InstantSnapshot& s,
                          const SystemParams& sys) {
  const Complex rate{start.bare_detuning - 0.5 * sys.gamma_shift,
                     -0.5 * sys.gamma_broadening};
  return rate * (s.t - start.t) - (s.optical_phase - start.optical_phase) +
         kI * std::log(s.omega / start.omega);
}

AmplitudeSolution analytic_trajectory(const field::PulseSpec& pulse,
                                      const SystemParams& sys,
                                      std::span<const double> grid,
                                      const Amplitudes& init,
                                      const TrajectoryOptions& options) {
  if (grid.empty()) throw ValidationError("analytic trajectory needs a non-empty grid");
  for (size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw ValidationError("grid must be strictly increasing (index " +
                            std::to_string(i) + ")");
  const int refinement = std::max(1, options.refinement);

  AmplitudeSolution sol;
  sol.grid.assign(grid.begin(), grid.end());
  sol.snapshots.reserve(grid.size());
  sol.phase1.reserve(grid.size());
  sol.phase2.reserve(grid.size());

  size_t index = 0;
  try {
    sol.snapshots.push_back(snapshot(pulse, sys, grid[0]));
    std::tie(sol.c1, sol.c2) = solve_constants(sol.snapshots.front(), init);
    sol.phase1.push_back(0.0);
    sol.phase2.push_back(0.0);

    for (index = 1; index < grid.size(); ++index) {
      InstantSnapshot left = sol.snapshots.back();
      Complex p1 = sol.phase1.back(), p2 = sol.phase2.back();
      int ambiguities = 0;
      const double a = grid[index - 1], b = grid[index];
      for (int k = 0; k < refinement; ++k) {
        const double ta = a + (b - a) * k / refinement;
        const double tb = k + 1 == refinement ? b : a + (b - a) * (k + 1) / refinement;
        const auto mid = snapshot(pulse, sys, 0.5 * (ta + tb), &left);
        auto right = snapshot(pulse, sys, tb, &mid);
        const auto [d1, d2] = simpson(left, mid, right);
        p1 += d1;
        p2 += d2;
        ambiguities += mid.ambiguities + right.ambiguities;
        left = right;
      }
      if (ambiguities > 0) sol.warnings.push_back({index, b});
      sol.snapshots.push_back(left);
      sol.phase1.push_back(p1);
      sol.phase2.push_back(p2);
    }
  } catch (Error& e) {
    e.add_context("grid index " + std::to_string(index));
    throw;
  }
  if (sol.snapshots.front().ambiguities > 0) sol.warnings.insert(sol.warnings.begin(), {0, grid[0]});

  sol.amplitudes.reserve(grid.size());
  for (size_t i = 0; i < grid.size(); ++i)
    sol.amplitudes.push_back(
        evaluate_amplitudes(sol.c1, sol.c2, sol.snapshots[i], sol.phase1[i], sol.phase2[i]));
  return sol;
}

PointEvaluation evaluate_at(const AmplitudeSolution& solution,
                            const field::PulseSpec& pulse, const SystemParams& sys,
                            size_t index, double t) {
  const auto& anchor = solution.snapshots.at(index);
  if (t == anchor.t) return {solution.amplitudes.at(index), anchor};
  const auto mid = snapshot(pulse, sys, 0.5 * (anchor.t + t), &anchor);
  auto end = snapshot(pulse, sys, t, &mid);
  const auto [d1, d2] = simpson(anchor, mid, end);
  return {evaluate_amplitudes(solution.c1, solution.c2, end, solution.phase1[index] + d1,
                              solution.phase2[index] + d2),
          end};
}

DressedStateComponents dressed_components(const AmplitudeSolution& solution,
                                          const SystemParams& sys, double carrier) {
  if (solution.grid.empty()) throw ValidationError("dressed components need a non-empty grid");
  DressedStateComponents out;
  out.carrier = carrier;
  out.grid = solution.grid;
  const auto& start = solution.snapshots.front();
  const size_t n = solution.grid.size();
  out.phases.reserve(n);
  out.weight_cos.reserve(n);
  out.weight_sin.reserve(n);
  out.optical_phase.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    const auto& s = solution.snapshots[i];
    const double elapsed = s.t - start.t;
    const double phi = s.optical_phase;
    // omega_G = omega1 + Lambda_2;  omega~'_E = omega2 - dw - Lambda_2 + D.
    const Complex ground = sys.omega1 * elapsed + solution.phase2[i];
    const Complex excited = (sys.omega2 - s.bare_detuning) * elapsed -
                            solution.phase2[i] + detuning_integral(start, s, sys);
    ComponentPhases p;
    p.ground_real = ground;
    p.ground_virtual = ground + carrier * elapsed + phi;
    p.excited_real = excited + phi;
    p.excited_virtual = excited - carrier * elapsed;
    out.phases.push_back(p);
    out.weight_cos.push_back(std::norm(s.cos_half));
    out.weight_sin.push_back(std::norm(s.sin_half));
    out.optical_phase.push_back(phi);
  }
  return out;
}

std::pair<double, double> adiabatic_mixing(double omega, double detuning) {
  const double r = std::hypot(omega, detuning);
  if (r == 0.0) return {1.0, 0.0};
  // Pick the cancellation-free half-angle formula, then the other from
  // sin(theta) = Omega / r.
  if (detuning >= 0.0) {
    const double c = std::sqrt((r + detuning) / (2.0 * r));
    return {c, omega / (2.0 * r * c)};
  }
  const double s = std::sqrt((r - detuning) / (2.0 * r));
  return {omega / (2.0 * r * s), s};
}

DressedPopulations project_onto_dressed_basis(const Amplitudes& a,
                                              const InstantSnapshot& s) {
  const auto [c, sn] = adiabatic_mixing(s.omega, s.bare_detuning);
  const Complex rotated = a(1) * std::exp(-kI * s.delta_phase);
  return {std::norm(c * a(0) + sn * rotated), std::norm(-sn * a(0) + c * rotated)};
}

}  // namespace nads::dressed
