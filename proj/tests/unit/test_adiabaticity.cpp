#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "nads/adiabaticity.hpp"

using namespace nads;
using field::Envelope;
using field::PulseSpec;

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> g(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<size_t>(i)] = a + (b - a) * i / (n - 1);
  return g;
}

double window_max(const std::vector<double>& v, const std::vector<bool>& mask) {
  double m = 0.0;
  for (size_t i = 0; i < v.size(); ++i)
    if (mask[i]) m = std::max(m, v[i]);
  return m;
}

}  // namespace

TEST_CASE("safe ratio conventions") {
  CHECK(adiabaticity::safe_ratio(0.0, 0.0) == 0.0);
  CHECK(std::isinf(adiabaticity::safe_ratio(1e-300, 0.0)));
  CHECK(adiabaticity::safe_ratio(-3.0, 2.0) == 1.5);
}

TEST_CASE("an unchirped constant field is trivially adiabatic") {
  PulseSpec p;
  p.omega_peak = 2.0;
  p.detuning = 1.0;
  const auto r = adiabaticity::evaluate(p, {}, linspace(0.0, 10.0, 21));
  CHECK(r.margin == 0.0);
  CHECK(r.ratios.size() == 11);  // k <= min(n + 1, 2) for n = 0..3
  for (const auto& [nk, series] : r.ratios)
    for (double v : series) CHECK(v == 0.0);
}

TEST_CASE("linear chirp under a constant envelope") {
  PulseSpec p;
  p.omega_peak = 0.5;
  p.detuning = 2.0;
  p.phase = field::PhaseLaw::linear_chirp;
  p.chirp_rate = 0.01;
  p.t0 = 1.0;
  const auto grid = linspace(0.0, 6.0, 7);
  const auto r = adiabaticity::evaluate(p, {}, grid);
  for (size_t i = 0; i < grid.size(); ++i) {
    const double slope = std::abs(0.01 * (grid[i] - 1.0));
    CHECK(r.ratios.at({0, 0})[i] == doctest::Approx(slope / 2.0));
    CHECK(r.ratios.at({0, 1})[i] == doctest::Approx(slope / 0.5));
    CHECK(r.ratios.at({1, 0})[i] == doctest::Approx(0.01 / 4.0));
    CHECK(r.ratios.at({1, 1})[i] == doctest::Approx(0.01 / 1.0));
    CHECK(r.ratios.at({1, 2})[i] == doctest::Approx(0.01 / 0.25));
    CHECK(r.ratios.at({2, 0})[i] == 0.0);
  }
  CHECK(r.margin == doctest::Approx(0.05 / 0.5));
}

TEST_CASE("damping enters the detuning scale as |dw - i gamma / 2|") {
  PulseSpec p;
  p.envelope = Envelope::sech;
  p.omega_peak = 0.2;
  p.tau = 10.0;
  p.detuning = 0.3;
  dressed::SystemParams sys;
  sys.gamma_broadening = 0.8;
  const std::vector<double> grid{3.0};
  const auto f = field::sample(p, 3.0);
  const auto r = adiabaticity::evaluate(p, sys, grid);
  CHECK(r.ratios.at({0, 0})[0] == doctest::Approx(std::abs(f.log_rate[0]) / 0.5));
  const auto standard = adiabaticity::standard_condition(p, sys, grid);
  CHECK(standard[0] == doctest::Approx(std::abs(f.log_rate[0]) / std::hypot(0.3, 0.8)));
}

TEST_CASE("gaussian with tau dw = 100 and Omega_peak = dw / 10") {
  PulseSpec p;
  p.envelope = Envelope::gaussian;
  p.omega_peak = 0.1;
  p.tau = 100.0;
  p.detuning = 1.0;
  adiabaticity::Options opt;
  opt.margin_fraction = 0.5;
  const auto r = adiabaticity::evaluate(p, {}, linspace(-300.0, 300.0, 2001), opt);
  // Standard-type (k = 0) ratios are small over the dressing window.
  for (int n = 0; n <= 3; ++n)
    CHECK(window_max(r.ratios.at({n, 0}), r.in_window) < 0.02);
  // k = 1 at the half-maximum edge: |L| / Omega = 2 sqrt(ln 2) / (tau * Omega_peak / 2),
  // approached from inside on a discrete grid.
  const double edge = 4.0 * std::sqrt(std::log(2.0)) / 10.0;
  CHECK(r.margin <= edge);
  CHECK(r.margin == doctest::Approx(edge).epsilon(1e-2));
  // Standard and Born-Fock conditions are the (0,0) and (0,1) members here.
  for (size_t i = 0; i < r.grid.size(); ++i) {
    CHECK(r.standard_ratio[i] == doctest::Approx(r.ratios.at({0, 0})[i]));
    CHECK(r.born_fock_ratio[i] == doctest::Approx(r.ratios.at({0, 1})[i]));
  }
}

TEST_CASE("margin shrinks as the pulse lengthens") {
  double previous = std::numeric_limits<double>::infinity();
  for (double tau : {50.0, 100.0, 200.0, 400.0}) {
    PulseSpec p;
    p.envelope = Envelope::gaussian;
    p.omega_peak = 0.2;
    p.tau = tau;
    p.detuning = 1.0;
    adiabaticity::Options opt;
    opt.margin_fraction = 0.5;
    const auto r = adiabaticity::evaluate(p, {}, linspace(-3 * tau, 3 * tau, 4001), opt);
    CHECK(r.margin < previous);
    previous = r.margin;
  }
}

TEST_CASE("envelope underflow is flagged, not thrown") {
  PulseSpec p;
  p.envelope = Envelope::gaussian;
  p.omega_peak = 1.0;
  p.tau = 1.0;
  p.detuning = 1.0;
  const auto r = adiabaticity::evaluate(p, {}, std::vector<double>{0.0, 10.0});
  CHECK(!r.underflow[0]);
  CHECK(r.underflow[1]);
  CHECK(std::isinf(r.pointwise_max[1]));
  CHECK(std::isinf(r.born_fock_ratio[1]));
  // With margin_fraction 0 every point counts; an infinite ratio then dominates.
  CHECK(std::isinf(r.margin));
}

TEST_CASE("option validation") {
  PulseSpec p;
  adiabaticity::Options opt;
  opt.n_max = 4;
  CHECK_THROWS_AS(adiabaticity::evaluate(p, {}, std::vector<double>{0.0}, opt),
                  ValidationError);
  opt.n_max = 1;
  opt.k_max = 0;
  const auto r = adiabaticity::evaluate(p, {}, std::vector<double>{0.0}, opt);
  CHECK(r.ratios.size() == 2);
}
