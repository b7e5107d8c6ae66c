#include <doctest.h>

#include <cmath>
#include <vector>

#include "nads/field.hpp"

using namespace nads;
using field::Envelope;
using field::PhaseLaw;
using field::PulseSpec;

namespace {

PulseSpec shaped(Envelope e) {
  PulseSpec p;
  p.envelope = e;
  p.omega_peak = 0.7;
  p.t0 = 0.3;
  p.tau = 1.9;
  return p;
}

std::vector<double> grid_around(const PulseSpec& p, double half_width, double step) {
  std::vector<double> g;
  for (double t = p.t0 - half_width; t <= p.t0 + half_width; t += step) g.push_back(t);
  return g;
}

void check_close(double got, double want, double tol = 1e-13) {
  CHECK(std::abs(got - want) <= tol * std::max(1.0, std::abs(want)));
}

}  // namespace

TEST_CASE("constant envelope has vanishing derivatives") {
  PulseSpec p;
  p.omega_peak = 1.0;
  for (double t : {-3.0, 0.0, 17.5}) {
    const auto s = field::sample(p, t);
    CHECK(s.omega[0] == 1.0);
    for (int n = 1; n <= 4; ++n) {
      CHECK(s.omega[n] == 0.0);
      CHECK(s.phi[n] == 0.0);
    }
    for (double l : s.log_rate) CHECK(l == 0.0);
  }
}

TEST_CASE("gaussian at its centre") {
  auto p = shaped(Envelope::gaussian);
  const auto s = field::sample(p, p.t0);
  CHECK(s.omega[1] == 0.0);
  CHECK(s.log_rate[0] == 0.0);
  check_close(s.log_rate[1], -2.0 / (p.tau * p.tau));
}

TEST_CASE("linear chirp one unit past t0") {
  PulseSpec p;
  p.phase = PhaseLaw::linear_chirp;
  p.chirp_rate = 0.37;
  p.t0 = 2.0;
  const auto s = field::sample(p, 3.0);
  check_close(s.phi[1], 0.37);
  check_close(s.phi[2], 0.37);
  CHECK(s.phi[3] == 0.0);
  check_close(field::phase(p, 3.0), 0.185);
}

TEST_CASE("closed-form derivatives against symbolic values") {
  // Reference values from symbolic differentiation at t = 1.1,
  // peak 0.7, t0 0.3, tau 1.9.
  struct Ref {
    Envelope e;
    std::array<double, 5> omega;
    std::array<double, 4> log_rate;
  };
  const Ref refs[] = {
      {Envelope::gaussian,
       {0.58627854914918842, -0.25984644837637161, -0.20964065952802835,
        0.38083403012474565, 0.17964252325999364},
       {-0.44321329639889195, -0.554016620498615, 0.0, 0.0}},
      {Envelope::sech,
       {0.64222539705966253, -0.134467411793318, -0.12159292808085835,
        0.15087357354101202, 0.057651276931080894},
       {-0.2093772878010709, -0.23316946160237501, 0.097640778936682451,
        0.067848472702789861}},
      {Envelope::turn_on,
       {0.48923589638771214, 0.15505769196557936, -0.064931117992893833,
        -0.045119234347355257, 0.10973360877248035},
       {0.31693850167261328, -0.23316946160237501, 0.097640778936682451,
        0.067848472702789861}},
  };
  for (const auto& r : refs) {
    CAPTURE(field::to_string(r.e));
    const auto s = field::sample(shaped(r.e), 1.1);
    for (int n = 0; n < 5; ++n) check_close(s.omega[n], r.omega[n], 1e-14);
    for (int n = 0; n < 4; ++n) check_close(s.log_rate[n], r.log_rate[n], 1e-14);
  }

  PulseSpec poly;
  poly.phase = PhaseLaw::polynomial;
  poly.t0 = 0.3;
  poly.phase_coefficients = {0.1, -0.2, 0.3, 0.05, -0.01};
  const auto s = field::sample(poly, 1.1);
  const double phi[] = {0.153504, 0.35552, 0.7632, 0.108, -0.24};
  for (int n = 0; n < 5; ++n) check_close(s.phi[n], phi[n], 1e-14);
}

TEST_CASE("log-derivative equals dOmega/dt over Omega") {
  for (auto e : {Envelope::gaussian, Envelope::sech, Envelope::turn_on}) {
    const auto p = shaped(e);
    for (double t : grid_around(p, 4.0 * p.tau, 0.37)) {
      const auto s = field::sample(p, t);
      CHECK(s.omega[0] >= 0.0);
      check_close(s.log_rate[0], s.omega[1] / s.omega[0], 1e-12);
    }
  }
}

TEST_CASE("derivative contract holds at step 1e-3 tau") {
  for (auto e : {Envelope::constant, Envelope::gaussian, Envelope::sech, Envelope::turn_on}) {
    for (auto law : {PhaseLaw::none, PhaseLaw::linear_chirp, PhaseLaw::polynomial}) {
      auto p = shaped(e);
      p.phase = law;
      p.chirp_rate = 0.05;
      p.phase_coefficients = {0.0, 0.1, -0.02, 0.003, -0.0004};
      CAPTURE(field::to_string(e));
      CAPTURE(field::to_string(law));
      const auto g = grid_around(p, 3.0 * p.tau, 1e-3 * p.tau);
      CHECK(field::verify_derivatives(p, g, 4) < 1e-6);
    }
  }
}

TEST_CASE("verify_derivatives rejects unusable input") {
  const auto p = shaped(Envelope::gaussian);
  CHECK_THROWS_AS(field::verify_derivatives(p, std::vector<double>{0.0, 1.0}, 2),
                  ValidationError);
  CHECK_THROWS_AS(field::verify_derivatives(p, std::vector<double>{0.0, 1.0, 2.0}, 5),
                  ValidationError);
}

TEST_CASE("envelope underflow below the floor") {
  auto p = shaped(Envelope::gaussian);
  p.envelope_floor = 1e-12;
  CHECK_NOTHROW(field::sample(p, p.t0 + 5.0 * p.tau));
  CHECK_THROWS_AS(field::sample(p, p.t0 + 6.0 * p.tau), EnvelopeUnderflow);
  try {
    field::sample(p, p.t0 + 6.0 * p.tau);
  } catch (const EnvelopeUnderflow& e) {
    CHECK(e.time() == doctest::Approx(p.t0 + 6.0 * p.tau));
  }
}

TEST_CASE("pulse validation names the invariant") {
  auto p = shaped(Envelope::sech);
  p.tau = 0.0;
  CHECK_THROWS_WITH_AS(field::validate(p), doctest::Contains("pulse.tau"), ValidationError);
  p.tau = 1.0;
  p.omega_peak = -1.0;
  CHECK_THROWS_WITH_AS(field::validate(p), doctest::Contains("omega_peak"), ValidationError);
  PulseSpec constant;
  constant.tau = -4.0;
  CHECK_NOTHROW(field::validate(constant));
}

TEST_CASE("support window edges sit at the requested fraction") {
  for (auto e : {Envelope::gaussian, Envelope::sech, Envelope::turn_on}) {
    const auto p = shaped(e);
    for (double f : {1e-6, 1e-3, 0.5}) {
      const auto w = field::support_window(p, f);
      check_close(field::envelope(p, w.lo), f * p.omega_peak, 1e-9);
      if (e != Envelope::turn_on) check_close(field::envelope(p, w.hi), f * p.omega_peak, 1e-9);
      else CHECK(std::isinf(w.hi));
    }
  }
  CHECK_THROWS_AS(field::support_window(shaped(Envelope::gaussian), 0.0), ValidationError);
}

TEST_CASE("family names round-trip") {
  for (auto e : {Envelope::constant, Envelope::gaussian, Envelope::sech, Envelope::turn_on})
    CHECK(field::envelope_from_string(field::to_string(e)) == e);
  for (auto l : {PhaseLaw::none, PhaseLaw::linear_chirp, PhaseLaw::polynomial})
    CHECK(field::phase_law_from_string(field::to_string(l)) == l);
  CHECK_THROWS_AS(field::envelope_from_string("lorentzian"), ValidationError);
}

TEST_CASE("wavenumber conversion") {
  check_close(field::wavenumber_to_angular(1.0), 2.0 * kPi * 29.9792458);
  check_close(field::wavenumber_to_angular(0.8), 150.69212534, 1e-9);
}
