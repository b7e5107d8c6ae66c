#include <doctest.h>

#include <cmath>
#include <string>

#include "nads/scenarios.hpp"

using namespace nads;
using scenarios::Output;
using scenarios::Scenario;

TEST_CASE("built-ins are listed, valid and retrievable") {
  const auto names = scenarios::builtin_names();
  CHECK(names.size() == 10);
  for (const auto& n : names) {
    CAPTURE(n);
    const auto s = scenarios::builtin(n);
    CHECK(s.name == n);
    CHECK_NOTHROW(scenarios::validate(s));
  }
  CHECK_THROWS_AS(scenarios::builtin("no-such-scenario"), ValidationError);
}

TEST_CASE("static built-ins match the oracle") {
  for (const char* name :
       {"static-rabi", "static-detuned", "static-damped", "static-detuned-damped"}) {
    CAPTURE(name);
    const auto b = scenarios::run_scenario(scenarios::builtin(name));
    REQUIRE(b.comparison);
    CHECK(b.comparison->max_population_error < 1e-8);
    CHECK(b.comparison->margin == 0.0);
  }
}

TEST_CASE("outputs decide what gets computed") {
  auto s = scenarios::builtin("static-detuned");
  s.outputs = {Output::adiabaticity};
  auto b = scenarios::run_scenario(s);
  CHECK(b.adiabaticity);
  CHECK(!b.analytic);
  CHECK(!b.numeric);
  CHECK_THROWS_AS(scenarios::metric(b, "max_population_error"), ValidationError);

  s.outputs = {Output::components};
  b = scenarios::run_scenario(s);
  CHECK(b.analytic);
  CHECK(b.components);
  CHECK(!b.numeric);

  s.outputs.clear();
  CHECK_THROWS_AS(scenarios::validate(s), ValidationError);
  CHECK_THROWS_AS(scenarios::output_from_string("histogram"), ValidationError);
}

TEST_CASE("scenario validation") {
  auto s = scenarios::builtin("static-rabi");
  s.grid.end.reset();
  CHECK_THROWS_AS(scenarios::validate(s), ValidationError);
  s = scenarios::builtin("static-rabi");
  s.grid.points = 1;
  CHECK_THROWS_AS(scenarios::validate(s), ValidationError);
  s = scenarios::builtin("gaussian-adiabatic");
  s.pulse.tau = -1.0;
  CHECK_THROWS_AS(scenarios::validate(s), ValidationError);
}

TEST_CASE("pulsed grids default to five widths and are clipped to the anchor support") {
  auto s = scenarios::builtin("sech-pulse");
  s.numerics.anchor_fraction = 1e-3;
  const auto g = scenarios::effective_grid(s);
  const auto w = field::support_window(s.pulse, 1e-3);
  CHECK(g.front() == doctest::Approx(std::max(w.lo, s.pulse.t0 - 5 * s.pulse.tau)));
  CHECK(g.back() == doctest::Approx(std::min(w.hi, s.pulse.t0 + 5 * s.pulse.tau)));
  CHECK(g.size() == static_cast<size_t>(s.grid.points));

  s.numerics.anchor_fraction = 1e-6;
  const auto wide = scenarios::effective_grid(s);
  CHECK(wide.front() == doctest::Approx(s.pulse.t0 - 5 * s.pulse.tau));
}

TEST_CASE("numeric keys round-trip through set and get") {
  Scenario s = scenarios::builtin("chirped-gaussian");
  for (const auto& key : scenarios::numeric_keys()) {
    CAPTURE(key);
    const double v = key == "grid.points" || key.find("numerics.") == 0 ? 7.0 : 0.25;
    scenarios::set_numeric(s, key, v);
    CHECK(scenarios::get_numeric(s, key) == v);
  }
  CHECK_THROWS_AS(scenarios::set_numeric(s, "pulse.colour", 1.0), ValidationError);
  CHECK_THROWS_AS(scenarios::set_numeric(s, "grid.points", 2.5), ValidationError);
}

TEST_CASE("a one-point sweep reproduces the direct run") {
  scenarios::SweepSpec sw;
  sw.base = scenarios::builtin("sech-pulse");
  sw.parameter = "pulse.tau";
  sw.values = {60.0};
  sw.metrics = scenarios::metric_names();
  const auto rows = scenarios::run_sweep(sw);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].error.empty());
  const auto b = scenarios::run_scenario(sw.base);
  for (size_t m = 0; m < sw.metrics.size(); ++m) {
    CAPTURE(sw.metrics[m]);
    const double want = scenarios::metric(b, sw.metrics[m]);
    if (std::isnan(want)) CHECK(std::isnan(rows[0].metrics[m]));
    else CHECK(rows[0].metrics[m] == want);
  }
}

TEST_CASE("sweeps are independent of the worker count and survive failing points") {
  scenarios::SweepSpec sw;
  sw.base = scenarios::builtin("sech-pulse");
  sw.base.grid.points = 401;
  sw.parameter = "pulse.tau";
  sw.values = {40.0, -1.0, 60.0, 80.0, 100.0};
  sw.workers = 1;
  const auto serial = scenarios::run_sweep(sw);
  sw.workers = 4;
  const auto parallel = scenarios::run_sweep(sw);
  REQUIRE(serial.size() == 5);
  REQUIRE(parallel.size() == 5);
  for (size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].value == sw.values[i]);
    CHECK(parallel[i].value == sw.values[i]);
    CHECK(serial[i].error == parallel[i].error);
    for (size_t m = 0; m < sw.metrics.size(); ++m) {
      if (std::isnan(serial[i].metrics[m])) CHECK(std::isnan(parallel[i].metrics[m]));
      else CHECK(serial[i].metrics[m] == parallel[i].metrics[m]);
    }
  }
  CHECK(serial[1].error.find("tau") != std::string::npos);
  CHECK(std::isnan(serial[1].metrics[0]));
  CHECK(serial[0].error.empty());
  // Longer pulses are more adiabatic.
  CHECK(serial[4].metrics[0] < serial[0].metrics[0]);
  CHECK(serial[4].metrics[1] < serial[0].metrics[1]);
}

TEST_CASE("sweep validation") {
  scenarios::SweepSpec sw;
  sw.base = scenarios::builtin("sech-pulse");
  sw.parameter = "pulse.tau";
  CHECK_THROWS_AS(scenarios::validate(sw), ValidationError);  // no values
  sw.values = {1.0};
  sw.metrics = {"fidelity"};
  CHECK_THROWS_AS(scenarios::validate(sw), ValidationError);
  sw.metrics = {"margin"};
  sw.parameter = "pulse.envelope";
  CHECK_THROWS_AS(scenarios::validate(sw), ValidationError);
}

TEST_CASE("virtual-excitation scenario") {
  const auto g = scenarios::run_grischkowsky();
  CHECK(g.margin < 0.1);
  CHECK(g.max_virtual > 0.0);
  CHECK(g.ratio < g.threshold);
  CHECK(g.ratio_numeric < g.threshold);
  CHECK(g.bundle.scenario.pulse.detuning == doctest::Approx(field::wavenumber_to_angular(0.8)));
  CHECK(g.threshold == 1e-2);

  auto strict = scenarios::builtin("grischkowsky");
  strict.numerics.virtual_ratio_threshold = 1e-7;
  strict.outputs = {Output::trajectory};
  const auto s = scenarios::run_grischkowsky(strict);
  CHECK(s.threshold == 1e-7);
  CHECK(s.ratio > s.threshold);
}

TEST_CASE("errors carry the scenario name") {
  auto s = scenarios::builtin("static-rabi");
  s.name = "broken";
  s.system.gamma_broadening = 2.0;  // Omega = gamma / 2 at resonance degenerates R
  try {
    scenarios::run_scenario(s);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("broken") != std::string::npos);
  }
}
