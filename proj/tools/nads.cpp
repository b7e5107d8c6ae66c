#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "nads/config.hpp"
#include "nads/output.hpp"
#include "nads/scenarios.hpp"

namespace {

using namespace nads;

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::validation: return 2;
    case ErrorCategory::numeric: return 3;
    case ErrorCategory::io: return 4;
  }
  return 1;
}

const char* category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::validation: return "validation error";
    case ErrorCategory::numeric: return "numeric error";
    case ErrorCategory::io: return "io error";
  }
  return "error";
}

std::vector<std::string> split_columns(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

struct Common {
  std::string source;
  std::string out = "out";
  std::vector<std::string> overrides;
  std::string plot;
  std::optional<double> rel_tol, abs_tol;

  std::vector<std::string> all_overrides() const {
    auto o = overrides;
    if (rel_tol) o.push_back("numerics.rel_tol=" + config::format_double(*rel_tol));
    if (abs_tol) o.push_back("numerics.abs_tol=" + config::format_double(*abs_tol));
    return o;
  }
};

scenarios::Scenario expect_scenario(const config::Parsed& p, const std::string& cmd) {
  if (const auto* s = std::get_if<scenarios::Scenario>(&p)) return *s;
  throw ValidationError("'" + cmd + "' needs a scenario config; this one defines a sweep");
}

void report(const std::vector<std::filesystem::path>& files) {
  for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
}

int cmd_run(const Common& c) {
  auto s = expect_scenario(config::load(c.source, c.all_overrides()), "run");
  std::string extra;
  scenarios::Bundle bundle;
  if (s.name == "grischkowsky") {
    auto g = scenarios::run_grischkowsky(s);
    std::ostringstream o;
    o << "detuning: " << config::format_double(g.detuning_wavenumber) << " cm^-1\n"
      << "bandwidth (intensity FWHM): " << config::format_double(g.bandwidth_wavenumber)
      << " cm^-1\n"
      << "Doppler width (metadata only): " << config::format_double(g.doppler_wavenumber)
      << " cm^-1\n"
      << "max p_E / max |sin|^2 p_G (closed form): " << config::format_double(g.ratio) << "\n"
      << "max p_E / max |sin|^2 p_G (oracle): " << config::format_double(g.ratio_numeric)
      << "\n"
      << "ratio threshold: " << config::format_double(g.threshold) << " ("
      << (g.ratio < g.threshold && g.ratio_numeric < g.threshold ? "met" : "not met") << ")\n";
    extra = o.str();
    bundle = std::move(g.bundle);
  } else {
    bundle = scenarios::run_scenario(s);
  }
  const auto files = output::write_run(bundle, c.out, split_columns(c.plot));
  if (!extra.empty()) output::write_file(c.out, "summary.txt", output::summary(bundle) + extra);
  std::cout << output::summary(bundle) << extra;
  report(files);
  return 0;
}

int cmd_check(const Common& c) {
  auto s = expect_scenario(config::load(c.source, c.all_overrides()), "check");
  s.outputs = {scenarios::Output::adiabaticity};
  const auto bundle = scenarios::run_scenario(s);
  const auto files = output::write_run(bundle, c.out, split_columns(c.plot));
  std::cout << output::summary(bundle);
  report(files);
  return 0;
}

int cmd_sweep(const Common& c) {
  const auto parsed = config::load(c.source, c.all_overrides());
  const auto* sw = std::get_if<scenarios::SweepSpec>(&parsed);
  if (!sw) throw ValidationError("'sweep' needs a config with a sweep section");
  const auto rows = scenarios::run_sweep(*sw);
  std::vector<std::filesystem::path> files;
  files.push_back(output::write_file(c.out, "sweep.csv", output::sweep_csv(*sw, rows)));
  files.push_back(output::write_file(c.out, "summary.txt", output::sweep_summary(*sw, rows)));
  files.push_back(output::write_file(c.out, "config.yaml", config::emit_config(*sw)));
  const auto cols = split_columns(c.plot);
  if (!cols.empty()) {
    output::Table t;
    t.columns.push_back(sw->parameter);
    t.columns.insert(t.columns.end(), sw->metrics.begin(), sw->metrics.end());
    for (const auto& r : rows) {
      std::vector<double> row{r.value};
      row.insert(row.end(), r.metrics.begin(), r.metrics.end());
      t.rows.push_back(std::move(row));
    }
    files.push_back(output::write_file(c.out, "sweep.svg", output::svg_plot(t, cols, sw->base.name)));
  }
  std::cout << output::sweep_csv(*sw, rows) << output::sweep_summary(*sw, rows);
  report(files);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-form dressed-state dynamics of a driven two-level system"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&](CLI::App* sub, bool plot) {
    sub->add_option("config", common.source, "config file or built-in scenario name")
        ->required();
    sub->add_option("--out", common.out, "output directory")->capture_default_str();
    sub->add_option("--set", common.overrides, "override a config field, key=value")
        ->allow_extra_args(false);
    if (plot) sub->add_option("--plot", common.plot, "comma-separated columns to plot as SVG");
    sub->add_option("--rel-tol", common.rel_tol, "oracle relative tolerance");
    sub->add_option("--abs-tol", common.abs_tol, "oracle absolute tolerance");
  };

  auto* run = app.add_subcommand("run", "run a scenario and write its tables");
  add_common(run, true);
  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  add_common(sweep, true);
  auto* check = app.add_subcommand("check", "adiabaticity report only");
  add_common(check, true);
  auto* list = app.add_subcommand("list-scenarios", "print the built-in scenario names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (const auto& n : scenarios::builtin_names()) std::cout << n << "\n";
      return 0;
    }
    if (run->parsed()) return cmd_run(common);
    if (sweep->parsed()) return cmd_sweep(common);
    if (check->parsed()) return cmd_check(common);
  } catch (const Error& e) {
    std::cerr << category_name(e.category()) << ": " << e.what() << "\n";
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
