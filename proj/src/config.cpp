#include "nads/config.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

namespace nads::config {
namespace {

using scenarios::Scenario;
using scenarios::SweepSpec;

const char* const kSections[] = {"pulse", "system", "grid", "init", "numerics", "sweep"};

struct State {
  Scenario scenario;
  std::optional<SweepSpec> sweep;
};

int line_of(const YAML::Node& node) { return node.Mark().line; }

std::string scalar(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) throw ParseError("'" + key + "' expects a scalar value", line_of(node));
  return node.Scalar();
}

double to_double(const YAML::Node& node, const std::string& key) {
  std::string text = scalar(node, key);
  std::string_view v = text;
  if (!v.empty() && v.front() == '+') v.remove_prefix(1);
  double out = 0.0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || end != v.data() + v.size() || v.empty())
    throw ParseError("'" + key + "' expects a number, got '" + text + "'", line_of(node));
  return out;
}

int to_int(const YAML::Node& node, const std::string& key) {
  const double v = to_double(node, key);
  if (!(v == std::trunc(v) && std::abs(v) < 1e9))
    throw ParseError("'" + key + "' expects an integer", line_of(node));
  return static_cast<int>(v);
}

std::vector<double> to_doubles(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence()) throw ParseError("'" + key + "' expects a list", line_of(node));
  std::vector<double> out;
  for (const auto& item : node) out.push_back(to_double(item, key));
  return out;
}

std::vector<std::string> to_strings(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence()) throw ParseError("'" + key + "' expects a list", line_of(node));
  std::vector<std::string> out;
  for (const auto& item : node) out.push_back(scalar(item, key));
  return out;
}

Complex to_complex(const YAML::Node& node, const std::string& key) {
  const auto v = to_doubles(node, key);
  if (v.size() != 2) throw ParseError("'" + key + "' expects [re, im]", line_of(node));
  return {v[0], v[1]};
}

SweepSpec& sweep_of(State& st) {
  if (!st.sweep) st.sweep.emplace();
  return *st.sweep;
}

void assign(State& st, const std::string& key, const YAML::Node& node) {
  Scenario& s = st.scenario;
  try {
    if (key == "name") {
      s.name = scalar(node, key);
    } else if (key == "pulse.envelope") {
      s.pulse.envelope = field::envelope_from_string(scalar(node, key));
    } else if (key == "pulse.phase") {
      s.pulse.phase = field::phase_law_from_string(scalar(node, key));
    } else if (key == "pulse.phase_coefficients") {
      s.pulse.phase_coefficients = to_doubles(node, key);
    } else if (key == "init.a1") {
      s.init_a1 = to_complex(node, key);
    } else if (key == "init.a2") {
      s.init_a2 = to_complex(node, key);
    } else if (key == "outputs") {
      s.outputs.clear();
      for (const auto& name : to_strings(node, key))
        s.outputs.push_back(scenarios::output_from_string(name));
    } else if (key == "numerics.integrator") {
      const auto v = scalar(node, key);
      if (v == "dopri5") s.numerics.integrator = oracle::Method::dopri5;
      else if (v == "rk4") s.numerics.integrator = oracle::Method::rk4;
      else throw ValidationError("numerics.integrator must be dopri5 or rk4");
    } else if (key == "sweep.parameter") {
      sweep_of(st).parameter = scalar(node, key);
    } else if (key == "sweep.values") {
      sweep_of(st).values = to_doubles(node, key);
    } else if (key == "sweep.metrics") {
      sweep_of(st).metrics = to_strings(node, key);
    } else if (key == "sweep.workers") {
      sweep_of(st).workers = to_int(node, key);
    } else {
      const auto keys = scenarios::numeric_keys();
      if (std::find(keys.begin(), keys.end(), key) == keys.end())
        throw ParseError("unknown field '" + key + "'", line_of(node));
      scenarios::set_numeric(s, key, to_double(node, key));
    }
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ParseError(std::string(e.what()) + " (field '" + key + "')", line_of(node));
  }
}

bool is_section(const std::string& key) {
  for (const char* s : kSections)
    if (key == s) return true;
  return false;
}

void walk(State& st, const YAML::Node& map, const std::string& prefix) {
  for (const auto& kv : map) {
    const std::string name = kv.first.as<std::string>();
    const std::string key = prefix.empty() ? name : prefix + "." + name;
    if (key == "base") continue;
    if (prefix.empty() && is_section(name)) {
      if (!kv.second.IsMap())
        throw ParseError("'" + key + "' must be a mapping", line_of(kv.second));
      walk(st, kv.second, key);
      continue;
    }
    assign(st, key, kv.second);
  }
}

YAML::Node load_yaml(std::string_view text) {
  try {
    return YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ParseError(e.msg, e.mark.line);
  }
}

void apply_base(State& st, const YAML::Node& root) {
  if (!root["base"]) return;
  const auto& node = root["base"];
  try {
    st.scenario = scenarios::builtin(scalar(node, "base"));
  } catch (const ValidationError& e) {
    throw ParseError(e.what(), line_of(node));
  }
}

void apply_override(State& st, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ValidationError("override '" + assignment + "' is not of the form key=value");
  const std::string key = assignment.substr(0, eq);
  YAML::Node value;
  try {
    value = YAML::Load(assignment.substr(eq + 1));
  } catch (const YAML::Exception& e) {
    throw ValidationError("override '" + assignment + "': " + e.msg);
  }
  if (key == "base" || is_section(key))
    throw ValidationError("override '" + assignment + "' must name a leaf field");
  try {
    assign(st, key, value);
  } catch (const ParseError& e) {
    throw ValidationError("override '" + assignment + "': " + e.what());
  }
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string list(const std::vector<double>& v) {
  std::string out = "[";
  for (size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_double(v[i]);
  return out + "]";
}

std::string complex_text(Complex z) { return list({z.real(), z.imag()}); }

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

Parsed parse_config(std::string_view text, const std::vector<std::string>& overrides) {
  const YAML::Node root = load_yaml(text);
  State st;
  if (root.IsDefined() && !root.IsNull()) {
    if (!root.IsMap()) throw ParseError("config must be a mapping", line_of(root));
    apply_base(st, root);
    walk(st, root, "");
  }
  for (const auto& o : overrides) apply_override(st, o);

  if (st.sweep) {
    st.sweep->base = st.scenario;
    scenarios::validate(*st.sweep);
    return *st.sweep;
  }
  scenarios::validate(st.scenario);
  return st.scenario;
}

Parsed load(const std::string& source, const std::vector<std::string>& overrides) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (fs::is_regular_file(source, ec)) {
    std::ifstream in(source);
    if (!in) throw IoError("cannot read config '" + source + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      return parse_config(buf.str(), overrides);
    } catch (Error& e) {
      e.add_context(source);
      throw;
    }
  }
  const auto names = scenarios::builtin_names();
  if (std::find(names.begin(), names.end(), source) == names.end())
    throw IoError("'" + source + "' is neither a readable config file nor a built-in scenario");
  return parse_config(emit_config(scenarios::builtin(source)), overrides);
}

std::string emit_config(const Scenario& s) {
  std::ostringstream o;
  const auto& p = s.pulse;
  const auto& n = s.numerics;
  o << "name: " << quoted(s.name) << "\n";
  o << "pulse:\n"
    << "  envelope: " << field::to_string(p.envelope) << "\n"
    << "  omega_peak: " << format_double(p.omega_peak) << "\n"
    << "  t0: " << format_double(p.t0) << "\n"
    << "  tau: " << format_double(p.tau) << "\n"
    << "  phase: " << field::to_string(p.phase) << "\n"
    << "  chirp_rate: " << format_double(p.chirp_rate) << "\n"
    << "  phase_coefficients: " << list(p.phase_coefficients) << "\n"
    << "  detuning: " << format_double(p.detuning) << "\n"
    << "  envelope_floor: " << format_double(p.envelope_floor) << "\n";
  o << "system:\n"
    << "  omega1: " << format_double(s.system.omega1) << "\n"
    << "  omega2: " << format_double(s.system.omega2) << "\n"
    << "  gamma_broadening: " << format_double(s.system.gamma_broadening) << "\n"
    << "  gamma_shift: " << format_double(s.system.gamma_shift) << "\n";
  o << "grid:\n";
  if (s.grid.start) o << "  start: " << format_double(*s.grid.start) << "\n";
  if (s.grid.end) o << "  end: " << format_double(*s.grid.end) << "\n";
  o << "  points: " << s.grid.points << "\n";
  o << "init:\n"
    << "  a1: " << complex_text(s.init_a1) << "\n"
    << "  a2: " << complex_text(s.init_a2) << "\n";
  o << "outputs: [";
  for (size_t i = 0; i < s.outputs.size(); ++i)
    o << (i ? ", " : "") << scenarios::to_string(s.outputs[i]);
  o << "]\n";
  o << "numerics:\n"
    << "  rel_tol: " << format_double(n.rel_tol) << "\n"
    << "  abs_tol: " << format_double(n.abs_tol) << "\n"
    << "  integrator: " << (n.integrator == oracle::Method::dopri5 ? "dopri5" : "rk4") << "\n"
    << "  rk4_substeps: " << n.rk4_substeps << "\n"
    << "  anchor_fraction: " << format_double(n.anchor_fraction) << "\n"
    << "  margin_fraction: " << format_double(n.margin_fraction) << "\n"
    << "  refinement: " << n.refinement << "\n"
    << "  n_max: " << n.n_max << "\n"
    << "  k_max: " << n.k_max << "\n"
    << "  virtual_ratio_threshold: " << format_double(n.virtual_ratio_threshold) << "\n";
  return o.str();
}

std::string emit_config(const SweepSpec& sw) {
  std::ostringstream o;
  o << emit_config(sw.base);
  o << "sweep:\n"
    << "  parameter: " << sw.parameter << "\n"
    << "  values: " << list(sw.values) << "\n"
    << "  metrics: [";
  for (size_t i = 0; i < sw.metrics.size(); ++i) o << (i ? ", " : "") << sw.metrics[i];
  o << "]\n"
    << "  workers: " << sw.workers << "\n";
  return o.str();
}

std::string emit_config(const Parsed& p) {
  return std::visit([](const auto& v) { return emit_config(v); }, p);
}

}  // namespace nads::config
