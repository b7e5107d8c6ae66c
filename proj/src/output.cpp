#include "nads/output.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "nads/config.hpp"

namespace nads::output {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

using config::format_double;

void push_complex(std::vector<double>& row, Complex z) {
  row.push_back(z.real());
  row.push_back(z.imag());
}

std::string fmt_complex(Complex z) {
  return format_double(z.real()) + (z.imag() < 0 || std::signbit(z.imag()) ? " - " : " + ") +
         format_double(std::abs(z.imag())) + "i";
}

double finite_max(const std::vector<double>& v, const std::vector<bool>* mask = nullptr) {
  double m = 0.0;
  for (size_t i = 0; i < v.size(); ++i)
    if (!mask || (*mask)[i]) m = std::max(m, v[i]);
  return m;
}

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

Table trajectory_table(const scenarios::Bundle& b) {
  Table t;
  t.columns = {"t",           "a1_re",        "a1_im",         "a2_re",
               "a2_im",       "oracle_a1_re", "oracle_a1_im",  "oracle_a2_re",
               "oracle_a2_im", "pop1",        "pop2",          "oracle_pop1",
               "oracle_pop2", "abs_cos",      "abs_sin",       "omega_g_re",
               "omega_g_im",  "omega_e_inst_re", "omega_e_inst_im", "p_g",
               "p_e",         "oracle_p_g",   "oracle_p_e",    "margin",
               "standard_ratio", "born_fock_ratio", "residual", "neglected"};
  for (size_t i = 0; i < b.grid.size(); ++i) {
    std::vector<double> row{b.grid[i]};
    if (b.analytic) {
      push_complex(row, b.analytic->amplitudes[i](0));
      push_complex(row, b.analytic->amplitudes[i](1));
    } else {
      row.insert(row.end(), 4, kNan);
    }
    if (b.numeric) {
      push_complex(row, b.numeric->amplitudes[i](0));
      push_complex(row, b.numeric->amplitudes[i](1));
    } else {
      row.insert(row.end(), 4, kNan);
    }
    if (b.analytic) {
      row.push_back(std::norm(b.analytic->amplitudes[i](0)));
      row.push_back(std::norm(b.analytic->amplitudes[i](1)));
    } else {
      row.insert(row.end(), 2, kNan);
    }
    if (b.numeric) {
      row.push_back(std::norm(b.numeric->amplitudes[i](0)));
      row.push_back(std::norm(b.numeric->amplitudes[i](1)));
    } else {
      row.insert(row.end(), 2, kNan);
    }
    if (b.analytic) {
      const auto& s = b.analytic->snapshots[i];
      row.push_back(std::abs(s.cos_half));
      row.push_back(std::abs(s.sin_half));
      push_complex(row, s.omega_g);
      push_complex(row, s.omega_e_inst);
      row.push_back(b.populations[i].ground);
      row.push_back(b.populations[i].excited);
    } else {
      row.insert(row.end(), 8, kNan);
    }
    if (!b.populations_numeric.empty()) {
      row.push_back(b.populations_numeric[i].ground);
      row.push_back(b.populations_numeric[i].excited);
    } else {
      row.insert(row.end(), 2, kNan);
    }
    if (b.adiabaticity) {
      row.push_back(b.adiabaticity->pointwise_max[i]);
      row.push_back(b.adiabaticity->standard_ratio[i]);
      row.push_back(b.adiabaticity->born_fock_ratio[i]);
    } else {
      row.insert(row.end(), 3, kNan);
    }
    row.push_back(b.residual.empty() ? kNan : b.residual[i]);
    row.push_back(b.neglected.empty() ? kNan : b.neglected[i]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table adiabaticity_table(const scenarios::Bundle& b) {
  Table t;
  if (!b.adiabaticity) return t;
  const auto& r = *b.adiabaticity;
  t.columns.push_back("t");
  for (const auto& [nk, series] : r.ratios)
    t.columns.push_back("r_" + std::to_string(nk.first) + "_" + std::to_string(nk.second));
  t.columns.insert(t.columns.end(), {"standard_ratio", "born_fock_ratio", "in_window"});
  for (size_t i = 0; i < r.grid.size(); ++i) {
    std::vector<double> row{r.grid[i]};
    for (const auto& [nk, series] : r.ratios) row.push_back(series[i]);
    row.push_back(r.standard_ratio[i]);
    row.push_back(r.born_fock_ratio[i]);
    row.push_back(r.in_window[i] ? 1.0 : 0.0);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table components_table(const scenarios::Bundle& b) {
  Table t;
  if (!b.components) return t;
  const auto& c = *b.components;
  t.columns = {"t",
               "ground_real_phase_re",     "ground_real_phase_im",
               "ground_virtual_phase_re",  "ground_virtual_phase_im",
               "excited_real_phase_re",    "excited_real_phase_im",
               "excited_virtual_phase_re", "excited_virtual_phase_im",
               "weight_cos",               "weight_sin",
               "optical_phase"};
  for (size_t i = 0; i < c.grid.size(); ++i) {
    std::vector<double> row{c.grid[i]};
    push_complex(row, c.phases[i].ground_real);
    push_complex(row, c.phases[i].ground_virtual);
    push_complex(row, c.phases[i].excited_real);
    push_complex(row, c.phases[i].excited_virtual);
    row.push_back(c.weight_cos[i]);
    row.push_back(c.weight_sin[i]);
    row.push_back(c.optical_phase[i]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string to_csv(const Table& t) {
  std::string out;
  for (size_t j = 0; j < t.columns.size(); ++j) out += (j ? "," : "") + t.columns[j];
  out += '\n';
  for (const auto& row : t.rows) {
    for (size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      out += format_double(row[j]);
    }
    out += '\n';
  }
  return out;
}

std::string sweep_csv(const scenarios::SweepSpec& sw,
                      const std::vector<scenarios::SweepRow>& rows) {
  std::string out = sw.parameter;
  for (const auto& m : sw.metrics) out += "," + m;
  out += ",error\n";
  for (const auto& r : rows) {
    out += format_double(r.value);
    for (double v : r.metrics) out += "," + format_double(v);
    std::string err = r.error;
    std::replace(err.begin(), err.end(), '"', '\'');
    out += err.empty() ? ",\n" : ",\"" + err + "\"\n";
  }
  return out;
}

std::string summary(const scenarios::Bundle& b) {
  std::ostringstream o;
  const auto& s = b.scenario;
  o << "scenario: " << s.name << "\n";
  o << "envelope: " << field::to_string(s.pulse.envelope)
    << ", phase: " << field::to_string(s.pulse.phase) << "\n";
  o << "grid: [" << format_double(b.grid.front()) << ", " << format_double(b.grid.back())
    << "], " << b.grid.size() << " points\n";
  if (b.analytic) {
    const auto& a = *b.analytic;
    o << "constants: C1 = " << fmt_complex(a.c1) << ", C2 = " << fmt_complex(a.c2) << "\n";
    o << "branch warnings: " << a.warnings.size() << "\n";
    o << "max identity error: "
      << format_double(scenarios::metric(b, "max_identity_error")) << "\n";
    o << "final |a1|^2, |a2|^2 (closed form): " << format_double(std::norm(a.amplitudes.back()(0)))
      << ", " << format_double(std::norm(a.amplitudes.back()(1))) << "\n";
    o << "max p_E: " << format_double(scenarios::metric(b, "max_excited_population")) << "\n";
    o << "max |sin|^2 p_G: " << format_double(scenarios::metric(b, "max_virtual_population"))
      << "\n";
  }
  if (b.numeric) {
    const auto& n = *b.numeric;
    o << "oracle: " << (n.method == oracle::Method::dopri5 ? "dopri5" : "rk4")
      << ", rel_tol " << format_double(n.rel_tol) << ", abs_tol " << format_double(n.abs_tol)
      << ", accepted " << n.accepted << ", rejected " << n.rejected << "\n";
    o << "final |a1|^2, |a2|^2 (oracle): " << format_double(std::norm(n.amplitudes.back()(0)))
      << ", " << format_double(std::norm(n.amplitudes.back()(1))) << "\n";
    o << "max norm drift: " << format_double(scenarios::metric(b, "max_norm_drift")) << "\n";
  }
  if (b.comparison) {
    const auto& c = *b.comparison;
    o << "comparison: max |da1| " << format_double(c.max_error_a1) << ", rms |da1| "
      << format_double(c.rms_error_a1) << ", max |da2| " << format_double(c.max_error_a2)
      << ", rms |da2| " << format_double(c.rms_error_a2) << "\n";
    o << "max population error: " << format_double(c.max_population_error) << "\n";
    o << "final phase error a1: " << format_double(c.final_phase_error_a1) << "\n";
  }
  if (b.adiabaticity) {
    const auto& r = *b.adiabaticity;
    o << "adiabaticity margin (Omega >= " << format_double(s.numerics.margin_fraction)
      << " peak): " << format_double(r.margin) << "\n";
    o << "max standard ratio in window: " << format_double(finite_max(r.standard_ratio, &r.in_window))
      << "\n";
    o << "max Born-Fock ratio in window: "
      << format_double(finite_max(r.born_fock_ratio, &r.in_window)) << "\n";
    for (const auto& [nk, series] : r.ratios)
      o << "  max r_" << nk.first << "_" << nk.second << " in window: "
        << format_double(finite_max(series, &r.in_window)) << "\n";
  }
  if (!b.residual.empty()) {
    o << "max normal-form residual: " << format_double(finite_max(b.residual)) << "\n";
    o << "max neglected-term ratio: " << format_double(finite_max(b.neglected)) << "\n";
  }
  return o.str();
}

std::string sweep_summary(const scenarios::SweepSpec& sw,
                          const std::vector<scenarios::SweepRow>& rows) {
  std::ostringstream o;
  o << "sweep of " << sw.parameter << " over " << rows.size() << " values, base scenario "
    << sw.base.name << "\n";
  size_t failed = 0;
  for (const auto& r : rows) {
    if (r.error.empty()) continue;
    ++failed;
    o << "  failed at " << format_double(r.value) << ": " << r.error << "\n";
  }
  o << "failures: " << failed << "\n";
  return o.str();
}

std::string svg_plot(const Table& t, const std::vector<std::string>& columns,
                     const std::string& title) {
  constexpr double W = 800, H = 480, L = 70, R = 160, T = 40, B = 50;
  static const char* const palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                        "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};
  std::vector<size_t> idx;
  for (const auto& c : columns) {
    auto it = std::find(t.columns.begin(), t.columns.end(), c);
    if (it == t.columns.end()) throw ValidationError("no column '" + c + "' to plot");
    idx.push_back(static_cast<size_t>(it - t.columns.begin()));
  }
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& row : t.rows) {
    if (!std::isfinite(row[0])) continue;
    x0 = std::min(x0, row[0]);
    x1 = std::max(x1, row[0]);
    for (size_t j : idx)
      if (std::isfinite(row[j])) {
        y0 = std::min(y0, row[j]);
        y1 = std::max(y1, row[j]);
      }
  }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!std::isfinite(y0)) y0 = 0.0, y1 = 1.0;
  if (!(y1 > y0)) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
    << escape_xml(title) << "</text>\n";
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
    << H - T - B << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
    o << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">"
      << short_num(xv) << "</text>\n";
    o << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">"
      << short_num(yv) << "</text>\n";
  }
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
    << escape_xml(t.columns[0]) << "</text>\n";
  for (size_t c = 0; c < idx.size(); ++c) {
    const char* color = palette[c % std::size(palette)];
    std::string path;
    bool pen_down = false;
    for (const auto& row : t.rows) {
      const double x = row[0], y = row[idx[c]];
      if (!std::isfinite(x) || !std::isfinite(y)) {
        pen_down = false;
        continue;
      }
      path += (pen_down ? " L" : " M") + short_num(px(x)) + "," + short_num(py(y));
      pen_down = true;
    }
    o << "<path d=\"" << path << "\" fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"1.2\"/>\n";
    const double ly = T + 16 + 18 * static_cast<double>(c);
    o << "<line x1=\"" << W - R + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << W - R + 36
      << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << W - R + 42 << "\" y=\"" << ly << "\">" << escape_xml(columns[c])
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name,
                                 const std::string& text) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir.string() + "': " + ec.message());
  const auto path = dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
  return path;
}

std::vector<std::filesystem::path> write_run(const scenarios::Bundle& b,
                                             const std::filesystem::path& dir,
                                             const std::vector<std::string>& plot_columns) {
  std::vector<std::filesystem::path> written;
  const auto traj = trajectory_table(b);
  if (b.analytic || b.numeric) written.push_back(write_file(dir, "trajectory.csv", to_csv(traj)));
  if (b.adiabaticity)
    written.push_back(write_file(dir, "adiabaticity.csv", to_csv(adiabaticity_table(b))));
  if (b.components)
    written.push_back(write_file(dir, "components.csv", to_csv(components_table(b))));
  written.push_back(write_file(dir, "summary.txt", summary(b)));
  written.push_back(write_file(dir, "config.yaml", config::emit_config(b.scenario)));
  if (!plot_columns.empty())
    written.push_back(
        write_file(dir, "trajectory.svg", svg_plot(traj, plot_columns, b.scenario.name)));
  return written;
}

}  // namespace nads::output
