// Files written next to a run. Every CSV uses shortest round-trip floats and
// "nan" for values the run did not produce.
//
// trajectory.csv columns, in order:
//   t
//   a1_re a1_im a2_re a2_im                       closed form
//   oracle_a1_re oracle_a1_im oracle_a2_re oracle_a2_im
//   pop1 pop2                                     |a1|^2, |a2|^2 (closed form)
//   oracle_pop1 oracle_pop2
//   abs_cos abs_sin                               |cos(theta/2)|, |sin(theta/2)|
//   omega_g_re omega_g_im omega_e_inst_re omega_e_inst_im
//   p_g p_e oracle_p_g oracle_p_e                 dressed-basis populations
//   margin standard_ratio born_fock_ratio         adiabaticity series
//   residual neglected                            normal-form diagnostics
//
// adiabaticity.csv: t, r_<n>_<k> for every (n, k), standard_ratio,
// born_fock_ratio, in_window.
// components.csv: t, the four component phases (re, im), weight_cos,
// weight_sin, optical_phase.
// sweep.csv: <parameter>, one column per metric, error.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nads/scenarios.hpp"

namespace nads::output {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

Table trajectory_table(const scenarios::Bundle& b);
Table adiabaticity_table(const scenarios::Bundle& b);
Table components_table(const scenarios::Bundle& b);

std::string to_csv(const Table& t);
std::string sweep_csv(const scenarios::SweepSpec& sw,
                      const std::vector<scenarios::SweepRow>& rows);

std::string summary(const scenarios::Bundle& b);
std::string sweep_summary(const scenarios::SweepSpec& sw,
                          const std::vector<scenarios::SweepRow>& rows);

/// Self-contained SVG line plot of `columns` against the first column.
/// Throws ValidationError for a column the table does not have.
std::string svg_plot(const Table& t, const std::vector<std::string>& columns,
                     const std::string& title);

/// Writes `text` to dir/name; throws IoError naming the path.
std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name,
                                 const std::string& text);

/// Writes every table the bundle has, summary.txt, config.yaml and, when
/// `plot_columns` is non-empty, trajectory.svg. Returns the files written.
std::vector<std::filesystem::path> write_run(const scenarios::Bundle& b,
                                             const std::filesystem::path& dir,
                                             const std::vector<std::string>& plot_columns);

}  // namespace nads::output
