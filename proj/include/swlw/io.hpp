#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "swlw/config.hpp"
#include "swlw/grid.hpp"
#include "swlw/solver.hpp"

namespace swlw {

/// A configuration file together with the settings that only matter to the
/// command line driver.
struct ConfigDocument {
  SimConfig sim;
  std::filesystem::path output_dir = "out";
  std::filesystem::path table_path;  // initial table file, when profile = table
  std::filesystem::path source;  // empty when parsed from text
};

/// Parses the INI-style configuration format:
///
///   [domain]  L1, L2, J or h
///   [time]    t_end, dt (number or auto), safety_factor, allow_unstable_dt,
///             snapshot_times (comma separated)
///   [model]   alpha, stress, kernel, viscosity, coupling, memory_rule
///   [initial] profile, amplitude, table, allow_underresolved
///   [output]  dir, diagnostics_every, work_accumulation
///
/// Keys may also appear before the first section. Unknown keys, keys in the
/// wrong section and malformed values are ConfigErrors naming the line and
/// key. The result is validated. Relative paths (table, dir) resolve against
/// `base_dir`.
ConfigDocument parse_config_text(const std::string& text,
                                 const std::filesystem::path& base_dir = {});
/// Throws IoError when the file cannot be read.
ConfigDocument parse_config(const std::filesystem::path& path);

/// Canonical text for a configuration, accepted back by parse_config_text.
std::string format_config(const ConfigDocument& doc);

/// Header "x,re_u,im_u,abs_u,v,w" and J+1 rows, 17 significant digits.
void write_snapshot(std::ostream& out, const SimState& state, const Grid& grid);
/// Throws IoError when the file cannot be written.
void write_snapshot(const std::filesystem::path& path, const SimState& state, const Grid& grid);

struct Snapshot {
  std::vector<double> x;
  SimState state;
};

/// Inverse of write_snapshot. Throws IoError on unreadable files and on
/// malformed rows (with the line number).
Snapshot read_snapshot(std::istream& in);
Snapshot read_snapshot(const std::filesystem::path& path);

/// Grid described by a snapshot's x column; throws IoError when it is not
/// uniform to rounding.
Grid snapshot_grid(const Snapshot& snapshot);

struct RunArtifacts {
  RunReport report;
  std::filesystem::path manifest;
  std::vector<std::filesystem::path> snapshots;
  std::filesystem::path diagnostics;
};

/// Runs the configuration and writes snapshot_NNN.csv, diagnostics.csv and
/// manifest.json into doc.output_dir (created if missing).
RunArtifacts run_to_directory(const ConfigDocument& doc);

/// JSON manifest text: resolved configuration (including dt, stable_dt and
/// eps_eff), version, kernel provenance, snapshots, termination and warnings.
std::string manifest_json(const ConfigDocument& doc, const RunReport& report,
                          const std::vector<std::string>& snapshot_files);

/// Three-grid self-convergence of the final state on J, 2J and 4J intervals
/// (each with its own auto or configured dt). Errors are discrete L2 norms of
/// the differences at the coarse nodes.
struct ConvergenceReport {
  std::vector<std::size_t> intervals;  // J, 2J, 4J
  std::vector<double> dt;
  double error_coarse[3] = {0, 0, 0};  // u, v, w: |f_J - f_2J|
  double error_fine[3] = {0, 0, 0};    // u, v, w: |f_2J - f_4J|
  double order[3] = {0, 0, 0};
};

ConvergenceReport self_convergence(const SimConfig& config);
std::string to_text(const ConvergenceReport& report);

}  // namespace swlw
