#pragma once

#include <filesystem>
#include <string>

#include "tvflow/entropy.hpp"
#include "tvflow/solver.hpp"
#include "tvflow/theorems.hpp"

// Plain-text key=value run configuration, CSV and binary field formats, and
// trajectory persistence (one snapshot file per time plus an index CSV).

namespace tvf::io {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Field constructor spec as written in config files: a shape literal such as
/// disk(0.5,0.5,0.25,1), constant(0), step(0.5,1), random(7), random(7,-1,1),
/// zero, or a file reference csv:PATH, tvf:PATH, pgm:PATH.
struct FieldSpec {
  std::string text;
};

struct RunConfig {
  int nx = 0;
  int ny = 0;
  double h = 0.0;
  double T = 0.0;
  double tau = 0.0;
  FieldSpec u0;
  FieldSpec f;
  std::string ladder = "none";        // "none" | "auto" | positive integer
  double gap_tol = 1e-6;
  int max_iters = 20000;
  double dual_step = 0.0;             // 0 = default h^2/(8 tau)
  std::string snapshots = "every-step";  // or comma-separated times
  std::string outdir = "out";
  std::uint64_t seed = 0;
  int threads = 1;
};

/// Parses key=value lines ('#' starts a comment). Unknown keys, missing
/// required keys and out-of-range values raise ConfigError naming the key.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::filesystem::path& path);

/// Canonical serialization; serialize(parse(x)) is the normal form of x.
std::string serialize(const RunConfig& cfg);

/// Materializes grid, data and solver options from a parsed config.
SolveConfig to_solve_config(const RunConfig& cfg);

/// Builds a field from a FieldSpec on an existing grid.
ScalarField make_field_from_spec(GridPtr grid, const FieldSpec& spec);

// --- single-field formats ---------------------------------------------------

/// CSV: ny rows of nx comma-separated reals, row j holds y-index j.
void save_field_csv(const ScalarField& u, const std::filesystem::path& path);
ScalarField load_field_csv(const std::filesystem::path& path, GridPtr grid);

/// Binary snapshot: magic "TVF1", u32 nx, u32 ny, f64 h, f64 t, then nx*ny
/// f64 cell values row-major (x fastest), all little-endian.
void save_snapshot(const ScalarField& u, double t, const std::filesystem::path& path);
struct Snapshot {
  ScalarField field;
  double t;
};
Snapshot load_snapshot(const std::filesystem::path& path);
Snapshot load_snapshot(const std::filesystem::path& path, GridPtr grid);

/// 8-bit binary PGM (P5), mapped linearly onto [0, 1].
ScalarField load_field_pgm(const std::filesystem::path& path, GridPtr grid);

/// Dispatch on extension: .csv, .tvf, .pgm.
ScalarField load_field(const std::filesystem::path& path, GridPtr grid);

// --- trajectory persistence --------------------------------------------------

/// Writes snap_NNNNNN.tvf per snapshot (plus .zx/.zy companions when duals are
/// present), index.csv with (time, filename, gap), steps.csv with the full
/// step log, and config.txt when a config echo is supplied.
void save_trajectory(const Trajectory& traj, const std::filesystem::path& dir,
                     const std::string& config_echo = "");

/// Reads a directory produced by save_trajectory. Duals are restored when the
/// companion files exist; the data record is rebuilt from config.txt if present.
Trajectory load_trajectory(const std::filesystem::path& dir);

// --- report output -----------------------------------------------------------

void write_entropy_report_csv(const EntropyReport& report, const std::filesystem::path& path);

void write_experiment_csv(const ExperimentReport& report, const std::filesystem::path& path);

/// One human-readable pass/fail line, e.g. "[PASS] contraction margin=1.2e-08".
std::string summary_line(const ExperimentReport& report);

/// Resolves the output directory: the TVF_OUTDIR environment variable
/// overrides the configured value.
std::filesystem::path resolve_outdir(const std::string& configured);

}  // namespace tvf::io
