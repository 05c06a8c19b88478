#include "tvflow/io.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

namespace tvf::io {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end != v.c_str() + v.size() || v.empty())
    throw ConfigError("config key '" + key + "': expected a real number, got '" + v + "'");
  return x;
}

long parse_int(const std::string& key, const std::string& v) {
  long x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
  return x;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// shape(...) literal -> FieldShape. Throws ConfigError on malformed input.
FieldShape parse_shape(const std::string& key, const std::string& text) {
  const auto open = text.find('(');
  if (open == std::string::npos || text.back() != ')')
    throw ConfigError("config key '" + key + "': malformed shape '" + text + "'");
  const std::string name = text.substr(0, open);
  std::vector<double> args;
  std::string body = text.substr(open + 1, text.size() - open - 2);
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) args.push_back(parse_double(key, trim(item)));
  if (name == "disk" && args.size() == 4) return Disk{args[0], args[1], args[2], args[3]};
  if (name == "step" && args.size() == 2) return Step{args[0], args[1]};
  if (name == "constant" && args.size() == 1) return Constant{args[0]};
  if (name == "random" && args.size() == 1)
    return RandomUniform{static_cast<std::uint64_t>(args[0]), 0.0, 1.0};
  if (name == "random" && args.size() == 3)
    return RandomUniform{static_cast<std::uint64_t>(args[0]), args[1], args[2]};
  throw ConfigError("config key '" + key + "': unknown shape '" + text + "'");
}

void write_le(std::ofstream& out, const void* p, std::size_t n) {
  out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

template <class T>
T read_le(std::ifstream& in, const fs::path& path) {
  T v;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T)))
    throw IoError("truncated file: " + path.string());
  return v;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  bool has_nx = false, has_ny = false, has_h = false, has_T = false, has_tau = false,
       has_u0 = false, has_f = false;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) throw ConfigError("config key '" + key + "': empty value");

    if (key == "nx") {
      cfg.nx = static_cast<int>(parse_int(key, value));
      has_nx = true;
    } else if (key == "ny") {
      cfg.ny = static_cast<int>(parse_int(key, value));
      has_ny = true;
    } else if (key == "h") {
      cfg.h = parse_double(key, value);
      has_h = true;
    } else if (key == "T") {
      cfg.T = parse_double(key, value);
      has_T = true;
    } else if (key == "tau") {
      cfg.tau = parse_double(key, value);
      has_tau = true;
    } else if (key == "u0") {
      cfg.u0 = {value};
      has_u0 = true;
    } else if (key == "f") {
      cfg.f = {value};
      has_f = true;
    } else if (key == "ladder") {
      cfg.ladder = value;
    } else if (key == "gap_tol") {
      cfg.gap_tol = parse_double(key, value);
    } else if (key == "max_iters") {
      cfg.max_iters = static_cast<int>(parse_int(key, value));
    } else if (key == "dual_step") {
      cfg.dual_step = parse_double(key, value);
    } else if (key == "snapshots") {
      cfg.snapshots = value;
    } else if (key == "outdir") {
      cfg.outdir = value;
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "threads") {
      cfg.threads = static_cast<int>(parse_int(key, value));
    } else {
      throw ConfigError("config key '" + key + "': unknown key");
    }
  }

  if (!has_nx) throw ConfigError("config key 'nx': required key missing");
  if (!has_ny) throw ConfigError("config key 'ny': required key missing");
  if (!has_h) throw ConfigError("config key 'h': required key missing");
  if (!has_T) throw ConfigError("config key 'T': required key missing");
  if (!has_tau) throw ConfigError("config key 'tau': required key missing");
  if (!has_u0) throw ConfigError("config key 'u0': required key missing");
  if (!has_f) throw ConfigError("config key 'f': required key missing");

  if (cfg.nx < 2) throw ConfigError("config key 'nx': must be >= 2");
  if (cfg.ny < 2) throw ConfigError("config key 'ny': must be >= 2");
  if (!(cfg.h > 0.0)) throw ConfigError("config key 'h': must be > 0");
  if (!(cfg.T > 0.0)) throw ConfigError("config key 'T': must be > 0");
  if (!(cfg.tau > 0.0) || !(cfg.tau < cfg.T))
    throw ConfigError("config key 'tau': must satisfy 0 < tau < T");
  if (!(cfg.gap_tol > 0.0)) throw ConfigError("config key 'gap_tol': must be > 0");
  if (cfg.max_iters < 1) throw ConfigError("config key 'max_iters': must be >= 1");
  if (cfg.dual_step < 0.0) throw ConfigError("config key 'dual_step': must be >= 0");
  if (cfg.threads < 1) throw ConfigError("config key 'threads': must be >= 1");
  if (cfg.ladder != "none" && cfg.ladder != "auto") {
    const long n = parse_int("ladder", cfg.ladder);
    if (n < 1) throw ConfigError("config key 'ladder': level must be >= 1");
  }
  return cfg;
}

RunConfig parse_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize(const RunConfig& cfg) {
  std::ostringstream out;
  out << "nx = " << cfg.nx << "\n";
  out << "ny = " << cfg.ny << "\n";
  out << "h = " << format_double(cfg.h) << "\n";
  out << "T = " << format_double(cfg.T) << "\n";
  out << "tau = " << format_double(cfg.tau) << "\n";
  out << "u0 = " << cfg.u0.text << "\n";
  out << "f = " << cfg.f.text << "\n";
  out << "ladder = " << cfg.ladder << "\n";
  out << "gap_tol = " << format_double(cfg.gap_tol) << "\n";
  out << "max_iters = " << cfg.max_iters << "\n";
  out << "dual_step = " << format_double(cfg.dual_step) << "\n";
  out << "snapshots = " << cfg.snapshots << "\n";
  out << "outdir = " << cfg.outdir << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "threads = " << cfg.threads << "\n";
  return out.str();
}

ScalarField make_field_from_spec(GridPtr grid, const FieldSpec& spec) {
  const std::string& t = spec.text;
  if (t == "zero") return ScalarField::zeros(std::move(grid));
  if (t.rfind("csv:", 0) == 0) return load_field_csv(t.substr(4), std::move(grid));
  if (t.rfind("tvf:", 0) == 0) return load_snapshot(t.substr(4), grid).field;
  if (t.rfind("pgm:", 0) == 0) return load_field_pgm(t.substr(4), std::move(grid));
  return make_field(std::move(grid), parse_shape("u0/f", t));
}

SolveConfig to_solve_config(const RunConfig& cfg) {
  GridPtr grid = make_grid(cfg.nx, cfg.ny, cfg.h);
  ScalarField u0 = make_field_from_spec(grid, cfg.u0);
  SourceTerm f = SourceTerm::constant(make_field_from_spec(grid, cfg.f));

  std::vector<double> snaps;
  if (cfg.snapshots == "every-step") {
    snaps = every_step_snapshots(cfg.T, cfg.tau);
  } else {
    std::stringstream ss(cfg.snapshots);
    std::string item;
    while (std::getline(ss, item, ',')) snaps.push_back(parse_double("snapshots", trim(item)));
  }

  SolveConfig sc{std::move(u0), std::move(f), cfg.T, cfg.tau, std::move(snaps), std::nullopt, {}};
  if (cfg.ladder == "auto") {
    sc.ladder_level = default_ladder_level(sc.f, sc.u0, sc.T);
  } else if (cfg.ladder != "none") {
    sc.ladder_level = static_cast<int>(parse_int("ladder", cfg.ladder));
  }
  sc.inner.gap_tol = cfg.gap_tol;
  sc.inner.max_iters = cfg.max_iters;
  if (cfg.dual_step > 0.0) sc.inner.dual_step = cfg.dual_step;
  sc.validate();
  return sc;
}

// --- single-field formats ----------------------------------------------------

void save_field_csv(const ScalarField& u, const fs::path& path) {
  const Grid2D& g = u.grid();
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const int c = g.index(i, j);
      out << format_double(c >= 0 ? u[c] : 0.0);
      if (i + 1 < g.nx()) out << ",";
    }
    out << "\n";
  }
  if (!out) throw IoError("write failed: " + path.string());
}

ScalarField load_field_csv(const fs::path& path, GridPtr grid) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  Array v = Array::Zero(grid->inside_count());
  std::string line;
  int j = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    if (j >= grid->ny())
      throw IoError("csv rows exceed grid ny=" + std::to_string(grid->ny()) + ": " + path.string());
    std::stringstream ss(line);
    std::string item;
    int i = 0;
    while (std::getline(ss, item, ',')) {
      if (i >= grid->nx())
        throw IoError("csv row " + std::to_string(j) + " exceeds grid nx: " + path.string());
      const double x = parse_double("csv", trim(item));
      const int c = grid->index(i, j);
      if (c >= 0) v[c] = x;
      ++i;
    }
    if (i != grid->nx())
      throw IoError("csv row " + std::to_string(j) + " has " + std::to_string(i) +
                    " values, expected nx=" + std::to_string(grid->nx()) + ": " + path.string());
    ++j;
  }
  if (j != grid->ny())
    throw IoError("csv has " + std::to_string(j) + " rows, expected ny=" +
                  std::to_string(grid->ny()) + ": " + path.string());
  return ScalarField(std::move(grid), std::move(v));
}

void save_snapshot(const ScalarField& u, double t, const fs::path& path) {
  const Grid2D& g = u.grid();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write("TVF1", 4);
  const std::uint32_t nx = static_cast<std::uint32_t>(g.nx());
  const std::uint32_t ny = static_cast<std::uint32_t>(g.ny());
  const double h = g.h();
  write_le(out, &nx, 4);
  write_le(out, &ny, 4);
  write_le(out, &h, 8);
  write_le(out, &t, 8);
  for (int j = 0; j < g.ny(); ++j)
    for (int i = 0; i < g.nx(); ++i) {
      const int c = g.index(i, j);
      const double v = c >= 0 ? u[c] : 0.0;
      write_le(out, &v, 8);
    }
  if (!out) throw IoError("write failed: " + path.string());
}

Snapshot load_snapshot(const fs::path& path) { return load_snapshot(path, nullptr); }

Snapshot load_snapshot(const fs::path& path, GridPtr grid) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "TVF1", 4) != 0)
    throw IoError("bad magic, not a TVF1 snapshot: " + path.string());
  const auto nx = read_le<std::uint32_t>(in, path);
  const auto ny = read_le<std::uint32_t>(in, path);
  const auto h = read_le<double>(in, path);
  const auto t = read_le<double>(in, path);
  if (nx < 2 || ny < 2 || !(h > 0.0)) throw IoError("bad header: " + path.string());
  if (!grid) {
    grid = make_grid(static_cast<int>(nx), static_cast<int>(ny), h);
  } else if (grid->nx() != static_cast<int>(nx) || grid->ny() != static_cast<int>(ny) ||
             grid->h() != h) {
    throw IoError("snapshot dimensions do not match the grid: " + path.string());
  }
  Array v = Array::Zero(grid->inside_count());
  for (std::uint32_t j = 0; j < ny; ++j)
    for (std::uint32_t i = 0; i < nx; ++i) {
      const double x = read_le<double>(in, path);
      const int c = grid->index(static_cast<int>(i), static_cast<int>(j));
      if (c >= 0) v[c] = x;
    }
  return {ScalarField(std::move(grid), std::move(v)), t};
}

ScalarField load_field_pgm(const fs::path& path, GridPtr grid) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::string magic;
  in >> magic;
  if (magic != "P5") throw IoError("only binary 8-bit PGM (P5) is supported: " + path.string());
  auto next_token = [&]() {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
    throw IoError("truncated PGM header: " + path.string());
  };
  const int w = std::stoi(next_token());
  const int hgt = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  if (maxval != 255) throw IoError("PGM maxval must be 255: " + path.string());
  if (w != grid->nx() || hgt != grid->ny())
    throw IoError("PGM dimensions do not match the grid: " + path.string());
  in.get();  // single whitespace after maxval
  Array v = Array::Zero(grid->inside_count());
  for (int j = 0; j < hgt; ++j)
    for (int i = 0; i < w; ++i) {
      const int byte = in.get();
      if (byte < 0) throw IoError("truncated PGM data: " + path.string());
      const int c = grid->index(i, j);
      if (c >= 0) v[c] = static_cast<double>(byte) / 255.0;
    }
  return ScalarField(std::move(grid), std::move(v));
}

ScalarField load_field(const fs::path& path, GridPtr grid) {
  const std::string ext = path.extension().string();
  if (ext == ".csv") return load_field_csv(path, std::move(grid));
  if (ext == ".tvf") return load_snapshot(path, std::move(grid)).field;
  if (ext == ".pgm") return load_field_pgm(path, std::move(grid));
  throw IoError("unknown field file extension '" + ext + "': " + path.string());
}

// --- trajectory persistence ----------------------------------------------------

namespace {

std::string snap_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "snap_%06zu.tvf", i);
  return buf;
}

// Dual lower-face block: "TVB1", uint32 count, count little-endian doubles.
void save_lower_block(const Array& lower, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write("TVB1", 4);
  const std::uint32_t count = static_cast<std::uint32_t>(lower.size());
  write_le(out, &count, 4);
  for (Eigen::Index f = 0; f < lower.size(); ++f) {
    const double v = lower[f];
    write_le(out, &v, 8);
  }
  if (!out) throw IoError("write failed: " + path.string());
}

Array load_lower_block(const fs::path& path, int expect) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "TVB1", 4) != 0)
    throw IoError("bad magic, not a TVB1 lower block: " + path.string());
  const auto count = read_le<std::uint32_t>(in, path);
  if (static_cast<int>(count) != expect)
    throw IoError("lower-face count does not match the grid: " + path.string());
  Array v(expect);
  for (int f = 0; f < expect; ++f) v[f] = read_le<double>(in, path);
  return v;
}

}  // namespace

void save_trajectory(const Trajectory& traj, const fs::path& dir, const std::string& config_echo) {
  fs::create_directories(dir);
  std::ofstream index(dir / "index.csv");
  if (!index) throw IoError("cannot open for writing: " + (dir / "index.csv").string());
  index << "time,filename,gap\n";
  const bool with_duals = traj.duals.size() == traj.times.size();
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const std::string name = snap_name(i);
    save_snapshot(traj.states[i], traj.times[i], dir / name);
    double gap = 0.0;
    for (const StepLog& log : traj.step_log)
      if (std::abs(log.t - traj.times[i]) <= 1e-12) gap = log.gap;
    index << format_double(traj.times[i]) << "," << name << "," << format_double(gap) << "\n";
    if (with_duals) {
      const fs::path base = dir / name;
      save_snapshot(ScalarField(traj.grid, traj.duals[i].x()), traj.times[i],
                    base.string() + ".zx");
      save_snapshot(ScalarField(traj.grid, traj.duals[i].y()), traj.times[i],
                    base.string() + ".zy");
      save_lower_block(traj.duals[i].lower(), base.string() + ".zb");
    }
  }
  std::ofstream steps(dir / "steps.csv");
  steps << "step,time,iters,gap,converged\n";
  for (const StepLog& log : traj.step_log)
    steps << log.step << "," << format_double(log.t) << "," << log.iters << ","
          << format_double(log.gap) << "," << (log.converged ? 1 : 0) << "\n";
  if (!config_echo.empty()) {
    std::ofstream cfg(dir / "config.txt");
    cfg << config_echo;
  }
}

Trajectory load_trajectory(const fs::path& dir) {
  std::ifstream index(dir / "index.csv");
  if (!index) throw IoError("cannot open: " + (dir / "index.csv").string());
  std::string line;
  std::getline(index, line);  // header
  Trajectory traj;
  bool duals_ok = true;
  while (std::getline(index, line)) {
    if (trim(line).empty()) continue;
    std::stringstream ss(line);
    std::string t_str, name, gap_str;
    if (!std::getline(ss, t_str, ',') || !std::getline(ss, name, ',') ||
        !std::getline(ss, gap_str, ','))
      throw IoError("malformed index row: " + line);
    Snapshot snap = traj.grid ? load_snapshot(dir / name, traj.grid) : load_snapshot(dir / name);
    if (!traj.grid) traj.grid = snap.field.grid_ptr();
    traj.times.push_back(snap.t);
    traj.states.push_back(std::move(snap.field));
    const fs::path zx = dir / (name + ".zx");
    const fs::path zy = dir / (name + ".zy");
    const fs::path zb = dir / (name + ".zb");
    if (duals_ok && fs::exists(zx) && fs::exists(zy)) {
      Snapshot sx = load_snapshot(zx, traj.grid);
      Snapshot sy = load_snapshot(zy, traj.grid);
      // Files written before the lower block existed fall back to the
      // outward-projection default of the two cell components.
      Array lower = fs::exists(zb) ? load_lower_block(zb, traj.grid->lower_face_count())
                                   : Array();
      traj.duals.emplace_back(traj.grid, sx.field.values(), sy.field.values(),
                              std::move(lower));
    } else {
      duals_ok = false;
      traj.duals.clear();
    }
  }
  if (traj.times.empty()) throw IoError("empty trajectory index: " + (dir / "index.csv").string());

  std::ifstream steps(dir / "steps.csv");
  if (steps) {
    std::getline(steps, line);
    while (std::getline(steps, line)) {
      if (trim(line).empty()) continue;
      std::stringstream ss(line);
      std::string a, b, c, d, e;
      std::getline(ss, a, ',');
      std::getline(ss, b, ',');
      std::getline(ss, c, ',');
      std::getline(ss, d, ',');
      std::getline(ss, e, ',');
      traj.step_log.push_back({static_cast<int>(parse_int("step", a)), parse_double("time", b),
                               static_cast<int>(parse_int("iters", c)), parse_double("gap", d),
                               parse_int("converged", e) != 0});
    }
  }

  const fs::path cfg_path = dir / "config.txt";
  if (fs::exists(cfg_path)) {
    const RunConfig rc = parse_config_file(cfg_path);
    const SolveConfig sc = to_solve_config(rc);
    if (sc.u0.grid().same_layout(*traj.grid)) {
      if (sc.ladder_level) {
        traj.ladder = data_ladder(sc.f, sc.u0, *sc.ladder_level);
      } else {
        traj.ladder = Ladder{sc.f, sc.u0, std::nullopt};
      }
    }
  }
  return traj;
}

// --- report output --------------------------------------------------------------

void write_entropy_report_csv(const EntropyReport& report, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << "t,k,entropy_residual,energy_residual,pairing_gap,flux_residual_norm,"
         "boundary_violation,zbound_excess\n";
  for (const EntropyReportRow& row : report.rows)
    out << format_double(row.t) << "," << format_double(row.k) << ","
        << format_double(row.entropy_residual) << "," << format_double(row.energy_residual) << ","
        << format_double(row.pairing_gap) << "," << format_double(row.flux_residual_norm) << ","
        << format_double(row.boundary_violation) << "," << format_double(row.zbound_excess)
        << "\n";
}

void write_experiment_csv(const ExperimentReport& report, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << "# " << report.name << " digest=" << report.inputs_digest
      << " pass=" << (report.pass ? 1 : 0) << "\n";
  out << "t,lhs,rhs,margin\n";
  for (const SnapshotRow& row : report.table)
    out << format_double(row.t) << "," << format_double(row.lhs) << ","
        << format_double(row.rhs) << "," << format_double(row.margin) << "\n";
  if (!report.trend.empty()) {
    out << "# trend";
    for (double v : report.trend) out << " " << format_double(v);
    out << "\n";
  }
}

std::string summary_line(const ExperimentReport& report) {
  std::ostringstream out;
  out << (report.pass ? "[PASS] " : "[FAIL] ") << report.name
      << " margin=" << format_double(report.worst_margin);
  if (!report.detail.empty()) out << " (" << report.detail << ")";
  return out.str();
}

fs::path resolve_outdir(const std::string& configured) {
  if (const char* env = std::getenv("TVF_OUTDIR")) {
    if (*env) return fs::path(env);
  }
  return fs::path(configured);
}

}  // namespace tvf::io
