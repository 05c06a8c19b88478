// Command-line front end: solve runs the flow and persists the trajectory,
// verify replays the stored inequalities, theorems runs the estimate
// experiments on built-in reference data, decay prints the closed-form
// exponents, info echoes configuration. Exit codes: 0 success, 1 numerical
// failure, 2 usage error.

#include <CLI11.hpp>
#include <iostream>

#include "tvflow/io.hpp"

namespace {

constexpr const char* kVersion = "tvflow 1.0.0";

using namespace tvf;

int run_solve(const std::string& config_path, const std::string& outdir_flag) {
  const io::RunConfig rc = io::parse_config_file(config_path);
  const SolveConfig sc = io::to_solve_config(rc);
  const std::filesystem::path outdir =
      outdir_flag.empty() ? io::resolve_outdir(rc.outdir) : std::filesystem::path(outdir_flag);
  try {
    const Trajectory traj = evolve(sc);
    io::save_trajectory(traj, outdir, io::serialize(rc));
    double worst_gap = 0.0;
    long total_iters = 0;
    for (const StepLog& log : traj.step_log) {
      worst_gap = std::max(worst_gap, log.gap);
      total_iters += log.iters;
    }
    std::cout << "solve: " << traj.times.size() << " snapshots -> " << outdir.string()
              << " (worst gap " << worst_gap << ", inner iters " << total_iters << ")\n";
    return 0;
  } catch (const SolverFailure& e) {
    std::cerr << "solve failed at step " << e.step << " (t=" << e.t << "): " << e.what() << "\n";
    return 1;
  }
}

int run_verify(const std::string& traj_dir, const std::string& pair_dir,
               const std::string& k_list, const std::string& out_csv) {
  const Trajectory traj = io::load_trajectory(traj_dir);
  if (traj.duals.empty()) {
    std::cerr << "verify: trajectory has no stored dual fields\n";
    return 1;
  }
  if (!traj.ladder) {
    std::cerr << "verify: trajectory has no config.txt data record\n";
    return 1;
  }

  TestPair pair{Trajectory{}, SourceTerm::zero(traj.grid), ScalarField::zeros(traj.grid)};
  if (pair_dir.empty()) {
    // Verify against the zero pair: phi = 0 with zero dual is admissible.
    pair.phi.grid = traj.grid;
    pair.phi.times = traj.times;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      pair.phi.states.push_back(ScalarField::zeros(traj.grid));
      pair.phi.duals.push_back(VectorField::zeros(traj.grid));
    }
  } else {
    Trajectory phi = io::load_trajectory(pair_dir);
    if (phi.duals.empty() || !phi.ladder) {
      std::cerr << "verify: pair trajectory lacks duals or data record\n";
      return 1;
    }
    pair.g = phi.ladder->f;
    pair.v0 = phi.ladder->u0;
    pair.phi = std::move(phi);
    if (!validate_test_pair(pair)) {
      std::cerr << "verify: pair trajectory failed admissibility validation\n";
      return 1;
    }
  }

  std::vector<double> ks;
  std::stringstream ss(k_list);
  std::string item;
  while (std::getline(ss, item, ',')) ks.push_back(std::stod(item));

  const EntropyReport report = build_entropy_report(traj, traj.ladder->f, pair, ks);
  if (!out_csv.empty()) io::write_entropy_report_csv(report, out_csv);

  const double h = traj.grid->h();
  const double dt = traj.times[1] - traj.times[0];
  const double tol = entropy_tolerance_constant() * (h + dt);
  std::cout << "verify: max entropy residual " << report.max_entropy_residual << " (tol " << tol
            << "), max energy residual " << report.max_energy_residual << "\n";
  if (report.max_entropy_residual > tol) {
    std::cerr << "verify: entropy inequality violated\n";
    return 1;
  }
  return 0;
}

FlowData default_disk_data(GridPtr grid) {
  ScalarField u0 = make_field(grid, Disk{0.5, 0.5, 0.25, 1.0});
  return {std::move(u0), SourceTerm::zero(std::move(grid))};
}

int run_theorems(const std::string& only, const std::string& outdir_flag) {
  const std::filesystem::path outdir = io::resolve_outdir(outdir_flag.empty() ? "out" : outdir_flag);
  std::filesystem::create_directories(outdir);
  auto selected = [&](const std::string& name) {
    if (only.empty()) return true;
    std::stringstream ss(only);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item == name) return true;
    }
    return false;
  };

  GridPtr grid = make_grid(48, 48, 1.0 / 48);
  SolveConfig base{ScalarField::zeros(grid), SourceTerm::zero(grid), 0.02, 2e-3,
                   every_step_snapshots(0.02, 2e-3), std::nullopt, {}};
  base.inner.gap_tol = 1e-9;
  base.inner.max_iters = 200000;

  std::vector<ExperimentReport> reports;
  const FlowData disk = default_disk_data(grid);

  if (selected("contraction")) {
    FlowData a{make_field(grid, RandomUniform{11}), SourceTerm::zero(grid)};
    FlowData b{make_field(grid, RandomUniform{12}), SourceTerm::zero(grid)};
    reports.push_back(contraction_experiment(a, b, base));
  }
  if (selected("comparison")) {
    FlowData lo = disk;
    FlowData hi{ScalarField(grid, disk.u0.values() + 0.25), SourceTerm::zero(grid)};
    reports.push_back(comparison_experiment(lo, hi, base));
  }
  if (selected("l1_bound")) {
    SolveConfig cfg = base;
    cfg.u0 = disk.u0;
    reports.push_back(l1_bound_check(evolve(cfg)));
  }
  if (selected("boundedness")) {
    SolveConfig cfg = base;
    cfg.u0 = disk.u0;
    reports.push_back(boundedness_check(evolve(cfg)));
  }
  if (selected("decay")) {
    SolveConfig cfg = base;
    cfg.T = 0.05;
    cfg.snapshots = every_step_snapshots(cfg.T, cfg.tau);
    reports.push_back(decay_experiment(disk, cfg, 1.5, 1.2));
  }
  if (selected("gn")) {
    std::vector<Trajectory> runs;
    for (int n : {24, 48}) {
      GridPtr g2 = make_grid(n, n, 1.0 / n);
      SolveConfig cfg{make_field(g2, Disk{0.5, 0.5, 0.25, 2.0}), SourceTerm::zero(g2), 0.02,
                      2e-3, every_step_snapshots(0.02, 2e-3), std::nullopt, base.inner};
      runs.push_back(evolve(cfg));
    }
    reports.push_back(gn_refinement_check(runs, 0.5));
  }
  if (selected("regularity")) {
    ScalarField spike = make_field(grid, Disk{0.5, 0.5, 0.1, 24.0});
    FlowData data{spike, SourceTerm::zero(grid)};
    reports.push_back(regularity_cauchy_experiment(data, base, 1.2, 4, 8));
  }
  if (selected("uniqueness")) {
    SolveConfig cfg = base;
    cfg.u0 = disk.u0;
    reports.push_back(uniqueness_proxy(cfg, {1.5, 1.3, 1.2, 1.1, 1.05}));
  }

  if (reports.empty()) {
    std::cerr << "theorems: no experiment matches --only selection\n";
    return 2;
  }
  bool all_pass = true;
  for (const ExperimentReport& rep : reports) {
    std::cout << io::summary_line(rep) << "\n";
    io::write_experiment_csv(rep, outdir / (rep.name + ".csv"));
    all_pass = all_pass && rep.pass;
  }
  if (!all_pass) {
    std::cerr << "theorems: at least one estimate failed\n";
    return 1;
  }
  return 0;
}

int run_decay(double N, double r0, double r, bool dynamic) {
  const DecayParams p = decay_exponents(N, r0, r);
  std::cout << "h0 = " << p.h0 << "\nh1 = " << p.h1 << "\nC = " << p.C << "\n";
  if (dynamic) {
    GridPtr grid = make_grid(64, 64, 1.0 / 64);
    SolveConfig cfg{make_field(grid, Disk{0.5, 0.5, 0.25, 1.0}), SourceTerm::zero(grid), 0.05,
                    1e-3, every_step_snapshots(0.05, 1e-3), std::nullopt, {}};
    const ExperimentReport rep =
        decay_experiment({cfg.u0, cfg.f}, cfg, r0, r);
    std::cout << io::summary_line(rep) << "\n";
    return rep.pass ? 0 : 1;
  }
  return 0;
}

int run_info(const std::string& config_path) {
  std::cout << kVersion << "\n";
  std::cout << "eigen " << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "."
            << EIGEN_MINOR_VERSION << "\n";
  if (!config_path.empty()) {
    const io::RunConfig rc = io::parse_config_file(config_path);
    std::cout << io::serialize(rc);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2-D total variation flow laboratory"};
  app.require_subcommand(1);

  std::string config_path, outdir, traj_dir, pair_dir, k_list = "0.25,1,4", out_csv;
  double N = 2.0, r0 = 1.5, r = 1.2;
  bool dynamic = false;
  std::string only;

  CLI::App* solve = app.add_subcommand("solve", "run the flow and store the trajectory");
  solve->add_option("--config", config_path, "run configuration file")->required();
  solve->add_option("--outdir", outdir, "output directory (overrides config)");

  CLI::App* verify = app.add_subcommand("verify", "replay stored inequalities on a trajectory");
  verify->add_option("--traj", traj_dir, "trajectory directory")->required();
  verify->add_option("--pair", pair_dir, "comparison trajectory directory (default: zero pair)");
  verify->add_option("--k", k_list, "comma-separated truncation levels");
  verify->add_option("--out", out_csv, "write the report CSV here");

  CLI::App* theorems = app.add_subcommand("theorems", "run the estimate experiments");
  theorems->add_option("--only", only, "comma-separated experiment names");
  theorems->add_option("--outdir", outdir, "output directory");

  CLI::App* decay = app.add_subcommand("decay", "print decay exponents");
  decay->add_option("--N", N, "dimension (>= 2)");
  decay->add_option("--r0", r0, "initial integrability exponent");
  decay->add_option("--r", r, "target integrability exponent");
  decay->add_flag("--dynamic", dynamic, "also check the bound on a disk run");

  CLI::App* info = app.add_subcommand("info", "print version and echo a config");
  info->add_option("--config", config_path, "configuration file to echo");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (solve->parsed()) return run_solve(config_path, outdir);
    if (verify->parsed()) return run_verify(traj_dir, pair_dir, k_list, out_csv);
    if (theorems->parsed()) return run_theorems(only, outdir);
    if (decay->parsed()) return run_decay(N, r0, r, dynamic);
    if (info->parsed()) return run_info(config_path);
  } catch (const io::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const io::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
