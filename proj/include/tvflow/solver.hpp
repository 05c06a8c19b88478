#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "tvflow/calculus.hpp"
#include "tvflow/field.hpp"

namespace tvf {

/// Piecewise-constant-in-time source. Piece i is active on
/// (breaks[i], breaks[i+1]] with breaks[0] = 0 implied.
class SourceTerm {
 public:
  static SourceTerm zero(GridPtr grid);
  static SourceTerm constant(ScalarField f);
  SourceTerm(std::vector<double> piece_ends, std::vector<ScalarField> pieces);

  const GridPtr& grid_ptr() const { return pieces_[0].grid_ptr(); }
  const std::vector<ScalarField>& pieces() const { return pieces_; }
  const std::vector<double>& piece_ends() const { return ends_; }

  /// Time average over (t0, t1]; each piece enters with its overlap weight.
  ScalarField average(double t0, double t1) const;

  /// sup over time of the cellwise sup norm.
  double sup_in_time() const;

 private:
  std::vector<double> ends_;  // strictly increasing; last one = +infinity sentinel
  std::vector<ScalarField> pieces_;
};

struct InnerOptions {
  int max_iters = 20000;
  double gap_tol = 1e-6;                // relative duality gap target
  std::optional<double> dual_step;      // defaults to h^2 / (8 tau)
};

struct RofResult {
  ScalarField u_next;
  VectorField z;       // optimal dual, cellwise unit ball
  double gap;          // relative duality gap at exit
  int iters;
  bool converged;
};

/// One implicit step of the total variation flow: minimizes
///   tv(v) + 1/(2 tau) |v - (u + tau f)|_2^2
/// by projected ascent on the dual and returns u_next = w + tau div z exactly.
/// warm, when given, seeds the dual iteration.
RofResult rof_step(const ScalarField& u, const ScalarField& f_slice, double tau,
                   const InnerOptions& inner = {}, const VectorField* warm = nullptr);

struct PlapResult {
  ScalarField u_next;
  int cg_iters;
  bool converged;
};

/// Semi-implicit p-Laplacian step with lagged diffusivity
/// a = (|grad u|^2 + eps_reg^2)^((p-2)/2); the linear SPD system is solved by
/// conjugate gradients to relative residual 1e-8.
PlapResult plap_step(const ScalarField& u, const ScalarField& f_slice, double tau, double p,
                     double eps_reg);

struct Ladder {
  SourceTerm f;
  ScalarField u0;
  std::optional<int> level;  // nullopt = raw data used
};

/// Level-n data approximation: f truncated at n per piece; u0 truncated at n
/// then given one Jacobi smoothing pass.
Ladder data_ladder(const SourceTerm& f, const ScalarField& u0, int n);

/// Smallest power-of-two level whose L1 ladder error is at most
/// 1e-3 * (|f|_L1(0,T;L1) + |u0|_L1), capped at 2^20. T caps the f integral.
int default_ladder_level(const SourceTerm& f, const ScalarField& u0, double T);

struct StepLog {
  int step;
  double t;
  int iters;
  double gap;
  bool converged;
};

struct Trajectory {
  GridPtr grid;
  std::vector<double> times;          // snapshot times, strictly increasing
  std::vector<ScalarField> states;
  std::vector<VectorField> duals;     // empty when the scheme has no dual field
  std::optional<Ladder> ladder;       // the data actually fed to the scheme
  std::vector<StepLog> step_log;

  /// Piecewise-constant-in-time reconstruction at t (last snapshot <= t).
  const ScalarField& state_at(double t) const;
};

struct SolveConfig {
  ScalarField u0;
  SourceTerm f;
  double T;
  double tau;
  std::vector<double> snapshots;       // subset of [0, T]; snapped to steps
  std::optional<int> ladder_level;     // nullopt = none
  InnerOptions inner;

  void validate() const;
};

/// Snapshot times {0, tau, 2 tau, ..., T}.
std::vector<double> every_step_snapshots(double T, double tau);

class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, int step, double t)
      : std::runtime_error(what), step(step), t(t) {}
  int step;
  double t;
};

/// Implicit time marching with rof_step; throws SolverFailure with the failing
/// time index when an inner solve does not reach its gap target.
Trajectory evolve(const SolveConfig& config);

struct ContinuationResult {
  Trajectory trajectory;             // at the final p
  std::vector<double> p_values;
  std::vector<double> distances;     // max-in-time L1 distance between consecutive p runs
};

/// Marches the p-Laplacian scheme along a decreasing p schedule ending at
/// p <= 1.05, with eps_reg = h. Ladder level is taken from the config.
ContinuationResult p_continuation(const SolveConfig& config, const std::vector<double>& schedule);

/// max over common snapshot times of the L1 distance between states.
double max_l1_distance(const Trajectory& a, const Trajectory& b);

}  // namespace tvf
