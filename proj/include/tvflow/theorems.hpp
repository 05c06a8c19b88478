#pragma once

#include <string>
#include <vector>

#include "tvflow/solver.hpp"

// Quantitative checks of the flow's structural estimates on concrete runs.
// Each experiment returns a small report with per-snapshot margins; margin
// >= 0 means the estimate holds at that snapshot with the stated slack.

namespace tvf {

struct DecayParams {
  double N, r0, r;
  double h0;  // exponent on the initial-norm factor
  double h1;  // exponent on 1/t
  double C;   // constant in front
};

/// Closed-form decay exponents for the L^r0 -> L^r smoothing estimate;
/// requires N >= 2, 1 < r < r0 < 2 and N > r0.
DecayParams decay_exponents(double N, double r0, double r);

struct SnapshotRow {
  double t;
  double lhs;
  double rhs;
  double margin;  // rhs - lhs
};

struct ExperimentReport {
  std::string name;
  std::string inputs_digest;
  bool pass = false;
  double worst_margin = 0.0;
  std::vector<SnapshotRow> table;
  std::vector<double> trend;  // optional refinement or schedule trend
  std::string detail;
};

struct FlowData {
  ScalarField u0;
  SourceTerm f;
};

/// |u(t)|_r <= (1 + tol) C |u0|_r0^h0 / t^h1 at every snapshot t >= t_min.
ExperimentReport decay_experiment(const FlowData& data, const SolveConfig& base, double r0,
                                  double r, double tol = 0.05);

/// Ordered data produce ordered solutions: sup (u1 - u2)^+ <= 1e-6 * scale.
ExperimentReport comparison_experiment(const FlowData& lower, const FlowData& upper,
                                       const SolveConfig& base);

/// max_t |u1 - u2|_1 <= |u01 - u02|_1 + int int |f1 - f2| with 1e-6 slack.
ExperimentReport contraction_experiment(const FlowData& a, const FlowData& b,
                                        const SolveConfig& base);

/// |u(t)|_1 <= |u0|_1 + int_0^t |f|_1 at every snapshot, 1e-6 relative slack.
ExperimentReport l1_bound_check(const Trajectory& traj);

/// sup_t |u|_inf <= |u0|_inf + T |f|_inf + 1e-8.
ExperimentReport boundedness_check(const Trajectory& traj);

/// max_t |u_n - u_m|_r <= |u0_n - u0_m|_r + int |f_n - f_m|_r dt with 1e-6
/// relative slack plus discretization tolerance C_reg (h + tau).
ExperimentReport regularity_cauchy_experiment(const FlowData& data, const SolveConfig& base,
                                              double r, int n, int m);

struct GnResult {
  double lhs;       // int int |tail|^((N+1)/N)
  double sup_term;  // sup_t int |tail|
  double tv_term;   // int tv(tail) dt
  double ratio;     // lhs / (sup_term^(1/N) tv_term); 0 when vacuous
  bool vacuous;
  bool anomaly;     // tv_term = 0 with lhs > 0; impossible for ghost-cell tv
};

/// Interpolation-inequality ratio for the tail part above level k (N = 2).
GnResult gn_check(const Trajectory& traj, double k);

/// Ratio boundedness across a refinement schedule: growth <= 1.2 per level.
ExperimentReport gn_refinement_check(const std::vector<Trajectory>& runs, double k);

/// L1 distance between the implicit TV path and the p-continuation path:
/// max_t |u_tv - u_p|_1 <= C_uni (h + tau + (p_min - 1)).
ExperimentReport uniqueness_proxy(const SolveConfig& base, const std::vector<double>& schedule);

/// Frozen calibration constants used by the checks above.
double regularity_slack_constant();  // C_reg
double uniqueness_constant();        // C_uni
double entropy_tolerance_constant(); // C_tol, shared with the entropy gate

}  // namespace tvf
