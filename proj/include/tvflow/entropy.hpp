#pragma once

#include <vector>

#include "tvflow/solver.hpp"

// Verification layer: residuals of the inequalities and identities satisfied
// by the flow, evaluated on stored trajectories with backward differences in
// time. All residuals are signed unless stated otherwise; a verification
// passes when the signed residual stays below its tolerance.

namespace tvf {

/// Admissible comparison trajectory: phi solves the flow for data (g, v0)
/// with no data ladder, together with its certified dual fields.
struct TestPair {
  Trajectory phi;
  SourceTerm g;
  ScalarField v0;
};

/// Runs the flow for (g, v0) on the given configuration (ladder forced off)
/// and wraps the result as a test pair.
TestPair make_test_pair(const SourceTerm& g, const ScalarField& v0, const SolveConfig& base);

struct PairTolerances {
  double ball_excess = 1e-10;     // cellwise unit-ball excess
  double pairing_rel = 1e-8;      // tv(phi) - pairing(z, phi), relative
  double boundary_sign = 1e-8;    // dead-banded boundary sign defect
};

/// Numeric admissibility check used for hand-crafted pairs: unit ball, finite
/// divergence, pairing saturation and boundary sign with dead band 10 h.
bool validate_test_pair(const TestPair& pair, const PairTolerances& tol = {});

/// Signed residual per backward-difference step of the level-k entropy
/// inequality of u against the pair; nonpositive up to discretization error.
std::vector<double> entropy_residual(const Trajectory& u, const SourceTerm& f,
                                     const TestPair& pair, double k);

struct ResidualSeries {
  std::vector<double> per_step;  // absolute values, one per backward difference
  double time_averaged;
};

/// |d/dt integral jk(u) + tv(trunc(k, u)) - integral trunc(k, u) f| per step.
ResidualSeries energy_identity_residual(const Trajectory& u, const SourceTerm& f, double k);

/// |d/dt integral jk(u) - integral trunc(k, u) u'| per step.
ResidualSeries chain_rule_residual(const Trajectory& u, double k);

struct VectorFieldRow {
  double t;
  double zbound_excess;        // max(0, cellwise sup norm of z - 1)
  double pairing_gap;          // tv(trunc(k, u)) - pairing(z, trunc(k, u))
  double flux_residual_norm;   // |u' - div z - f|_L1
  double boundary_violation;   // dead-banded boundary sign defect
};

struct VectorFieldReport {
  std::vector<VectorFieldRow> rows;
  double mean_pairing_gap;  // time average; the per-time gaps are informative only
};

VectorFieldReport vector_field_report(const Trajectory& u, const SourceTerm& f, double k);

struct EntropyReportRow {
  double t;
  double k;
  double entropy_residual;
  double energy_residual;
  double pairing_gap;
  double flux_residual_norm;
  double boundary_violation;
  double zbound_excess;
};

struct EntropyReport {
  std::vector<EntropyReportRow> rows;
  double max_entropy_residual;
  double max_energy_residual;
};

/// Full report of u against one pair over a set of truncation levels.
EntropyReport build_entropy_report(const Trajectory& u, const SourceTerm& f,
                                   const TestPair& pair, const std::vector<double>& ks);

}  // namespace tvf
