#include "tvflow/entropy.hpp"

#include <cmath>

#include "tvflow/truncation.hpp"

namespace tvf {

namespace {

void check_time_grid(const Trajectory& a, const Trajectory& b, const char* who) {
  if (a.times.size() != b.times.size())
    throw std::invalid_argument(std::string(who) + ": time-grid mismatch");
  for (std::size_t i = 0; i < a.times.size(); ++i)
    if (std::abs(a.times[i] - b.times[i]) > 1e-12)
      throw std::invalid_argument(std::string(who) + ": time-grid mismatch");
  if (!a.grid->same_layout(*b.grid))
    throw std::invalid_argument(std::string(who) + ": trajectories live on different grids");
}

void check_verifiable(const Trajectory& u, const char* who) {
  if (u.times.size() < 2)
    throw std::invalid_argument(std::string(who) + ": need at least two snapshots");
  if (u.states.size() != u.times.size())
    throw std::invalid_argument(std::string(who) + ": states and times disagree");
}

void check_duals(const Trajectory& u, const char* who) {
  if (u.duals.size() != u.times.size())
    throw std::invalid_argument(std::string(who) + ": duals absent from trajectory");
}

/// Dead-banded boundary sign defect sum_faces h max(0, |u|-10h) |[z,nu] + sign(u)|.
double boundary_sign_defect(const ScalarField& u, const VectorField& z) {
  const Grid2D& g = u.grid();
  const double band = 10.0 * g.h();
  const BoundaryTrace tr = boundary_trace(z);
  double s = 0.0;
  for (std::size_t i = 0; i < tr.values.size(); ++i) {
    const double uv = u[g.boundary_faces()[i].cell];
    const double weight = std::max(0.0, std::abs(uv) - band);
    if (weight > 0.0) {
      const double sign = uv > 0.0 ? 1.0 : (uv < 0.0 ? -1.0 : 0.0);
      s += weight * std::abs(tr.values[i] + sign);
    }
  }
  return s * g.h();
}

}  // namespace

TestPair make_test_pair(const SourceTerm& g, const ScalarField& v0, const SolveConfig& base) {
  SolveConfig cfg = base;
  cfg.u0 = v0;
  cfg.f = g;
  cfg.ladder_level = std::nullopt;
  return {evolve(cfg), g, v0};
}

bool validate_test_pair(const TestPair& pair, const PairTolerances& tol) {
  const Trajectory& phi = pair.phi;
  check_verifiable(phi, "validate_test_pair");
  check_duals(phi, "validate_test_pair");
  for (std::size_t m = 0; m < phi.times.size(); ++m) {
    const VectorField& z = phi.duals[m];
    if (!z.x().allFinite() || !z.y().allFinite() || !z.lower().allFinite()) return false;
    if (z.max_norm() > 1.0 + tol.ball_excess) return false;
    if (m == 0) continue;  // the initial snapshot carries no certified dual
    const double tvphi = tv(phi.states[m]);
    if (tvphi - pairing(z, phi.states[m]) > tol.pairing_rel * std::max(1.0, tvphi)) return false;
    if (boundary_sign_defect(phi.states[m], z) >
        tol.boundary_sign * std::max(1.0, sup_norm(phi.states[m])))
      return false;
  }
  return true;
}

std::vector<double> entropy_residual(const Trajectory& u, const SourceTerm& f,
                                     const TestPair& pair, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("entropy_residual: level k must be > 0");
  check_verifiable(u, "entropy_residual");
  check_time_grid(u, pair.phi, "entropy_residual");
  check_duals(pair.phi, "entropy_residual");

  const GridPtr grid = u.grid;
  std::vector<double> out;
  out.reserve(u.times.size() - 1);
  for (std::size_t m = 1; m < u.times.size(); ++m) {
    const double dt = u.times[m] - u.times[m - 1];
    ScalarField diff(grid, u.states[m].values() - pair.phi.states[m].values());
    ScalarField diff_prev(grid, u.states[m - 1].values() - pair.phi.states[m - 1].values());
    const ScalarField tk = truncate(diff, k);

    const double ddt_jk = (jk_integral(diff, k) - jk_integral(diff_prev, k)) / dt;
    ScalarField phi_rate(grid, (pair.phi.states[m].values() - pair.phi.states[m - 1].values()) / dt);
    const double phi_term = inner(phi_rate, tk);
    const double pair_term = pairing(pair.phi.duals[m], tk);
    const ScalarField f_slice = f.average(u.times[m - 1], u.times[m]);
    const double source_term = inner(f_slice, tk);
    out.push_back(ddt_jk + phi_term + pair_term - source_term);
  }
  return out;
}

ResidualSeries energy_identity_residual(const Trajectory& u, const SourceTerm& f, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("energy_identity_residual: level k must be > 0");
  check_verifiable(u, "energy_identity_residual");
  ResidualSeries series;
  series.per_step.reserve(u.times.size() - 1);
  double acc = 0.0;
  for (std::size_t m = 1; m < u.times.size(); ++m) {
    const double dt = u.times[m] - u.times[m - 1];
    const double ddt_jk = (jk_integral(u.states[m], k) - jk_integral(u.states[m - 1], k)) / dt;
    const ScalarField tk = truncate(u.states[m], k);
    const double lhs = ddt_jk + tv(tk);
    const double rhs = inner(f.average(u.times[m - 1], u.times[m]), tk);
    series.per_step.push_back(std::abs(lhs - rhs));
    acc += series.per_step.back();
  }
  series.time_averaged = acc / static_cast<double>(series.per_step.size());
  return series;
}

ResidualSeries chain_rule_residual(const Trajectory& u, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("chain_rule_residual: level k must be > 0");
  check_verifiable(u, "chain_rule_residual");
  ResidualSeries series;
  series.per_step.reserve(u.times.size() - 1);
  double acc = 0.0;
  for (std::size_t m = 1; m < u.times.size(); ++m) {
    const double dt = u.times[m] - u.times[m - 1];
    const double ddt_jk = (jk_integral(u.states[m], k) - jk_integral(u.states[m - 1], k)) / dt;
    ScalarField rate(u.grid, (u.states[m].values() - u.states[m - 1].values()) / dt);
    const double chained = inner(rate, truncate(u.states[m], k));
    series.per_step.push_back(std::abs(ddt_jk - chained));
    acc += series.per_step.back();
  }
  series.time_averaged = acc / static_cast<double>(series.per_step.size());
  return series;
}

VectorFieldReport vector_field_report(const Trajectory& u, const SourceTerm& f, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("vector_field_report: level k must be > 0");
  check_verifiable(u, "vector_field_report");
  check_duals(u, "vector_field_report");
  VectorFieldReport rep;
  rep.rows.reserve(u.times.size() - 1);
  double acc = 0.0;
  for (std::size_t m = 1; m < u.times.size(); ++m) {
    const double dt = u.times[m] - u.times[m - 1];
    const VectorField& z = u.duals[m];
    VectorFieldRow row;
    row.t = u.times[m];
    row.zbound_excess = std::max(0.0, z.max_norm() - 1.0);
    const ScalarField tk = truncate(u.states[m], k);
    row.pairing_gap = tv(tk) - pairing(z, tk);
    ScalarField rate(u.grid, (u.states[m].values() - u.states[m - 1].values()) / dt);
    const ScalarField div_z = divergence(z);
    const ScalarField f_slice = f.average(u.times[m - 1], u.times[m]);
    row.flux_residual_norm =
        l1_norm(ScalarField(u.grid, rate.values() - div_z.values() - f_slice.values()));
    row.boundary_violation = boundary_sign_defect(u.states[m], z);
    acc += row.pairing_gap;
    rep.rows.push_back(row);
  }
  rep.mean_pairing_gap = acc / static_cast<double>(rep.rows.size());
  return rep;
}

EntropyReport build_entropy_report(const Trajectory& u, const SourceTerm& f,
                                   const TestPair& pair, const std::vector<double>& ks) {
  EntropyReport rep;
  rep.max_entropy_residual = 0.0;
  rep.max_energy_residual = 0.0;
  for (double k : ks) {
    const std::vector<double> ent = entropy_residual(u, f, pair, k);
    const ResidualSeries energy = energy_identity_residual(u, f, k);
    const VectorFieldReport vf = vector_field_report(u, f, k);
    for (std::size_t m = 0; m + 1 < u.times.size(); ++m) {
      EntropyReportRow row;
      row.t = u.times[m + 1];
      row.k = k;
      row.entropy_residual = ent[m];
      row.energy_residual = energy.per_step[m];
      row.pairing_gap = vf.rows[m].pairing_gap;
      row.flux_residual_norm = vf.rows[m].flux_residual_norm;
      row.boundary_violation = vf.rows[m].boundary_violation;
      row.zbound_excess = vf.rows[m].zbound_excess;
      rep.rows.push_back(row);
      rep.max_entropy_residual = std::max(rep.max_entropy_residual, ent[m]);
      rep.max_energy_residual = std::max(rep.max_energy_residual, energy.per_step[m]);
    }
  }
  return rep;
}

}  // namespace tvf
