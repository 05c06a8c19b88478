#include <cmath>
#include <vector>

#include "doctest.h"
#include "tvflow/calculus.hpp"
#include "tvflow/entropy.hpp"
#include "tvflow/field.hpp"
#include "tvflow/solver.hpp"
#include "tvflow/theorems.hpp"

using namespace tvf;

namespace {

GridPtr unit_grid(int n) { return make_grid(n, n, 1.0 / n); }

SolveConfig small_config(ScalarField u0, SourceTerm f) {
  SolveConfig cfg{std::move(u0), std::move(f), 0.01, 2e-3,
                  every_step_snapshots(0.01, 2e-3), std::nullopt, InnerOptions{}};
  // Tight enough that generated duals saturate the pairing within the default
  // admissibility tolerances.
  cfg.inner.gap_tol = 1e-9;
  cfg.inner.max_iters = 400000;
  return cfg;
}

}  // namespace

TEST_CASE("test pairs: generation ignores the ladder and keeps the time grid") {
  const GridPtr g = unit_grid(16);
  SolveConfig base = small_config(make_field(g, Disk{0.5, 0.5, 0.3, 1.0}), SourceTerm::zero(g));
  base.ladder_level = 4;
  const TestPair pair =
      make_test_pair(SourceTerm::zero(g), make_field(g, Disk{0.4, 0.5, 0.2, 0.5}), base);
  REQUIRE(pair.phi.ladder.has_value());
  CHECK_FALSE(pair.phi.ladder->level.has_value());
  CHECK(pair.phi.times.size() == 6);
  CHECK(pair.phi.duals.size() == 6);
  CHECK(validate_test_pair(pair));
}

TEST_CASE("test pairs: the zero pair is admissible and its flow is trivial") {
  const GridPtr g = unit_grid(16);
  const SolveConfig base = small_config(make_field(g, Disk{0.5, 0.5, 0.3, 1.0}),
                                        SourceTerm::zero(g));
  const TestPair zero = make_test_pair(SourceTerm::zero(g), ScalarField::zeros(g), base);
  CHECK(validate_test_pair(zero));
  for (const ScalarField& s : zero.phi.states) CHECK(sup_norm(s) == 0.0);
  for (const VectorField& z : zero.phi.duals) CHECK(z.max_norm() == 0.0);
}

TEST_CASE("test pairs: corrupted duals are rejected") {
  const GridPtr g = unit_grid(16);
  const SolveConfig base = small_config(make_field(g, Disk{0.5, 0.5, 0.3, 1.0}),
                                        SourceTerm::zero(g));
  const TestPair good =
      make_test_pair(SourceTerm::zero(g), make_field(g, Disk{0.5, 0.5, 0.25, 0.8}), base);
  REQUIRE(validate_test_pair(good));

  {
    TestPair bad = good;
    bad.phi.duals[1] = VectorField(g, 1.5 * bad.phi.duals[1].x(), 1.5 * bad.phi.duals[1].y());
    CHECK_FALSE(validate_test_pair(bad));  // unit-ball excess
  }
  {
    TestPair bad = good;
    bad.phi.duals[1] = VectorField::zeros(g);
    CHECK_FALSE(validate_test_pair(bad));  // pairing no longer saturates
  }
  {
    TestPair bad = good;
    bad.phi.duals.clear();
    CHECK_THROWS_AS(validate_test_pair(bad), std::invalid_argument);
  }
}

TEST_CASE("entropy residual: self-comparison vanishes identically") {
  const GridPtr g = unit_grid(16);
  const SourceTerm f = SourceTerm::constant(make_field(g, Disk{0.6, 0.6, 0.15, 0.2}));
  const SolveConfig base = small_config(make_field(g, Disk{0.5, 0.5, 0.3, 1.0}), f);
  const Trajectory u = evolve(base);
  const TestPair self{u, f, base.u0};
  for (double k : {0.25, 1.0, 4.0})
    for (double r : entropy_residual(u, f, self, k)) CHECK(r == 0.0);
}

TEST_CASE("entropy residual: nonpositive against flow-generated pairs") {
  const GridPtr g = unit_grid(32);
  const SourceTerm f = SourceTerm::zero(g);
  const SolveConfig base = small_config(make_field(g, Disk{0.5, 0.5, 0.3, 1.0}), f);
  const Trajectory u = evolve(base);

  std::vector<TestPair> pairs;
  pairs.push_back(make_test_pair(f, ScalarField::zeros(g), base));
  pairs.push_back(make_test_pair(f, ScalarField::constant(g, 0.3), base));
  pairs.push_back(make_test_pair(f, make_field(g, Disk{0.45, 0.55, 0.2, 0.7}), base));

  const double tol = entropy_tolerance_constant() * (g->h() + base.tau);
  for (const TestPair& pair : pairs)
    for (double k : {0.25, 1.0, 4.0})
      for (double r : entropy_residual(u, f, pair, k)) {
        CHECK(r <= tol);
        CHECK(r <= 1e-8);  // strict satisfaction on this geometry
      }
}

TEST_CASE("entropy residual: argument guards") {
  const GridPtr g = unit_grid(16);
  const SourceTerm f = SourceTerm::zero(g);
  const SolveConfig base = small_config(make_field(g, Disk{0.5, 0.5, 0.3, 1.0}), f);
  const Trajectory u = evolve(base);
  const TestPair pair = make_test_pair(f, ScalarField::zeros(g), base);

  CHECK_THROWS_AS(entropy_residual(u, f, pair, 0.0), std::invalid_argument);
  {
    SolveConfig other = base;
    other.snapshots = {0.0, 0.01};
    const TestPair coarse = make_test_pair(f, ScalarField::zeros(g), other);
    CHECK_THROWS_AS(entropy_residual(u, f, coarse, 1.0), std::invalid_argument);
  }
  {
    const GridPtr g2 = unit_grid(17);
    const SolveConfig base2 =
        small_config(make_field(g2, Disk{0.5, 0.5, 0.3, 1.0}), SourceTerm::zero(g2));
    const TestPair alien = make_test_pair(SourceTerm::zero(g2), ScalarField::zeros(g2), base2);
    CHECK_THROWS_AS(entropy_residual(u, f, alien, 1.0), std::invalid_argument);
  }
}

TEST_CASE("energy identity: closed form above the solution range") {
  // For k above sup|u| the truncation is inactive and the per-step residual
  // must equal |tv(u_m) - pairing(z_m, u_m) - (dt/2) |u'|^2|, a consequence of
  // the exact flux identity of each step.
  const GridPtr g = unit_grid(32);
  const SourceTerm f = SourceTerm::constant(make_field(g, Disk{0.6, 0.6, 0.15, 0.2}));
  const SolveConfig base = small_config(make_field(g, Disk{0.5, 0.5, 0.3, 1.0}), f);
  const Trajectory u = evolve(base);

  const ResidualSeries series = energy_identity_residual(u, f, 10.0);
  REQUIRE(series.per_step.size() == u.times.size() - 1);
  double mean = 0.0;
  for (std::size_t m = 1; m < u.times.size(); ++m) {
    const double dt = u.times[m] - u.times[m - 1];
    const ScalarField rate(g, (u.states[m].values() - u.states[m - 1].values()) / dt);
    const double expect =
        std::abs(tv(u.states[m]) - pairing(u.duals[m], u.states[m]) -
                 0.5 * dt * inner(rate, rate));
    CHECK(std::abs(series.per_step[m - 1] - expect) <= 1e-11);
    mean += series.per_step[m - 1];
  }
  mean /= static_cast<double>(series.per_step.size());
  CHECK(series.time_averaged == doctest::Approx(mean).epsilon(1e-12));
  CHECK_THROWS_AS(energy_identity_residual(u, f, -1.0), std::invalid_argument);
}

TEST_CASE("chain rule: closed form above the solution range and tau scaling") {
  const GridPtr g = unit_grid(32);
  const SourceTerm f = SourceTerm::zero(g);
  const SolveConfig fine = small_config(make_field(g, Disk{0.5, 0.5, 0.3, 1.0}), f);
  SolveConfig coarse = fine;
  coarse.tau = 5e-3;
  coarse.snapshots = every_step_snapshots(coarse.T, coarse.tau);
  const Trajectory uf = evolve(fine);
  const Trajectory uc = evolve(coarse);

  // |d/dt int jk - int tk u'| = (dt/2) |u'|^2 exactly when k >= sup|u|.
  const ResidualSeries wide = chain_rule_residual(uf, 10.0);
  for (std::size_t m = 1; m < uf.times.size(); ++m) {
    const double dt = uf.times[m] - uf.times[m - 1];
    const ScalarField rate(g, (uf.states[m].values() - uf.states[m - 1].values()) / dt);
    const double expect = 0.5 * dt * inner(rate, rate);
    CHECK(std::abs(wide.per_step[m - 1] - expect) <= 1e-11);
  }

  // Halving tau roughly halves the residual; truncation active at k = 0.5.
  const double ratio = chain_rule_residual(uc, 0.5).time_averaged /
                       chain_rule_residual(uf, 0.5).time_averaged;
  CHECK(ratio >= 1.5);
  CHECK(ratio <= 3.5);
  CHECK_THROWS_AS(chain_rule_residual(uf, 0.0), std::invalid_argument);
}

TEST_CASE("vector field report: certificates of a stored run") {
  const GridPtr g = unit_grid(32);
  const SourceTerm f = SourceTerm::constant(make_field(g, Disk{0.6, 0.6, 0.15, 0.2}));
  const SolveConfig base = small_config(make_field(g, Disk{0.5, 0.5, 0.3, 1.0}), f);
  const Trajectory u = evolve(base);

  const VectorFieldReport rep = vector_field_report(u, f, 2.0);
  REQUIRE(rep.rows.size() == u.times.size() - 1);
  double acc = 0.0;
  for (const VectorFieldRow& row : rep.rows) {
    CHECK(row.zbound_excess <= 1e-10);
    CHECK(row.pairing_gap >= -1e-12);
    CHECK(row.flux_residual_norm <= 1e-12);
    CHECK(row.boundary_violation == 0.0);  // the datum vanishes near the boundary
    acc += row.pairing_gap;
  }
  CHECK(rep.mean_pairing_gap ==
        doctest::Approx(acc / static_cast<double>(rep.rows.size())).epsilon(1e-12));
  CHECK_THROWS_AS(vector_field_report(u, f, 0.0), std::invalid_argument);

  Trajectory stripped = u;
  stripped.duals.clear();
  CHECK_THROWS_AS(vector_field_report(stripped, f, 1.0), std::invalid_argument);
}

TEST_CASE("entropy report: aggregates per level and per step") {
  const GridPtr g = unit_grid(16);
  const SourceTerm f = SourceTerm::zero(g);
  const SolveConfig base = small_config(make_field(g, Disk{0.5, 0.5, 0.3, 1.0}), f);
  const Trajectory u = evolve(base);
  const TestPair pair = make_test_pair(f, ScalarField::constant(g, 0.2), base);

  const std::vector<double> ks{0.25, 1.0};
  const EntropyReport rep = build_entropy_report(u, f, pair, ks);
  REQUIRE(rep.rows.size() == ks.size() * (u.times.size() - 1));
  double max_ent = 0.0;
  double max_energy = 0.0;
  for (const EntropyReportRow& row : rep.rows) {
    max_ent = std::max(max_ent, row.entropy_residual);
    max_energy = std::max(max_energy, row.energy_residual);
    CHECK((row.k == 0.25 || row.k == 1.0));
    CHECK(row.t > 0.0);
  }
  CHECK(rep.max_entropy_residual == max_ent);
  CHECK(rep.max_energy_residual == max_energy);
}
