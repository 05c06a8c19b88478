#include "tvflow/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <limits>

namespace tvf {

namespace detail {
void gradient_into(const Grid2D& g, const Array& u, Array& gx, Array& gy);
void lower_gradient_into(const Grid2D& g, const Array& u, Array& gb);
void divergence_into(const Grid2D& g, const Array& px, const Array& py, const Array& pb,
                     Array& out);
double tv_values(const Grid2D& g, const Array& gx, const Array& gy, const Array& gb,
                 const TVOptions& opts);
}  // namespace detail

// ---------------------------------------------------------------------------
// SourceTerm

SourceTerm::SourceTerm(std::vector<double> piece_ends, std::vector<ScalarField> pieces)
    : ends_(std::move(piece_ends)), pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw std::invalid_argument("SourceTerm: at least one piece required");
  if (ends_.size() != pieces_.size())
    throw std::invalid_argument("SourceTerm: one end time per piece required");
  double prev = 0.0;
  for (double e : ends_) {
    if (!(e > prev)) throw std::invalid_argument("SourceTerm: piece end times must increase");
    prev = e;
  }
  for (const ScalarField& p : pieces_)
    if (!p.grid().same_layout(pieces_[0].grid()))
      throw std::invalid_argument("SourceTerm: pieces live on different grids");
  ends_.back() = std::numeric_limits<double>::infinity();
}

SourceTerm SourceTerm::zero(GridPtr grid) {
  return constant(ScalarField::zeros(std::move(grid)));
}

SourceTerm SourceTerm::constant(ScalarField f) {
  std::vector<ScalarField> pieces;
  pieces.push_back(std::move(f));
  return SourceTerm({1.0}, std::move(pieces));
}

ScalarField SourceTerm::average(double t0, double t1) const {
  if (!(t1 > t0)) throw std::invalid_argument("SourceTerm::average: empty interval");
  Array acc = Array::Zero(pieces_[0].values().size());
  double lo = t0;
  for (std::size_t i = 0; i < pieces_.size() && lo < t1; ++i) {
    const double hi = std::min(ends_[i], t1);
    if (hi > lo) {
      acc += pieces_[i].values() * (hi - lo);
      lo = hi;
    }
  }
  return ScalarField(pieces_[0].grid_ptr(), acc / (t1 - t0));
}

double SourceTerm::sup_in_time() const {
  double s = 0.0;
  for (const ScalarField& p : pieces_) s = std::max(s, sup_norm(p));
  return s;
}

// ---------------------------------------------------------------------------
// rof_step: projected dual ascent (Chambolle-type) for the implicit TV step.

RofResult rof_step(const ScalarField& u, const ScalarField& f_slice, double tau,
                   const InnerOptions& inner, const VectorField* warm) {
  if (!(tau > 0.0)) throw std::invalid_argument("rof_step: tau must be > 0");
  if (!u.grid().same_layout(f_slice.grid()))
    throw std::invalid_argument("rof_step: u and f_slice live on different grids");
  if (inner.max_iters < 1) throw std::invalid_argument("rof_step: max_iters must be >= 1");
  if (!(inner.gap_tol > 0.0)) throw std::invalid_argument("rof_step: gap_tol must be > 0");

  const Grid2D& g = u.grid();
  const double h = g.h();
  const double area = g.cell_area();
  const double sigma = inner.dual_step ? *inner.dual_step : h * h / (8.0 * tau);
  if (!(sigma > 0.0)) throw std::invalid_argument("rof_step: dual_step must be > 0");

  const Array w = u.values() + tau * f_slice.values();
  const int n = g.inside_count();
  const int nb = g.lower_face_count();
  Array px = Array::Zero(n), py = Array::Zero(n), pb = Array::Zero(nb);
  if (warm) {
    if (!warm->grid().same_layout(g))
      throw std::invalid_argument("rof_step: warm start lives on a different grid");
    px = warm->x();
    py = warm->y();
    pb = warm->lower();
  }

  Array d(n), v(n), gx(n), gy(n), gb(nb), scale(n);
  const TVOptions iso{};

  // Ball gauge masks: 1 where the slot is an interior difference (Euclidean
  // pair), 0 where it is a ghost jump (independent clamp).
  Array mx(n), my(n);
  for (int c = 0; c < n; ++c) {
    mx[c] = g.neighbor(c, Dir::East) >= 0 ? 1.0 : 0.0;
    my[c] = g.neighbor(c, Dir::North) >= 0 ? 1.0 : 0.0;
  }
  const Array nmx = 1.0 - mx, nmy = 1.0 - my;

  // Relative duality gap of the current dual iterate; fills d and v.
  auto rel_gap = [&](double& primal_out) {
    detail::divergence_into(g, px, py, pb, d);
    v = w + tau * d;
    detail::gradient_into(g, v, gx, gy);
    detail::lower_gradient_into(g, v, gb);
    const double primal =
        detail::tv_values(g, gx, gy, gb, iso) + (v - w).square().sum() * area / (2.0 * tau);
    const double dual = -(d * w).sum() * area - 0.5 * tau * d.square().sum() * area;
    primal_out = primal;
    return (primal - dual) / std::max(1.0, std::abs(primal));
  };

  // Accelerated projected ascent with adaptive restart. The extrapolated
  // point (qx, qy, qb) drives the gradient step; (px, py, pb) stays feasible,
  // so the gap certificate below is always evaluated at a unit-ball field.
  // Cell pairs project onto the Euclidean ball, lower-face components clamp.
  Array qx = px, qy = py, qb = pb, px_prev = px, py_prev = py, pb_prev = pb;
  double theta = 1.0;
  double primal = 0.0;
  double gap = rel_gap(primal);
  int it = 0;
  constexpr int kCheckEvery = 8;
  while (gap > inner.gap_tol && it < inner.max_iters) {
    const int burst = std::min(kCheckEvery, inner.max_iters - it);
    for (int b = 0; b < burst; ++b) {
      detail::divergence_into(g, qx, qy, qb, d);
      v = w + tau * d;
      detail::gradient_into(g, v, gx, gy);
      detail::lower_gradient_into(g, v, gb);
      px_prev.swap(px);
      py_prev.swap(py);
      pb_prev.swap(pb);
      px = qx + sigma * gx;
      py = qy + sigma * gy;
      pb = (qb + sigma * gb).max(-1.0).min(1.0);
      scale = (mx * px.square() + my * py.square()).max(1.0).sqrt();
      px = mx * (px / scale) + nmx * px.max(-1.0).min(1.0);
      py = my * (py / scale) + nmy * py.max(-1.0).min(1.0);
      // Restart the momentum when it points against the latest progress.
      if (((qx - px) * (px - px_prev) + (qy - py) * (py - py_prev)).sum() +
              ((qb - pb) * (pb - pb_prev)).sum() >
          0.0)
        theta = 1.0;
      const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
      const double beta = (theta - 1.0) / theta_next;
      theta = theta_next;
      qx = px + beta * (px - px_prev);
      qy = py + beta * (py - py_prev);
      qb = pb + beta * (pb - pb_prev);
    }
    it += burst;
    gap = rel_gap(primal);  // recomputes d and v from the feasible iterate
  }

  // d and v are in sync with the final dual; u_next = w + tau div z exactly.
  ScalarField u_next(u.grid_ptr(), v);
  VectorField z(u.grid_ptr(), std::move(px), std::move(py), std::move(pb), Staggering::Cell,
                true);
  return {std::move(u_next), std::move(z), gap, it, gap <= inner.gap_tol};
}

// ---------------------------------------------------------------------------
// plap_step: lagged-diffusivity linearization of the p-Laplacian step.

PlapResult plap_step(const ScalarField& u, const ScalarField& f_slice, double tau, double p,
                     double eps_reg) {
  if (!(tau > 0.0)) throw std::invalid_argument("plap_step: tau must be > 0");
  if (!(p > 1.0 && p <= 2.0)) throw std::invalid_argument("plap_step: p must be in (1, 2]");
  if (!(eps_reg > 0.0)) throw std::invalid_argument("plap_step: eps_reg must be > 0");
  if (!u.grid().same_layout(f_slice.grid()))
    throw std::invalid_argument("plap_step: u and f_slice live on different grids");

  const Grid2D& g = u.grid();
  const int n = g.inside_count();
  const double r = tau / (g.h() * g.h());

  Array gx(n), gy(n);
  detail::gradient_into(g, u.values(), gx, gy);
  const Array a = (gx.square() + gy.square() + eps_reg * eps_reg).pow((p - 2.0) / 2.0);

  // I - tau div(a grad .) as a 5-point SPD stencil; west/south legs use the
  // neighbor's coefficient so the matrix matches the gradient adjoint. Legs
  // into the ghost region keep the same rule: the ghost neighbor's lagged
  // gradient is the single jump u[c]/h, its value stays pinned at zero.
  const double inv_h2 = 1.0 / (g.h() * g.h());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * 5);
  for (int c = 0; c < n; ++c) {
    double diag = 1.0 + 2.0 * r * a[c];
    const int e = g.neighbor(c, Dir::East);
    const int t = g.neighbor(c, Dir::North);
    const int wn = g.neighbor(c, Dir::West);
    const int s = g.neighbor(c, Dir::South);
    const double a_ghost =
        wn < 0 || s < 0
            ? std::pow(u[c] * u[c] * inv_h2 + eps_reg * eps_reg, (p - 2.0) / 2.0)
            : 0.0;
    if (e >= 0) trip.emplace_back(c, e, -r * a[c]);
    if (t >= 0) trip.emplace_back(c, t, -r * a[c]);
    if (wn >= 0) {
      trip.emplace_back(c, wn, -r * a[wn]);
      diag += r * a[wn];
    } else {
      diag += r * a_ghost;
    }
    if (s >= 0) {
      trip.emplace_back(c, s, -r * a[s]);
      diag += r * a[s];
    } else {
      diag += r * a_ghost;
    }
    trip.emplace_back(c, c, diag);
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());

  const Eigen::VectorXd rhs = (u.values() + tau * f_slice.values()).matrix();
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(1e-8);
  cg.setMaxIterations(20000);
  cg.compute(A);
  const Eigen::VectorXd x = cg.solve(rhs);
  const bool ok = cg.info() == Eigen::Success;
  return {ScalarField(u.grid_ptr(), x.array()), static_cast<int>(cg.iterations()), ok};
}

// ---------------------------------------------------------------------------
// Data ladder

Ladder data_ladder(const SourceTerm& f, const ScalarField& u0, int n) {
  if (n < 1) throw std::invalid_argument("data_ladder: level must be >= 1");
  if (!f.grid_ptr()->same_layout(u0.grid()))
    throw std::invalid_argument("data_ladder: f and u0 live on different grids");
  const double level = static_cast<double>(n);
  std::vector<ScalarField> pieces;
  pieces.reserve(f.pieces().size());
  for (const ScalarField& piece : f.pieces()) pieces.push_back(truncate(piece, level));
  SourceTerm fn(f.piece_ends(), std::move(pieces));
  ScalarField u0n = jacobi_smooth(truncate(u0, level));
  return {std::move(fn), std::move(u0n), n};
}

int default_ladder_level(const SourceTerm& f, const ScalarField& u0, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("default_ladder_level: T must be > 0");
  double f_l1 = 0.0;
  double lo = 0.0;
  for (std::size_t i = 0; i < f.pieces().size(); ++i) {
    const double hi = std::min(f.piece_ends()[i], T);
    if (hi > lo) f_l1 += (hi - lo) * l1_norm(f.pieces()[i]);
    lo = hi;
  }
  const double target = 1e-3 * (f_l1 + l1_norm(u0));
  // Only the truncation part counts here: the one grid-scale smoothing pass
  // applied to u0 is h-consistent on its own and would put a floor under the
  // error that no level can beat.
  for (int n = 1; n <= (1 << 20); n *= 2) {
    const double level = static_cast<double>(n);
    double err = l1_norm(tail(u0, level));
    lo = 0.0;
    for (std::size_t i = 0; i < f.pieces().size(); ++i) {
      const double hi = std::min(f.piece_ends()[i], T);
      if (hi > lo) err += (hi - lo) * l1_norm(tail(f.pieces()[i], level));
      lo = hi;
    }
    if (err <= target) return n;
  }
  return 1 << 20;
}

// ---------------------------------------------------------------------------
// Trajectory and evolve

const ScalarField& Trajectory::state_at(double t) const {
  if (times.empty()) throw std::logic_error("Trajectory::state_at: empty trajectory");
  std::size_t k = 0;
  while (k + 1 < times.size() && times[k + 1] <= t + 1e-12) ++k;
  return states[k];
}

void SolveConfig::validate() const {
  if (!(T > 0.0)) throw std::invalid_argument("SolveConfig: T must be > 0");
  if (!(tau > 0.0) || !(tau < T)) throw std::invalid_argument("SolveConfig: need 0 < tau < T");
  const double steps = T / tau;
  if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
    throw std::invalid_argument("SolveConfig: tau must divide T");
  if (!f.grid_ptr()->same_layout(u0.grid()))
    throw std::invalid_argument("SolveConfig: f and u0 live on different grids");
  if (ladder_level && *ladder_level < 1)
    throw std::invalid_argument("SolveConfig: ladder level must be >= 1");
  for (double s : snapshots)
    if (s < -1e-12 || s > T + 1e-12)
      throw std::invalid_argument("SolveConfig: snapshot times must lie in [0, T]");
}

std::vector<double> every_step_snapshots(double T, double tau) {
  const int m = static_cast<int>(std::round(T / tau));
  std::vector<double> out(m + 1);
  for (int i = 0; i <= m; ++i) out[i] = i * tau;
  return out;
}

namespace {

std::vector<int> snapshot_steps(const std::vector<double>& snapshots, double tau, int m_total) {
  std::vector<int> steps;
  steps.reserve(snapshots.size());
  for (double s : snapshots) {
    int m = static_cast<int>(std::round(s / tau));
    m = std::clamp(m, 0, m_total);
    steps.push_back(m);
  }
  std::sort(steps.begin(), steps.end());
  steps.erase(std::unique(steps.begin(), steps.end()), steps.end());
  return steps;
}

}  // namespace

Trajectory evolve(const SolveConfig& config) {
  config.validate();
  Ladder lad = config.ladder_level
                   ? data_ladder(config.f, config.u0, *config.ladder_level)
                   : Ladder{config.f, config.u0, std::nullopt};

  const double tau = config.tau;
  const int m_total = static_cast<int>(std::round(config.T / tau));
  const std::vector<int> snaps = snapshot_steps(config.snapshots, tau, m_total);

  Trajectory traj;
  traj.grid = config.u0.grid_ptr();
  traj.ladder = lad;
  std::size_t next_snap = 0;
  auto record = [&](int step, const ScalarField& u, const VectorField& z) {
    if (next_snap < snaps.size() && snaps[next_snap] == step) {
      traj.times.push_back(step * tau);
      traj.states.push_back(u);
      traj.duals.push_back(z);
      ++next_snap;
    }
  };

  ScalarField u = lad.u0;
  VectorField z = VectorField::zeros(traj.grid);
  record(0, u, z);
  for (int m = 1; m <= m_total; ++m) {
    const ScalarField f_slice = lad.f.average((m - 1) * tau, m * tau);
    RofResult res = rof_step(u, f_slice, tau, config.inner, &z);
    traj.step_log.push_back({m, m * tau, res.iters, res.gap, res.converged});
    if (!res.converged)
      throw SolverFailure("evolve: inner solve missed its gap target at step " +
                              std::to_string(m),
                          m, m * tau);
    u = std::move(res.u_next);
    z = std::move(res.z);
    record(m, u, z);
  }
  return traj;
}

ContinuationResult p_continuation(const SolveConfig& config, const std::vector<double>& schedule) {
  config.validate();
  if (schedule.empty()) throw std::invalid_argument("p_continuation: empty schedule");
  for (std::size_t i = 0; i + 1 < schedule.size(); ++i)
    if (!(schedule[i] > schedule[i + 1]))
      throw std::invalid_argument("p_continuation: schedule must decrease");
  if (!(schedule.back() <= 1.05))
    throw std::invalid_argument("p_continuation: schedule must end at p <= 1.05");

  Ladder lad = config.ladder_level
                   ? data_ladder(config.f, config.u0, *config.ladder_level)
                   : Ladder{config.f, config.u0, std::nullopt};
  const double tau = config.tau;
  const double eps_reg = config.u0.grid().h();
  const int m_total = static_cast<int>(std::round(config.T / tau));
  const std::vector<int> snaps = snapshot_steps(config.snapshots, tau, m_total);

  ContinuationResult out;
  for (double p : schedule) {
    Trajectory traj;
    traj.grid = config.u0.grid_ptr();
    traj.ladder = lad;
    std::size_t next_snap = 0;
    auto record = [&](int step, const ScalarField& u) {
      if (next_snap < snaps.size() && snaps[next_snap] == step) {
        traj.times.push_back(step * tau);
        traj.states.push_back(u);
        ++next_snap;
      }
    };
    ScalarField u = lad.u0;
    record(0, u);
    for (int m = 1; m <= m_total; ++m) {
      const ScalarField f_slice = lad.f.average((m - 1) * tau, m * tau);
      PlapResult res = plap_step(u, f_slice, tau, p, eps_reg);
      traj.step_log.push_back({m, m * tau, res.cg_iters, 0.0, res.converged});
      if (!res.converged)
        throw SolverFailure("p_continuation: linear solve stagnated at step " +
                                std::to_string(m),
                            m, m * tau);
      u = std::move(res.u_next);
      record(m, u);
    }
    if (!out.p_values.empty()) out.distances.push_back(max_l1_distance(out.trajectory, traj));
    out.p_values.push_back(p);
    out.trajectory = std::move(traj);
  }
  return out;
}

double max_l1_distance(const Trajectory& a, const Trajectory& b) {
  if (a.times.size() != b.times.size())
    throw std::invalid_argument("max_l1_distance: trajectories have different time grids");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.times.size(); ++i) {
    if (std::abs(a.times[i] - b.times[i]) > 1e-12)
      throw std::invalid_argument("max_l1_distance: trajectories have different time grids");
    worst = std::max(worst, l1_norm(ScalarField(a.grid, a.states[i].values() -
                                                            b.states[i].values())));
  }
  return worst;
}

}  // namespace tvf
