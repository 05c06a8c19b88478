#include "tvflow/theorems.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <initializer_list>
#include <limits>

namespace tvf {

namespace {

// Calibrated on the reference disk runs (see decision record); frozen here.
constexpr double kRegularitySlack = 0.5;   // C_reg
constexpr double kUniquenessSlack = 2.0;   // C_uni
constexpr double kEntropySlack = 2.0;      // C_tol

struct Digest {
  std::uint64_t state = 1469598103934665603ull;
  void add(double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    for (int i = 0; i < 8; ++i) {
      state ^= (bits >> (8 * i)) & 0xffu;
      state *= 1099511628211ull;
    }
  }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(state));
    return buf;
  }
};

std::string digest_config(const SolveConfig& cfg, std::initializer_list<double> extra) {
  Digest d;
  d.add(static_cast<double>(cfg.u0.grid().nx()));
  d.add(static_cast<double>(cfg.u0.grid().ny()));
  d.add(cfg.u0.grid().h());
  d.add(cfg.T);
  d.add(cfg.tau);
  d.add(cfg.u0.values().sum());
  for (double v : extra) d.add(v);
  return d.hex();
}

SolveConfig with_data(const SolveConfig& base, const FlowData& data) {
  SolveConfig cfg = base;
  cfg.u0 = data.u0;
  cfg.f = data.f;
  return cfg;
}

double f_l1_up_to(const SourceTerm& f, double t) {
  double acc = 0.0;
  double lo = 0.0;
  for (std::size_t i = 0; i < f.pieces().size() && lo < t; ++i) {
    const double hi = std::min(f.piece_ends()[i], t);
    if (hi > lo) acc += (hi - lo) * l1_norm(f.pieces()[i]);
    lo = hi;
  }
  return acc;
}

}  // namespace

double regularity_slack_constant() { return kRegularitySlack; }
double uniqueness_constant() { return kUniquenessSlack; }
double entropy_tolerance_constant() { return kEntropySlack; }

DecayParams decay_exponents(double N, double r0, double r) {
  if (!(N >= 2.0)) throw std::invalid_argument("decay_exponents: need N >= 2");
  if (!(r > 1.0 && r < r0 && r0 < 2.0))
    throw std::invalid_argument("decay_exponents: need 1 < r < r0 < 2");
  if (!(N > r0)) throw std::invalid_argument("decay_exponents: need N > r0");
  DecayParams p{N, r0, r, 0.0, 0.0, 0.0};
  p.h0 = r0 * (N - r) / (r * (N - r0));
  p.h1 = N * (r0 - r) / (r * (N - r0));
  p.C = std::pow(N * (r0 - r) / (N - r0), p.h1);
  return p;
}

ExperimentReport decay_experiment(const FlowData& data, const SolveConfig& base, double r0,
                                  double r, double tol) {
  const DecayParams params = decay_exponents(2.0, r0, r);
  SolveConfig cfg = with_data(base, data);
  const Trajectory traj = evolve(cfg);
  const ScalarField& u0 = traj.ladder->u0;
  const double init = lr_norm(u0, r0);
  const double t_min = 2.0 * cfg.tau;

  ExperimentReport rep;
  rep.name = "decay";
  rep.inputs_digest = digest_config(cfg, {r0, r});
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    if (t < t_min) continue;
    const double lhs = lr_norm(traj.states[i], r);
    const double rhs = (1.0 + tol) * params.C * std::pow(init, params.h0) / std::pow(t, params.h1);
    rep.table.push_back({t, lhs, rhs, rhs - lhs});
    rep.worst_margin = std::min(rep.worst_margin, rhs - lhs);
  }
  if (rep.table.empty()) {
    rep.pass = init == 0.0;
    rep.worst_margin = 0.0;
    rep.detail = "no snapshots at or after t_min";
    return rep;
  }
  rep.pass = rep.worst_margin >= 0.0;
  return rep;
}

ExperimentReport comparison_experiment(const FlowData& lower, const FlowData& upper,
                                       const SolveConfig& base) {
  if ((lower.u0.values() > upper.u0.values()).any())
    throw std::invalid_argument("comparison_experiment: initial data are not ordered");
  if (lower.f.pieces().size() != upper.f.pieces().size())
    throw std::invalid_argument("comparison_experiment: source pieces mismatch");
  for (std::size_t i = 0; i < lower.f.pieces().size(); ++i)
    if ((lower.f.pieces()[i].values() > upper.f.pieces()[i].values()).any())
      throw std::invalid_argument("comparison_experiment: sources are not ordered");

  const Trajectory t1 = evolve(with_data(base, lower));
  const Trajectory t2 = evolve(with_data(base, upper));
  const double scale =
      std::max({sup_norm(lower.u0), sup_norm(upper.u0), base.T * lower.f.sup_in_time(),
                base.T * upper.f.sup_in_time()});
  const double tol = 1e-6 * scale;

  ExperimentReport rep;
  rep.name = "comparison";
  rep.inputs_digest = digest_config(with_data(base, lower), {scale});
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t1.times.size(); ++i) {
    const double overshoot = (t1.states[i].values() - t2.states[i].values()).maxCoeff();
    rep.table.push_back({t1.times[i], overshoot, tol, tol - overshoot});
    rep.worst_margin = std::min(rep.worst_margin, tol - overshoot);
  }
  rep.pass = rep.worst_margin >= 0.0;
  return rep;
}

ExperimentReport contraction_experiment(const FlowData& a, const FlowData& b,
                                        const SolveConfig& base) {
  const Trajectory t1 = evolve(with_data(base, a));
  const Trajectory t2 = evolve(with_data(base, b));
  // The estimate applies to the data the scheme actually consumed.
  const double u0_dist = l1_norm(
      ScalarField(t1.grid, t1.ladder->u0.values() - t2.ladder->u0.values()));
  double f_dist = 0.0;
  const int steps = static_cast<int>(std::round(base.T / base.tau));
  for (int m = 1; m <= steps; ++m) {
    const ScalarField fa = t1.ladder->f.average((m - 1) * base.tau, m * base.tau);
    const ScalarField fb = t2.ladder->f.average((m - 1) * base.tau, m * base.tau);
    f_dist += base.tau * l1_norm(ScalarField(t1.grid, fa.values() - fb.values()));
  }
  const double rhs = (u0_dist + f_dist) * (1.0 + 1e-6);

  ExperimentReport rep;
  rep.name = "contraction";
  rep.inputs_digest = digest_config(with_data(base, a), {u0_dist, f_dist});
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t1.times.size(); ++i) {
    const double lhs =
        l1_norm(ScalarField(t1.grid, t1.states[i].values() - t2.states[i].values()));
    rep.table.push_back({t1.times[i], lhs, rhs, rhs - lhs});
    rep.worst_margin = std::min(rep.worst_margin, rhs - lhs);
  }
  rep.pass = rep.worst_margin >= 0.0;
  return rep;
}

ExperimentReport l1_bound_check(const Trajectory& traj) {
  if (!traj.ladder) throw std::invalid_argument("l1_bound_check: trajectory has no data record");
  const double init = l1_norm(traj.ladder->u0);
  ExperimentReport rep;
  rep.name = "l1_bound";
  rep.inputs_digest = "-";
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double lhs = l1_norm(traj.states[i]);
    const double rhs = (init + f_l1_up_to(traj.ladder->f, traj.times[i])) * (1.0 + 1e-6);
    rep.table.push_back({traj.times[i], lhs, rhs, rhs - lhs});
    rep.worst_margin = std::min(rep.worst_margin, rhs - lhs);
  }
  rep.pass = rep.worst_margin >= 0.0;
  return rep;
}

ExperimentReport boundedness_check(const Trajectory& traj) {
  if (!traj.ladder) throw std::invalid_argument("boundedness_check: trajectory has no data record");
  const double bound = sup_norm(traj.ladder->u0) +
                       traj.times.back() * traj.ladder->f.sup_in_time() + 1e-8;
  ExperimentReport rep;
  rep.name = "boundedness";
  rep.inputs_digest = "-";
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double lhs = sup_norm(traj.states[i]);
    rep.table.push_back({traj.times[i], lhs, bound, bound - lhs});
    rep.worst_margin = std::min(rep.worst_margin, bound - lhs);
  }
  rep.pass = rep.worst_margin >= 0.0;
  return rep;
}

ExperimentReport regularity_cauchy_experiment(const FlowData& data, const SolveConfig& base,
                                              double r, int n, int m) {
  if (n == m) throw std::invalid_argument("regularity_cauchy_experiment: levels must differ");
  SolveConfig cfg_n = with_data(base, data);
  cfg_n.ladder_level = n;
  SolveConfig cfg_m = with_data(base, data);
  cfg_m.ladder_level = m;
  const Trajectory tn = evolve(cfg_n);
  const Trajectory tm = evolve(cfg_m);

  const double init_dist =
      lr_norm(ScalarField(tn.grid, tn.ladder->u0.values() - tm.ladder->u0.values()), r);
  double f_dist = 0.0;
  const int steps = static_cast<int>(std::round(base.T / base.tau));
  for (int s = 1; s <= steps; ++s) {
    const ScalarField fa = tn.ladder->f.average((s - 1) * base.tau, s * base.tau);
    const ScalarField fb = tm.ladder->f.average((s - 1) * base.tau, s * base.tau);
    f_dist += base.tau * lr_norm(ScalarField(tn.grid, fa.values() - fb.values()), r);
  }
  const double h = base.u0.grid().h();
  const double rhs = (init_dist + f_dist) * (1.0 + 1e-6) + kRegularitySlack * (h + base.tau);

  ExperimentReport rep;
  rep.name = "regularity_cauchy";
  rep.inputs_digest = digest_config(cfg_n, {r, static_cast<double>(n), static_cast<double>(m)});
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < tn.times.size(); ++i) {
    const double lhs =
        lr_norm(ScalarField(tn.grid, tn.states[i].values() - tm.states[i].values()), r);
    rep.table.push_back({tn.times[i], lhs, rhs, rhs - lhs});
    rep.worst_margin = std::min(rep.worst_margin, rhs - lhs);
  }
  rep.pass = rep.worst_margin >= 0.0;
  return rep;
}

GnResult gn_check(const Trajectory& traj, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("gn_check: level k must be > 0");
  if (traj.times.size() < 2) throw std::invalid_argument("gn_check: need at least two snapshots");
  GnResult res{0.0, 0.0, 0.0, 0.0, false, false};
  const double power = 1.5;  // (N + 1) / N with N = 2
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const ScalarField g = tail(traj.states[i], k);
    res.sup_term = std::max(res.sup_term, l1_norm(g));
    if (i == 0) continue;
    const double dt = traj.times[i] - traj.times[i - 1];
    res.lhs += dt * g.values().abs().pow(power).sum() * traj.grid->cell_area();
    res.tv_term += dt * tv(g);
  }
  if (res.tv_term == 0.0) {
    res.vacuous = res.lhs == 0.0;
    res.anomaly = res.lhs > 0.0;
    return res;
  }
  res.ratio = res.lhs / (std::sqrt(res.sup_term) * res.tv_term);
  return res;
}

ExperimentReport gn_refinement_check(const std::vector<Trajectory>& runs, double k) {
  if (runs.size() < 2)
    throw std::invalid_argument("gn_refinement_check: need at least two refinement levels");
  ExperimentReport rep;
  rep.name = "gn_ratio";
  rep.inputs_digest = "-";
  rep.pass = true;
  for (const Trajectory& traj : runs) {
    const GnResult res = gn_check(traj, k);
    if (res.anomaly) {
      rep.pass = false;
      rep.detail = "anomaly: zero tv term with positive lhs";
      return rep;
    }
    rep.trend.push_back(res.ratio);
  }
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < rep.trend.size(); ++i) {
    const double growth = rep.trend[i] / std::max(rep.trend[i - 1], 1e-300);
    rep.table.push_back({static_cast<double>(i), growth, 1.2, 1.2 - growth});
    rep.worst_margin = std::min(rep.worst_margin, 1.2 - growth);
    if (growth > 1.2) rep.pass = false;
  }
  return rep;
}

ExperimentReport uniqueness_proxy(const SolveConfig& base, const std::vector<double>& schedule) {
  const Trajectory tv_path = evolve(base);
  const ContinuationResult cont = p_continuation(base, schedule);
  const double dist = max_l1_distance(tv_path, cont.trajectory);
  const double h = base.u0.grid().h();
  const double p_min = schedule.back();
  const double bound = kUniquenessSlack * (h + base.tau + (p_min - 1.0));

  ExperimentReport rep;
  rep.name = "uniqueness_proxy";
  rep.inputs_digest = digest_config(base, {p_min});
  rep.table.push_back({base.T, dist, bound, bound - dist});
  rep.trend = cont.distances;
  rep.worst_margin = bound - dist;
  rep.pass = dist <= bound;
  return rep;
}

}  // namespace tvf
