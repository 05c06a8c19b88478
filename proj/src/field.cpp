#include "tvflow/field.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "tvflow/truncation.hpp"

namespace tvf {

namespace {

void check_grid(const GridPtr& grid) {
  if (!grid) throw std::invalid_argument("field: grid must not be null");
}

}  // namespace

ScalarField::ScalarField(GridPtr grid, Array values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  check_grid(grid_);
  if (values_.size() != grid_->inside_count())
    throw std::invalid_argument("ScalarField: value count must equal inside-cell count");
  if (!values_.allFinite())
    throw std::invalid_argument("ScalarField: values must be finite");
}

ScalarField ScalarField::zeros(GridPtr grid) {
  check_grid(grid);
  const int n = grid->inside_count();
  return ScalarField(std::move(grid), Array::Zero(n));
}

ScalarField ScalarField::constant(GridPtr grid, double c) {
  check_grid(grid);
  const int n = grid->inside_count();
  return ScalarField(std::move(grid), Array::Constant(n, c));
}

namespace {

Array outward_lower(const Grid2D& g, const Array& x, const Array& y) {
  Array out(g.lower_face_count());
  int f = 0;
  for (const BoundaryFace& face : g.lower_faces())
    out[f++] = face.dir == Dir::West ? -x[face.cell] : -y[face.cell];
  return out;
}

}  // namespace

VectorField::VectorField(GridPtr grid, Array x, Array y, Staggering staggering, bool unit_ball)
    : VectorField(grid, std::move(x), std::move(y), Array(), staggering, unit_ball) {}

VectorField::VectorField(GridPtr grid, Array x, Array y, Array lower, Staggering staggering,
                         bool unit_ball)
    : grid_(std::move(grid)),
      x_(std::move(x)),
      y_(std::move(y)),
      lower_(std::move(lower)),
      staggering_(staggering),
      unit_ball_(unit_ball) {
  check_grid(grid_);
  if (x_.size() != grid_->inside_count() || y_.size() != grid_->inside_count())
    throw std::invalid_argument("VectorField: component count must equal inside-cell count");
  if (!x_.allFinite() || !y_.allFinite())
    throw std::invalid_argument("VectorField: components must be finite");
  if (lower_.size() == 0) {
    lower_ = outward_lower(*grid_, x_, y_);
  } else if (lower_.size() != grid_->lower_face_count()) {
    throw std::invalid_argument("VectorField: lower component count must match lower faces");
  }
  if (!lower_.allFinite())
    throw std::invalid_argument("VectorField: components must be finite");
  if (unit_ball_ && max_norm() > 1.0 + 1e-10)
    throw std::invalid_argument("VectorField: unit-ball flag violated");
}

VectorField VectorField::zeros(GridPtr grid) {
  check_grid(grid);
  const int n = grid->inside_count();
  return VectorField(std::move(grid), Array::Zero(n), Array::Zero(n), Staggering::Cell, true);
}

double VectorField::max_norm() const {
  if (x_.size() == 0) return 0.0;
  // Gauge of the dual ball: Euclidean on interior-difference pairs, absolute
  // value on ghost-jump slots (east/north cell slots without a neighbor, and
  // the whole lower block).
  double worst = 0.0;
  for (int c = 0; c < grid_->inside_count(); ++c) {
    const bool xi = grid_->neighbor(c, Dir::East) >= 0;
    const bool yi = grid_->neighbor(c, Dir::North) >= 0;
    if (xi && yi) {
      worst = std::max(worst, x_[c] * x_[c] + y_[c] * y_[c]);
    } else {
      worst = std::max({worst, x_[c] * x_[c], y_[c] * y_[c]});
    }
  }
  worst = std::sqrt(worst);
  if (lower_.size() == 0) return worst;
  return std::max(worst, lower_.abs().maxCoeff());
}

ScalarField make_field(GridPtr grid, const FieldShape& shape) {
  check_grid(grid);
  const int n = grid->inside_count();
  const double lx = grid->nx() * grid->h();
  const double ly = grid->ny() * grid->h();
  Array v = Array::Zero(n);

  if (const auto* d = std::get_if<Disk>(&shape)) {
    if (!(d->r > 0.0)) throw std::invalid_argument("make_field: disk radius must be > 0");
    if (d->cx - d->r < 0.0 || d->cx + d->r > lx || d->cy - d->r < 0.0 || d->cy + d->r > ly)
      throw std::invalid_argument("make_field: disk extends outside the grid rectangle");
    for (int c = 0; c < n; ++c) {
      const auto [x, y] = grid->cell_center(c);
      const double dx = x - d->cx;
      const double dy = y - d->cy;
      if (dx * dx + dy * dy <= d->r * d->r) v[c] = d->height;
    }
  } else if (const auto* s = std::get_if<Step>(&shape)) {
    if (s->x0 < 0.0 || s->x0 > lx)
      throw std::invalid_argument("make_field: step position outside the grid rectangle");
    for (int c = 0; c < n; ++c) {
      if (grid->cell_center(c).first < s->x0) v[c] = s->height;
    }
  } else if (const auto* k = std::get_if<Constant>(&shape)) {
    v.setConstant(k->value);
  } else {
    const auto& r = std::get<RandomUniform>(shape);
    if (!(r.hi > r.lo)) throw std::invalid_argument("make_field: random range must have hi > lo");
    std::mt19937_64 rng(r.seed);
    std::uniform_real_distribution<double> dist(r.lo, r.hi);
    for (int c = 0; c < n; ++c) v[c] = dist(rng);
  }
  return ScalarField(std::move(grid), std::move(v));
}

ScalarField truncate(const ScalarField& u, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("truncate: level k must be > 0");
  return ScalarField(u.grid_ptr(), u.values().max(-k).min(k));
}

ScalarField tail(const ScalarField& u, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("tail: level k must be > 0");
  return ScalarField(u.grid_ptr(), u.values() - u.values().max(-k).min(k));
}

double jk_integral(const ScalarField& u, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("jk_integral: level k must be > 0");
  double s = 0.0;
  const Array& v = u.values();
  for (Eigen::Index c = 0; c < v.size(); ++c) s += jk(k, v[c]);
  return s * u.grid().cell_area();
}

double inner(const ScalarField& a, const ScalarField& b) {
  if (!a.grid().same_layout(b.grid()))
    throw std::invalid_argument("inner: fields live on different grids");
  return (a.values() * b.values()).sum() * a.grid().cell_area();
}

double l1_norm(const ScalarField& u) { return u.values().abs().sum() * u.grid().cell_area(); }

double l2_norm(const ScalarField& u) {
  return std::sqrt(u.values().square().sum() * u.grid().cell_area());
}

double lr_norm(const ScalarField& u, double r) {
  if (!(r >= 1.0)) throw std::invalid_argument("lr_norm: exponent r must be >= 1");
  return std::pow((u.values().abs().pow(r)).sum() * u.grid().cell_area(), 1.0 / r);
}

double sup_norm(const ScalarField& u) {
  return u.values().size() ? u.values().abs().maxCoeff() : 0.0;
}

ScalarField jacobi_smooth(const ScalarField& u) {
  const Grid2D& g = u.grid();
  const Array& v = u.values();
  Array out(v.size());
  for (int c = 0; c < g.inside_count(); ++c) {
    double s = v[c];
    for (int d = 0; d < 4; ++d) {
      const int nb = g.neighbor(c, static_cast<Dir>(d));
      if (nb >= 0) s += v[nb];
    }
    out[c] = s / 5.0;
  }
  return ScalarField(u.grid_ptr(), std::move(out));
}

}  // namespace tvf
