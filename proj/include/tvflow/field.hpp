#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <variant>

#include "tvflow/grid.hpp"

namespace tvf {

using Array = Eigen::ArrayXd;

/// One real value per inside cell. Values are always finite.
class ScalarField {
 public:
  ScalarField(GridPtr grid, Array values);
  static ScalarField zeros(GridPtr grid);
  static ScalarField constant(GridPtr grid, double c);

  const Grid2D& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const Array& values() const { return values_; }
  Array& values() { return values_; }
  double operator[](int c) const { return values_[c]; }

 private:
  GridPtr grid_;
  Array values_;
};

enum class Staggering { Cell, Face };

/// Two components per inside cell, co-located with the forward-difference
/// gradient, plus one scalar component per grid lower face (the west/south
/// ghost faces that have no cell slot). The natural ball pairs interior
/// differences under the Euclidean norm and bounds each ghost-jump slot by
/// itself; when flagged unit_ball that gauge is checked to stay within
/// 1 + 1e-10.
class VectorField {
 public:
  /// Lower-face components default to the outward projection of the adjacent
  /// cell value (-x across west faces, -y across south), so a field built
  /// from plain cell arrays traces like the continuous field it samples.
  VectorField(GridPtr grid, Array x, Array y, Staggering staggering = Staggering::Cell,
              bool unit_ball = false);
  VectorField(GridPtr grid, Array x, Array y, Array lower,
              Staggering staggering = Staggering::Cell, bool unit_ball = false);
  static VectorField zeros(GridPtr grid);

  const Grid2D& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const Array& x() const { return x_; }
  const Array& y() const { return y_; }
  Array& x() { return x_; }
  Array& y() { return y_; }
  /// Components across grid().lower_faces(), aligned with that list.
  const Array& lower() const { return lower_; }
  Array& lower() { return lower_; }
  Staggering staggering() const { return staggering_; }
  bool unit_ball() const { return unit_ball_; }

  /// Largest gauge value: Euclidean over interior-difference pairs, absolute
  /// value over ghost-jump slots and the lower block.
  double max_norm() const;

 private:
  GridPtr grid_;
  Array x_, y_;
  Array lower_;
  Staggering staggering_;
  bool unit_ball_;
};

// Deterministic field constructors. Disk and step set `height` inside the
// shape and 0 elsewhere; random draws i.i.d. uniforms from a fixed seed.
struct Disk {
  double cx, cy, r, height;
};
struct Step {
  double x0, height;
};
struct Constant {
  double value;
};
struct RandomUniform {
  std::uint64_t seed;
  double lo = 0.0;
  double hi = 1.0;
};

using FieldShape = std::variant<Disk, Step, Constant, RandomUniform>;

ScalarField make_field(GridPtr grid, const FieldShape& shape);

// Cellwise helpers used across the solvers and the verifier.
ScalarField truncate(const ScalarField& u, double k);
ScalarField tail(const ScalarField& u, double k);

/// Integral of jk(k, u) over the domain (h^2-weighted sum).
double jk_integral(const ScalarField& u, double k);

double inner(const ScalarField& a, const ScalarField& b);  // h^2-weighted dot
double l1_norm(const ScalarField& u);
double l2_norm(const ScalarField& u);
double lr_norm(const ScalarField& u, double r);
double sup_norm(const ScalarField& u);

/// One Jacobi smoothing pass of radius h: average of the cell and its four
/// neighbors with zero ghost values.
ScalarField jacobi_smooth(const ScalarField& u);

}  // namespace tvf
