#pragma once

#include <vector>

#include "tvflow/field.hpp"

// Discrete first-order calculus on cell-centered fields. The gradient uses
// forward differences with zero ghost values outside the inside set. Jumps
// across east/north ghost faces live in the cell slots; jumps across the
// west/south ghost faces live in the lower-face block of VectorField, so the
// Dirichlet boundary contribution of the total variation covers all four
// sides. The divergence is the exact negative adjoint of the gradient under
// the h^2-weighted inner product.

namespace tvf {

struct TVOptions {
  enum class Norm { Isotropic, Anisotropic };
  Norm norm = Norm::Isotropic;
  bool include_boundary = true;  // keep ghost-face jumps in the sum
};

/// Forward-difference gradient, cell staggered.
VectorField gradient(const ScalarField& u);

/// Negative adjoint of gradient: <gradient(u), p> = -<u, divergence(p)> exactly.
ScalarField divergence(const VectorField& p);

/// Total variation of u, boundary term included through ghost jumps.
double tv(const ScalarField& u, const TVOptions& opts = {});

/// h^2-weighted pairing sum of z against gradient(v), ghost jumps included.
double pairing(const VectorField& z, const ScalarField& v);

/// Same sum restricted to faces between two inside cells.
double pairing_interior(const VectorField& z, const ScalarField& v);

/// Outward normal component of z on each boundary face: the adjacent cell
/// slot on east/north faces, the lower-face component on west/south faces.
/// Values align with grid.boundary_faces().
struct BoundaryTrace {
  GridPtr grid;
  std::vector<double> values;
};

BoundaryTrace boundary_trace(const VectorField& z);

/// Sum over boundary faces of h * |u at the adjacent inside cell|.
double boundary_integral(const ScalarField& u);

/// Residual of the discrete Green formula
///   <divergence z, v> h^2 + pairing_interior(z, v) - sum_ghost h v [z, nu],
/// where the last sum runs over every boundary face with [z, nu] read from
/// boundary_trace. Zero to rounding for all inputs.
double green_residual(const VectorField& z, const ScalarField& v);

}  // namespace tvf
