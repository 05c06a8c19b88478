#include <doctest.h>

#include <cmath>
#include <map>

#include "tvflow/calculus.hpp"

using namespace tvf;

namespace {

ScalarField indicator_block(GridPtr g, int i0, int i1, int j0, int j1, double height) {
  Array v = Array::Zero(g->inside_count());
  for (int j = j0; j <= j1; ++j)
    for (int i = i0; i <= i1; ++i) v[g->index(i, j)] = height;
  return ScalarField(std::move(g), std::move(v));
}

GridPtr plus_grid() {
  std::vector<std::uint8_t> plus = {0, 1, 0, 1, 1, 1, 0, 1, 0};
  return make_grid(3, 3, 1.0, plus);
}

}  // namespace

TEST_CASE("gradient of a linear ramp is one inside") {
  GridPtr g = make_grid(6, 5, 0.25);
  Array v(g->inside_count());
  for (int c = 0; c < g->inside_count(); ++c) v[c] = g->cell_center(c).first;
  VectorField grad = gradient(ScalarField(g, v));
  for (int c = 0; c < g->inside_count(); ++c) {
    if (g->neighbor(c, Dir::East) >= 0) CHECK(grad.x()[c] == doctest::Approx(1.0));
    if (g->neighbor(c, Dir::North) >= 0) CHECK(grad.y()[c] == doctest::Approx(0.0));
  }
}

TEST_CASE("constant fields jump across every ghost face") {
  GridPtr g = make_grid(3, 2, 0.5);
  VectorField grad = gradient(ScalarField::constant(g, 2.0));
  for (int c = 0; c < g->inside_count(); ++c) {
    const double gx_want = g->neighbor(c, Dir::East) >= 0 ? 0.0 : -4.0;  // -c/h
    const double gy_want = g->neighbor(c, Dir::North) >= 0 ? 0.0 : -4.0;
    CHECK(grad.x()[c] == doctest::Approx(gx_want));
    CHECK(grad.y()[c] == doctest::Approx(gy_want));
  }
  // West/south ghost jumps live in the lower block, one per lower face.
  REQUIRE(grad.lower().size() == g->lower_face_count());
  CHECK(g->lower_face_count() == 5);
  for (int f = 0; f < g->lower_face_count(); ++f)
    CHECK(grad.lower()[f] == doctest::Approx(-4.0));
}

TEST_CASE("divergence is the exact negative adjoint of gradient") {
  for (GridPtr g : {make_grid(7, 5, 0.3), plus_grid()}) {
    ScalarField u = make_field(g, RandomUniform{5, -2.0, 2.0});
    ScalarField w = make_field(g, RandomUniform{6, -1.0, 3.0});
    VectorField p(g, make_field(g, RandomUniform{7, -1.0, 1.0}).values(),
                  make_field(g, RandomUniform{8, -1.0, 1.0}).values());
    const double lhs = pairing(p, u);
    const double rhs = -inner(u, divergence(p));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    // Bilinearity spot check on a second field.
    CHECK(pairing(p, w) == doctest::Approx(-inner(w, divergence(p))).epsilon(1e-12));
  }
}

TEST_CASE("divergence requires cell staggering") {
  GridPtr g = make_grid(3, 3, 1.0);
  VectorField face(g, Array::Zero(9), Array::Zero(9), Staggering::Face);
  CHECK_THROWS_AS(divergence(face), std::invalid_argument);
  CHECK_THROWS_AS(pairing(face, ScalarField::zeros(g)), std::invalid_argument);
}

TEST_CASE("pairing rejects mismatched grids") {
  GridPtr a = make_grid(3, 3, 1.0);
  GridPtr b = make_grid(3, 3, 0.5);
  CHECK_THROWS_AS(pairing(VectorField::zeros(a), ScalarField::zeros(b)), std::invalid_argument);
  CHECK_THROWS_AS(inner(ScalarField::zeros(a), ScalarField::zeros(b)), std::invalid_argument);
}

TEST_CASE("interior block indicator has frozen variation") {
  // 3x3 block of height 1 strictly inside an 8x8 unit-spacing grid. The
  // anisotropic count is the perimeter; the isotropic one merges the single
  // doubly-jumping corner cell into sqrt(2).
  GridPtr g = make_grid(8, 8, 1.0);
  ScalarField u = indicator_block(g, 2, 4, 2, 4, 1.0);
  CHECK(tv(u, {TVOptions::Norm::Anisotropic, true}) == doctest::Approx(12.0).epsilon(1e-14));
  CHECK(tv(u, {TVOptions::Norm::Isotropic, true}) ==
        doctest::Approx(10.0 + std::sqrt(2.0)).epsilon(1e-14));
  // Interior block sees no ghost faces, so excluding the boundary changes nothing.
  CHECK(tv(u, {TVOptions::Norm::Anisotropic, false}) == doctest::Approx(12.0).epsilon(1e-14));
}

TEST_CASE("constant field variation is pure boundary") {
  GridPtr g = make_grid(3, 2, 0.5);
  ScalarField u = ScalarField::constant(g, 2.0);
  // All ten boundary faces carry jump c/h as one-dimensional trace terms, so
  // both norms reduce to the boundary integral; no gradient pair is active.
  for (TVOptions::Norm norm : {TVOptions::Norm::Isotropic, TVOptions::Norm::Anisotropic}) {
    CHECK(tv(u, {norm, true}) == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(tv(u, {norm, true}) == doctest::Approx(boundary_integral(u)).epsilon(1e-14));
    CHECK(tv(u, {norm, false}) == 0.0);
  }
}

TEST_CASE("variation is positively homogeneous and subadditive") {
  GridPtr g = make_grid(9, 7, 0.2);
  ScalarField u = make_field(g, RandomUniform{21, -1.0, 1.0});
  ScalarField w = make_field(g, RandomUniform{22, -1.0, 1.0});
  for (TVOptions::Norm norm : {TVOptions::Norm::Isotropic, TVOptions::Norm::Anisotropic}) {
    const TVOptions opts{norm, true};
    CHECK(tv(ScalarField(g, 3.0 * u.values()), opts) ==
          doctest::Approx(3.0 * tv(u, opts)).epsilon(1e-13));
    CHECK(tv(ScalarField(g, -u.values()), opts) == doctest::Approx(tv(u, opts)).epsilon(1e-13));
    CHECK(tv(ScalarField(g, u.values() + w.values()), opts) <=
          tv(u, opts) + tv(w, opts) + 1e-12);
  }
}

TEST_CASE("truncation does not increase variation") {
  GridPtr g = make_grid(10, 10, 0.1);
  ScalarField u = make_field(g, RandomUniform{31, -3.0, 3.0});
  for (double k : {0.5, 1.0, 2.5}) {
    CHECK(tv(truncate(u, k)) <= tv(u) + 1e-12);
    CHECK(tv(truncate(u, k), {TVOptions::Norm::Anisotropic, true}) <=
          tv(u, {TVOptions::Norm::Anisotropic, true}) + 1e-12);
  }
}

TEST_CASE("anisotropic ghost contribution equals the boundary integral") {
  for (GridPtr g : {make_grid(6, 4, 0.25), plus_grid()}) {
    ScalarField u = make_field(g, RandomUniform{41, -2.0, 2.0});
    const double with = tv(u, {TVOptions::Norm::Anisotropic, true});
    const double without = tv(u, {TVOptions::Norm::Anisotropic, false});
    CHECK(with - without == doctest::Approx(boundary_integral(u)).epsilon(1e-12));
  }
}

TEST_CASE("pairing is bounded by the sup norm times the variation") {
  GridPtr g = make_grid(8, 8, 0.125);
  ScalarField u = make_field(g, RandomUniform{51, -1.0, 1.0});
  Array zx = make_field(g, RandomUniform{52, -0.7, 0.7}).values();
  Array zy = make_field(g, RandomUniform{53, -0.7, 0.7}).values();
  VectorField z(g, zx, zy, Staggering::Cell, true);
  CHECK(std::abs(pairing(z, u)) <= z.max_norm() * tv(u) + 1e-12);
  CHECK(std::abs(pairing_interior(z, u)) <=
        z.max_norm() * tv(u, {TVOptions::Norm::Isotropic, false}) + 1e-12);
}

TEST_CASE("boundary trace picks the outward component") {
  GridPtr g = make_grid(2, 2, 1.0);
  Array px(4), py(4);
  px << 1.0, 2.0, 3.0, 4.0;
  py << 5.0, 6.0, 7.0, 8.0;
  VectorField z(g, px, py);
  BoundaryTrace tr = boundary_trace(z);
  REQUIRE(tr.values.size() == g->boundary_faces().size());
  std::map<std::pair<int, Dir>, double> got;
  for (std::size_t m = 0; m < tr.values.size(); ++m) {
    const BoundaryFace& f = g->boundary_faces()[m];
    got[{f.cell, f.dir}] = tr.values[m];
  }
  const int c00 = g->index(0, 0), c10 = g->index(1, 0), c01 = g->index(0, 1),
            c11 = g->index(1, 1);
  CHECK(got.at({c00, Dir::West}) == -px[c00]);
  CHECK(got.at({c00, Dir::South}) == -py[c00]);
  CHECK(got.at({c10, Dir::East}) == px[c10]);
  CHECK(got.at({c10, Dir::South}) == -py[c10]);
  CHECK(got.at({c01, Dir::West}) == -px[c01]);
  CHECK(got.at({c01, Dir::North}) == py[c01]);
  CHECK(got.at({c11, Dir::East}) == px[c11]);
  CHECK(got.at({c11, Dir::North}) == py[c11]);
}

TEST_CASE("boundary integral counts every side") {
  GridPtr g = make_grid(5, 3, 0.2);
  CHECK(boundary_integral(ScalarField::constant(g, 1.0)) ==
        doctest::Approx(0.2 * (2 * 5 + 2 * 3)).epsilon(1e-14));
  CHECK(boundary_integral(ScalarField::constant(g, -2.0)) ==
        doctest::Approx(2.0 * 0.2 * 16).epsilon(1e-14));
  CHECK(boundary_integral(ScalarField::zeros(g)) == 0.0);
}

TEST_CASE("discrete Green formula holds to rounding") {
  for (GridPtr g : {make_grid(6, 9, 0.11), plus_grid()}) {
    ScalarField v = make_field(g, RandomUniform{61, -2.0, 2.0});
    VectorField z(g, make_field(g, RandomUniform{62, -3.0, 3.0}).values(),
                  make_field(g, RandomUniform{63, -3.0, 3.0}).values());
    CHECK(std::abs(green_residual(z, v)) <= 1e-12 * (1.0 + z.max_norm() * tv(v)));
  }
}

TEST_CASE("full pairing splits into interior pairing and ghost flux") {
  GridPtr g = make_grid(5, 5, 0.2);
  ScalarField v = make_field(g, RandomUniform{71, -1.0, 1.0});
  VectorField z(g, make_field(g, RandomUniform{72, -1.0, 1.0}).values(),
                make_field(g, RandomUniform{73, -1.0, 1.0}).values());
  const BoundaryTrace tr = boundary_trace(z);
  double ghost = 0.0;  // every ghost face contributes -v [z, nu] h
  for (std::size_t m = 0; m < tr.values.size(); ++m)
    ghost -= v[g->boundary_faces()[m].cell] * tr.values[m];
  ghost *= g->h();
  CHECK(pairing(z, v) == doctest::Approx(pairing_interior(z, v) + ghost).epsilon(1e-12));
}

TEST_CASE("explicit lower blocks: adjointness, trace, ball and norm") {
  GridPtr g = make_grid(6, 5, 0.2);
  const int nb = g->lower_face_count();
  CHECK(nb == 6 + 5);
  Array lower(nb);
  for (int f = 0; f < nb; ++f) lower[f] = 0.1 * f - 0.4;
  VectorField z(g, 0.1 * make_field(g, RandomUniform{82, -1.0, 1.0}).values(),
                0.1 * make_field(g, RandomUniform{83, -1.0, 1.0}).values(), lower);
  ScalarField u = make_field(g, RandomUniform{84, -2.0, 2.0});

  // The adjoint identity and the Green formula hold with any lower block.
  CHECK(pairing(z, u) == doctest::Approx(-inner(u, divergence(z))).epsilon(1e-12));
  CHECK(std::abs(green_residual(z, u)) <= 1e-12 * (1.0 + z.max_norm() * tv(u)));

  // West/south trace values come from the block, not the cell components.
  const BoundaryTrace tr = boundary_trace(z);
  int f_lower = 0;
  for (std::size_t m = 0; m < tr.values.size(); ++m) {
    const BoundaryFace& f = g->boundary_faces()[m];
    if (f.dir == Dir::West || f.dir == Dir::South)
      CHECK(tr.values[m] == lower[f_lower++]);
  }
  CHECK(f_lower == nb);

  // Cell norms stay below 0.15 here, so the block entry 0.6 sets the norm.
  CHECK(z.max_norm() == doctest::Approx(0.6).epsilon(1e-14));

  CHECK_THROWS_AS(VectorField(g, Array::Zero(30), Array::Zero(30), Array::Zero(nb + 1)),
                  std::invalid_argument);
  Array big = Array::Zero(nb);
  big[0] = 1.5;
  CHECK_THROWS_AS(
      VectorField(g, Array::Zero(30), Array::Zero(30), big, Staggering::Cell, true),
      std::invalid_argument);
}
