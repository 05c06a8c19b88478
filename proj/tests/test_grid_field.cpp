#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "tvflow/field.hpp"

using namespace tvf;

TEST_CASE("rectangular grid layout") {
  GridPtr g = make_grid(4, 3, 0.5);
  CHECK(g->nx() == 4);
  CHECK(g->ny() == 3);
  CHECK(g->h() == 0.5);
  CHECK(g->cell_area() == 0.25);
  CHECK(g->inside_count() == 12);
  CHECK_FALSE(g->masked());

  // Compact indices cover 0..11 exactly once.
  std::set<int> seen;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 4; ++i) seen.insert(g->index(i, j));
  CHECK(seen.size() == 12);
  CHECK(*seen.begin() == 0);
  CHECK(*seen.rbegin() == 11);

  // Coordinate round trip and centers.
  const int c = g->index(2, 1);
  auto [i, j] = g->cell_coords(c);
  CHECK(i == 2);
  CHECK(j == 1);
  auto [x, y] = g->cell_center(c);
  CHECK(x == doctest::Approx(1.25));
  CHECK(y == doctest::Approx(0.75));

  // Out-of-range lookups say "outside".
  CHECK(g->index(-1, 0) == -1);
  CHECK(g->index(0, -1) == -1);
  CHECK(g->index(4, 0) == -1);
  CHECK(g->index(0, 3) == -1);
}

TEST_CASE("neighbors and boundary faces on a rectangle") {
  GridPtr g = make_grid(3, 2, 1.0);
  const int c00 = g->index(0, 0);
  const int c10 = g->index(1, 0);
  const int c01 = g->index(0, 1);
  CHECK(g->neighbor(c00, Dir::East) == c10);
  CHECK(g->neighbor(c00, Dir::North) == c01);
  CHECK(g->neighbor(c00, Dir::West) == -1);
  CHECK(g->neighbor(c00, Dir::South) == -1);
  CHECK(g->neighbor(c10, Dir::West) == c00);
  CHECK(g->neighbor(c01, Dir::South) == c00);

  // Perimeter face count: 2*nx + 2*ny.
  CHECK(g->boundary_faces().size() == 10);
  int corner_faces = 0;
  for (const BoundaryFace& f : g->boundary_faces())
    if (f.cell == c00) ++corner_faces;
  CHECK(corner_faces == 2);  // west and south
}

TEST_CASE("grid constructor validation") {
  CHECK_THROWS_AS(make_grid(1, 4, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(4, 1, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(4, 4, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(4, 4, -1.0), std::invalid_argument);
}

TEST_CASE("masked grid keeps a connected inside set") {
  // Plus shape in a 3x3 frame.
  std::vector<std::uint8_t> plus = {0, 1, 0, 1, 1, 1, 0, 1, 0};
  GridPtr g = make_grid(3, 3, 1.0, plus);
  CHECK(g->masked());
  CHECK(g->inside_count() == 5);
  CHECK(g->index(0, 0) == -1);
  CHECK(g->index(1, 1) >= 0);
  const int center = g->index(1, 1);
  CHECK(g->neighbor(center, Dir::East) == g->index(2, 1));
  // Every arm cell has three boundary faces, the center none.
  CHECK(g->boundary_faces().size() == 12);
}

TEST_CASE("masked grid validation") {
  // Two disconnected cells.
  std::vector<std::uint8_t> split = {1, 0, 0, 0, 0, 0, 0, 0, 1};
  CHECK_THROWS_AS(make_grid(3, 3, 1.0, split), std::invalid_argument);
  // Empty mask.
  std::vector<std::uint8_t> empty(9, 0);
  CHECK_THROWS_AS(make_grid(3, 3, 1.0, empty), std::invalid_argument);
  // Wrong size.
  std::vector<std::uint8_t> shortmask(8, 1);
  CHECK_THROWS_AS(make_grid(3, 3, 1.0, shortmask), std::invalid_argument);
}

TEST_CASE("same_layout compares shape, spacing and mask") {
  GridPtr a = make_grid(4, 4, 0.25);
  GridPtr b = make_grid(4, 4, 0.25);
  GridPtr c = make_grid(4, 4, 0.5);
  GridPtr d = make_grid(4, 5, 0.25);
  CHECK(a->same_layout(*b));
  CHECK_FALSE(a->same_layout(*c));
  CHECK_FALSE(a->same_layout(*d));

  std::vector<std::uint8_t> m(16, 1);
  m[0] = 0;
  GridPtr e = make_grid(4, 4, 0.25, m);
  CHECK_FALSE(a->same_layout(*e));
  CHECK(e->same_layout(*make_grid(4, 4, 0.25, m)));
}

TEST_CASE("scalar field validation") {
  GridPtr g = make_grid(3, 3, 1.0);
  CHECK_THROWS_AS(ScalarField(g, Array::Zero(8)), std::invalid_argument);
  Array bad = Array::Zero(9);
  bad[4] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(ScalarField(g, bad), std::invalid_argument);
  bad[4] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(ScalarField(g, bad), std::invalid_argument);
  CHECK(ScalarField::zeros(g).values().size() == 9);
  CHECK(ScalarField::constant(g, 2.5).values()[3] == 2.5);
}

TEST_CASE("vector field unit ball flag") {
  GridPtr g = make_grid(3, 3, 1.0);
  Array ones = Array::Ones(9);
  CHECK_NOTHROW(VectorField(g, ones * 0.6, ones * 0.6, Staggering::Cell, true));  // norm ~0.849
  CHECK_THROWS_AS(VectorField(g, ones, ones, Staggering::Cell, true), std::invalid_argument);
  VectorField free(g, ones * 3.0, ones * 4.0);
  CHECK(free.max_norm() == doctest::Approx(5.0));
  CHECK(VectorField::zeros(g).unit_ball());
}

TEST_CASE("disk field covers about pi r^2") {
  const int n = 64;
  const double h = 1.0 / n;
  const double r = 0.3;
  GridPtr g = make_grid(n, n, h);
  ScalarField u = make_field(g, Disk{0.5, 0.5, r, 2.0});
  const double area = (u.values() != 0.0).count() * h * h;
  const double target = std::numbers::pi * r * r;
  // Off by at most a band of cells around the perimeter.
  CHECK(std::abs(area - target) <= 3.0 * (2 * std::numbers::pi * r) * h);
  CHECK(u.values().maxCoeff() == 2.0);
  CHECK(u.values().minCoeff() == 0.0);
}

TEST_CASE("disk must fit inside the rectangle") {
  GridPtr g = make_grid(16, 16, 1.0 / 16);
  CHECK_THROWS_AS(make_field(g, Disk{0.1, 0.5, 0.3, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_field(g, Disk{0.5, 0.95, 0.2, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_field(g, Disk{0.5, 0.5, 0.0, 1.0}), std::invalid_argument);
  CHECK_NOTHROW(make_field(g, Disk{0.5, 0.5, 0.5, 1.0}));
}

TEST_CASE("step field fills the left part") {
  GridPtr g = make_grid(4, 2, 0.25);
  ScalarField u = make_field(g, Step{0.5, 3.0});
  // Cells with center x in {0.125, 0.375} are below 0.5.
  CHECK(u[g->index(0, 0)] == 3.0);
  CHECK(u[g->index(1, 0)] == 3.0);
  CHECK(u[g->index(2, 0)] == 0.0);
  CHECK(u[g->index(3, 1)] == 0.0);
  CHECK_THROWS_AS(make_field(g, Step{-0.1, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(make_field(g, Step{1.5, 1.0}), std::invalid_argument);
}

TEST_CASE("random field is deterministic in the seed") {
  GridPtr g = make_grid(8, 8, 0.125);
  ScalarField a = make_field(g, RandomUniform{42, -1.0, 1.0});
  ScalarField b = make_field(g, RandomUniform{42, -1.0, 1.0});
  ScalarField c = make_field(g, RandomUniform{43, -1.0, 1.0});
  CHECK((a.values() == b.values()).all());
  CHECK_FALSE((a.values() == c.values()).all());
  CHECK(a.values().minCoeff() >= -1.0);
  CHECK(a.values().maxCoeff() <= 1.0);
  CHECK_THROWS_AS(make_field(g, RandomUniform{1, 2.0, 1.0}), std::invalid_argument);
}

TEST_CASE("cellwise truncation splits into clamp and tail") {
  GridPtr g = make_grid(2, 2, 1.0);
  Array v(4);
  v << -3.0, -0.5, 0.5, 3.0;
  ScalarField u(g, v);
  ScalarField t = truncate(u, 1.0);
  ScalarField r = tail(u, 1.0);
  CHECK(t.values()[0] == -1.0);
  CHECK(t.values()[1] == -0.5);
  CHECK(t.values()[3] == 1.0);
  CHECK(r.values()[0] == -2.0);
  CHECK(r.values()[2] == 0.0);
  CHECK(r.values()[3] == 2.0);
  CHECK(((t.values() + r.values()) == u.values()).all());
  CHECK_THROWS_AS(truncate(u, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(tail(u, -1.0), std::invalid_argument);
}

TEST_CASE("integrals and norms on a hand-built field") {
  GridPtr g = make_grid(2, 2, 0.5);  // cell area 0.25
  Array v(4);
  v << 1.0, -2.0, 0.0, 2.0;
  ScalarField u(g, v);
  CHECK(l1_norm(u) == doctest::Approx(5.0 * 0.25));
  CHECK(l2_norm(u) == doctest::Approx(std::sqrt(9.0 * 0.25)));
  CHECK(sup_norm(u) == 2.0);
  CHECK(lr_norm(u, 2.0) == doctest::Approx(l2_norm(u)));
  CHECK(lr_norm(u, 1.0) == doctest::Approx(l1_norm(u)));
  // jk with k=1: j(1)=0.5, j(-2)=1.5, j(0)=0, j(2)=1.5 -> sum 3.5 * 0.25.
  CHECK(jk_integral(u, 1.0) == doctest::Approx(0.875));
  CHECK_THROWS_AS(lr_norm(u, 0.5), std::invalid_argument);

  ScalarField w = ScalarField::constant(g, 2.0);
  CHECK(inner(u, w) == doctest::Approx((1.0 - 2.0 + 0.0 + 2.0) * 2.0 * 0.25));
  CHECK(inner(u, w) == doctest::Approx(inner(w, u)));
  GridPtr g2 = make_grid(2, 2, 1.0);
  CHECK_THROWS_AS(inner(u, ScalarField::zeros(g2)), std::invalid_argument);
}

TEST_CASE("jacobi smoothing averages with zero ghosts") {
  GridPtr g = make_grid(3, 3, 1.0);
  ScalarField u = ScalarField::constant(g, 1.0);
  ScalarField s = jacobi_smooth(u);
  // Center keeps all five contributors, corner loses two, edge loses one.
  CHECK(s[g->index(1, 1)] == doctest::Approx(1.0));
  CHECK(s[g->index(0, 0)] == doctest::Approx(3.0 / 5.0));
  CHECK(s[g->index(1, 0)] == doctest::Approx(4.0 / 5.0));
  // Mass shrinks, sup shrinks.
  CHECK(l1_norm(s) < l1_norm(u));
  CHECK(sup_norm(s) <= sup_norm(u));
}
