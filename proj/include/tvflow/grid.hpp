#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

// Cell-centered uniform grid on [0, nx*h] x [0, ny*h]. An optional mask
// restricts the domain to a 4-connected subset of cells; everything outside
// the inside set acts as a homogeneous Dirichlet ghost region.

namespace tvf {

enum class Dir : std::uint8_t { East = 0, North = 1, West = 2, South = 3 };

struct BoundaryFace {
  int cell;  // compact index of the inside cell adjacent to the face
  Dir dir;   // outward normal direction of the face
};

class Grid2D {
 public:
  Grid2D(int nx, int ny, double h);
  Grid2D(int nx, int ny, double h, std::vector<std::uint8_t> mask);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double h() const { return h_; }
  double cell_area() const { return h_ * h_; }
  bool masked() const { return masked_; }
  int inside_count() const { return n_inside_; }

  /// Compact index of cell (i, j), or -1 when the cell is outside.
  int index(int i, int j) const {
    if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return -1;
    return index_[static_cast<std::size_t>(j) * nx_ + i];
  }

  /// Compact index of the neighbor of inside cell c, or -1 when outside.
  int neighbor(int c, Dir d) const { return nbr_[static_cast<int>(d)][c]; }

  /// (i, j) coordinates of inside cell c.
  std::pair<int, int> cell_coords(int c) const { return {ci_[c], cj_[c]}; }

  /// Center of inside cell c in physical coordinates.
  std::pair<double, double> cell_center(int c) const {
    return {(ci_[c] + 0.5) * h_, (cj_[c] + 0.5) * h_};
  }

  /// All faces between an inside cell and the outside, one entry per face.
  const std::vector<BoundaryFace>& boundary_faces() const { return faces_; }

  /// West/south subset of boundary_faces(), in the same relative order. The
  /// forward-difference gradient has no cell slot for jumps across these
  /// faces, so vector fields carry one extra component per entry.
  const std::vector<BoundaryFace>& lower_faces() const { return lower_; }
  int lower_face_count() const { return static_cast<int>(lower_.size()); }

  /// Same cell layout: dimensions, spacing and mask all agree.
  bool same_layout(const Grid2D& o) const;

 private:
  void build(const std::vector<std::uint8_t>* mask);

  int nx_;
  int ny_;
  double h_;
  bool masked_ = false;
  int n_inside_ = 0;
  std::vector<int> index_;           // (i, j) -> compact index or -1
  std::vector<int> ci_, cj_;         // compact index -> (i, j)
  std::vector<int> nbr_[4];          // compact neighbor indices per direction
  std::vector<BoundaryFace> faces_;
  std::vector<BoundaryFace> lower_;
};

using GridPtr = std::shared_ptr<const Grid2D>;

GridPtr make_grid(int nx, int ny, double h);
GridPtr make_grid(int nx, int ny, double h, std::vector<std::uint8_t> mask);

}  // namespace tvf
