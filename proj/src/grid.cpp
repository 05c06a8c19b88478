#include "tvflow/grid.hpp"

#include <queue>
#include <stdexcept>

namespace tvf {

Grid2D::Grid2D(int nx, int ny, double h) : nx_(nx), ny_(ny), h_(h) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("Grid2D: nx and ny must be >= 2");
  if (!(h > 0.0)) throw std::invalid_argument("Grid2D: spacing h must be > 0");
  build(nullptr);
}

Grid2D::Grid2D(int nx, int ny, double h, std::vector<std::uint8_t> mask)
    : nx_(nx), ny_(ny), h_(h), masked_(true) {
  if (nx < 2 || ny < 2) throw std::invalid_argument("Grid2D: nx and ny must be >= 2");
  if (!(h > 0.0)) throw std::invalid_argument("Grid2D: spacing h must be > 0");
  if (mask.size() != static_cast<std::size_t>(nx) * ny)
    throw std::invalid_argument("Grid2D: mask size must equal nx*ny");
  build(&mask);
}

void Grid2D::build(const std::vector<std::uint8_t>* mask) {
  const std::size_t total = static_cast<std::size_t>(nx_) * ny_;
  index_.assign(total, -1);
  for (std::size_t q = 0; q < total; ++q) {
    if (!mask || (*mask)[q]) {
      index_[q] = n_inside_++;
    }
  }
  if (n_inside_ == 0) throw std::invalid_argument("Grid2D: mask selects no inside cells");

  ci_.resize(n_inside_);
  cj_.resize(n_inside_);
  for (int j = 0; j < ny_; ++j)
    for (int i = 0; i < nx_; ++i) {
      const int c = index_[static_cast<std::size_t>(j) * nx_ + i];
      if (c >= 0) {
        ci_[c] = i;
        cj_[c] = j;
      }
    }

  const int di[4] = {1, 0, -1, 0};
  const int dj[4] = {0, 1, 0, -1};
  for (int d = 0; d < 4; ++d) nbr_[d].resize(n_inside_);
  for (int c = 0; c < n_inside_; ++c)
    for (int d = 0; d < 4; ++d) {
      const int n = index(ci_[c] + di[d], cj_[c] + dj[d]);
      nbr_[d][c] = n;
      if (n < 0) {
        faces_.push_back({c, static_cast<Dir>(d)});
        if (d >= 2) lower_.push_back({c, static_cast<Dir>(d)});
      }
    }

  if (mask) {
    // The inside set must be 4-connected; flood fill from the first cell.
    std::vector<char> seen(n_inside_, 0);
    std::queue<int> queue;
    queue.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!queue.empty()) {
      const int c = queue.front();
      queue.pop();
      for (int d = 0; d < 4; ++d) {
        const int n = nbr_[d][c];
        if (n >= 0 && !seen[n]) {
          seen[n] = 1;
          ++reached;
          queue.push(n);
        }
      }
    }
    if (reached != n_inside_)
      throw std::invalid_argument("Grid2D: mask inside set is not 4-connected");
  }
}

bool Grid2D::same_layout(const Grid2D& o) const {
  if (nx_ != o.nx_ || ny_ != o.ny_ || h_ != o.h_ || n_inside_ != o.n_inside_) return false;
  return index_ == o.index_;
}

GridPtr make_grid(int nx, int ny, double h) { return std::make_shared<Grid2D>(nx, ny, h); }

GridPtr make_grid(int nx, int ny, double h, std::vector<std::uint8_t> mask) {
  return std::make_shared<Grid2D>(nx, ny, h, std::move(mask));
}

}  // namespace tvf
