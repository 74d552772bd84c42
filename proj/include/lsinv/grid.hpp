#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace lsinv {

struct Point {
  double x1 = 0.0;
  double x2 = 0.0;
};

/// Uniform cell-centered n x n grid on the unit square.
class Grid {
 public:
  explicit Grid(std::size_t n);

  std::size_t n() const { return n_; }
  double h() const { return h_; }
  std::size_t cells() const { return n_ * n_; }

  /// Linear index of cell (i, j); i runs along x1 and is the fastest index.
  std::size_t index(std::size_t i, std::size_t j) const { return j * n_ + i; }

  friend bool operator==(const Grid& a, const Grid& b) { return a.n_ == b.n_; }

 private:
  std::size_t n_;
  double h_;
};

/// Center of cell (i, j). Throws std::out_of_range for indices outside the grid.
Point cell_center(const Grid& grid, std::size_t i, std::size_t j);

/// Real-valued field sampled at cell centers. Immutable once built.
class GridField {
 public:
  GridField(Grid grid, std::vector<double> values);
  static GridField constant(Grid grid, double value);

  template <class F>
  static GridField from_function(Grid grid, F&& f) {
    std::vector<double> v(grid.cells());
    for (std::size_t j = 0; j < grid.n(); ++j)
      for (std::size_t i = 0; i < grid.n(); ++i)
        v[grid.index(i, j)] = f(cell_center(grid, i, j));
    return GridField(grid, std::move(v));
  }

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[grid_.index(i, j)]; }
  double operator[](std::size_t k) const { return values_[k]; }
  std::size_t size() const { return values_.size(); }

  double mean() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Block-average a fine field onto a coarse grid whose size divides the fine size.
GridField restrict_field(const GridField& fine, std::size_t coarse_n);

/// Grid L2 norm sqrt(h^2 sum v^2).
double l2_norm(const GridField& f);
double l2_distance(const GridField& a, const GridField& b);

// Flat binary format: two little-endian u32 (n, n) then n*n little-endian f64, row-major.
std::vector<unsigned char> encode_field(const GridField& f);
GridField decode_field(std::span<const unsigned char> bytes);
void write_field(const std::filesystem::path& path, const GridField& f);
GridField read_field(const std::filesystem::path& path);

/// One CSV row per grid row (fixed x2), columns ordered by increasing x1.
std::string field_to_csv(const GridField& f);

}  // namespace lsinv
