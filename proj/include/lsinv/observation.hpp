#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lsinv/grid.hpp"

namespace lsinv {

enum class ObservationSupport {
  BoundaryEdges,  // 4n boundary-edge midpoints, order left, right, bottom, top
  Cells,          // n^2 cell centers
};

/// J mollified point functionals, each a weight vector summing to one.
class ObservationWeights {
 public:
  ObservationWeights(ObservationSupport support, Grid grid, std::vector<Point> locations, double width,
                     std::vector<double> weights);

  ObservationSupport support() const { return support_; }
  const Grid& grid() const { return grid_; }
  std::size_t count() const { return locations_.size(); }
  std::size_t support_size() const { return weights_.size() / locations_.size(); }
  std::span<const Point> locations() const { return locations_; }
  double width() const { return width_; }
  std::span<const double> row(std::size_t j) const;

  std::vector<double> apply(std::span<const double> values) const;

 private:
  ObservationSupport support_;
  Grid grid_;
  std::vector<Point> locations_;
  double width_;
  std::vector<double> weights_;
};

/// Gaussian mollifier in boundary arc length around each location. Throws if a location is
/// more than h/2 from the boundary or width <= 0.
ObservationWeights build_boundary_observer(std::span<const Point> locations, double width, const Grid& grid);

/// 2-D Gaussian mollifier over cell centers. Throws if a location is not strictly inside.
ObservationWeights build_interior_observer(std::span<const Point> locations, double width, const Grid& grid);

/// per_side points on each side at arc positions (m + 1/2) / per_side, counterclockwise from (0, 0).
std::vector<Point> default_boundary_locations(std::size_t per_side = 16);

/// per_axis^2 lattice {(i / (per_axis + 1), j / (per_axis + 1))}.
std::vector<Point> default_interior_locations(std::size_t per_axis = 5);

}  // namespace lsinv
