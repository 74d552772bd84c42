#include "lsinv/observation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lsinv {

namespace {

constexpr double kPerimeter = 4.0;

// Counterclockwise arc position from (0,0): bottom [0,1), right [1,2), top [2,3), left [3,4).
double arc_position(Point p) {
  const double db = p.x2, dr = 1.0 - p.x1, dt = 1.0 - p.x2, dl = p.x1;
  const double m = std::min({db, dr, dt, dl});
  if (m == db) return std::clamp(p.x1, 0.0, 1.0);
  if (m == dr) return 1.0 + std::clamp(p.x2, 0.0, 1.0);
  if (m == dt) return 2.0 + (1.0 - std::clamp(p.x1, 0.0, 1.0));
  return 3.0 + (1.0 - std::clamp(p.x2, 0.0, 1.0));
}

double boundary_distance(Point p) {
  const bool inside = p.x1 >= 0.0 && p.x1 <= 1.0 && p.x2 >= 0.0 && p.x2 <= 1.0;
  if (inside) return std::min({p.x1, 1.0 - p.x1, p.x2, 1.0 - p.x2});
  const double dx = std::max({0.0, -p.x1, p.x1 - 1.0}), dy = std::max({0.0, -p.x2, p.x2 - 1.0});
  return std::hypot(dx, dy);
}

// Normalised Gaussian weights from squared distances, shifted by the minimum so the nearest
// support point keeps weight 1 even when every other term underflows.
std::vector<double> gaussian_weights(const std::vector<double>& d2, double width) {
  const double dmin = *std::min_element(d2.begin(), d2.end());
  std::vector<double> w(d2.size());
  double total = 0.0;
  for (std::size_t k = 0; k < d2.size(); ++k) total += (w[k] = std::exp(-(d2[k] - dmin) / (2.0 * width * width)));
  for (double& v : w) v /= total;
  return w;
}

void check_width(double width) {
  if (!(width > 0.0) || !std::isfinite(width)) throw std::invalid_argument("mollifier width must be > 0");
}

}  // namespace

ObservationWeights::ObservationWeights(ObservationSupport support, Grid grid, std::vector<Point> locations,
                                       double width, std::vector<double> weights)
    : support_(support), grid_(grid), locations_(std::move(locations)), width_(width), weights_(std::move(weights)) {
  if (locations_.empty()) throw std::invalid_argument("need at least one observation location");
  const std::size_t m = support_ == ObservationSupport::BoundaryEdges ? 4 * grid_.n() : grid_.cells();
  if (weights_.size() != m * locations_.size()) throw std::invalid_argument("observation weight matrix has wrong size");
}

std::span<const double> ObservationWeights::row(std::size_t j) const {
  const std::size_t m = support_size();
  return std::span(weights_).subspan(j * m, m);
}

std::vector<double> ObservationWeights::apply(std::span<const double> values) const {
  const std::size_t m = support_size();
  if (values.size() != m)
    throw std::invalid_argument("observation expects " + std::to_string(m) + " values, got " +
                                std::to_string(values.size()));
  std::vector<double> out(count(), 0.0);
  for (std::size_t j = 0; j < count(); ++j) {
    const double* w = weights_.data() + j * m;
    double s = 0.0;
    for (std::size_t k = 0; k < m; ++k) s += w[k] * values[k];
    out[j] = s;
  }
  return out;
}

ObservationWeights build_boundary_observer(std::span<const Point> locations, double width, const Grid& grid) {
  check_width(width);
  const std::size_t n = grid.n();
  std::vector<double> edge_arc(4 * n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = (static_cast<double>(k) + 0.5) / static_cast<double>(n);
    edge_arc[k] = 3.0 + (1.0 - t);  // left, x2 = t
    edge_arc[n + k] = 1.0 + t;      // right
    edge_arc[2 * n + k] = t;        // bottom, x1 = t
    edge_arc[3 * n + k] = 2.0 + (1.0 - t);  // top
  }
  std::vector<double> weights;
  weights.reserve(locations.size() * 4 * n);
  for (const Point& p : locations) {
    if (boundary_distance(p) > 0.5 * grid.h())
      throw std::invalid_argument("observation location (" + std::to_string(p.x1) + ", " + std::to_string(p.x2) +
                                  ") is not on the boundary");
    const double s = arc_position(p);
    std::vector<double> d2(4 * n);
    for (std::size_t e = 0; e < d2.size(); ++e) {
      const double d = std::abs(edge_arc[e] - s);
      const double cyc = std::min(d, kPerimeter - d);
      d2[e] = cyc * cyc;
    }
    const auto w = gaussian_weights(d2, width);
    weights.insert(weights.end(), w.begin(), w.end());
  }
  return ObservationWeights(ObservationSupport::BoundaryEdges, grid, {locations.begin(), locations.end()}, width,
                            std::move(weights));
}

ObservationWeights build_interior_observer(std::span<const Point> locations, double width, const Grid& grid) {
  check_width(width);
  std::vector<double> weights;
  weights.reserve(locations.size() * grid.cells());
  for (const Point& p : locations) {
    if (!(p.x1 > 0.0 && p.x1 < 1.0 && p.x2 > 0.0 && p.x2 < 1.0))
      throw std::invalid_argument("observation location (" + std::to_string(p.x1) + ", " + std::to_string(p.x2) +
                                  ") is not strictly inside the domain");
    std::vector<double> d2(grid.cells());
    for (std::size_t j = 0; j < grid.n(); ++j)
      for (std::size_t i = 0; i < grid.n(); ++i) {
        const Point c = cell_center(grid, i, j);
        d2[grid.index(i, j)] = (c.x1 - p.x1) * (c.x1 - p.x1) + (c.x2 - p.x2) * (c.x2 - p.x2);
      }
    const auto w = gaussian_weights(d2, width);
    weights.insert(weights.end(), w.begin(), w.end());
  }
  return ObservationWeights(ObservationSupport::Cells, grid, {locations.begin(), locations.end()}, width,
                            std::move(weights));
}

std::vector<Point> default_boundary_locations(std::size_t per_side) {
  std::vector<Point> out;
  out.reserve(4 * per_side);
  const double m = static_cast<double>(per_side);
  for (std::size_t k = 0; k < per_side; ++k) out.push_back({(k + 0.5) / m, 0.0});
  for (std::size_t k = 0; k < per_side; ++k) out.push_back({1.0, (k + 0.5) / m});
  for (std::size_t k = 0; k < per_side; ++k) out.push_back({1.0 - (k + 0.5) / m, 1.0});
  for (std::size_t k = 0; k < per_side; ++k) out.push_back({0.0, 1.0 - (k + 0.5) / m});
  return out;
}

std::vector<Point> default_interior_locations(std::size_t per_axis) {
  std::vector<Point> out;
  const double d = static_cast<double>(per_axis + 1);
  for (std::size_t j = 1; j <= per_axis; ++j)
    for (std::size_t i = 1; i <= per_axis; ++i) out.push_back({i / d, j / d});
  return out;
}

}  // namespace lsinv
