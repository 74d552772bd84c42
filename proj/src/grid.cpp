#include "lsinv/grid.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "lsinv/io.hpp"

namespace lsinv {

Grid::Grid(std::size_t n) : n_(n), h_(n == 0 ? 0.0 : 1.0 / static_cast<double>(n)) {
  if (n == 0) throw std::invalid_argument("grid needs at least one cell per side");
}

Point cell_center(const Grid& grid, std::size_t i, std::size_t j) {
  if (i >= grid.n() || j >= grid.n())
    throw std::out_of_range("cell index (" + std::to_string(i) + ", " + std::to_string(j) +
                            ") outside " + std::to_string(grid.n()) + "x" + std::to_string(grid.n()) +
                            " grid");
  // (i + 1/2) / n rather than (i + 1/2) * h keeps the arithmetic exact for power-of-two n.
  const double n = static_cast<double>(grid.n());
  return {(static_cast<double>(i) + 0.5) / n, (static_cast<double>(j) + 0.5) / n};
}

GridField::GridField(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.cells())
    throw std::invalid_argument("field has " + std::to_string(values_.size()) + " values, grid needs " +
                                std::to_string(grid_.cells()));
  for (double v : values_)
    if (!std::isfinite(v)) throw std::invalid_argument("field values must be finite");
}

GridField GridField::constant(Grid grid, double value) {
  return GridField(grid, std::vector<double>(grid.cells(), value));
}

double GridField::mean() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s / static_cast<double>(values_.size());
}

GridField restrict_field(const GridField& fine, std::size_t coarse_n) {
  const std::size_t nf = fine.grid().n();
  if (coarse_n == 0 || nf % coarse_n != 0)
    throw std::invalid_argument("coarse size " + std::to_string(coarse_n) + " does not divide fine size " +
                                std::to_string(nf));
  const std::size_t r = nf / coarse_n;
  const Grid coarse(coarse_n);
  std::vector<double> out(coarse.cells(), 0.0);
  const double inv = 1.0 / static_cast<double>(r * r);
  for (std::size_t J = 0; J < coarse_n; ++J)
    for (std::size_t I = 0; I < coarse_n; ++I) {
      double s = 0.0;
      for (std::size_t dj = 0; dj < r; ++dj)
        for (std::size_t di = 0; di < r; ++di) s += fine(I * r + di, J * r + dj);
      out[coarse.index(I, J)] = s * inv;
    }
  return GridField(coarse, std::move(out));
}

double l2_norm(const GridField& f) {
  double s = 0.0;
  for (double v : f.values()) s += v * v;
  return std::sqrt(s) * f.grid().h();
}

double l2_distance(const GridField& a, const GridField& b) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("fields live on different grids");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s) * a.grid().h();
}

std::vector<unsigned char> encode_field(const GridField& f) {
  std::vector<unsigned char> out;
  out.reserve(8 + 8 * f.size());
  const auto n = static_cast<std::uint32_t>(f.grid().n());
  io::put_u32_le(out, n);
  io::put_u32_le(out, n);
  for (double v : f.values()) io::put_f64_le(out, v);
  return out;
}

GridField decode_field(std::span<const unsigned char> bytes) {
  const std::uint32_t n0 = io::get_u32_le(bytes, 0);
  const std::uint32_t n1 = io::get_u32_le(bytes, 4);
  if (n0 != n1 || n0 == 0) throw std::invalid_argument("field header is not a square grid");
  const std::size_t cells = std::size_t{n0} * n0;
  if (bytes.size() != 8 + 8 * cells) throw std::invalid_argument("field payload size does not match header");
  std::vector<double> v(cells);
  for (std::size_t k = 0; k < cells; ++k) v[k] = io::get_f64_le(bytes, 8 + 8 * k);
  return GridField(Grid(n0), std::move(v));
}

void write_field(const std::filesystem::path& path, const GridField& f) {
  io::atomic_write(path, encode_field(f));
}

GridField read_field(const std::filesystem::path& path) { return decode_field(io::read_bytes(path)); }

std::string field_to_csv(const GridField& f) {
  std::ostringstream os;
  os.precision(17);
  const std::size_t n = f.grid().n();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      if (i) os << ',';
      os << f(i, j);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace lsinv
