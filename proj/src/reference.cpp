#include "lsinv/reference.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lsinv/levelset.hpp"
#include "lsinv/prior.hpp"

namespace lsinv::reference {

void threshold(std::span<const double> u, const LevelSetSpec& spec, std::span<double> kappa) {
  if (u.size() != kappa.size()) throw std::invalid_argument("threshold: size mismatch");
  const auto c = spec.thresholds();
  const auto v = spec.values();
  for (std::size_t k = 0; k < u.size(); ++k) {
    std::size_t r = 0;
    while (r < c.size() && u[k] >= c[r]) ++r;
    kappa[k] = v[r];
  }
}

void dense_matvec(std::span<const double> a, std::size_t rows, std::size_t cols, std::span<const double> x,
                  std::span<double> out) {
  for (std::size_t r = 0; r < rows; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < cols; ++c) s += a[r * cols + c] * x[c];
    out[r] = s;
  }
}

GridField naive_kl_sum(const KLBasis& basis, std::span<const double> xi) {
  if (xi.size() != basis.size()) throw std::invalid_argument("coefficient count does not match basis");
  const std::size_t cells = basis.grid().cells();
  std::vector<double> u(cells, 0.0);
  const auto lambda = basis.eigenvalues();
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const double w = std::sqrt(lambda[k]) * xi[k];
    for (std::size_t c = 0; c < cells; ++c) u[c] += w * basis.eigenfunction_value(k, c);
  }
  return GridField(basis.grid(), std::move(u));
}

std::vector<double> naive_dct2(const GridField& field) {
  const std::size_t n = field.grid().n();
  const double nd = static_cast<double>(n);
  std::vector<double> out(n * n, 0.0);
  for (std::size_t k2 = 0; k2 < n; ++k2)
    for (std::size_t k1 = 0; k1 < n; ++k1) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i)
          s += field(i, j) * std::cos(std::numbers::pi * k1 * (i + 0.5) / nd) *
               std::cos(std::numbers::pi * k2 * (j + 0.5) / nd);
      const double a1 = std::sqrt((k1 ? 2.0 : 1.0) / nd), a2 = std::sqrt((k2 ? 2.0 : 1.0) / nd);
      out[k2 * n + k1] = a1 * a2 * s;
    }
  return out;
}

}  // namespace lsinv::reference
