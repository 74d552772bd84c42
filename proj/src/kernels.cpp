#include "lsinv/kernels.hpp"

#include <stdexcept>

#include "lsinv/levelset.hpp"

namespace lsinv::kernels {

void threshold(std::span<const double> u, const LevelSetSpec& spec, std::span<double> kappa) {
  if (u.size() != kappa.size()) throw std::invalid_argument("threshold: size mismatch");
  const auto n = static_cast<std::ptrdiff_t>(u.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) kappa[k] = spec.value_of(u[k]);
}

void dense_matvec(std::span<const double> a, std::size_t rows, std::size_t cols, std::span<const double> x,
                  std::span<double> out) {
  if (a.size() != rows * cols || x.size() != cols || out.size() != rows)
    throw std::invalid_argument("dense_matvec: size mismatch");
  const auto nr = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < nr; ++r) {
    const double* row = a.data() + static_cast<std::size_t>(r) * cols;
    double s = 0.0;
#pragma omp simd reduction(+ : s)
    for (std::size_t c = 0; c < cols; ++c) s += row[c] * x[c];
    out[r] = s;
  }
}

void accumulate_moments(std::span<const double> x, std::span<double> sum, std::span<double> sum_sq) {
  if (x.size() != sum.size() || x.size() != sum_sq.size())
    throw std::invalid_argument("accumulate_moments: size mismatch");
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for simd schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    sum[k] += x[k];
    sum_sq[k] += x[k] * x[k];
  }
}

}  // namespace lsinv::kernels
