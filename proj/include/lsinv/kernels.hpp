#pragma once

// OpenMP-parallel inner loops. Each has a serial counterpart in reference.hpp that the
// tests and benchmarks compare against.

#include <cstddef>
#include <span>

namespace lsinv {
class LevelSetSpec;
}

namespace lsinv::kernels {

void threshold(std::span<const double> u, const LevelSetSpec& spec, std::span<double> kappa);

/// out = A * x for a row-major rows x cols matrix.
void dense_matvec(std::span<const double> a, std::size_t rows, std::size_t cols, std::span<const double> x,
                  std::span<double> out);

/// sum += x, sum_sq += x*x, cellwise.
void accumulate_moments(std::span<const double> x, std::span<double> sum, std::span<double> sum_sq);

}  // namespace lsinv::kernels
