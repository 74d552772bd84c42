#pragma once

// Serial reference implementations kept for testing the parallel kernels and fast paths.

#include <cstddef>
#include <span>
#include <vector>

#include "lsinv/grid.hpp"

namespace lsinv {
class KLBasis;
class LevelSetSpec;
}

namespace lsinv::reference {

void threshold(std::span<const double> u, const LevelSetSpec& spec, std::span<double> kappa);

void dense_matvec(std::span<const double> a, std::size_t rows, std::size_t cols, std::span<const double> x,
                  std::span<double> out);

/// Direct O(N n^2) evaluation of sum_k sqrt(lambda_k) xi_k phi_k(x) from the eigenfunctions.
GridField naive_kl_sum(const KLBasis& basis, std::span<const double> xi);

/// Direct double-sum orthonormal DCT-II, coefficients indexed [k2 * n + k1].
std::vector<double> naive_dct2(const GridField& field);

}  // namespace lsinv::reference
