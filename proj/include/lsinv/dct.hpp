#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "lsinv/grid.hpp"

namespace lsinv {

/// n x n matrix of 2-D cosine coefficients; (k1, k2) with k1 the x1 wavenumber.
struct CoefficientMatrix {
  std::size_t n = 0;
  std::vector<double> data;  // data[k2 * n + k1]

  double operator()(std::size_t k1, std::size_t k2) const { return data[k2 * n + k1]; }
  double& operator()(std::size_t k1, std::size_t k2) { return data[k2 * n + k1]; }
};

/// FFTW-backed 2-D cosine transforms of one size. Plans are created once (under a global
/// lock) and executed on caller-owned buffers, so one instance may be shared across threads.
class CosineTransform2D {
 public:
  static std::shared_ptr<const CosineTransform2D> get(std::size_t n);
  ~CosineTransform2D();
  CosineTransform2D(const CosineTransform2D&) = delete;
  CosineTransform2D& operator=(const CosineTransform2D&) = delete;

  std::size_t n() const { return n_; }

  /// Orthonormal DCT-II: values (row-major, x1 fastest) -> coefficients (k1 fastest).
  void forward(std::span<const double> values, std::span<double> coeffs) const;

  /// Cosine synthesis v(i, j) = sum_{k1,k2} c(k1, k2) cos(k1 pi (i+1/2)/n) cos(k2 pi (j+1/2)/n).
  void synthesize(std::span<const double> coeffs, std::span<double> values) const;

  explicit CosineTransform2D(std::size_t n);

 private:
  std::size_t n_;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

/// Orthonormal type-II 2-D DCT of the cell values.
CoefficientMatrix dct2_coefficients(const GridField& field);

}  // namespace lsinv
