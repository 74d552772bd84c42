#include "lsinv/dct.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

namespace lsinv {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t count) : ptr(fftw_alloc_real(count)) {
    if (!ptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  double* ptr;
};

}  // namespace

CosineTransform2D::CosineTransform2D(std::size_t n) : n_(n) {
  if (n == 0) throw std::invalid_argument("transform size must be positive");
  std::lock_guard lock(planner_mutex());
  FftwBuffer a(n * n), b(n * n);
  const int ni = static_cast<int>(n);
  forward_plan_ = fftw_plan_r2r_2d(ni, ni, a.ptr, b.ptr, FFTW_REDFT10, FFTW_REDFT10, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_r2r_2d(ni, ni, a.ptr, b.ptr, FFTW_REDFT01, FFTW_REDFT01, FFTW_ESTIMATE);
  if (!forward_plan_ || !inverse_plan_) throw std::runtime_error("FFTW planning failed");
}

CosineTransform2D::~CosineTransform2D() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

std::shared_ptr<const CosineTransform2D> CosineTransform2D::get(std::size_t n) {
  static std::mutex cache_mutex;
  static std::map<std::size_t, std::weak_ptr<const CosineTransform2D>> cache;
  std::lock_guard lock(cache_mutex);
  if (auto hit = cache[n].lock()) return hit;
  auto made = std::make_shared<const CosineTransform2D>(n);
  cache[n] = made;
  return made;
}

void CosineTransform2D::forward(std::span<const double> values, std::span<double> coeffs) const {
  const std::size_t m = n_ * n_;
  if (values.size() != m || coeffs.size() != m) throw std::invalid_argument("cosine transform size mismatch");
  FftwBuffer in(m), out(m);
  std::memcpy(in.ptr, values.data(), m * sizeof(double));
  fftw_execute_r2r(static_cast<fftw_plan>(forward_plan_), in.ptr, out.ptr);
  // REDFT10 returns 2 * sum x cos(...) per dimension; rescale to the orthonormal basis.
  const double n = static_cast<double>(n_);
  const double s0 = std::sqrt(1.0 / n) * 0.5, sk = std::sqrt(2.0 / n) * 0.5;
  for (std::size_t k2 = 0; k2 < n_; ++k2)
    for (std::size_t k1 = 0; k1 < n_; ++k1)
      coeffs[k2 * n_ + k1] = out.ptr[k2 * n_ + k1] * (k1 ? sk : s0) * (k2 ? sk : s0);
}

void CosineTransform2D::synthesize(std::span<const double> coeffs, std::span<double> values) const {
  const std::size_t m = n_ * n_;
  if (values.size() != m || coeffs.size() != m) throw std::invalid_argument("cosine transform size mismatch");
  FftwBuffer in(m), out(m);
  // REDFT01 computes X_0 + 2 sum_{k>=1} X_k cos(...), so halve every nonzero wavenumber.
  for (std::size_t k2 = 0; k2 < n_; ++k2)
    for (std::size_t k1 = 0; k1 < n_; ++k1)
      in.ptr[k2 * n_ + k1] = coeffs[k2 * n_ + k1] * (k1 ? 0.5 : 1.0) * (k2 ? 0.5 : 1.0);
  fftw_execute_r2r(static_cast<fftw_plan>(inverse_plan_), in.ptr, out.ptr);
  std::memcpy(values.data(), out.ptr, m * sizeof(double));
}

CoefficientMatrix dct2_coefficients(const GridField& field) {
  const std::size_t n = field.grid().n();
  CoefficientMatrix c{n, std::vector<double>(n * n)};
  CosineTransform2D::get(n)->forward(field.values(), c.data);
  return c;
}

}  // namespace lsinv
