#include "lsinv/prior.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "lsinv/errors.hpp"
#include "lsinv/io.hpp"
#include "lsinv/kernels.hpp"

namespace lsinv {

namespace {

constexpr double kPi = std::numbers::pi;

double cosine_amplitude(std::uint32_t k) { return k == 0 ? 1.0 : std::numbers::sqrt2; }

std::size_t resolve_truncation(std::optional<std::size_t> requested, std::size_t available) {
  if (!requested) return available;
  if (*requested == 0) throw std::invalid_argument("truncation must keep at least one mode");
  if (*requested > available)
    throw std::invalid_argument("truncation " + std::to_string(*requested) + " exceeds the " +
                                std::to_string(available) + " available modes");
  return *requested;
}

}  // namespace

PriorSpec PriorSpec::laplacian(double alpha, std::size_t n, std::optional<std::size_t> truncation) {
  return {CovarianceKind::WhittleLaplacian, alpha, 0.0, n, truncation};
}

PriorSpec PriorSpec::squared_exponential(double length, std::size_t n, std::optional<std::size_t> truncation) {
  return {CovarianceKind::SquaredExponential, 0.0, length, n, truncation};
}

double KLBasis::eigenfunction_value(std::size_t k, std::size_t cell) const {
  if (kind_ == CovarianceKind::WhittleLaplacian) {
    const auto [k1, k2] = wavenumbers_[k];
    const std::size_t n = grid_.n();
    const Point x = cell_center(grid_, cell % n, cell / n);
    return cosine_amplitude(k1) * cosine_amplitude(k2) * std::cos(k1 * kPi * x.x1) * std::cos(k2 * kPi * x.x2);
  }
  return vectors_[cell * size() + k];
}

GridField KLBasis::eigenfunction(std::size_t k) const {
  if (k >= size()) throw std::out_of_range("mode index out of range");
  std::vector<double> v(grid_.cells());
  for (std::size_t c = 0; c < v.size(); ++c) v[c] = eigenfunction_value(k, c);
  return GridField(grid_, std::move(v));
}

std::vector<double> KLBasis::eigenfunction_sup_norms() const {
  std::vector<double> out(size(), 0.0);
  for (std::size_t k = 0; k < size(); ++k)
    for (std::size_t c = 0; c < grid_.cells(); ++c) out[k] = std::max(out[k], std::abs(eigenfunction_value(k, c)));
  return out;
}

std::vector<double> KLBasis::pointwise_variance() const {
  std::vector<double> var(grid_.cells(), 0.0);
  for (std::size_t k = 0; k < size(); ++k)
    for (std::size_t c = 0; c < var.size(); ++c) {
      const double phi = eigenfunction_value(k, c);
      var[c] += eigenvalues_[k] * phi * phi;
    }
  return var;
}

KLBasis build_basis_laplacian(double alpha, const Grid& grid, std::optional<std::size_t> truncation) {
  if (!(alpha > 1.0)) throw std::invalid_argument("Whittle-Laplacian prior needs alpha > 1");
  const auto n = static_cast<std::uint32_t>(grid.n());
  std::vector<Wavenumber> modes;
  modes.reserve(grid.cells() - 1);
  for (std::uint32_t k2 = 0; k2 < n; ++k2)
    for (std::uint32_t k1 = 0; k1 < n; ++k1)
      if (k1 || k2) modes.push_back({k1, k2});
  // Eigenvalues depend only on |k|^2; ties are ordered by (k1 + k2, k1).
  std::sort(modes.begin(), modes.end(), [](const Wavenumber& a, const Wavenumber& b) {
    const auto ra = a.k1 * a.k1 + a.k2 * a.k2, rb = b.k1 * b.k1 + b.k2 * b.k2;
    if (ra != rb) return ra < rb;
    if (a.k1 + a.k2 != b.k1 + b.k2) return a.k1 + a.k2 < b.k1 + b.k2;
    return a.k1 < b.k1;
  });
  modes.resize(resolve_truncation(truncation, modes.size()));

  KLBasis basis(CovarianceKind::WhittleLaplacian, alpha, grid);
  basis.eigenvalues_.reserve(modes.size());
  for (const auto& m : modes)
    basis.eigenvalues_.push_back(std::pow(kPi * kPi * (double(m.k1) * m.k1 + double(m.k2) * m.k2), -alpha));
  basis.wavenumbers_ = std::move(modes);
  basis.transform_ = CosineTransform2D::get(grid.n());
  return basis;
}

double sqexp_kernel(Point x, Point y, double length) {
  const double d1 = x.x1 - y.x1, d2 = x.x2 - y.x2;
  return std::exp(-(d1 * d1 + d2 * d2) / (length * length));
}

KLBasis build_basis_sqexp(double length, const Grid& grid, std::optional<std::size_t> truncation) {
  if (!(length > 0.0)) throw std::invalid_argument("squared-exponential prior needs L > 0");
  const std::size_t m = grid.cells(), n = grid.n();
  const double w = grid.h() * grid.h();
  std::vector<Point> centers(m);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) centers[grid.index(i, j)] = cell_center(grid, i, j);

  Eigen::MatrixXd kernel(m, m);
  for (std::size_t b = 0; b < m; ++b)
    for (std::size_t a = b; a < m; ++a) kernel(a, b) = kernel(b, a) = w * sqexp_kernel(centers[a], centers[b], length);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(kernel);
  if (solver.info() != Eigen::Success)
    throw NumericalError("squared-exponential eigendecomposition failed (n=" + std::to_string(n) +
                         ", L=" + std::to_string(length) + ")");
  const Eigen::VectorXd& vals = solver.eigenvalues();  // ascending
  const double top = vals(static_cast<Eigen::Index>(m) - 1);
  if (!(top > 0.0) || !std::isfinite(top)) throw NumericalError("squared-exponential kernel matrix is degenerate");
  const double floor = static_cast<double>(m) * DBL_EPSILON * top;
  std::size_t available = 0;
  for (Eigen::Index k = static_cast<Eigen::Index>(m) - 1; k >= 0 && vals(k) > floor; --k) ++available;
  const std::size_t keep = resolve_truncation(truncation, available);

  KLBasis basis(CovarianceKind::SquaredExponential, length, grid);
  basis.eigenvalues_.resize(keep);
  basis.vectors_.assign(m * keep, 0.0);
  const double scale = 1.0 / grid.h();  // h^2 sum phi^2 = 1 for unit Euclidean eigenvectors
  for (std::size_t k = 0; k < keep; ++k) {
    const auto col = static_cast<Eigen::Index>(m - 1 - k);
    basis.eigenvalues_[k] = vals(col);
    auto v = solver.eigenvectors().col(col);
    // Fix the sign: the entry of largest magnitude (first one on ties) is positive.
    Eigen::Index arg = 0;
    for (Eigen::Index r = 1; r < v.size(); ++r)
      if (std::abs(v(r)) > std::abs(v(arg)) * (1.0 + 1e-12)) arg = r;
    const double sign = v(arg) < 0.0 ? -scale : scale;
    for (std::size_t c = 0; c < m; ++c) basis.vectors_[c * keep + k] = sign * v(static_cast<Eigen::Index>(c));
  }
  return basis;
}

KLBasis build_basis(const PriorSpec& spec) {
  const Grid grid(spec.n);
  return spec.kind == CovarianceKind::WhittleLaplacian ? build_basis_laplacian(spec.alpha, grid, spec.truncation)
                                                        : build_basis_sqexp(spec.length, grid, spec.truncation);
}

void write_basis(const std::filesystem::path& path, const KLBasis& basis) {
  std::vector<unsigned char> out = {'L', 'S', 'K', 'L'};
  io::put_u32_le(out, 1);
  io::put_u32_le(out, static_cast<std::uint32_t>(basis.kind()));
  io::put_f64_le(out, basis.parameter());
  io::put_u32_le(out, static_cast<std::uint32_t>(basis.grid().n()));
  io::put_u64_le(out, basis.size());
  for (double l : basis.eigenvalues()) io::put_f64_le(out, l);
  if (basis.kind() == CovarianceKind::WhittleLaplacian) {
    for (const auto& m : basis.wavenumbers()) {
      io::put_u32_le(out, m.k1);
      io::put_u32_le(out, m.k2);
    }
  } else {
    for (double v : basis.eigenvector_matrix()) io::put_f64_le(out, v);
  }
  io::atomic_write(path, out);
}

KLBasis read_basis(const std::filesystem::path& path) {
  const auto bytes = io::read_bytes(path);
  if (bytes.size() < 32 || bytes[0] != 'L' || bytes[1] != 'S' || bytes[2] != 'K' || bytes[3] != 'L')
    throw ConfigError("not a basis cache file: " + path.string());
  if (io::get_u32_le(bytes, 4) != 1) throw ConfigError("unsupported basis cache version");
  const auto kind = static_cast<CovarianceKind>(io::get_u32_le(bytes, 8));
  const double param = io::get_f64_le(bytes, 12);
  const Grid grid(io::get_u32_le(bytes, 20));
  const std::size_t count = io::get_u64_le(bytes, 24);
  KLBasis basis(kind, param, grid);
  std::size_t off = 32;
  basis.eigenvalues_.resize(count);
  for (auto& l : basis.eigenvalues_) l = io::get_f64_le(bytes, (off += 8) - 8);
  if (kind == CovarianceKind::WhittleLaplacian) {
    basis.wavenumbers_.resize(count);
    for (auto& m : basis.wavenumbers_) {
      m.k1 = io::get_u32_le(bytes, off);
      m.k2 = io::get_u32_le(bytes, off + 4);
      off += 8;
    }
    basis.transform_ = CosineTransform2D::get(grid.n());
  } else if (kind == CovarianceKind::SquaredExponential) {
    basis.vectors_.resize(grid.cells() * count);
    for (auto& v : basis.vectors_) v = io::get_f64_le(bytes, (off += 8) - 8);
  } else {
    throw ConfigError("unknown covariance kind in basis cache");
  }
  if (off != bytes.size()) throw ConfigError("basis cache has trailing or missing bytes");
  return basis;
}

void KLState::freeze_from(std::size_t active) {
  for (std::size_t k = 0; k < frozen.size(); ++k) frozen[k] = k >= active ? 1 : 0;
}

void KLState::unfreeze_all() { std::fill(frozen.begin(), frozen.end(), std::uint8_t{0}); }

GridField synthesize(const KLBasis& basis, std::span<const double> xi) {
  if (xi.size() != basis.size())
    throw std::invalid_argument("coefficient vector has " + std::to_string(xi.size()) + " entries, basis has " +
                                std::to_string(basis.size()));
  const Grid& grid = basis.grid();
  const auto lambda = basis.eigenvalues();
  std::vector<double> u(grid.cells());
  if (basis.kind() == CovarianceKind::WhittleLaplacian) {
    const std::size_t n = grid.n();
    std::vector<double> coeffs(n * n, 0.0);
    const auto modes = basis.wavenumbers();
    for (std::size_t k = 0; k < xi.size(); ++k)
      coeffs[modes[k].k2 * n + modes[k].k1] =
          cosine_amplitude(modes[k].k1) * cosine_amplitude(modes[k].k2) * std::sqrt(lambda[k]) * xi[k];
    basis.cosine_transform()->synthesize(coeffs, u);
  } else {
    std::vector<double> scaled(xi.size());
    for (std::size_t k = 0; k < xi.size(); ++k) scaled[k] = std::sqrt(lambda[k]) * xi[k];
    kernels::dense_matvec(basis.eigenvector_matrix(), grid.cells(), basis.size(), scaled, u);
  }
  return GridField(grid, std::move(u));
}

KLState draw_coefficients(std::size_t count, RandomStream& rng) {
  std::vector<double> xi(count);
  for (auto& x : xi) x = rng.normal();
  return KLState(std::move(xi));
}

}  // namespace lsinv
