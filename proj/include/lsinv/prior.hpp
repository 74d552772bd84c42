#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "lsinv/dct.hpp"
#include "lsinv/grid.hpp"
#include "lsinv/rng.hpp"

namespace lsinv {

enum class CovarianceKind : std::uint32_t {
  WhittleLaplacian = 1,  // (-Laplacian)^(-alpha), Neumann, zero mean
  SquaredExponential = 2,  // exp(-|x-y|^2 / L^2)
};

struct PriorSpec {
  CovarianceKind kind = CovarianceKind::SquaredExponential;
  double alpha = 2.0;   // WhittleLaplacian exponent, > 1
  double length = 0.3;  // SquaredExponential correlation length, > 0
  std::size_t n = 40;   // inversion grid cells per side
  std::optional<std::size_t> truncation;  // default: every available mode

  static PriorSpec laplacian(double alpha, std::size_t n, std::optional<std::size_t> truncation = {});
  static PriorSpec squared_exponential(double length, std::size_t n, std::optional<std::size_t> truncation = {});
};

/// Neumann-Laplacian wavenumber pair of a cosine mode.
struct Wavenumber {
  std::uint32_t k1 = 0;
  std::uint32_t k2 = 0;
  friend bool operator==(const Wavenumber&, const Wavenumber&) = default;
};

/// Truncated Karhunen-Loeve eigensystem on the cell centers of a grid. Eigenvalues are
/// non-increasing; eigenfunctions are orthonormal in the discrete inner product h^2 sum(.).
class KLBasis {
 public:
  CovarianceKind kind() const { return kind_; }
  double parameter() const { return parameter_; }
  const Grid& grid() const { return grid_; }
  std::size_t size() const { return eigenvalues_.size(); }
  std::span<const double> eigenvalues() const { return eigenvalues_; }

  /// Laplacian modes only; empty for the squared-exponential basis.
  std::span<const Wavenumber> wavenumbers() const { return wavenumbers_; }
  /// Squared-exponential eigenvectors, row-major cells x size(); empty for the Laplacian basis.
  std::span<const double> eigenvector_matrix() const { return vectors_; }

  double eigenfunction_value(std::size_t k, std::size_t cell) const;
  GridField eigenfunction(std::size_t k) const;
  /// sup-norm of each retained eigenfunction on the grid.
  std::vector<double> eigenfunction_sup_norms() const;
  /// Prior variance at each cell, sum_k lambda_k phi_k(x)^2.
  std::vector<double> pointwise_variance() const;

  const CosineTransform2D* cosine_transform() const { return transform_.get(); }

 private:
  friend KLBasis build_basis_laplacian(double, const Grid&, std::optional<std::size_t>);
  friend KLBasis build_basis_sqexp(double, const Grid&, std::optional<std::size_t>);
  friend KLBasis read_basis(const std::filesystem::path&);

  KLBasis(CovarianceKind kind, double parameter, Grid grid) : kind_(kind), parameter_(parameter), grid_(grid) {}

  CovarianceKind kind_;
  double parameter_;
  Grid grid_;
  std::vector<double> eigenvalues_;
  std::vector<Wavenumber> wavenumbers_;
  std::vector<double> vectors_;
  std::shared_ptr<const CosineTransform2D> transform_;
};

/// Cosine eigenbasis of (-Laplacian)^(-alpha) with Neumann boundary; the constant mode is excluded.
KLBasis build_basis_laplacian(double alpha, const Grid& grid, std::optional<std::size_t> truncation = {});

/// Nystrom eigenbasis of the squared-exponential covariance with cell-area weight h^2.
/// Modes below the round-off floor n^2 * eps * lambda_max are not available.
KLBasis build_basis_sqexp(double length, const Grid& grid, std::optional<std::size_t> truncation = {});

KLBasis build_basis(const PriorSpec& spec);

double sqexp_kernel(Point x, Point y, double length);

/// Binary basis cache: "LSKL" magic, version, kind, parameter, n, N, eigenvalues, then either
/// wavenumber pairs (Laplacian) or the eigenvector matrix (squared exponential).
void write_basis(const std::filesystem::path& path, const KLBasis& basis);
KLBasis read_basis(const std::filesystem::path& path);

/// Chain state: KL coefficients plus a mask of coordinates held fixed.
struct KLState {
  std::vector<double> xi;
  std::vector<std::uint8_t> frozen;

  explicit KLState(std::vector<double> coefficients)
      : xi(std::move(coefficients)), frozen(xi.size(), 0) {}
  std::size_t size() const { return xi.size(); }
  /// Freeze every mode with index >= active.
  void freeze_from(std::size_t active);
  void unfreeze_all();
};

/// u = sum_k sqrt(lambda_k) xi_k phi_k. The Laplacian basis goes through the fast cosine
/// synthesis; the squared-exponential basis through a dense product.
GridField synthesize(const KLBasis& basis, std::span<const double> xi);
inline GridField synthesize(const KLBasis& basis, const KLState& state) { return synthesize(basis, state.xi); }

KLState draw_coefficients(std::size_t count, RandomStream& rng);

}  // namespace lsinv
