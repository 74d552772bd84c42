#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <vector>

#include "lsinv/grid.hpp"

namespace lsinv {

struct SideCondition {
  enum class Kind { Dirichlet, Neumann };
  Kind kind = Kind::Dirichlet;
  /// Dirichlet: boundary pressure. Neumann: outward flux kappa * dp/dnu.
  double value = 0.0;

  static SideCondition dirichlet(double p) { return {Kind::Dirichlet, p}; }
  static SideCondition neumann(double q) { return {Kind::Neumann, q}; }
};

struct DarcyBC {
  SideCondition left, right, bottom, top;

  /// p = 0 on every side.
  static DarcyBC homogeneous_dirichlet();
  /// Left p = 1, right p = 0, no flow through top and bottom.
  static DarcyBC pressure_drop_x();
  /// Throws std::invalid_argument when no side is Dirichlet.
  void validate() const;
};

using SparseMatrix = Eigen::SparseMatrix<double>;

struct LinearSystem {
  SparseMatrix matrix;  // symmetric positive definite, M-matrix
  Eigen::VectorXd rhs;
};

/// Cell-centered finite-volume system for -div(kappa grad p) = f: harmonic-mean transmissibility on
/// interior faces, 2 * kappa_cell on Dirichlet faces, prescribed flux on Neumann faces.
LinearSystem assemble_darcy(const GridField& kappa, const GridField& source, const DarcyBC& bc);

/// Reusable solver: the sparsity pattern and fill-reducing ordering are computed once, the
/// numeric factorization is redone for each kappa. One instance per thread.
class DarcySolver {
 public:
  DarcySolver(Grid grid, DarcyBC bc);
  DarcySolver(const DarcySolver& other) : DarcySolver(other.grid_, other.bc_) {}
  DarcySolver& operator=(const DarcySolver&) = delete;

  GridField solve(const GridField& kappa, const GridField& source);
  const Grid& grid() const { return grid_; }
  const DarcyBC& bc() const { return bc_; }
  double last_relative_residual() const { return last_residual_; }

 private:
  Grid grid_;
  DarcyBC bc_;
  Eigen::SimplicialLLT<SparseMatrix> llt_;
  double last_residual_ = 0.0;
};

/// Throws std::invalid_argument if kappa <= 0 anywhere or the BC is all-Neumann, and
/// NumericalError if the relative residual exceeds 1e-10.
GridField solve_darcy(const GridField& kappa, const GridField& source, const DarcyBC& bc);

/// Discrete H1 seminorm over interior faces, sqrt(sum_faces (dp)^2).
double grid_h1_seminorm(const GridField& p);

/// Discrete norm (h^2 sum |v|^r)^(1/r).
double grid_lr_norm(std::span<const double> values, const Grid& grid, double r);

}  // namespace lsinv
