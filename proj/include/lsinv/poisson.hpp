#pragma once

#include <Eigen/SparseCholesky>

#include <memory>
#include <vector>

#include "lsinv/darcy.hpp"
#include "lsinv/grid.hpp"

namespace lsinv {

/// Outward normal derivative dp/dnu at boundary-edge midpoints. left/right are indexed by
/// the row j, bottom/top by the column i.
struct BoundaryTrace {
  std::vector<double> left, right, bottom, top;

  /// Concatenation left, right, bottom, top (the edge order used by boundary observers).
  std::vector<double> flattened() const;
};

/// Solves Laplace(p) = kappa with p = 0 on the boundary (ghost value = -interior neighbour).
/// The operator does not depend on kappa, so it is factored once; solve() is const and
/// safe to call concurrently.
class PoissonSolver {
 public:
  explicit PoissonSolver(Grid grid);

  GridField solve(const GridField& kappa) const;
  const Grid& grid() const { return grid_; }

 private:
  Grid grid_;
  SparseMatrix matrix_;  // the SPD operator -Laplacian_h scaled by h^2
  Eigen::SimplicialLLT<SparseMatrix> llt_;
};

GridField solve_poisson(const GridField& kappa);

/// One-sided flux consistent with p = 0 on the boundary: dp/dnu = -2 p_adjacent / h.
BoundaryTrace neumann_trace(const GridField& p);

}  // namespace lsinv
