#include "lsinv/poisson.hpp"

#include <string>

#include "lsinv/errors.hpp"

namespace lsinv {

std::vector<double> BoundaryTrace::flattened() const {
  std::vector<double> out;
  out.reserve(left.size() * 4);
  for (const auto* side : {&left, &right, &bottom, &top}) out.insert(out.end(), side->begin(), side->end());
  return out;
}

PoissonSolver::PoissonSolver(Grid grid)
    : grid_(grid),
      matrix_(assemble_darcy(GridField::constant(grid, 1.0), GridField::constant(grid, 0.0),
                             DarcyBC::homogeneous_dirichlet())
                  .matrix) {
  llt_.compute(matrix_);
  if (llt_.info() != Eigen::Success) throw NumericalError("Poisson factorization failed");
}

GridField PoissonSolver::solve(const GridField& kappa) const {
  if (!(kappa.grid() == grid_)) throw std::invalid_argument("source grid does not match solver grid");
  const double h2 = grid_.h() * grid_.h();
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(grid_.cells()));
  for (std::size_t k = 0; k < grid_.cells(); ++k) rhs(static_cast<Eigen::Index>(k)) = -kappa[k] * h2;
  const Eigen::VectorXd p = llt_.solve(rhs);
  const double bnorm = rhs.norm();
  const double res = bnorm > 0.0 ? (matrix_ * p - rhs).norm() / bnorm : p.norm();
  if (!(res <= 1e-10))
    throw NumericalError("Poisson solve: direct factorization left relative residual " + std::to_string(res));
  return GridField(grid_, std::vector<double>(p.data(), p.data() + p.size()));
}

GridField solve_poisson(const GridField& kappa) { return PoissonSolver(kappa.grid()).solve(kappa); }

BoundaryTrace neumann_trace(const GridField& p) {
  const std::size_t n = p.grid().n();
  const double s = 2.0 / p.grid().h();
  BoundaryTrace t{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t k = 0; k < n; ++k) {
    t.left[k] = -s * p(0, k);
    t.right[k] = -s * p(n - 1, k);
    t.bottom[k] = -s * p(k, 0);
    t.top[k] = -s * p(k, n - 1);
  }
  return t;
}

}  // namespace lsinv
