#include "lsinv/darcy.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "lsinv/errors.hpp"

namespace lsinv {

namespace {

constexpr double kResidualTolerance = 1e-10;

double harmonic(double a, double b) { return 2.0 * a * b / (a + b); }

void check_positive(const GridField& kappa) {
  for (double k : kappa.values())
    if (!(k > 0.0)) throw std::invalid_argument("Darcy solve needs kappa > 0 in every cell");
}

double relative_residual(const LinearSystem& sys, const Eigen::VectorXd& x) {
  const double bnorm = sys.rhs.norm();
  const double rnorm = (sys.matrix * x - sys.rhs).norm();
  return bnorm > 0.0 ? rnorm / bnorm : rnorm;
}

}  // namespace

DarcyBC DarcyBC::homogeneous_dirichlet() {
  const auto d = SideCondition::dirichlet(0.0);
  return {d, d, d, d};
}

DarcyBC DarcyBC::pressure_drop_x() {
  return {SideCondition::dirichlet(1.0), SideCondition::dirichlet(0.0), SideCondition::neumann(0.0),
          SideCondition::neumann(0.0)};
}

void DarcyBC::validate() const {
  using K = SideCondition::Kind;
  if (left.kind != K::Dirichlet && right.kind != K::Dirichlet && bottom.kind != K::Dirichlet &&
      top.kind != K::Dirichlet)
    throw std::invalid_argument("Darcy boundary conditions need at least one Dirichlet side");
}

LinearSystem assemble_darcy(const GridField& kappa, const GridField& source, const DarcyBC& bc) {
  if (!(kappa.grid() == source.grid())) throw std::invalid_argument("kappa and source grids differ");
  bc.validate();
  const Grid& g = kappa.grid();
  const std::size_t n = g.n();
  const double h = g.h();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(5 * g.cells());
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(g.cells()));

  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = static_cast<int>(g.index(i, j));
      const double kc = kappa(i, j);
      double diag = 0.0;
      double b = source(i, j) * h * h;
      auto face = [&](bool interior, std::size_t ni, std::size_t nj, const SideCondition& side) {
        if (interior) {
          const double t = harmonic(kc, kappa(ni, nj));
          diag += t;
          trip.emplace_back(row, static_cast<int>(g.index(ni, nj)), -t);
        } else if (side.kind == SideCondition::Kind::Dirichlet) {
          diag += 2.0 * kc;
          b += 2.0 * kc * side.value;
        } else {
          b += side.value * h;
        }
      };
      face(i > 0, i - 1, j, bc.left);
      face(i + 1 < n, i + 1, j, bc.right);
      face(j > 0, i, j - 1, bc.bottom);
      face(j + 1 < n, i, j + 1, bc.top);
      trip.emplace_back(row, row, diag);
      rhs(row) = b;
    }
  LinearSystem sys{SparseMatrix(static_cast<Eigen::Index>(g.cells()), static_cast<Eigen::Index>(g.cells())),
                   std::move(rhs)};
  sys.matrix.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

DarcySolver::DarcySolver(Grid grid, DarcyBC bc) : grid_(grid), bc_(bc) {
  bc_.validate();
  const auto ones = GridField::constant(grid_, 1.0);
  llt_.analyzePattern(assemble_darcy(ones, GridField::constant(grid_, 0.0), bc_).matrix);
}

GridField DarcySolver::solve(const GridField& kappa, const GridField& source) {
  if (!(kappa.grid() == grid_)) throw std::invalid_argument("kappa grid does not match solver grid");
  check_positive(kappa);
  const LinearSystem sys = assemble_darcy(kappa, source, bc_);
  llt_.factorize(sys.matrix);
  if (llt_.info() != Eigen::Success) throw NumericalError("Darcy factorization failed");
  const Eigen::VectorXd x = llt_.solve(sys.rhs);
  last_residual_ = relative_residual(sys, x);
  if (!(last_residual_ <= kResidualTolerance))
    throw NumericalError("Darcy solve: direct factorization left relative residual " +
                         std::to_string(last_residual_));
  return GridField(grid_, std::vector<double>(x.data(), x.data() + x.size()));
}

GridField solve_darcy(const GridField& kappa, const GridField& source, const DarcyBC& bc) {
  DarcySolver solver(kappa.grid(), bc);
  return solver.solve(kappa, source);
}

double grid_h1_seminorm(const GridField& p) {
  const std::size_t n = p.grid().n();
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      if (i + 1 < n) s += (p(i + 1, j) - p(i, j)) * (p(i + 1, j) - p(i, j));
      if (j + 1 < n) s += (p(i, j + 1) - p(i, j)) * (p(i, j + 1) - p(i, j));
    }
  return std::sqrt(s);
}

double grid_lr_norm(std::span<const double> values, const Grid& grid, double r) {
  double s = 0.0;
  for (double v : values) s += std::pow(std::abs(v), r);
  return std::pow(grid.h() * grid.h() * s, 1.0 / r);
}

}  // namespace lsinv
