#include "lsinv/forward.hpp"

#include <stdexcept>

namespace lsinv {

PotentialModel::PotentialModel(std::shared_ptr<const PoissonSolver> solver,
                               std::shared_ptr<const ObservationWeights> observer)
    : solver_(std::move(solver)), observer_(std::move(observer)) {
  if (observer_->support() != ObservationSupport::BoundaryEdges)
    throw std::invalid_argument("potential model observes boundary fluxes");
  if (!(observer_->grid() == solver_->grid())) throw std::invalid_argument("observer and solver grids differ");
}

PotentialModel::PotentialModel(const Grid& grid, ObservationWeights observer)
    : PotentialModel(std::make_shared<const PoissonSolver>(grid),
                     std::make_shared<const ObservationWeights>(std::move(observer))) {}

std::vector<double> PotentialModel::predict(const GridField& kappa) {
  return observer_->apply(neumann_trace(solver_->solve(kappa)).flattened());
}

DarcyModel::DarcyModel(GridField source, DarcyBC bc, std::shared_ptr<const ObservationWeights> observer)
    : source_(std::make_shared<const GridField>(std::move(source))),
      observer_(std::move(observer)),
      solver_(source_->grid(), bc) {
  if (observer_->support() != ObservationSupport::Cells)
    throw std::invalid_argument("Darcy model observes cell pressures");
  if (!(observer_->grid() == source_->grid())) throw std::invalid_argument("observer and source grids differ");
}

GridField DarcyModel::pressure(const GridField& kappa) { return solver_.solve(kappa, *source_); }

std::vector<double> DarcyModel::predict(const GridField& kappa) { return observer_->apply(pressure(kappa).values()); }

std::vector<double> forward_potential(const GridField& u, const LevelSetSpec& spec, const ObservationWeights& obs) {
  const GridField kappa = apply_level_set_map(u, spec);
  return obs.apply(neumann_trace(solve_poisson(kappa)).flattened());
}

std::vector<double> forward_darcy_map(const GridField& u, const LevelSetSpec& spec, const GridField& source,
                                      const DarcyBC& bc, const ObservationWeights& obs) {
  const GridField kappa = apply_level_set_map(u, spec);
  return obs.apply(solve_darcy(kappa, source, bc).values());
}

}  // namespace lsinv
