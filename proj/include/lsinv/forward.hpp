#pragma once

#include <memory>
#include <vector>

#include "lsinv/darcy.hpp"
#include "lsinv/grid.hpp"
#include "lsinv/levelset.hpp"
#include "lsinv/observation.hpp"
#include "lsinv/poisson.hpp"

namespace lsinv {

/// Observations as a function of the coefficient field kappa. Instances may hold solver
/// workspace, so each thread works on its own clone().
class ForwardModel {
 public:
  virtual ~ForwardModel() = default;
  virtual std::vector<double> predict(const GridField& kappa) = 0;
  virtual std::unique_ptr<ForwardModel> clone() const = 0;
  virtual const Grid& grid() const = 0;
  virtual std::size_t observation_count() const = 0;
};

/// Inverse potential: Laplace(p) = kappa, p = 0 on the boundary, observe dp/dnu.
class PotentialModel final : public ForwardModel {
 public:
  PotentialModel(std::shared_ptr<const PoissonSolver> solver, std::shared_ptr<const ObservationWeights> observer);
  PotentialModel(const Grid& grid, ObservationWeights observer);

  std::vector<double> predict(const GridField& kappa) override;
  std::unique_ptr<ForwardModel> clone() const override { return std::make_unique<PotentialModel>(*this); }
  const Grid& grid() const override { return solver_->grid(); }
  std::size_t observation_count() const override { return observer_->count(); }

 private:
  std::shared_ptr<const PoissonSolver> solver_;
  std::shared_ptr<const ObservationWeights> observer_;
};

/// Darcy flow: -div(kappa grad p) = f with mixed boundary conditions, observe p at interior points.
class DarcyModel final : public ForwardModel {
 public:
  DarcyModel(GridField source, DarcyBC bc, std::shared_ptr<const ObservationWeights> observer);

  std::vector<double> predict(const GridField& kappa) override;
  GridField pressure(const GridField& kappa);
  std::unique_ptr<ForwardModel> clone() const override { return std::make_unique<DarcyModel>(*this); }
  const Grid& grid() const override { return source_->grid(); }
  std::size_t observation_count() const override { return observer_->count(); }

 private:
  std::shared_ptr<const GridField> source_;
  std::shared_ptr<const ObservationWeights> observer_;
  DarcySolver solver_;
};

std::vector<double> forward_potential(const GridField& u, const LevelSetSpec& spec, const ObservationWeights& obs);

std::vector<double> forward_darcy_map(const GridField& u, const LevelSetSpec& spec, const GridField& source,
                                      const DarcyBC& bc, const ObservationWeights& obs);

}  // namespace lsinv
