#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lsinv/grid.hpp"

namespace lsinv {

/// Thresholds c_1 < ... < c_{n-1} and region values kappa_1..kappa_n. The outer
/// thresholds c_0 = -inf and c_n = +inf are implicit: region 0 is open below, region n-1 open above.
class LevelSetSpec {
 public:
  LevelSetSpec(std::vector<double> interior_thresholds, std::vector<double> region_values);

  std::span<const double> thresholds() const { return thresholds_; }
  std::span<const double> values() const { return values_; }
  std::size_t regions() const { return values_.size(); }

  /// Region index r with c_r <= u < c_{r+1} (zero-based, half-open).
  std::size_t region_of(double u) const;
  double value_of(double u) const { return values_[region_of(u)]; }

  double min_value() const;
  double max_value() const;
  /// Index of the region value closest to kappa (ties go to the lower index).
  std::size_t nearest_region(double kappa) const;

 private:
  std::vector<double> thresholds_;
  std::vector<double> values_;
};

/// Piecewise-constant coefficient kappa = F(u), cell by cell.
GridField apply_level_set_map(const GridField& u, const LevelSetSpec& spec);

/// Fraction of cells with |u - c| <= eps.
double flat_fraction(const GridField& u, double c, double eps);

}  // namespace lsinv
