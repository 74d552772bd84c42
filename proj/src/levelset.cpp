#include "lsinv/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lsinv/kernels.hpp"

namespace lsinv {

LevelSetSpec::LevelSetSpec(std::vector<double> interior_thresholds, std::vector<double> region_values)
    : thresholds_(std::move(interior_thresholds)), values_(std::move(region_values)) {
  if (values_.empty()) throw std::invalid_argument("level set needs at least one region");
  if (thresholds_.size() + 1 != values_.size())
    throw std::invalid_argument("need exactly one more region value than interior thresholds");
  for (std::size_t k = 0; k < thresholds_.size(); ++k) {
    if (!std::isfinite(thresholds_[k])) throw std::invalid_argument("interior thresholds must be finite");
    if (k > 0 && !(thresholds_[k - 1] < thresholds_[k]))
      throw std::invalid_argument("thresholds must be strictly increasing");
  }
  // Zero is allowed (indicator sources); models needing kappa > 0 check for themselves.
  for (double v : values_)
    if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("region values must be finite and >= 0");
}

std::size_t LevelSetSpec::region_of(double u) const {
  // First threshold strictly greater than u; u == c_k lands in region k + 1.
  return static_cast<std::size_t>(std::upper_bound(thresholds_.begin(), thresholds_.end(), u) -
                                  thresholds_.begin());
}

double LevelSetSpec::min_value() const { return *std::min_element(values_.begin(), values_.end()); }
double LevelSetSpec::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

std::size_t LevelSetSpec::nearest_region(double kappa) const {
  std::size_t best = 0;
  for (std::size_t r = 1; r < values_.size(); ++r)
    if (std::abs(values_[r] - kappa) < std::abs(values_[best] - kappa)) best = r;
  return best;
}

GridField apply_level_set_map(const GridField& u, const LevelSetSpec& spec) {
  std::vector<double> kappa(u.size());
  kernels::threshold(u.values(), spec, kappa);
  return GridField(u.grid(), std::move(kappa));
}

double flat_fraction(const GridField& u, double c, double eps) {
  if (!(eps >= 0.0)) throw std::invalid_argument("eps must be >= 0");
  std::size_t hits = 0;
  for (double v : u.values())
    if (std::abs(v - c) <= eps) ++hits;
  return static_cast<double>(hits) / static_cast<double>(u.size());
}

}  // namespace lsinv
