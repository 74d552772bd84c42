#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lsinv/forward.hpp"
#include "lsinv/grid.hpp"

namespace lsinv {

/// Data y with diagonal Gaussian noise covariance diag(gamma) and the provenance needed to
/// regenerate it.
struct ObservationSet {
  std::vector<double> y;
  std::vector<double> gamma;  // noise variances
  std::vector<Point> locations;
  std::string model;          // "potential" | "darcy"
  std::size_t fine_n = 0;
  std::uint64_t seed = 0;
  double noise_fraction = 0.0;
  double sigma_floor = 0.0;
  std::string config_hash;

  std::size_t size() const { return y.size(); }
  /// Throws std::invalid_argument unless J >= 1, sizes agree and all variances are > 0.
  void validate() const;
};

/// Phi = 1/2 sum_j (y_j - G_j)^2 / gamma_j.
double misfit(std::span<const double> prediction, const ObservationSet& obs);

/// Gamma-weighted norm |v|_Gamma = sqrt(sum v_j^2 / gamma_j).
double gamma_norm(std::span<const double> v, std::span<const double> gamma);

struct DataGeneration {
  std::string model;
  std::size_t inversion_n = 0;
  double noise_fraction = 0.1;
  double floor_fraction = 1e-8;  // sigma_min = floor_fraction * max |G|
  std::uint64_t seed = 0;
  std::string config_hash;
};

/// Runs the fine-grid model on the true kappa and adds N(0, sigma_j^2) noise with
/// sigma_j = max(noise_fraction * |G_j|, sigma_min). Throws ConfigError when the truth grid is not
/// strictly finer than the inversion grid.
ObservationSet generate_data(const GridField& truth_kappa, ForwardModel& fine_model, std::span<const Point> locations,
                             const DataGeneration& cfg);

nlohmann::json to_json(const ObservationSet& obs);
ObservationSet observation_set_from_json(const nlohmann::json& j);

}  // namespace lsinv
