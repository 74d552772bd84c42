#include "lsinv/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lsinv/errors.hpp"
#include "lsinv/rng.hpp"

namespace lsinv {

namespace {
// Stream id reserved for observation noise; chains use small stream ids.
constexpr std::uint64_t kNoiseStream = 0xDA7A000000000000ull;
}  // namespace

void ObservationSet::validate() const {
  if (y.empty()) throw std::invalid_argument("observation set is empty");
  if (gamma.size() != y.size()) throw std::invalid_argument("data and noise variance lengths differ");
  for (double g : gamma)
    if (!(g > 0.0) || !std::isfinite(g)) throw std::invalid_argument("noise variances must be positive");
  for (double v : y)
    if (!std::isfinite(v)) throw std::invalid_argument("data must be finite");
}

double misfit(std::span<const double> prediction, const ObservationSet& obs) {
  if (prediction.size() != obs.y.size())
    throw std::invalid_argument("prediction has " + std::to_string(prediction.size()) + " entries, data has " +
                                std::to_string(obs.y.size()));
  double s = 0.0;
  for (std::size_t j = 0; j < prediction.size(); ++j) {
    const double r = obs.y[j] - prediction[j];
    s += r * r / obs.gamma[j];
  }
  return 0.5 * s;
}

double gamma_norm(std::span<const double> v, std::span<const double> gamma) {
  if (v.size() != gamma.size()) throw std::invalid_argument("gamma_norm: size mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) s += v[j] * v[j] / gamma[j];
  return std::sqrt(s);
}

ObservationSet generate_data(const GridField& truth_kappa, ForwardModel& fine_model, std::span<const Point> locations,
                             const DataGeneration& cfg) {
  const std::size_t fine_n = truth_kappa.grid().n();
  if (fine_n <= cfg.inversion_n)
    throw ConfigError("data grid (" + std::to_string(fine_n) + ") must be strictly finer than the inversion grid (" +
                      std::to_string(cfg.inversion_n) + ")");
  if (!(fine_model.grid() == truth_kappa.grid())) throw ConfigError("forward model grid differs from the truth grid");
  if (!(cfg.noise_fraction >= 0.0)) throw ConfigError("noise fraction must be >= 0");
  if (locations.size() != fine_model.observation_count()) throw ConfigError("location list does not match observer");

  const std::vector<double> clean = fine_model.predict(truth_kappa);
  double gmax = 0.0;
  for (double g : clean) gmax = std::max(gmax, std::abs(g));
  const double floor = cfg.floor_fraction * gmax;
  if (!(floor > 0.0)) throw NumericalError("noise-free observations are identically zero; noise floor undefined");

  ObservationSet obs;
  obs.model = cfg.model;
  obs.fine_n = fine_n;
  obs.seed = cfg.seed;
  obs.noise_fraction = cfg.noise_fraction;
  obs.sigma_floor = floor;
  obs.config_hash = cfg.config_hash;
  obs.locations.assign(locations.begin(), locations.end());
  RandomStream rng(cfg.seed, kNoiseStream);
  for (double g : clean) {
    const double sigma = std::max(cfg.noise_fraction * std::abs(g), floor);
    obs.gamma.push_back(sigma * sigma);
    obs.y.push_back(g + sigma * rng.normal());
  }
  return obs;
}

nlohmann::json to_json(const ObservationSet& obs) {
  nlohmann::json locs = nlohmann::json::array();
  for (const auto& p : obs.locations) locs.push_back({p.x1, p.x2});
  return {{"y", obs.y},
          {"gamma", obs.gamma},
          {"locations", locs},
          {"fine_n", obs.fine_n},
          {"seed", obs.seed},
          {"model", obs.model},
          {"noise_fraction", obs.noise_fraction},
          {"sigma_floor", obs.sigma_floor},
          {"config_hash", obs.config_hash}};
}

ObservationSet observation_set_from_json(const nlohmann::json& j) {
  try {
    ObservationSet obs;
    obs.y = j.at("y").get<std::vector<double>>();
    obs.gamma = j.at("gamma").get<std::vector<double>>();
    for (const auto& p : j.at("locations")) obs.locations.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    obs.fine_n = j.at("fine_n").get<std::size_t>();
    obs.seed = j.at("seed").get<std::uint64_t>();
    obs.model = j.at("model").get<std::string>();
    obs.noise_fraction = j.value("noise_fraction", 0.0);
    obs.sigma_floor = j.value("sigma_floor", 0.0);
    obs.config_hash = j.value("config_hash", std::string{});
    obs.validate();
    return obs;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed data file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid data file: ") + e.what());
  }
}

}  // namespace lsinv
