#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lsinv/darcy.hpp"
#include "lsinv/diagnostics.hpp"
#include "lsinv/forward.hpp"
#include "lsinv/levelset.hpp"
#include "lsinv/likelihood.hpp"
#include "lsinv/mcmc.hpp"
#include "lsinv/prior.hpp"

namespace lsinv {

/// Everything needed to reproduce one synthetic inversion. Defaults are the desk-scale profile.
struct ExperimentConfig {
  std::string model = "potential";  // potential | darcy
  std::string truth_preset = "inclusions";
  std::string truth_file;  // overrides the preset when set
  nlohmann::json truth_params = nlohmann::json::object();
  std::size_t fine_n = 120;
  std::size_t inversion_n = 40;
  LevelSetSpec level_set{{0.0}, {1.0, 0.0}};
  PriorSpec prior = PriorSpec::squared_exponential(0.3, 40);
  std::string basis_cache;
  double noise_fraction = 0.1;
  std::vector<Point> locations;  // empty: model default layout
  double mollifier_width = 0.0;  // <= 0: 2 / inversion_n
  DarcyBC bc = DarcyBC::pressure_drop_x();
  double source = 0.0;  // constant Darcy recharge
  PcnConfig pcn;
  std::size_t n_chains = 4;
  std::uint64_t data_seed = 12345;
  std::vector<std::pair<std::size_t, std::size_t>> density_modes = {{1, 0}, {0, 1}, {1, 1}};
  std::string output = "out";
};

/// Parses a config (or a run manifest, which embeds one under "config"). Throws ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& cfg);

/// Hash of the whole config except the output directory.
std::string config_hash(const ExperimentConfig& cfg);
/// Hash of the fields that determine the synthetic data.
std::string data_hash(const ExperimentConfig& cfg);

/// Burn-in active mode count used when the config does not set one: the 80 leading modes
/// for the Laplacian prior (as many as max(k1, k2) <= 8 gives), 64 for the squared exponential.
std::size_t default_active_modes(const PriorSpec& prior);

GridField make_truth(const ExperimentConfig& cfg, std::size_t n);
/// Truth on the inversion grid: block average of the fine truth when sizes divide, otherwise a direct rasterization.
GridField inversion_truth(const ExperimentConfig& cfg);
std::vector<Point> observation_locations(const ExperimentConfig& cfg);
double mollifier_width(const ExperimentConfig& cfg);
std::unique_ptr<ForwardModel> make_forward_model(const ExperimentConfig& cfg, const Grid& grid);
ObservationSet make_data(const ExperimentConfig& cfg);
std::shared_ptr<const KLBasis> make_basis(const ExperimentConfig& cfg);
/// Throws ConfigError when the data file was not produced from this config.
void check_data_provenance(const ExperimentConfig& cfg, const ObservationSet& data);
LevelSetPosterior make_posterior(const ExperimentConfig& cfg, std::shared_ptr<const KLBasis> basis,
                                 const ObservationSet& data);

struct SummaryReport {
  PosteriorSummary posterior;
  double classification_error = 0.0;
  double psrf_first_mode = 0.0;     // NaN with fewer than two chains
  double psrf_mean_kappa = 0.0;
  std::vector<double> acceptance_rates;
  std::vector<CoefficientDensity> densities;
};

/// Posterior summary, convergence diagnostics and coefficient densities for a set of chains.
SummaryReport summarize_chains(const ExperimentConfig& cfg, const KLBasis& basis,
                               const std::vector<ChainRecord>& records);

// CLI commands. Each writes into cfg.output and returns the main artifact path.
std::filesystem::path cmd_make_truth(const ExperimentConfig& cfg);
std::filesystem::path cmd_gen_data(const ExperimentConfig& cfg);
std::filesystem::path cmd_run(const ExperimentConfig& cfg, const std::filesystem::path& data_file,
                              bool parallel = true);
SummaryReport cmd_summarize(const ExperimentConfig& cfg, const std::filesystem::path& run_dir);

std::vector<ChainRecord> read_run(const ExperimentConfig& cfg, const std::filesystem::path& run_dir);

}  // namespace lsinv
