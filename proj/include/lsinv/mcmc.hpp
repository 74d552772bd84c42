#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "lsinv/forward.hpp"
#include "lsinv/levelset.hpp"
#include "lsinv/likelihood.hpp"
#include "lsinv/prior.hpp"
#include "lsinv/rng.hpp"

namespace lsinv {

struct PcnConfig {
  double beta = 0.05;
  std::size_t n_steps = 100000;
  std::size_t n_burn = 10000;
  /// Modes with index >= active_modes stay fixed during burn-in.
  std::size_t active_modes = 64;
  std::size_t thin = 100;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument unless 0 < beta <= 1, thin >= 1 and active_modes <= dimension.
  void validate(std::size_t dimension) const;
};

/// Negative log-likelihood Phi as a function of the KL coefficients.
class MisfitFunction {
 public:
  virtual ~MisfitFunction() = default;
  virtual double operator()(std::span<const double> xi) = 0;
  virtual std::unique_ptr<MisfitFunction> clone() const = 0;
  virtual std::size_t dimension() const = 0;
};

/// Phi(xi) = misfit(G(F(synthesize(xi))), y).
class LevelSetPosterior final : public MisfitFunction {
 public:
  LevelSetPosterior(std::shared_ptr<const KLBasis> basis, LevelSetSpec spec, std::unique_ptr<ForwardModel> model,
                    std::shared_ptr<const ObservationSet> data);
  LevelSetPosterior(const LevelSetPosterior& other);

  double operator()(std::span<const double> xi) override;
  std::unique_ptr<MisfitFunction> clone() const override { return std::make_unique<LevelSetPosterior>(*this); }
  std::size_t dimension() const override { return basis_->size(); }

  GridField kappa(std::span<const double> xi) const;
  std::vector<double> predict(std::span<const double> xi);

  const KLBasis& basis() const { return *basis_; }
  const LevelSetSpec& spec() const { return spec_; }
  const ObservationSet& data() const { return *data_; }

 private:
  std::shared_ptr<const KLBasis> basis_;
  LevelSetSpec spec_;
  std::unique_ptr<ForwardModel> model_;
  std::shared_ptr<const ObservationSet> data_;
};

/// Wraps a callable; the callable must be copyable and free of shared mutable state.
class FunctionMisfit final : public MisfitFunction {
 public:
  FunctionMisfit(std::size_t dimension, std::function<double(std::span<const double>)> f)
      : dimension_(dimension), f_(std::move(f)) {}
  double operator()(std::span<const double> xi) override { return f_(xi); }
  std::unique_ptr<MisfitFunction> clone() const override { return std::make_unique<FunctionMisfit>(*this); }
  std::size_t dimension() const override { return dimension_; }

 private:
  std::size_t dimension_;
  std::function<double(std::span<const double>)> f_;
};

/// Row-major sample matrix.
struct SampleMatrix {
  std::size_t cols = 0;
  std::vector<double> data;

  std::size_t rows() const { return cols ? data.size() / cols : 0; }
  std::span<const double> row(std::size_t r) const { return std::span(data).subspan(r * cols, cols); }
  void append(std::span<const double> r) { data.insert(data.end(), r.begin(), r.end()); }
  std::vector<double> column(std::size_t c) const;
};

struct ChainRecord {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  PcnConfig config;
  std::vector<double> initial_state;
  SampleMatrix burn_in_samples;  // every thin-th burn-in state
  SampleMatrix samples;          // every thin-th post-burn-in state
  std::vector<std::uint8_t> accepted;  // per step, burn-in included
  std::vector<double> misfit_trace;    // Phi of the current state after each step
  double acceptance_rate = 0.0;        // over post-burn-in steps
  bool complete = false;

  friend bool operator==(const ChainRecord&, const ChainRecord&);
};

/// xi' = sqrt(1 - beta^2) xi + beta zeta on unfrozen coordinates; frozen ones are copied.
/// A normal deviate is drawn for every coordinate so the stream position does not depend on the mask.
KLState pcn_propose(const KLState& state, double beta, RandomStream& rng);

double accept_probability(double phi_current, double phi_proposed);

/// Single pCN chain on RandomStream(cfg.seed, stream), started from a prior draw.
/// Throws NumericalError naming the step if the misfit fails or is not finite.
ChainRecord run_chain(MisfitFunction& target, const PcnConfig& cfg, std::uint64_t stream = 0);

/// Chain k runs on stream k with its own clone of the target. Results are independent of
/// scheduling; parallel = false runs the same chains one after another.
std::vector<ChainRecord> run_multichain(const MisfitFunction& target, const PcnConfig& cfg, std::size_t n_chains,
                                        bool parallel = true);

nlohmann::json to_json(const PcnConfig& cfg);
PcnConfig pcn_config_from_json(const nlohmann::json& j, const PcnConfig& defaults);

/// <stem>.samples.bin (u64 rows, u64 cols, row-major f64), <stem>.trace.csv and, written last,
/// <stem>.json carrying `extra` plus "complete": true.
void write_chain_record(const std::filesystem::path& dir, const std::string& stem, const ChainRecord& record,
                        const nlohmann::json& extra);
ChainRecord read_chain_record(const std::filesystem::path& dir, const std::string& stem, nlohmann::json* meta = nullptr);

std::vector<unsigned char> encode_samples(const SampleMatrix& m);
SampleMatrix decode_samples(std::span<const unsigned char> bytes);

}  // namespace lsinv
