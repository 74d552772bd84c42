#include "lsinv/experiment.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "lsinv/errors.hpp"
#include "lsinv/io.hpp"
#include "lsinv/presets.hpp"

namespace lsinv {

namespace {

using nlohmann::json;

// Diagnostics draw their prior reference samples from this stream of the run seed.
constexpr std::uint64_t kDiagnosticStream = 0xD1A6000000000000ull;
constexpr std::size_t kPriorDensityDraws = 2000;

json side_to_json(const SideCondition& s) {
  return s.kind == SideCondition::Kind::Dirichlet ? json{{"dirichlet", s.value}} : json{{"neumann", s.value}};
}

SideCondition side_from_json(const json& j, const char* name) {
  if (j.contains("dirichlet")) return SideCondition::dirichlet(j.at("dirichlet").get<double>());
  if (j.contains("neumann")) return SideCondition::neumann(j.at("neumann").get<double>());
  throw ConfigError(std::string("boundary side '") + name + "' needs a dirichlet or neumann value");
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_header(const std::string& hash) { return "# config_hash=" + hash + "\n"; }

std::vector<std::vector<double>> first_mode_series(const std::vector<ChainRecord>& records) {
  std::vector<std::vector<double>> out;
  for (const auto& r : records) out.push_back(r.samples.column(0));
  return out;
}

std::vector<std::vector<double>> mean_kappa_series(const std::vector<ChainRecord>& records, const KLBasis& basis,
                                                   const LevelSetSpec& spec) {
  std::vector<std::vector<double>> out;
  for (const auto& r : records) {
    std::vector<double> s;
    for (std::size_t k = 0; k < r.samples.rows(); ++k)
      s.push_back(apply_level_set_map(synthesize(basis, r.samples.row(k)), spec).mean());
    out.push_back(std::move(s));
  }
  return out;
}

bool psrf_defined(const std::vector<std::vector<double>>& chains) {
  return chains.size() >= 2 && chains.front().size() >= 10;
}

double safe_psrf(const std::vector<std::vector<double>>& chains) {
  if (!psrf_defined(chains)) return std::numeric_limits<double>::quiet_NaN();
  try {
    return psrf(chains);
  } catch (const NumericalError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

std::size_t default_active_modes(const PriorSpec& prior) {
  return prior.kind == CovarianceKind::WhittleLaplacian ? 80 : 64;
}

ExperimentConfig parse_config(const json& root) {
  const json& j = root.contains("config") && root.at("config").is_object() ? root.at("config") : root;
  ExperimentConfig c;
  try {
    c.model = j.value("model", c.model);
    if (c.model != "potential" && c.model != "darcy") throw ConfigError("model must be 'potential' or 'darcy'");
    if (j.contains("truth")) {
      const auto& t = j.at("truth");
      c.truth_preset = t.value("preset", c.truth_preset);
      c.truth_file = t.value("file", std::string{});
      if (t.contains("params")) c.truth_params = t.at("params");
    }
    c.fine_n = j.value("fine_n", c.fine_n);
    c.inversion_n = j.value("inversion_n", c.inversion_n);
    if (c.inversion_n == 0) throw ConfigError("inversion_n must be positive");
    if (c.fine_n <= c.inversion_n)
      throw ConfigError("fine_n (" + std::to_string(c.fine_n) + ") must exceed inversion_n (" +
                        std::to_string(c.inversion_n) + ") to avoid an inverse crime");
    if (j.contains("level_set")) {
      const auto& l = j.at("level_set");
      c.level_set = LevelSetSpec(l.at("thresholds").get<std::vector<double>>(), l.at("values").get<std::vector<double>>());
    } else if (c.model == "darcy") {
      c.level_set = LevelSetSpec({0.0, 1.0}, {7.0, 50.0, 500.0});
    }
    const json p = j.value("prior", json::object());
    const std::string kind = p.value("kind", std::string("sqexp"));
    std::optional<std::size_t> trunc;
    if (p.contains("truncation") && !p.at("truncation").is_null()) trunc = p.at("truncation").get<std::size_t>();
    if (kind == "sqexp") {
      c.prior = PriorSpec::squared_exponential(p.value("L", 0.3), c.inversion_n, trunc);
      if (!(c.prior.length > 0.0)) throw ConfigError("prior.L must be > 0");
    } else if (kind == "laplacian") {
      c.prior = PriorSpec::laplacian(p.value("alpha", 2.0), c.inversion_n, trunc);
      if (!(c.prior.alpha > 1.0)) throw ConfigError("prior.alpha must be > 1");
    } else {
      throw ConfigError("prior.kind must be 'sqexp' or 'laplacian'");
    }
    c.basis_cache = p.value("cache", std::string{});
    c.noise_fraction = j.value("noise_fraction", c.noise_fraction);
    if (!(c.noise_fraction >= 0.0)) throw ConfigError("noise_fraction must be >= 0");
    if (j.contains("observations")) {
      const auto& o = j.at("observations");
      if (o.contains("locations"))
        for (const auto& q : o.at("locations")) c.locations.push_back({q.at(0).get<double>(), q.at(1).get<double>()});
      c.mollifier_width = o.value("width", 0.0);
    }
    if (j.contains("darcy")) {
      const auto& d = j.at("darcy");
      if (d.contains("bc")) {
        const auto& b = d.at("bc");
        c.bc = {side_from_json(b.at("left"), "left"), side_from_json(b.at("right"), "right"),
                side_from_json(b.at("bottom"), "bottom"), side_from_json(b.at("top"), "top")};
      }
      c.source = d.value("source", 0.0);
    }
    c.bc.validate();
    PcnConfig defaults;
    defaults.active_modes = default_active_modes(c.prior);
    c.pcn = pcn_config_from_json(j.value("pcn", json::object()), defaults);
    if (!(c.pcn.beta > 0.0 && c.pcn.beta <= 1.0)) throw ConfigError("pcn.beta must lie in (0, 1]");
    if (c.pcn.thin == 0) throw ConfigError("pcn.thin must be >= 1");
    c.n_chains = j.value("n_chains", c.n_chains);
    if (c.n_chains == 0) throw ConfigError("n_chains must be >= 1");
    c.data_seed = j.value("data_seed", c.data_seed);
    if (j.contains("diagnostics") && j.at("diagnostics").contains("density_modes")) {
      c.density_modes.clear();
      for (const auto& m : j.at("diagnostics").at("density_modes"))
        c.density_modes.emplace_back(m.at(0).get<std::size_t>(), m.at(1).get<std::size_t>());
    }
    c.output = j.value("output", c.output);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(io::read_text(path));
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  json truth = {{"preset", c.truth_preset}, {"params", c.truth_params}};
  if (!c.truth_file.empty()) truth["file"] = c.truth_file;
  json prior = c.prior.kind == CovarianceKind::SquaredExponential ? json{{"kind", "sqexp"}, {"L", c.prior.length}}
                                                                  : json{{"kind", "laplacian"}, {"alpha", c.prior.alpha}};
  prior["truncation"] = c.prior.truncation ? json(*c.prior.truncation) : json(nullptr);
  if (!c.basis_cache.empty()) prior["cache"] = c.basis_cache;
  json locs = json::array();
  for (const auto& p : c.locations) locs.push_back({p.x1, p.x2});
  json modes = json::array();
  for (const auto& [a, b] : c.density_modes) modes.push_back({a, b});
  return {{"model", c.model},
          {"truth", truth},
          {"fine_n", c.fine_n},
          {"inversion_n", c.inversion_n},
          {"level_set", {{"thresholds", std::vector<double>(c.level_set.thresholds().begin(), c.level_set.thresholds().end())},
                         {"values", std::vector<double>(c.level_set.values().begin(), c.level_set.values().end())}}},
          {"prior", prior},
          {"noise_fraction", c.noise_fraction},
          {"observations", {{"locations", locs}, {"width", c.mollifier_width}}},
          {"darcy",
           {{"bc",
             {{"left", side_to_json(c.bc.left)},
              {"right", side_to_json(c.bc.right)},
              {"bottom", side_to_json(c.bc.bottom)},
              {"top", side_to_json(c.bc.top)}}},
            {"source", c.source}}},
          {"pcn", to_json(c.pcn)},
          {"n_chains", c.n_chains},
          {"data_seed", c.data_seed},
          {"diagnostics", {{"density_modes", modes}}},
          {"output", c.output}};
}

std::string config_hash(const ExperimentConfig& cfg) {
  json j = to_json(cfg);
  j.erase("output");
  j["prior"].erase("cache");
  return io::fnv1a_hex(j.dump());
}

std::string data_hash(const ExperimentConfig& cfg) {
  const json full = to_json(cfg);
  json j;
  for (const char* key : {"model", "truth", "fine_n", "inversion_n", "level_set", "noise_fraction", "observations",
                          "darcy", "data_seed"})
    j[key] = full.at(key);
  return io::fnv1a_hex(j.dump());
}

GridField make_truth(const ExperimentConfig& cfg, std::size_t n) {
  if (!cfg.truth_file.empty()) {
    GridField f = [&] {
      try {
        return read_field(cfg.truth_file);
      } catch (const std::exception& e) {
        throw ConfigError("cannot read truth file " + cfg.truth_file + ": " + e.what());
      }
    }();
    if (f.grid().n() == n) return f;
    if (f.grid().n() % n == 0) return restrict_field(f, n);
    throw ConfigError("truth file grid " + std::to_string(f.grid().n()) + " cannot be brought to " + std::to_string(n));
  }
  return rasterize_preset(cfg.truth_preset, n, cfg.level_set, cfg.truth_params);
}

GridField inversion_truth(const ExperimentConfig& cfg) {
  if (cfg.fine_n % cfg.inversion_n == 0) return restrict_field(make_truth(cfg, cfg.fine_n), cfg.inversion_n);
  return make_truth(cfg, cfg.inversion_n);
}

std::vector<Point> observation_locations(const ExperimentConfig& cfg) {
  if (!cfg.locations.empty()) return cfg.locations;
  return cfg.model == "potential" ? default_boundary_locations(16) : default_interior_locations(5);
}

double mollifier_width(const ExperimentConfig& cfg) {
  return cfg.mollifier_width > 0.0 ? cfg.mollifier_width : 2.0 / static_cast<double>(cfg.inversion_n);
}

std::unique_ptr<ForwardModel> make_forward_model(const ExperimentConfig& cfg, const Grid& grid) {
  const auto locs = observation_locations(cfg);
  const double width = mollifier_width(cfg);
  try {
    if (cfg.model == "potential")
      return std::make_unique<PotentialModel>(grid, build_boundary_observer(locs, width, grid));
    auto obs = std::make_shared<const ObservationWeights>(build_interior_observer(locs, width, grid));
    return std::make_unique<DarcyModel>(GridField::constant(grid, cfg.source), cfg.bc, std::move(obs));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("observation layout: ") + e.what());
  }
}

ObservationSet make_data(const ExperimentConfig& cfg) {
  const GridField truth = make_truth(cfg, cfg.fine_n);
  if (cfg.model == "darcy" && !(truth.grid().n() > 0 && cfg.level_set.min_value() > 0.0))
    throw ConfigError("Darcy model needs positive region values");
  auto fine = make_forward_model(cfg, truth.grid());
  DataGeneration gen{cfg.model, cfg.inversion_n, cfg.noise_fraction, 1e-8, cfg.data_seed, data_hash(cfg)};
  return generate_data(truth, *fine, observation_locations(cfg), gen);
}

std::shared_ptr<const KLBasis> make_basis(const ExperimentConfig& cfg) {
  const auto matches = [&](const KLBasis& b) {
    const double want = cfg.prior.kind == CovarianceKind::WhittleLaplacian ? cfg.prior.alpha : cfg.prior.length;
    return b.kind() == cfg.prior.kind && b.parameter() == want && b.grid().n() == cfg.inversion_n &&
           (!cfg.prior.truncation || b.size() == *cfg.prior.truncation);
  };
  if (!cfg.basis_cache.empty() && std::filesystem::exists(cfg.basis_cache)) {
    auto cached = std::make_shared<const KLBasis>(read_basis(cfg.basis_cache));
    if (matches(*cached)) return cached;
  }
  auto basis = std::make_shared<const KLBasis>(build_basis(cfg.prior));
  if (!cfg.basis_cache.empty()) write_basis(cfg.basis_cache, *basis);
  return basis;
}

void check_data_provenance(const ExperimentConfig& cfg, const ObservationSet& data) {
  if (data.model != cfg.model) throw ConfigError("data file was generated for model '" + data.model + "'");
  if (data.fine_n != cfg.fine_n) throw ConfigError("data file fine grid does not match the config");
  if (data.size() != observation_locations(cfg).size())
    throw ConfigError("data file has " + std::to_string(data.size()) + " observations, config expects " +
                      std::to_string(observation_locations(cfg).size()));
  if (data.config_hash != data_hash(cfg)) throw ConfigError("data file provenance hash does not match the config");
}

LevelSetPosterior make_posterior(const ExperimentConfig& cfg, std::shared_ptr<const KLBasis> basis,
                                 const ObservationSet& data) {
  if (cfg.model == "darcy" && !(cfg.level_set.min_value() > 0.0))
    throw ConfigError("Darcy model needs positive region values");
  return LevelSetPosterior(std::move(basis), cfg.level_set, make_forward_model(cfg, Grid(cfg.inversion_n)),
                           std::make_shared<const ObservationSet>(data));
}

SummaryReport summarize_chains(const ExperimentConfig& cfg, const KLBasis& basis,
                               const std::vector<ChainRecord>& records) {
  if (records.empty()) throw ConfigError("nothing to summarize: no chain records");
  std::vector<SampleMatrix> samples;
  for (const auto& r : records) samples.push_back(r.samples);
  SummaryReport rep{pushforward_summary(samples, basis, cfg.level_set), 0.0, 0.0, 0.0, {}, {}};
  const GridField truth = inversion_truth(cfg);
  rep.classification_error = classification_error(rep.posterior.pushforward_mean, truth, cfg.level_set);
  rep.psrf_first_mode = safe_psrf(first_mode_series(records));
  rep.psrf_mean_kappa = safe_psrf(mean_kappa_series(records, basis, cfg.level_set));
  for (const auto& r : records) rep.acceptance_rates.push_back(r.acceptance_rate);
  RandomStream rng(cfg.pcn.seed, kDiagnosticStream);
  for (const auto& [k1, k2] : cfg.density_modes) {
    if (k1 >= cfg.inversion_n || k2 >= cfg.inversion_n) throw ConfigError("density mode outside the grid");
    rep.densities.push_back(coefficient_density(samples, basis, cfg.level_set, k1, k2, truth, kPriorDensityDraws, rng));
  }
  return rep;
}

std::filesystem::path cmd_make_truth(const ExperimentConfig& cfg) {
  const GridField truth = make_truth(cfg, cfg.fine_n);
  const std::filesystem::path out = std::filesystem::path(cfg.output) / "truth.bin";
  write_field(out, truth);
  io::atomic_write(std::filesystem::path(cfg.output) / "truth.csv", field_to_csv(truth));
  return out;
}

std::filesystem::path cmd_gen_data(const ExperimentConfig& cfg) {
  const ObservationSet data = make_data(cfg);
  const std::filesystem::path out = std::filesystem::path(cfg.output) / "data.json";
  io::atomic_write(out, to_json(data).dump(2));
  return out;
}

std::filesystem::path cmd_run(const ExperimentConfig& cfg, const std::filesystem::path& data_file, bool parallel) {
  ObservationSet data;
  try {
    data = observation_set_from_json(json::parse(io::read_text(data_file)));
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse data file " + data_file.string() + ": " + e.what());
  } catch (const std::runtime_error& e) {
    if (dynamic_cast<const ConfigError*>(&e)) throw;
    throw ConfigError(e.what());
  }
  check_data_provenance(cfg, data);
  auto basis = make_basis(cfg);
  const LevelSetPosterior posterior = make_posterior(cfg, basis, data);
  try {
    cfg.pcn.validate(posterior.dimension());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto records = run_multichain(posterior, cfg.pcn, cfg.n_chains, parallel);

  const std::filesystem::path dir = std::filesystem::path(cfg.output) / "chains";
  const std::string hash = config_hash(cfg);
  json stems = json::array();
  for (std::size_t k = 0; k < records.size(); ++k) {
    const std::string stem = "chain_" + std::to_string(k);
    write_chain_record(dir, stem, records[k], {{"config_hash", hash}, {"data_hash", data.config_hash}});
    stems.push_back(stem);
  }
  json manifest = {{"config", to_json(cfg)},
                   {"config_hash", hash},
                   {"data_file", std::filesystem::absolute(data_file).string()},
                   {"data_hash", data.config_hash},
                   {"chains", stems},
                   {"dimension", posterior.dimension()},
                   {"tool", "lsinv 1.0"}};
  const auto manifest_path = std::filesystem::path(cfg.output) / "manifest.json";
  io::atomic_write(manifest_path, manifest.dump(2));
  return manifest_path;
}

std::vector<ChainRecord> read_run(const ExperimentConfig& cfg, const std::filesystem::path& run_dir) {
  const auto manifest_path = run_dir / "manifest.json";
  if (!std::filesystem::exists(manifest_path)) throw ConfigError("no manifest in " + run_dir.string());
  const json manifest = json::parse(io::read_text(manifest_path));
  const std::string hash = config_hash(cfg);
  if (manifest.value("config_hash", std::string{}) != hash)
    throw ConfigError("run in " + run_dir.string() + " was produced by a different config");
  std::vector<ChainRecord> records;
  for (const auto& stem : manifest.at("chains")) {
    json meta;
    records.push_back(read_chain_record(run_dir / "chains", stem.get<std::string>(), &meta));
    if (meta.value("config_hash", std::string{}) != hash)
      throw ConfigError("chain record " + stem.get<std::string>() + " has mixed provenance");
  }
  return records;
}

SummaryReport cmd_summarize(const ExperimentConfig& cfg, const std::filesystem::path& run_dir) {
  const auto records = read_run(cfg, run_dir);
  const auto basis = make_basis(cfg);
  SummaryReport rep = summarize_chains(cfg, *basis, records);

  const std::string hash = config_hash(cfg);
  const auto dir = std::filesystem::path(cfg.output) / "summary";
  write_field(dir / "mean_u.bin", rep.posterior.mean_u);
  write_field(dir / "kappa_of_mean_u.bin", rep.posterior.kappa_of_mean_u);
  write_field(dir / "pushforward_mean.bin", rep.posterior.pushforward_mean);
  write_field(dir / "pushforward_variance.bin", rep.posterior.pushforward_variance);

  const std::size_t thin = cfg.pcn.thin;
  {
    std::string csv = csv_header(hash) + "lag,value\n";
    const auto series = records.front().samples.column(0);
    if (series.size() >= 2) {
      try {
        const auto acf = autocorrelation(series, std::min<std::size_t>(series.size() - 1, 200));
        for (std::size_t k = 0; k < acf.size(); ++k) csv += std::to_string(k * thin) + ',' + format_double(acf[k]) + '\n';
      } catch (const NumericalError&) {
        // constant trace: no ACF rows
      }
    }
    io::atomic_write(dir / "acf.csv", csv);
  }
  {
    std::string csv = csv_header(hash) + "step,psrf_first_mode,psrf_mean_kappa\n";
    const auto a = first_mode_series(records);
    const auto b = mean_kappa_series(records, *basis, cfg.level_set);
    if (psrf_defined(a)) {
      const std::size_t stride = std::max<std::size_t>(10, a.front().size() / 50);
      const auto pa = psrf_prefixes(a, stride);
      const auto pb = psrf_prefixes(b, stride);
      for (std::size_t k = 0; k < pa.size(); ++k)
        csv += std::to_string(pa[k].length * thin) + ',' + format_double(pa[k].value) + ',' +
               format_double(pb[k].value) + '\n';
    }
    io::atomic_write(dir / "psrf.csv", csv);
  }
  for (const auto& d : rep.densities) {
    std::string csv = csv_header(hash) + "bin_center,prior_density,posterior_density,truth_value\n";
    for (std::size_t b = 0; b < d.posterior.density.size(); ++b)
      csv += format_double(d.posterior.center(b)) + ',' +
             format_double(d.prior.density.empty() ? 0.0 : d.prior.density[b]) + ',' +
             format_double(d.posterior.density[b]) + ',' + format_double(d.truth) + '\n';
    io::atomic_write(dir / ("density_" + std::to_string(d.k1) + "_" + std::to_string(d.k2) + ".csv"), csv);
  }
  const auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json summary = {{"config_hash", hash},
                  {"sample_count", rep.posterior.sample_count},
                  {"classification_error", rep.classification_error},
                  {"psrf_first_mode", num(rep.psrf_first_mode)},
                  {"psrf_mean_kappa", num(rep.psrf_mean_kappa)},
                  {"acceptance_rates", rep.acceptance_rates},
                  {"fields",
                   {"mean_u.bin", "kappa_of_mean_u.bin", "pushforward_mean.bin", "pushforward_variance.bin"}}};
  io::atomic_write(dir / "summary.json", summary.dump(2));
  return rep;
}

}  // namespace lsinv
