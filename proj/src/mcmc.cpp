#include "lsinv/mcmc.hpp"

#include <charconv>
#include <cmath>
#include <exception>
#include <sstream>
#include <stdexcept>

#include "lsinv/errors.hpp"
#include "lsinv/io.hpp"

namespace lsinv {

void PcnConfig::validate(std::size_t dimension) const {
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("pCN step beta must lie in (0, 1]");
  if (thin == 0) throw std::invalid_argument("thinning interval must be >= 1");
  if (active_modes > dimension)
    throw std::invalid_argument("burn-in active mode count " + std::to_string(active_modes) + " exceeds dimension " +
                                std::to_string(dimension));
}

LevelSetPosterior::LevelSetPosterior(std::shared_ptr<const KLBasis> basis, LevelSetSpec spec,
                                     std::unique_ptr<ForwardModel> model, std::shared_ptr<const ObservationSet> data)
    : basis_(std::move(basis)), spec_(std::move(spec)), model_(std::move(model)), data_(std::move(data)) {
  if (!(model_->grid() == basis_->grid())) throw std::invalid_argument("forward model and prior grids differ");
  if (model_->observation_count() != data_->size())
    throw std::invalid_argument("forward model and data disagree on the number of observations");
}

LevelSetPosterior::LevelSetPosterior(const LevelSetPosterior& other)
    : basis_(other.basis_), spec_(other.spec_), model_(other.model_->clone()), data_(other.data_) {}

GridField LevelSetPosterior::kappa(std::span<const double> xi) const {
  return apply_level_set_map(synthesize(*basis_, xi), spec_);
}

std::vector<double> LevelSetPosterior::predict(std::span<const double> xi) { return model_->predict(kappa(xi)); }

double LevelSetPosterior::operator()(std::span<const double> xi) { return misfit(predict(xi), *data_); }

std::vector<double> SampleMatrix::column(std::size_t c) const {
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = data[r * cols + c];
  return out;
}

bool operator==(const ChainRecord& a, const ChainRecord& b) {
  return a.seed == b.seed && a.stream == b.stream && a.initial_state == b.initial_state &&
         a.burn_in_samples.cols == b.burn_in_samples.cols && a.burn_in_samples.data == b.burn_in_samples.data &&
         a.samples.cols == b.samples.cols && a.samples.data == b.samples.data && a.accepted == b.accepted &&
         a.misfit_trace == b.misfit_trace && a.acceptance_rate == b.acceptance_rate && a.complete == b.complete;
}

KLState pcn_propose(const KLState& state, double beta, RandomStream& rng) {
  if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("pCN step beta must lie in (0, 1]");
  const double keep = std::sqrt(1.0 - beta * beta);
  KLState next = state;
  for (std::size_t k = 0; k < state.size(); ++k) {
    const double zeta = rng.normal();
    if (!state.frozen[k]) next.xi[k] = keep * state.xi[k] + beta * zeta;
  }
  return next;
}

double accept_probability(double phi_current, double phi_proposed) {
  const double d = phi_current - phi_proposed;
  return d >= 0.0 ? 1.0 : std::exp(d);
}

ChainRecord run_chain(MisfitFunction& target, const PcnConfig& cfg, std::uint64_t stream) {
  const std::size_t dim = target.dimension();
  cfg.validate(dim);
  RandomStream rng(cfg.seed, stream);

  ChainRecord rec;
  rec.seed = cfg.seed;
  rec.stream = stream;
  rec.config = cfg;
  rec.samples.cols = rec.burn_in_samples.cols = dim;
  rec.accepted.reserve(cfg.n_burn + cfg.n_steps);
  rec.misfit_trace.reserve(cfg.n_burn + cfg.n_steps);

  KLState state = draw_coefficients(dim, rng);
  rec.initial_state = state.xi;
  if (cfg.n_burn > 0) state.freeze_from(cfg.active_modes);

  auto evaluate = [&](const KLState& s, std::size_t step) {
    double phi;
    try {
      phi = target(s.xi);
    } catch (const std::exception& e) {
      throw NumericalError("chain " + std::to_string(stream) + " aborted at step " + std::to_string(step) + ": " +
                           e.what());
    }
    if (!std::isfinite(phi))
      throw NumericalError("chain " + std::to_string(stream) + ": non-finite misfit at step " + std::to_string(step));
    return phi;
  };

  double phi = evaluate(state, 0);
  std::size_t accepted_after_burn = 0;
  const std::size_t total = cfg.n_burn + cfg.n_steps;
  for (std::size_t step = 0; step < total; ++step) {
    if (step == cfg.n_burn) state.unfreeze_all();
    const KLState proposal = pcn_propose(state, cfg.beta, rng);
    const double phi_prop = evaluate(proposal, step + 1);
    const bool accept = rng.uniform() < accept_probability(phi, phi_prop);
    if (accept) {
      state.xi = proposal.xi;
      phi = phi_prop;
    }
    rec.accepted.push_back(accept ? 1 : 0);
    rec.misfit_trace.push_back(phi);
    if (step < cfg.n_burn) {
      if ((step + 1) % cfg.thin == 0) rec.burn_in_samples.append(state.xi);
    } else {
      accepted_after_burn += accept ? 1 : 0;
      if ((step - cfg.n_burn + 1) % cfg.thin == 0) rec.samples.append(state.xi);
    }
  }
  if (cfg.n_steps > 0) {
    rec.acceptance_rate = static_cast<double>(accepted_after_burn) / static_cast<double>(cfg.n_steps);
  } else if (total > 0) {
    std::size_t a = 0;
    for (auto v : rec.accepted) a += v;
    rec.acceptance_rate = static_cast<double>(a) / static_cast<double>(total);
  }
  rec.complete = true;
  return rec;
}

std::vector<ChainRecord> run_multichain(const MisfitFunction& target, const PcnConfig& cfg, std::size_t n_chains,
                                        bool parallel) {
  if (n_chains == 0) throw std::invalid_argument("need at least one chain");
  cfg.validate(target.dimension());
  std::vector<ChainRecord> out(n_chains);
  std::vector<std::exception_ptr> errors(n_chains);
  const auto count = static_cast<std::ptrdiff_t>(n_chains);
#pragma omp parallel for schedule(dynamic, 1) if (parallel)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    try {
      auto local = target.clone();
      out[k] = run_chain(*local, cfg, static_cast<std::uint64_t>(k));
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

nlohmann::json to_json(const PcnConfig& cfg) {
  return {{"beta", cfg.beta},   {"n_steps", cfg.n_steps}, {"n_burn", cfg.n_burn},
          {"active_modes", cfg.active_modes}, {"thin", cfg.thin}, {"seed", cfg.seed}};
}

PcnConfig pcn_config_from_json(const nlohmann::json& j, const PcnConfig& defaults) {
  PcnConfig c = defaults;
  c.beta = j.value("beta", c.beta);
  c.n_steps = j.value("n_steps", c.n_steps);
  c.n_burn = j.value("n_burn", c.n_burn);
  c.active_modes = j.value("active_modes", c.active_modes);
  c.thin = j.value("thin", c.thin);
  c.seed = j.value("seed", c.seed);
  return c;
}

std::vector<unsigned char> encode_samples(const SampleMatrix& m) {
  std::vector<unsigned char> out;
  out.reserve(16 + 8 * m.data.size());
  io::put_u64_le(out, m.rows());
  io::put_u64_le(out, m.cols);
  for (double v : m.data) io::put_f64_le(out, v);
  return out;
}

SampleMatrix decode_samples(std::span<const unsigned char> bytes) {
  const std::uint64_t rows = io::get_u64_le(bytes, 0), cols = io::get_u64_le(bytes, 8);
  if (bytes.size() != 16 + 8 * rows * cols) throw ConfigError("sample file size does not match its header");
  SampleMatrix m{static_cast<std::size_t>(cols), std::vector<double>(rows * cols)};
  for (std::size_t k = 0; k < m.data.size(); ++k) m.data[k] = io::get_f64_le(bytes, 16 + 8 * k);
  return m;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

void write_chain_record(const std::filesystem::path& dir, const std::string& stem, const ChainRecord& record,
                        const nlohmann::json& extra) {
  io::atomic_write(dir / (stem + ".samples.bin"), encode_samples(record.samples));
  io::atomic_write(dir / (stem + ".burnin.bin"), encode_samples(record.burn_in_samples));
  std::string csv;
  if (extra.contains("config_hash")) csv += "# config_hash=" + extra["config_hash"].get<std::string>() + "\n";
  csv += "step,phi,accepted\n";
  for (std::size_t s = 0; s < record.misfit_trace.size(); ++s)
    csv += std::to_string(s + 1) + ',' + format_double(record.misfit_trace[s]) + ',' +
           (record.accepted[s] ? "1" : "0") + '\n';
  io::atomic_write(dir / (stem + ".trace.csv"), csv);

  nlohmann::json meta = extra;
  meta["seed"] = record.seed;
  meta["stream"] = record.stream;
  meta["pcn"] = to_json(record.config);
  meta["dimension"] = record.samples.cols;
  meta["initial_state"] = record.initial_state;
  meta["acceptance_rate"] = record.acceptance_rate;
  meta["sample_count"] = record.samples.rows();
  meta["complete"] = record.complete;
  // Written last: a record counts as complete only once this file exists.
  io::atomic_write(dir / (stem + ".json"), meta.dump(2));
}

ChainRecord read_chain_record(const std::filesystem::path& dir, const std::string& stem, nlohmann::json* meta_out) {
  const auto meta_path = dir / (stem + ".json");
  if (!std::filesystem::exists(meta_path)) throw ConfigError("missing chain record " + meta_path.string());
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(io::read_text(meta_path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("unreadable chain record " + meta_path.string() + ": " + e.what());
  }
  if (!meta.value("complete", false)) throw ConfigError("chain record " + stem + " is not complete");
  ChainRecord rec;
  rec.seed = meta.at("seed").get<std::uint64_t>();
  rec.stream = meta.at("stream").get<std::uint64_t>();
  rec.config = pcn_config_from_json(meta.at("pcn"), PcnConfig{});
  rec.initial_state = meta.at("initial_state").get<std::vector<double>>();
  rec.acceptance_rate = meta.at("acceptance_rate").get<double>();
  rec.complete = true;
  rec.samples = decode_samples(io::read_bytes(dir / (stem + ".samples.bin")));
  rec.burn_in_samples = decode_samples(io::read_bytes(dir / (stem + ".burnin.bin")));
  std::istringstream csv(io::read_text(dir / (stem + ".trace.csv")));
  std::string line;
  while (std::getline(csv, line)) {
    if (line.empty() || line[0] == '#' || line[0] == 's') continue;
    const auto c1 = line.find(','), c2 = line.rfind(',');
    rec.misfit_trace.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
    rec.accepted.push_back(line.substr(c2 + 1) == "1" ? 1 : 0);
  }
  if (meta_out) *meta_out = std::move(meta);
  return rec;
}

}  // namespace lsinv
