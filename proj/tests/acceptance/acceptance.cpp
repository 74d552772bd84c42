// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance <work-dir> [criterion ...]
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lsinv/darcy.hpp"
#include "lsinv/diagnostics.hpp"
#include "lsinv/errors.hpp"
#include "lsinv/experiment.hpp"
#include "lsinv/io.hpp"
#include "lsinv/poisson.hpp"

using namespace lsinv;
namespace fs = std::filesystem;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path g_work;

ExperimentConfig load(const char* name, const char* out) {
  auto cfg = load_config(fs::path(LSINV_CONFIG_DIR) / name);
  cfg.output = (g_work / out).string();
  return cfg;
}

// Runs the config once; later criteria reuse the records.
std::vector<ChainRecord> run_or_reuse(const ExperimentConfig& cfg) {
  const fs::path out(cfg.output);
  try {
    return read_run(cfg, out);
  } catch (const ConfigError&) {
  }
  cmd_run(cfg, cmd_gen_data(cfg));
  return read_run(cfg, out);
}

std::vector<SampleMatrix> sample_sets(const std::vector<ChainRecord>& records) {
  std::vector<SampleMatrix> out;
  for (const auto& r : records) out.push_back(r.samples);
  return out;
}

// 1. Poisson manufactured solution converges at rate 2.
Outcome poisson_rate() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> err;
  for (std::size_t n : {20u, 40u, 80u}) {
    const Grid g(n);
    const auto exact = GridField::from_function(g, [](Point p) { return std::sin(pi * p.x1) * std::sin(pi * p.x2); });
    const auto kappa = GridField::from_function(g, [&](Point p) { return -2 * pi * pi * std::sin(pi * p.x1) * std::sin(pi * p.x2); });
    err.push_back(l2_distance(solve_poisson(kappa), exact));
  }
  const double r1 = std::log2(err[0] / err[1]), r2 = std::log2(err[1] / err[2]);
  const double t = seconds_since(t0);
  const bool ok = std::abs(r1 - 2.0) <= 0.2 && std::abs(r2 - 2.0) <= 0.2 && t < 10.0;
  return {ok, fmt("rates %.3f, %.3f over n=20,40,80 (want 2.0 +/- 0.2); %.2f s (limit 10 s)", r1, r2, t)};
}

// 2. Darcy layered interface value 7/57.
Outcome darcy_interface() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (std::size_t n : {4u, 6u, 8u, 16u, 40u, 80u}) {
    const auto kappa = GridField::from_function(Grid(n), [](Point p) { return p.x1 < 0.5 ? 7.0 : 50.0; });
    const auto p = solve_darcy(kappa, GridField::constant(kappa.grid(), 0.0), DarcyBC::pressure_drop_x());
    for (std::size_t j = 0; j < n; ++j) {
      const double face = (7.0 * p(n / 2 - 1, j) + 50.0 * p(n / 2, j)) / 57.0;
      worst = std::max(worst, std::abs(face - 7.0 / 57.0));
    }
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-8 && t < 1.0,
          fmt("max |p(1/2) - 7/57| = %.2e over even n in [4, 80] (limit 1e-8); %.3f s (limit 1 s)", worst, t)};
}

// 3. Pointwise prior variance from 10^4 draws.
Outcome prior_fidelity() {
  const auto t0 = std::chrono::steady_clock::now();
  const Grid g(40);
  const int draws = 10000;
  double worst = 0.0;
  for (const auto& basis : {build_basis_laplacian(2.0, g), build_basis_sqexp(0.3, g)}) {
    RandomStream rng(31337, 0);
    std::vector<double> s(g.cells(), 0.0), s2(g.cells(), 0.0);
    for (int d = 0; d < draws; ++d) {
      const auto u = synthesize(basis, draw_coefficients(basis.size(), rng));
      for (std::size_t c = 0; c < g.cells(); ++c) {
        s[c] += u[c];
        s2[c] += u[c] * u[c];
      }
    }
    const auto var = basis.pointwise_variance();
    for (std::size_t c = 0; c < g.cells(); ++c) {
      const double m = s[c] / draws;
      const double v = (s2[c] - draws * m * m) / (draws - 1);
      const double se = var[c] * std::sqrt(2.0 / (draws - 1));
      worst = std::max(worst, std::abs(v - var[c]) / se);
    }
  }
  const double t = seconds_since(t0);
  return {worst <= 5.0 && t < 120.0,
          fmt("worst cell deviation %.2f standard errors over both priors, n=40 (limit 5); %.1f s (limit 120 s)", worst, t)};
}

// 4. Level sets of prior draws have measure zero.
Outcome measure_zero() {
  const Grid g(40);
  const int draws = 1000;
  std::string detail;
  bool ok = true;
  for (const auto& basis : {build_basis_laplacian(2.0, g), build_basis_sqexp(0.3, g)}) {
    RandomStream rng(4242, 0);
    std::vector<GridField> us;
    double s = 0.0, s2 = 0.0;
    std::size_t exact_hits = 0;
    for (int d = 0; d < draws; ++d) {
      us.push_back(synthesize(basis, draw_coefficients(basis.size(), rng)));
      if (flat_fraction(us.back(), 0.0, 0.0) != 0.0) ++exact_hits;
      for (double v : us.back().values()) {
        s += v;
        s2 += v * v;
      }
    }
    const double cells = static_cast<double>(draws) * g.cells();
    const double sd = std::sqrt(s2 / cells - (s / cells) * (s / cells));
    std::vector<double> mean_ff;
    for (double f : {1e-1, 1e-2, 1e-3}) {
      double acc = 0.0;
      for (const auto& u : us) acc += flat_fraction(u, 0.0, f * sd);
      mean_ff.push_back(acc / draws);
    }
    // Linear decay: each tenfold reduction of eps cuts the fraction at least tenfold (20% sampling slack).
    const bool linear = mean_ff[1] <= 0.12 * mean_ff[0] && mean_ff[2] <= 0.12 * mean_ff[1];
    ok &= exact_hits == 0 && linear && mean_ff[2] < 1e-2;
    detail += fmt("%s: zero-width hits %zu, mean fractions %.3e %.3e %.3e; ",
                  basis.kind() == CovarianceKind::WhittleLaplacian ? "laplacian" : "sqexp", exact_hits, mean_ff[0],
                  mean_ff[1], mean_ff[2]);
  }
  return {ok, detail + "want 0 hits and tenfold decay per decade"};
}

// 5. pCN reproduces the prior and a conjugate Gaussian posterior.
Outcome pcn_correctness() {
  const auto t0 = std::chrono::steady_clock::now();
  PcnConfig prior_cfg;
  prior_cfg.n_steps = 10000;
  prior_cfg.n_burn = 0;
  prior_cfg.thin = 1;
  prior_cfg.active_modes = 80;
  prior_cfg.seed = 5;
  const std::size_t dim = 1599;  // Laplacian basis at n = 40
  FunctionMisfit zero(dim, [](std::span<const double>) { return 0.0; });
  const auto rec = run_chain(zero, prior_cfg);
  const bool all_accepted = std::all_of(rec.accepted.begin(), rec.accepted.end(), [](auto a) { return a == 1; });
  double s = 0.0, s2 = 0.0;
  for (double v : rec.samples.data) {
    s += v;
    s2 += v * v;
  }
  const double cnt = static_cast<double>(rec.samples.data.size());
  const double var = s2 / cnt - (s / cnt) * (s / cnt);

  const double y = 1.3, gamma = 0.25;
  FunctionMisfit conj(1, [=](std::span<const double> xi) { return 0.5 * (y - xi[0]) * (y - xi[0]) / gamma; });
  const double v_star = 1.0 / (1.0 + 1.0 / gamma), m_star = v_star * y / gamma;
  PcnConfig cc;
  cc.beta = 0.5;
  cc.n_steps = 100000;
  cc.n_burn = 1000;
  cc.active_modes = 1;
  cc.thin = 1;
  cc.seed = 6;
  const auto x = run_chain(conj, cc).samples.column(0);
  const auto batch = [](const std::vector<double>& v) {
    const std::size_t b = 50, len = v.size() / b;
    std::vector<double> m(b);
    for (std::size_t k = 0; k < b; ++k) m[k] = std::accumulate(v.begin() + k * len, v.begin() + (k + 1) * len, 0.0) / len;
    const double mean = std::accumulate(m.begin(), m.end(), 0.0) / b;
    double q = 0.0;
    for (double t : m) q += (t - mean) * (t - mean);
    return std::pair{mean, std::sqrt(q / (b - 1) / b)};
  };
  const auto [m, se_m] = batch(x);
  std::vector<double> sq(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) sq[t] = (x[t] - m_star) * (x[t] - m_star);
  const auto [v, se_v] = batch(sq);
  const double t = seconds_since(t0);
  const bool ok = all_accepted && rec.acceptance_rate == 1.0 && std::abs(var - 1.0) <= 0.05 &&
                  std::abs(m - m_star) <= 3 * se_m && std::abs(v - v_star) <= 3 * se_v && t < 60.0;
  return {ok, fmt("prior run: acceptance %.6f, variance %.4f (want 1 +/- 5%%); conjugate: mean %.4f vs %.4f "
                  "(%.2f se), variance %.4f vs %.4f (%.2f se), limit 3 se; %.1f s (limit 60 s)",
                  rec.acceptance_rate, var, m, m_star, std::abs(m - m_star) / se_m, v, v_star,
                  std::abs(v - v_star) / se_v, t)};
}

// 6. PSRF of the first KL coefficient on the inclusions problem.
Outcome convergence() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto cfg = load("inclusions.json", "inclusions");
  const auto records = run_or_reuse(cfg);
  std::vector<std::vector<double>> first;
  for (const auto& r : records) first.push_back(r.samples.column(0));
  const double r = psrf(first);
  const double t = seconds_since(t0);
  std::string acc;
  for (const auto& rec : records) acc += fmt("%.3f ", rec.acceptance_rate);
  return {r < 1.1 && t < 1800.0, fmt("PSRF %.4f over %zu chains x %zu steps (limit 1.1); acceptance %s; %.0f s (target 1800 s)",
                                     r, records.size(), cfg.pcn.n_steps, acc.c_str(), t)};
}

struct LayersRun {
  ExperimentConfig cfg;
  std::vector<ChainRecord> posterior;
  std::shared_ptr<const KLBasis> basis;
};

const LayersRun& layers_run() {
  static const LayersRun run = [] {
    LayersRun r{load("layers.json", "layers"), {}, {}};
    r.posterior = run_or_reuse(r.cfg);
    r.basis = make_basis(r.cfg);
    return r;
  }();
  return run;
}

// 7. Posterior classification beats the prior-only pipeline by a factor of two.
Outcome recovery() {
  const auto& run = layers_run();
  const auto post = summarize_chains(run.cfg, *run.basis, run.posterior);
  FunctionMisfit zero(run.basis->size(), [](std::span<const double>) { return 0.0; });
  const auto prior_records = run_multichain(zero, run.cfg.pcn, run.cfg.n_chains);
  const auto prior = summarize_chains(run.cfg, *run.basis, prior_records);
  const bool ok = post.classification_error <= 0.5 * prior.classification_error;
  return {ok, fmt("classification error posterior %.4f, prior-only %.4f (want ratio <= 0.5, got %.3f)",
                  post.classification_error, prior.classification_error,
                  post.classification_error / prior.classification_error)};
}

// 8. Reweighting ratios are stable across perturbation sizes.
Outcome well_posedness() {
  const auto& run = layers_run();
  const auto data_json = nlohmann::json::parse(io::read_text(fs::path(run.cfg.output) / "data.json"));
  const auto data = observation_set_from_json(data_json);
  auto posterior = make_posterior(run.cfg, run.basis, data);
  SampleMatrix pred{data.size(), {}}, func{run.basis->grid().cells(), {}};
  for (const auto& r : run.posterior)
    for (std::size_t k = 0; k < r.samples.rows(); ++k) {
      pred.append(posterior.predict(r.samples.row(k)));
      func.append(posterior.kappa(r.samples.row(k)).values());
    }
  const double yn = gamma_norm(data.y, data.gamma);
  // Seeded random direction of unit Gamma-norm.
  RandomStream rng(run.cfg.data_seed, 0xD1A6000000000000ull);
  std::vector<double> e(data.size());
  for (auto& x : e) x = rng.normal();
  const double en = gamma_norm(e, data.gamma);
  for (auto& x : e) x /= en;
  std::vector<double> ratios;
  std::string detail;
  bool ok = true;
  for (double f : {1e-3, 1e-2, 1e-1}) {
    try {
      const auto p = lipschitz_probe(pred, func, run.basis->grid(), data, f * yn, e);
      ratios.push_back(p.ratio());
      ok &= p.ess >= 10.0;
      detail += fmt("delta %.0e|y|: ratio %.4e, ESS %.0f; ", f, p.ratio(), p.ess);
    } catch (const NumericalError& err) {
      ok = false;
      detail += fmt("delta %.0e|y|: %s; ", f, err.what());
    }
  }
  if (ratios.size() == 3) {
    const double spread = *std::max_element(ratios.begin(), ratios.end()) / *std::min_element(ratios.begin(), ratios.end());
    ok &= spread <= 3.0;
    detail += fmt("max/min %.3f (limit 3)", spread);
  }
  return {ok, detail};
}

// 9. Replaying a run manifest reproduces every chain record bitwise.
Outcome determinism() {
  const auto cfg = load("tiny.json", "determinism");
  fs::remove_all(cfg.output);
  const auto manifest_path = cmd_run(cfg, cmd_gen_data(cfg));
  const auto manifest = nlohmann::json::parse(io::read_text(manifest_path));
  auto replay = parse_config(manifest);
  replay.output = (g_work / "determinism_replay").string();
  fs::remove_all(replay.output);
  cmd_run(replay, manifest.at("data_file").get<std::string>(), false);
  const auto a = read_run(cfg, cfg.output), b = read_run(replay, replay.output);
  bool same = a.size() == b.size();
  for (std::size_t k = 0; same && k < a.size(); ++k) same = a[k] == b[k];
  std::size_t bytes_equal = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const auto stem = "chain_" + std::to_string(k);
    for (const char* ext : {".samples.bin", ".burnin.bin", ".trace.csv"})
      bytes_equal += io::read_bytes(fs::path(cfg.output) / "chains" / (stem + ext)) ==
                     io::read_bytes(fs::path(replay.output) / "chains" / (stem + ext));
  }
  same &= bytes_equal == 3 * a.size();
  return {same, fmt("%zu chain records replayed; %zu of %zu record files byte-identical", a.size(), bytes_equal, 3 * a.size())};
}

// 10. DCT energy identity and posterior concentration of the (1,0) coefficient.
Outcome dct_diagnostics() {
  RandomStream rng(10, 0);
  double worst = 0.0;
  for (std::size_t n : {3u, 8u, 40u, 80u, 128u}) {
    std::vector<double> v(n * n);
    for (auto& x : v) x = rng.normal() * 3.0 + 1.0;
    const auto c = dct2_coefficients(GridField(Grid(n), v));
    double ec = 0.0, ev = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
      ec += c.data[k] * c.data[k];
      ev += v[k] * v[k];
    }
    worst = std::max(worst, std::abs(ec - ev) / ev);
  }
  const auto& run = layers_run();
  const auto sets = sample_sets(run.posterior);
  RandomStream prior_rng(run.cfg.pcn.seed, 0xD1A6000000000000ull);
  const auto d = coefficient_density(sets, *run.basis, run.cfg.level_set, 1, 0, inversion_truth(run.cfg), 2000, prior_rng);
  const auto variance = [](std::vector<double> v) {
    const double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double q = 0.0;
    for (double x : v) q += (x - m) * (x - m);
    return q / (v.size() - 1);
  };
  const double vp = variance(d.prior_values), vq = variance(d.posterior_values);
  auto sorted = d.posterior_values;
  std::sort(sorted.begin(), sorted.end());
  const auto quantile = [&](double q) {
    const double pos = q * (sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - lo;
    return lo + 1 < sorted.size() ? sorted[lo] * (1 - frac) + sorted[lo + 1] * frac : sorted[lo];
  };
  const double q025 = quantile(0.025), q975 = quantile(0.975);
  const bool inside = q025 <= d.truth && d.truth <= q975;
  const bool ok = worst <= 1e-8 && vp >= 4.0 * vq && inside;
  return {ok, fmt("Parseval worst relative error %.2e (limit 1e-8); (1,0) coefficient variance prior %.4e / posterior "
                  "%.4e = %.2f (want >= 4); truth %.4f in central 95%% [%.4f, %.4f]: %s",
                  worst, vp, vq, vp / vq, d.truth, q025, q975, inside ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  g_work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "lsinv_acceptance";
  fs::create_directories(g_work);
  std::set<int> only;
  for (int k = 2; k < argc; ++k) only.insert(std::stoi(argv[k]));

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"poisson manufactured convergence", poisson_rate},
      {"darcy layered interface", darcy_interface},
      {"prior pointwise variance", prior_fidelity},
      {"measure-zero level sets", measure_zero},
      {"pCN correctness", pcn_correctness},
      {"PSRF on inclusions", convergence},
      {"layers recovery vs prior-only", recovery},
      {"data-perturbation stability", well_posedness},
      {"manifest determinism", determinism},
      {"DCT diagnostics", dct_diagnostics},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] criterion %d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first,
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
