#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include <omp.h>

#include "lsinv/errors.hpp"
#include "lsinv/forward.hpp"
#include "lsinv/mcmc.hpp"
#include "lsinv/presets.hpp"

using namespace lsinv;

namespace {

PcnConfig config(double beta, std::size_t steps, std::size_t burn, std::size_t active, std::size_t thin,
                 std::uint64_t seed) {
  PcnConfig c;
  c.beta = beta;
  c.n_steps = steps;
  c.n_burn = burn;
  c.active_modes = active;
  c.thin = thin;
  c.seed = seed;
  return c;
}

// Mean and batch-means standard error of a correlated series.
std::pair<double, double> batch_mean(const std::vector<double>& x, std::size_t batches = 50) {
  const std::size_t len = x.size() / batches;
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b)
    means[b] = std::accumulate(x.begin() + b * len, x.begin() + (b + 1) * len, 0.0) / len;
  const double m = std::accumulate(means.begin(), means.end(), 0.0) / batches;
  double v = 0.0;
  for (double q : means) v += (q - m) * (q - m);
  return {m, std::sqrt(v / (batches - 1) / batches)};
}

}  // namespace

TEST_CASE("acceptance probability") {
  CHECK(accept_probability(3.0, 3.0) == 1.0);
  CHECK(accept_probability(3.0, 3.0 + std::log(2.0)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(accept_probability(3.0, 1.0) == 1.0);
  CHECK(accept_probability(0.0, 800.0) == 0.0);
}

TEST_CASE("pCN proposal") {
  KLState s(std::vector<double>{0.5, -1.0, 2.0, 0.0});
  RandomStream r1(3, 0), r2(3, 0);
  const auto full = pcn_propose(s, 1.0, r1);
  for (std::size_t k = 0; k < 4; ++k) CHECK(full.xi[k] == r2.normal());

  RandomStream r3(3, 0);
  const auto tiny = pcn_propose(s, 1e-9, r3);
  for (std::size_t k = 0; k < 4; ++k) CHECK(tiny.xi[k] == doctest::Approx(s.xi[k]).epsilon(1e-8));

  s.freeze_from(0);
  RandomStream r4(3, 0);
  const auto frozen = pcn_propose(s, 0.7, r4);
  CHECK(frozen.xi == s.xi);

  // The stream advances identically whatever the mask.
  RandomStream r5(3, 0);
  s.freeze_from(2);
  const auto half = pcn_propose(s, 1.0, r5);
  CHECK(half.xi[0] == full.xi[0]);
  CHECK(half.xi[2] == 2.0);
  CHECK(r5.normal() == r1.normal());
  CHECK_THROWS_AS(pcn_propose(s, 0.0, r5), std::invalid_argument);
  CHECK_THROWS_AS(pcn_propose(s, 1.5, r5), std::invalid_argument);
}

TEST_CASE("prior-only chain accepts every proposal and keeps unit variance") {
  FunctionMisfit zero(20, [](std::span<const double>) { return 0.0; });
  const auto rec = run_chain(zero, config(0.5, 100000, 0, 20, 10, 17));
  CHECK(rec.acceptance_rate == 1.0);
  for (auto a : rec.accepted) REQUIRE(a == 1);
  double s = 0, s2 = 0;
  for (double v : rec.samples.data) s += v;
  const double m = s / rec.samples.data.size();
  for (double v : rec.samples.data) s2 += (v - m) * (v - m);
  CHECK(std::abs(s2 / (rec.samples.data.size() - 1) - 1.0) <= 0.05);
  CHECK(rec.samples.rows() == 10000);
}

TEST_CASE("conjugate Gaussian posterior") {
  const double y = 1.3, gamma = 0.25;
  FunctionMisfit phi(1, [=](std::span<const double> xi) { return 0.5 * (y - xi[0]) * (y - xi[0]) / gamma; });
  const double v_star = 1.0 / (1.0 + 1.0 / gamma), m_star = v_star * y / gamma;
  const auto rec = run_chain(phi, config(0.6, 100000, 1000, 1, 1, 23));
  const auto x = rec.samples.column(0);
  const auto [m, se_m] = batch_mean(x);
  std::vector<double> sq(x.size());
  for (std::size_t t = 0; t < x.size(); ++t) sq[t] = (x[t] - m_star) * (x[t] - m_star);
  const auto [v, se_v] = batch_mean(sq);
  CHECK(std::abs(m - m_star) <= 3 * se_m);
  CHECK(std::abs(v - v_star) <= 3 * se_v);
}

TEST_CASE("chains are deterministic and scheduling independent") {
  FunctionMisfit phi(6, [](std::span<const double> xi) { return 2.0 * (xi[0] - 1) * (xi[0] - 1) + std::abs(xi[3]); });
  const auto cfg = config(0.3, 3000, 500, 2, 7, 99);
  CHECK(run_chain(phi, cfg, 2) == run_chain(phi, cfg, 2));
  omp_set_num_threads(4);
  const auto par = run_multichain(phi, cfg, 5, true);
  const auto ser = run_multichain(phi, cfg, 5, false);
  REQUIRE(par.size() == 5);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(par[k] == ser[k]);
    CHECK(par[k].stream == k);
    for (std::size_t l = 0; l < k; ++l) CHECK(par[k].initial_state != par[l].initial_state);
  }
  CHECK(run_multichain(phi, cfg, 1).front() == run_chain(phi, cfg, 0));
}

TEST_CASE("frozen modes stay fixed during burn-in") {
  FunctionMisfit phi(8, [](std::span<const double> xi) { return 0.5 * xi[0] * xi[0]; });
  const auto rec = run_chain(phi, config(0.4, 500, 2000, 3, 10, 5));
  REQUIRE(rec.burn_in_samples.rows() == 200);
  for (std::size_t r = 0; r < rec.burn_in_samples.rows(); ++r)
    for (std::size_t c = 3; c < 8; ++c) REQUIRE(rec.burn_in_samples.row(r)[c] == rec.initial_state[c]);
  bool moved = false;
  for (std::size_t r = 0; r < rec.samples.rows(); ++r) moved |= rec.samples.row(r)[5] != rec.initial_state[5];
  CHECK(moved);
  CHECK(rec.misfit_trace.size() == 2500);
  CHECK(rec.accepted.size() == 2500);
  CHECK(rec.samples.rows() == 50);
}

TEST_CASE("transition flux between tabulated cells is balanced") {
  // Phi is constant on the four sign quadrants of (xi0, xi1); each has prior mass 1/4.
  const double table[4] = {0.0, 1.0, 2.0, 0.5};
  const auto cell = [](std::span<const double> xi) { return (xi[0] < 0 ? 1 : 0) + (xi[1] < 0 ? 2 : 0); };
  FunctionMisfit phi(2, [&](std::span<const double> xi) { return table[cell(xi)]; });
  const auto rec = run_chain(phi, config(0.5, 400000, 1000, 2, 1, 31));
  std::array<std::array<double, 4>, 4> count{};
  std::array<double, 4> occupancy{};
  for (std::size_t t = 0; t + 1 < rec.samples.rows(); ++t) {
    const int a = cell(rec.samples.row(t)), b = cell(rec.samples.row(t + 1));
    count[a][b] += 1;
    occupancy[a] += 1;
  }
  double z = 0.0;
  for (double p : table) z += std::exp(-p);
  const double total = rec.samples.rows() - 1.0;
  for (int a = 0; a < 4; ++a) {
    CHECK(occupancy[a] / total == doctest::Approx(std::exp(-table[a]) / z).epsilon(0.05));
    for (int b = a + 1; b < 4; ++b) {
      const double ab = count[a][b], ba = count[b][a];
      CHECK(std::abs(ab - ba) <= 4.0 * std::sqrt(ab + ba) + 5.0);
    }
  }
}

TEST_CASE("acceptance falls as the step grows") {
  FunctionMisfit phi(10, [](std::span<const double> xi) {
    double s = 0.0;
    for (double v : xi) s += (v - 0.5) * (v - 0.5) / (2 * 0.05);
    return s;
  });
  double prev = 2.0;
  for (double beta : {0.01, 0.05, 0.2}) {
    double rate = 0.0;
    for (std::uint64_t seed : {1u, 2u, 3u}) rate += run_chain(phi, config(beta, 20000, 2000, 10, 100, seed)).acceptance_rate;
    rate /= 3;
    CHECK(rate <= prev);
    prev = rate;
  }
}

TEST_CASE("failing targets abort with the step") {
  FunctionMisfit nan(2, [](std::span<const double> xi) { return xi[0] > 0.5 ? NAN : 0.0; });
  CHECK_THROWS_AS(run_chain(nan, config(1.0, 1000, 0, 2, 1, 1)), NumericalError);
  FunctionMisfit bad(2, [](std::span<const double>) -> double { throw std::runtime_error("solver blew up"); });
  CHECK_THROWS_AS(run_multichain(bad, config(0.1, 10, 0, 2, 1, 1), 3), NumericalError);
  FunctionMisfit ok(2, [](std::span<const double>) { return 0.0; });
  CHECK_THROWS_AS(run_chain(ok, config(0.1, 10, 0, 3, 1, 1)), std::invalid_argument);
  CHECK_THROWS_AS(run_chain(ok, config(0.1, 10, 0, 2, 0, 1)), std::invalid_argument);
}

TEST_CASE("chain record files round trip") {
  FunctionMisfit phi(4, [](std::span<const double> xi) { return 0.3 * xi[1] * xi[1]; });
  const auto rec = run_chain(phi, config(0.2, 1000, 200, 2, 10, 8));
  const auto dir = std::filesystem::temp_directory_path() / "lsinv_mcmc_test";
  std::filesystem::remove_all(dir);
  write_chain_record(dir, "c0", rec, {{"config_hash", "abc"}});
  nlohmann::json meta;
  const auto back = read_chain_record(dir, "c0", &meta);
  CHECK(back == rec);
  CHECK(meta["config_hash"] == "abc");
  CHECK(meta["complete"] == true);
  std::filesystem::remove(dir / "c0.json");
  CHECK_THROWS_AS(read_chain_record(dir, "c0"), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("level-set posterior evaluates the data misfit") {
  const Grid fine(24), coarse(12);
  const LevelSetSpec spec({0.0}, {1.0, 0.0});
  const auto locs = default_boundary_locations(4);
  PotentialModel fine_model(fine, build_boundary_observer(locs, 0.1, fine));
  const auto data = generate_data(rasterize_preset("inclusions", 24, spec), fine_model, locs,
                                  {"potential", 12, 0.1, 1e-8, 3, "h"});
  auto basis = std::make_shared<const KLBasis>(build_basis_sqexp(0.3, coarse));
  LevelSetPosterior post(basis, spec, std::make_unique<PotentialModel>(coarse, build_boundary_observer(locs, 0.1, coarse)),
                         std::make_shared<const ObservationSet>(data));
  RandomStream rng(4, 0);
  const auto xi = draw_coefficients(basis->size(), rng);
  PotentialModel direct(coarse, build_boundary_observer(locs, 0.1, coarse));
  const double expect = misfit(direct.predict(apply_level_set_map(synthesize(*basis, xi), spec)), data);
  CHECK(post(xi.xi) == expect);
  auto copy = post.clone();
  CHECK((*copy)(xi.xi) == expect);
  CHECK(copy->dimension() == basis->size());
  CHECK_THROWS_AS(LevelSetPosterior(basis, spec, std::make_unique<PotentialModel>(fine, build_boundary_observer(locs, 0.1, fine)),
                                    std::make_shared<const ObservationSet>(data)),
                  std::invalid_argument);
}

TEST_CASE("config json") {
  const auto c = config(0.07, 123, 45, 6, 7, 8);
  const auto d = pcn_config_from_json(to_json(c), PcnConfig{});
  CHECK(d.beta == 0.07);
  CHECK(d.n_steps == 123);
  CHECK(d.n_burn == 45);
  CHECK(d.active_modes == 6);
  CHECK(d.thin == 7);
  CHECK(d.seed == 8);
  const auto e = pcn_config_from_json(nlohmann::json{{"beta", 0.2}}, c);
  CHECK(e.beta == 0.2);
  CHECK(e.n_steps == 123);
}
