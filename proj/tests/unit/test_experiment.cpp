#include <doctest.h>

#include <filesystem>

#include "lsinv/errors.hpp"
#include "lsinv/experiment.hpp"
#include "lsinv/io.hpp"
#include "lsinv/presets.hpp"

using namespace lsinv;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json tiny_json(const fs::path& out) {
  return {{"model", "potential"},
          {"truth", {{"preset", "inclusions"}}},
          {"fine_n", 40},
          {"inversion_n", 20},
          {"level_set", {{"thresholds", {0.0}}, {"values", {1.0, 0.0}}}},
          {"prior", {{"kind", "sqexp"}, {"L", 0.3}}},
          {"pcn", {{"beta", 0.2}, {"n_steps", 1000}, {"n_burn", 100}, {"thin", 10}, {"seed", 3}}},
          {"n_chains", 2},
          {"data_seed", 4},
          {"output", out.string()}};
}

fs::path scratch(const char* name) {
  const auto p = fs::temp_directory_path() / "lsinv_experiment_test" / name;
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("config defaults and validation") {
  const auto c = parse_config(json::object());
  CHECK(c.model == "potential");
  CHECK(c.fine_n == 120);
  CHECK(c.inversion_n == 40);
  CHECK(c.n_chains == 4);
  CHECK(c.pcn.n_steps == 100000);
  CHECK(c.pcn.active_modes == 64);
  CHECK(c.prior.kind == CovarianceKind::SquaredExponential);
  CHECK(default_active_modes(PriorSpec::laplacian(2.5, 40)) == 80);
  CHECK(parse_config({{"prior", {{"kind", "laplacian"}, {"alpha", 2.5}}}}).pcn.active_modes == 80);
  CHECK(parse_config({{"model", "darcy"}}).level_set.regions() == 3);

  CHECK_THROWS_AS(parse_config({{"fine_n", 40}, {"inversion_n", 40}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"fine_n", 30}, {"inversion_n", 40}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"noise_fraction", -0.1}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"model", "eit"}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"prior", {{"kind", "matern"}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"prior", {{"kind", "laplacian"}, {"alpha", 1.0}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"level_set", {{"thresholds", {1.0, 0.0}}, {"values", {1, 2, 3}}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"fine_n", "many"}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"pcn", {{"beta", 0.0}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"n_chains", 0}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"darcy", {{"bc", {{"left", {{"neumann", 0}}}, {"right", {{"neumann", 0}}},
                                                     {"bottom", {{"neumann", 0}}}, {"top", {{"neumann", 0}}}}}}}}),
                  ConfigError);
}

TEST_CASE("config round trip and hashing") {
  const auto a = parse_config(tiny_json("x"));
  const auto b = parse_config(to_json(a));
  CHECK(to_json(a) == to_json(b));
  CHECK(config_hash(a) == config_hash(b));
  auto c = a;
  c.output = "elsewhere";
  CHECK(config_hash(c) == config_hash(a));
  c.pcn.seed = 99;
  CHECK(config_hash(c) != config_hash(a));
  CHECK(data_hash(c) == data_hash(a));
  c.noise_fraction = 0.2;
  CHECK(data_hash(c) != data_hash(a));
  // A manifest embeds the config.
  CHECK(config_hash(parse_config(json{{"config", to_json(a)}, {"chains", json::array()}})) == config_hash(a));
}

TEST_CASE("truth and data commands") {
  const auto out = scratch("data");
  auto cfg = parse_config(tiny_json(out));
  const auto truth_path = cmd_make_truth(cfg);
  const auto truth = read_field(truth_path);
  CHECK(truth.grid().n() == 40);
  CHECK(fs::exists(out / "truth.csv"));

  const auto d1 = cmd_gen_data(cfg);
  const auto bytes1 = io::read_bytes(d1);
  cmd_gen_data(cfg);
  CHECK(io::read_bytes(d1) == bytes1);
  const auto data = observation_set_from_json(json::parse(io::read_text(d1)));
  CHECK(data.size() == 64);
  CHECK(data.fine_n == 40);
  CHECK(data.config_hash == data_hash(cfg));

  auto unknown = cfg;
  unknown.truth_preset = "spiral";
  CHECK_THROWS_AS(cmd_make_truth(unknown), ConfigError);

  // Truth from a field file; non-matching sizes are refused.
  auto from_file = cfg;
  from_file.truth_file = truth_path.string();
  CHECK(make_truth(from_file, 40).values()[17] == truth.values()[17]);
  CHECK(make_truth(from_file, 20).grid().n() == 20);
  CHECK_THROWS_AS(make_truth(from_file, 30), ConfigError);
  fs::remove_all(out);
}

TEST_CASE("fine potential data has 64 observations") {
  auto cfg = parse_config(tiny_json(scratch("fine")));
  cfg.fine_n = 240;
  cfg.inversion_n = 80;
  CHECK(make_data(cfg).size() == 64);
}

TEST_CASE("run, reproduce from the manifest, summarize") {
  const auto out = scratch("run");
  const auto cfg = parse_config(tiny_json(out));
  const auto data_file = cmd_gen_data(cfg);
  const auto manifest_path = cmd_run(cfg, data_file);
  for (int k = 0; k < 2; ++k) CHECK(fs::exists(out / "chains" / ("chain_" + std::to_string(k) + ".json")));
  const auto records = read_run(cfg, out);
  REQUIRE(records.size() == 2);
  CHECK(records[0].samples.rows() == 100);

  const auto manifest = json::parse(io::read_text(manifest_path));
  auto again = parse_config(manifest);
  again.output = (out / "replay").string();
  cmd_run(again, manifest.at("data_file").get<std::string>(), false);
  const auto replay = read_run(again, out / "replay");
  for (int k = 0; k < 2; ++k) CHECK(replay[k] == records[k]);

  const auto rep = cmd_summarize(cfg, out);
  CHECK(rep.posterior.sample_count == 200);
  CHECK(rep.acceptance_rates.size() == 2);
  CHECK(rep.densities.size() == 3);
  CHECK(rep.classification_error >= 0.0);
  CHECK(rep.classification_error <= 1.0);
  for (const char* f : {"acf.csv", "psrf.csv", "density_1_0.csv", "density_0_1.csv", "density_1_1.csv", "summary.json",
                        "mean_u.bin", "pushforward_mean.bin", "pushforward_variance.bin", "kappa_of_mean_u.bin"})
    CHECK(fs::exists(out / "summary" / f));
  const std::string hash_line = "# config_hash=" + config_hash(cfg);
  for (const char* f : {"acf.csv", "psrf.csv", "density_1_0.csv"})
    CHECK(io::read_text(out / "summary" / f).rfind(hash_line, 0) == 0);
  CHECK(io::read_text(out / "chains" / "chain_0.trace.csv").rfind(hash_line, 0) == 0);

  // Records from another config are refused.
  auto other = cfg;
  other.pcn.seed = 77;
  CHECK_THROWS_AS(cmd_summarize(other, out), ConfigError);

  // A chain whose metadata never landed is not complete.
  fs::remove(out / "chains" / "chain_1.json");
  CHECK_THROWS_AS(read_run(cfg, out), ConfigError);
  fs::remove_all(out);
}

TEST_CASE("data provenance is checked before running") {
  const auto out = scratch("prov");
  const auto cfg = parse_config(tiny_json(out));
  const auto data_file = cmd_gen_data(cfg);
  auto changed = cfg;
  changed.noise_fraction = 0.05;
  CHECK_THROWS_AS(cmd_run(changed, data_file), ConfigError);
  changed = cfg;
  changed.fine_n = 60;
  CHECK_THROWS_AS(cmd_run(changed, data_file), ConfigError);
  CHECK_THROWS_AS(cmd_run(cfg, out / "missing.json"), ConfigError);
  fs::remove_all(out);
}

TEST_CASE("summaries of artificial records") {
  const auto out = scratch("artificial");
  auto cfg = parse_config(tiny_json(out));
  const auto basis = make_basis(cfg);
  RandomStream rng(5, 0);
  const auto xi = draw_coefficients(basis->size(), rng).xi;

  // Truth on the fine grid is the block-upsampled kappa of xi, so its restriction is kappa itself.
  const auto kappa = apply_level_set_map(synthesize(*basis, xi), cfg.level_set);
  const Grid fine(40);
  const auto upsampled = GridField::from_function(fine, [&](Point p) {
    return kappa(static_cast<std::size_t>(p.x1 * 20), static_cast<std::size_t>(p.x2 * 20));
  });
  write_field(out / "truth_in.bin", upsampled);
  cfg.truth_file = (out / "truth_in.bin").string();

  ChainRecord rec;
  rec.samples.cols = basis->size();
  for (int k = 0; k < 12; ++k) rec.samples.append(xi);
  rec.complete = true;
  const auto rep = summarize_chains(cfg, *basis, {rec});
  CHECK(rep.classification_error == 0.0);
  for (double v : rep.posterior.pushforward_variance.values()) CHECK(v == 0.0);

  ChainRecord single;
  single.samples.cols = basis->size();
  single.samples.append(draw_coefficients(basis->size(), rng).xi);
  const auto one = summarize_chains(cfg, *basis, {single});
  for (double v : one.posterior.pushforward_variance.values()) CHECK(v == 0.0);
  CHECK(std::isnan(one.psrf_first_mode));
  CHECK_THROWS_AS(summarize_chains(cfg, *basis, {}), ConfigError);
  fs::remove_all(out);
}

TEST_CASE("basis cache") {
  const auto out = scratch("cache");
  auto cfg = parse_config(tiny_json(out));
  cfg.basis_cache = (out / "basis.bin").string();
  const auto a = make_basis(cfg);
  CHECK(fs::exists(cfg.basis_cache));
  const auto b = make_basis(cfg);
  CHECK(a->size() == b->size());
  CHECK(a->eigenvalues()[3] == b->eigenvalues()[3]);
  cfg.prior.length = 0.2;  // stale cache is rebuilt
  CHECK(make_basis(cfg)->parameter() == 0.2);
  fs::remove_all(out);
}

TEST_CASE("darcy pipeline") {
  const auto out = scratch("darcy");
  json j = tiny_json(out);
  j["model"] = "darcy";
  j["truth"] = {{"preset", "layers"}};
  j["level_set"] = {{"thresholds", {0.0, 0.05}}, {"values", {7, 50, 500}}};
  j["pcn"]["n_steps"] = 200;
  auto cfg = parse_config(j);
  const auto data = make_data(cfg);
  CHECK(data.size() == 25);
  CHECK(data.model == "darcy");
  cmd_run(cfg, cmd_gen_data(cfg));
  CHECK(read_run(cfg, out).size() == 2);
  j["level_set"]["values"] = {0, 50, 500};
  CHECK_THROWS_AS(make_data(parse_config(j)), ConfigError);
  fs::remove_all(out);
}
