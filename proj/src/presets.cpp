#include "lsinv/presets.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "lsinv/errors.hpp"

namespace lsinv {

namespace {

struct Ellipse {
  double c1, c2, r1, r2;
};

void require_regions(const std::string& name, const LevelSetSpec& spec, std::size_t want) {
  if (spec.regions() != want)
    throw ConfigError("preset '" + name + "' needs " + std::to_string(want) + " region values, level set has " +
                      std::to_string(spec.regions()));
}

}  // namespace

GridField rasterize_preset(const std::string& name, std::size_t n, const LevelSetSpec& spec,
                           const nlohmann::json& params) {
  const Grid grid(n);
  const auto v = spec.values();
  try {
    if (name == "inclusions") {
      require_regions(name, spec, 2);
      std::vector<Ellipse> blobs = {{0.30, 0.32, 0.16, 0.12}, {0.68, 0.66, 0.14, 0.18}};
      if (params.contains("blobs")) {
        blobs.clear();
        for (const auto& b : params.at("blobs"))
          blobs.push_back({b.at("center").at(0).get<double>(), b.at("center").at(1).get<double>(),
                           b.at("radii").at(0).get<double>(), b.at("radii").at(1).get<double>()});
      }
      return GridField::from_function(grid, [&](Point x) {
        for (const auto& e : blobs) {
          const double a = (x.x1 - e.c1) / e.r1, b = (x.x2 - e.c2) / e.r2;
          if (a * a + b * b < 1.0) return v[0];
        }
        return v[1];
      });
    }
    if (name == "layers") {
      require_regions(name, spec, 3);
      const double b0 = params.value("lower", 1.0 / 3.0), b1 = params.value("upper", 2.0 / 3.0);
      if (!(0.0 < b0 && b0 < b1 && b1 < 1.0)) throw ConfigError("layer bounds must satisfy 0 < lower < upper < 1");
      return GridField::from_function(grid, [&](Point x) { return x.x2 < b0 ? v[0] : (x.x2 < b1 ? v[1] : v[2]); });
    }
    if (name == "channel") {
      require_regions(name, spec, 3);
      const double center = params.value("center", 0.5);
      const double amplitude = params.value("amplitude", 0.18);
      const double periods = params.value("periods", 1.0);
      const double core = params.value("core_half_width", 0.07);
      const double bank = params.value("bank_half_width", 0.15);
      if (!(0.0 < core && core < bank)) throw ConfigError("channel needs 0 < core_half_width < bank_half_width");
      return GridField::from_function(grid, [&](Point x) {
        const double axis = center + amplitude * std::sin(2.0 * std::numbers::pi * periods * x.x1);
        const double d = std::abs(x.x2 - axis);
        return d < core ? v[2] : (d < bank ? v[1] : v[0]);
      });
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("bad parameters for preset '" + name + "': " + e.what());
  }
  throw ConfigError("unknown truth preset '" + name + "' (expected inclusions, layers or channel)");
}

}  // namespace lsinv
