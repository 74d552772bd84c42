#pragma once

#include <string>

#include <json.hpp>

#include "lsinv/grid.hpp"
#include "lsinv/levelset.hpp"

namespace lsinv {

/// Analytic truth geometries rasterized at cell centers, filled with the level-set region values.
///   inclusions: two disjoint ellipses -> values[0] inside, values[1] outside (2 regions)
///   layers:     bands x2 < b0, b0 <= x2 < b1, x2 >= b1 -> values[0..2] (3 regions)
///   channel:    sinuous channel; background values[0], banks values[1], core values[2] (3 regions)
/// params overrides the geometry (see README); unknown presets throw ConfigError.
GridField rasterize_preset(const std::string& name, std::size_t n, const LevelSetSpec& spec,
                           const nlohmann::json& params = nlohmann::json::object());

}  // namespace lsinv
