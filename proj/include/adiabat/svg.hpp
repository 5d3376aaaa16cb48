#pragma once

#include <string>

#include "json.hpp"

namespace adiabat {

/// Renders an adiabats.json document (domain + level polylines) to an SVG
/// string: axes with tick labels, one path element per nonempty level, and a
/// level annotation. Output bytes are deterministic for identical input.
std::string render_adiabats_svg(const nlohmann::json& adiabats_doc);

}  // namespace adiabat
