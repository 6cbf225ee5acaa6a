#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sqzmag {

// Built-in run descriptions compiled in from presets/*.cfg.  Names: "fig2"
// (squeezed spectrum with a weak calibration tone), "fig3" (per-beam vs
// difference channels with strong common-mode noise), "fig4" (sensitivity
// sweep over drive amplitude).
const std::vector<std::string>& preset_names();

bool has_preset(std::string_view name);

// Raw config text of a preset.  Throws ConfigError for unknown names.
std::string_view preset_text(std::string_view name);

}  // namespace sqzmag
