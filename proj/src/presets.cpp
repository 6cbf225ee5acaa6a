#include "sqzmag/presets.hpp"

#include "sqzmag/errors.hpp"
#include "sqzmag/preset_data.hpp"

namespace sqzmag {

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"fig2", "fig3", "fig4"};
  return names;
}

bool has_preset(std::string_view name) {
  for (const auto& n : preset_names()) {
    if (n == name) return true;
  }
  return false;
}

std::string_view preset_text(std::string_view name) {
  if (name == "fig2") return detail::kPresetFig2;
  if (name == "fig3") return detail::kPresetFig3;
  if (name == "fig4") return detail::kPresetFig4;
  throw ConfigError("unknown preset '" + std::string(name) +
                    "' (available: fig2, fig3, fig4)");
}

}  // namespace sqzmag
