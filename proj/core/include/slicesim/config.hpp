#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "slicesim/engine.hpp"

namespace slicesim {

// Reads a TOML experiment manifest. Sections: [topology], [traffic],
// [placement], [p2c], [agent], [reward], [metrics], [run]. Missing keys keep
// their defaults; unknown sections or keys and ill-typed values raise
// ConfigError.
SimConfig parse_config(std::string_view toml_text, std::string_view source = "<config>");
SimConfig load_config(const std::filesystem::path& path);

}  // namespace slicesim
