#pragma once

#include <filesystem>

#include "slicesim/mlp.hpp"

namespace slicesim {

// One ASCII header line, e.g. "slicesim-mlp 1 305 128 64 100\n" (magic,
// format version, layer widths from input to output), followed by every
// parameter as a little-endian IEEE-754 double in Mlp::flatten() order.
void save_checkpoint(const std::filesystem::path& path, const Mlp& net);
Mlp load_checkpoint(const std::filesystem::path& path);

}  // namespace slicesim
