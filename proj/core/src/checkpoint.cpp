#include "slicesim/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "slicesim/errors.hpp"

namespace slicesim {

namespace {

constexpr const char* kMagic = "slicesim-mlp";
constexpr int kVersion = 1;

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t out = 0;
    for (int i = 0; i < 8; ++i) out |= ((v >> (8 * i)) & 0xFFU) << (8 * (7 - i));
    return out;
  }
  return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Mlp& net) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << kMagic << ' ' << kVersion;
  for (int s : net.sizes()) out << ' ' << s;
  out << '\n';
  for (double v : net.flatten()) {
    const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(v));
    char bytes[8];
    std::memcpy(bytes, &bits, sizeof bytes);
    out.write(bytes, sizeof bytes);
  }
  if (!out) throw IoError("failed writing " + path.string());
}

Mlp load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string header;
  if (!std::getline(in, header)) throw IoError(path.string() + ": missing header");
  std::istringstream fields(header);
  std::string magic;
  int version = 0;
  fields >> magic >> version;
  if (magic != kMagic || version != kVersion) {
    throw IoError(path.string() + ": not a slicesim checkpoint");
  }
  std::vector<int> sizes;
  for (int s; fields >> s;) sizes.push_back(s);
  if (sizes.size() < 2) throw IoError(path.string() + ": header lists fewer than two layers");

  Mlp net(sizes);
  std::vector<double> flat(net.parameter_count());
  for (double& v : flat) {
    char bytes[8];
    if (!in.read(bytes, sizeof bytes)) throw IoError(path.string() + ": truncated parameters");
    std::uint64_t bits = 0;
    std::memcpy(&bits, bytes, sizeof bytes);
    v = std::bit_cast<double>(to_little_endian(bits));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw IoError(path.string() + ": trailing bytes after parameters");
  }
  net.assign(flat);
  return net;
}

}  // namespace slicesim
