#pragma once

#include <filesystem>
#include <vector>

#include "swat/core/types.hpp"

namespace swat {

// Decoded image, channel-major, values scaled to [0, 1].
struct Image {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<double> pixels;
};

// Reads binary PGM (P5) or PPM (P6) with maxval <= 255.
Image read_netpbm(const std::filesystem::path& path);
void write_netpbm(const std::filesystem::path& path, const Image& image);

}  // namespace swat
