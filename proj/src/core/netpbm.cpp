#include "swat/core/netpbm.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <string>

#include "swat/core/error.hpp"

namespace swat {

namespace {

int read_header_int(std::istream& in, const std::filesystem::path& path) {
  int c = in.peek();
  while (c != EOF) {
    if (c == '#') {
      std::string skip;
      std::getline(in, skip);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
    c = in.peek();
  }
  int value = 0;
  if (!(in >> value)) throw IoError("bad netpbm header in '" + path.string() + "'");
  return value;
}

}  // namespace

Image read_netpbm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image '" + path.string() + "'");
  char magic[2] = {};
  in.read(magic, 2);
  if (magic[0] != 'P' || (magic[1] != '5' && magic[1] != '6')) {
    throw IoError("'" + path.string() + "' is not a binary PGM/PPM file");
  }
  Image img;
  img.channels = magic[1] == '5' ? 1 : 3;
  img.width = read_header_int(in, path);
  img.height = read_header_int(in, path);
  const int maxval = read_header_int(in, path);
  if (img.width <= 0 || img.height <= 0 || maxval <= 0 || maxval > 255) {
    throw IoError("unsupported netpbm geometry in '" + path.string() + "'");
  }
  in.get();  // single whitespace before raster
  const std::size_t plane = static_cast<std::size_t>(img.width) * img.height;
  std::vector<unsigned char> raw(plane * img.channels);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw IoError("truncated raster in '" + path.string() + "'");
  }
  img.pixels.resize(raw.size());
  // Interleaved RGB on disk, channel-major in memory.
  for (std::size_t p = 0; p < plane; ++p) {
    for (int c = 0; c < img.channels; ++c) {
      img.pixels[c * plane + p] = raw[p * img.channels + c] / static_cast<double>(maxval);
    }
  }
  return img;
}

void write_netpbm(const std::filesystem::path& path, const Image& image) {
  if (image.channels != 1 && image.channels != 3) {
    throw InvalidArgument("netpbm supports 1 or 3 channels");
  }
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << (image.channels == 1 ? "P5" : "P6") << "\n" << image.width << " " << image.height << "\n255\n";
  const std::size_t plane = static_cast<std::size_t>(image.width) * image.height;
  std::vector<unsigned char> raw(plane * image.channels);
  for (std::size_t p = 0; p < plane; ++p) {
    for (int c = 0; c < image.channels; ++c) {
      const double v = std::clamp(image.pixels[c * plane + p], 0.0, 1.0);
      raw[p * image.channels + c] = static_cast<unsigned char>(v * 255.0 + 0.5);
    }
  }
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
}

}  // namespace swat
