#pragma once

#include <cstdint>
#include <string_view>

#include <Eigen/Dense>

namespace swat {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::RowVectorXd;

// Which pool a training example came from.
enum class Source : std::uint8_t { kFewShot, kRetrieved };

std::string_view to_string(Source source);
Source source_from_string(std::string_view text);

// Layout of one input. Feature vectors use kFeatures with channels = dim and
// height = width = 1; images are stored channel-major (c, y, x).
struct InputShape {
  enum class Kind : std::uint8_t { kFeatures, kImage };

  Kind kind = Kind::kFeatures;
  int channels = 0;
  int height = 1;
  int width = 1;

  static InputShape features(int dim) { return {Kind::kFeatures, dim, 1, 1}; }
  static InputShape image(int channels, int height, int width) {
    return {Kind::kImage, channels, height, width};
  }

  int size() const { return channels * height * width; }
  bool is_image() const { return kind == Kind::kImage; }

  friend bool operator==(const InputShape&, const InputShape&) = default;
};

}  // namespace swat
