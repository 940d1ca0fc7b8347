#pragma once

#include <filesystem>
#include <string>

#include "swat/model/model.hpp"

namespace swat::model {

struct Checkpoint {
  Model model;
  std::string config_hash;
  std::vector<std::string> class_names;
};

// Binary container: "SWATCKPT", u32 version, u64 header length, JSON header
// (stage, config hash, class names, encoder architecture, tensor table),
// then the tensors as little-endian float64 in table order.
void save_checkpoint(const std::filesystem::path& path, const Model& model, const std::string& config_hash,
                     const std::vector<std::string>& class_names);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace swat::model
