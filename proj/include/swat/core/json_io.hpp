#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "swat/core/types.hpp"

namespace swat {

using Json = nlohmann::ordered_json;

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& value);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

Json to_json(const Vector& v);
Vector vector_from_json(const Json& j);

}  // namespace swat
