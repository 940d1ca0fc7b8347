#include "swat/retrieval/corpus.hpp"

#include <fstream>
#include <string>

#include "swat/core/error.hpp"
#include "swat/core/netpbm.hpp"

namespace swat::retrieval {

CaptionRecord record_from_json(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw InvalidArgument("corpus record must be a JSON object");
  if (!j.contains("id") || !j["id"].is_string()) throw InvalidArgument("corpus record lacks string 'id'");
  if (!j.contains("caption") || !j["caption"].is_string()) {
    throw InvalidArgument("corpus record '" + j["id"].get<std::string>() + "' lacks string 'caption'");
  }
  CaptionRecord r;
  r.id = j["id"].get<std::string>();
  r.caption = j["caption"].get<std::string>();
  const bool has_features = j.contains("features");
  const bool has_path = j.contains("image_path");
  if (has_features == has_path) {
    throw InvalidArgument("corpus record '" + r.id + "' needs exactly one of 'features' or 'image_path'");
  }
  if (has_features) {
    r.image = vector_from_json(j["features"]);
  } else {
    std::filesystem::path p = j["image_path"].get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    r.image = p;
  }
  if (j.contains("meta") && j["meta"].is_string()) r.meta = j["meta"].get<std::string>();
  return r;
}

Json record_to_json(const CaptionRecord& record) {
  Json j = Json::object();
  j["id"] = record.id;
  j["caption"] = record.caption;
  if (record.has_features()) {
    j["features"] = to_json(std::get<Vector>(record.image));
  } else {
    j["image_path"] = std::get<std::filesystem::path>(record.image).string();
  }
  if (record.meta) j["meta"] = *record.meta;
  return j;
}

std::vector<CaptionRecord> load_corpus_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus '" + path.string() + "'");
  std::vector<CaptionRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(record_from_json(Json::parse(line), path.parent_path()));
    } catch (const std::exception& e) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

void write_corpus_jsonl(const std::filesystem::path& path, const std::vector<CaptionRecord>& records) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  for (const auto& r : records) out << record_to_json(r).dump() << "\n";
}

Vector load_payload(const CaptionRecord& record) {
  if (record.has_features()) return std::get<Vector>(record.image);
  const Image img = read_netpbm(std::get<std::filesystem::path>(record.image));
  return Eigen::Map<const Vector>(img.pixels.data(), static_cast<Eigen::Index>(img.pixels.size()));
}

InputShape payload_shape(const CaptionRecord& record) {
  if (record.has_features()) return InputShape::features(static_cast<int>(std::get<Vector>(record.image).size()));
  const Image img = read_netpbm(std::get<std::filesystem::path>(record.image));
  return InputShape::image(img.channels, img.height, img.width);
}

}  // namespace swat::retrieval
