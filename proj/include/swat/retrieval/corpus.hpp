#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "swat/core/json_io.hpp"
#include "swat/core/types.hpp"

namespace swat::retrieval {

// One corpus entry. The image is either a precomputed feature vector or a
// path to a PGM/PPM file.
struct CaptionRecord {
  std::string id;
  std::string caption;
  std::variant<Vector, std::filesystem::path> image;
  std::optional<std::string> meta;

  bool has_features() const { return std::holds_alternative<Vector>(image); }
};

// Parses one JSON-lines record. Relative image paths resolve against base_dir.
CaptionRecord record_from_json(const Json& j, const std::filesystem::path& base_dir = {});
Json record_to_json(const CaptionRecord& record);

std::vector<CaptionRecord> load_corpus_jsonl(const std::filesystem::path& path);
void write_corpus_jsonl(const std::filesystem::path& path, const std::vector<CaptionRecord>& records);

// Flattened image payload: the feature vector itself, or the decoded pixels
// (channel-major, [0,1]).
Vector load_payload(const CaptionRecord& record);

// Shape of a record's payload; reads the image header for path payloads.
InputShape payload_shape(const CaptionRecord& record);

}  // namespace swat::retrieval
