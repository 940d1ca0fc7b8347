#include "swat/model/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "swat/core/error.hpp"
#include "swat/core/json_io.hpp"

namespace swat::model {

namespace {

constexpr char kMagic[8] = {'S', 'W', 'A', 'T', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in, const std::filesystem::path& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw IoError("truncated checkpoint '" + path.string() + "'");
  return v;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Model& model, const std::string& config_hash,
                     const std::vector<std::string>& class_names) {
  std::vector<std::pair<std::string, const Matrix*>> tensors;
  const auto names = model.encoder().parameter_names();
  const auto params = model.encoder().parameters();
  for (std::size_t i = 0; i < params.size(); ++i) tensors.emplace_back(names[i], params[i]);
  tensors.emplace_back("head.weights", &model.head().weights);
  Matrix log_tau(1, 1);
  log_tau(0, 0) = model.head().log_temperature;
  tensors.emplace_back("head.log_temperature", &log_tau);

  Json table = Json::array();
  for (const auto& [name, m] : tensors) table.push_back(Json{{"name", name}, {"rows", m->rows()}, {"cols", m->cols()}});
  const Json header{{"stage", to_string(model.stage())},
                    {"config_hash", config_hash},
                    {"class_names", class_names},
                    {"encoder", model.encoder().architecture()},
                    {"tensors", table}};
  const std::string header_text = header.dump();

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint '" + path.string() + "'");
  out.write(kMagic, sizeof(kMagic));
  write_pod(out, kVersion);
  write_pod(out, static_cast<std::uint64_t>(header_text.size()));
  out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));
  for (const auto& [name, m] : tensors) {
    out.write(reinterpret_cast<const char*>(m->data()), static_cast<std::streamsize>(m->size() * sizeof(double)));
  }
  if (!out) throw IoError("write failed for checkpoint '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path.string() + "'");
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw IoError("'" + path.string() + "' is not a checkpoint");
  }
  const auto version = read_pod<std::uint32_t>(in, path);
  if (version != kVersion) throw IoError("unsupported checkpoint version " + std::to_string(version));
  const auto header_len = read_pod<std::uint64_t>(in, path);
  std::string header_text(header_len, '\0');
  in.read(header_text.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw IoError("truncated checkpoint '" + path.string() + "'");
  const Json header = Json::parse(header_text);

  auto encoder = make_encoder(header.at("encoder"));
  std::vector<Matrix*> targets = encoder->parameters();
  Matrix head_weights;
  Matrix log_tau;
  targets.push_back(&head_weights);
  targets.push_back(&log_tau);
  const auto& table = header.at("tensors");
  if (table.size() != targets.size()) throw IoError("checkpoint tensor table does not match its encoder");
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto rows = table[i].at("rows").get<Eigen::Index>();
    const auto cols = table[i].at("cols").get<Eigen::Index>();
    Matrix& m = *targets[i];
    if (i + 2 < table.size() && (m.rows() != rows || m.cols() != cols)) {
      throw IoError("checkpoint tensor '" + table[i].at("name").get<std::string>() + "' has unexpected shape");
    }
    m.resize(rows, cols);
    in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double)));
    if (!in) throw IoError("truncated checkpoint '" + path.string() + "'");
  }
  ClassifierHead head{std::move(head_weights), log_tau(0, 0)};
  return Checkpoint{Model(std::move(encoder), std::move(head), stage_from_string(header.at("stage").get<std::string>())),
                    header.at("config_hash").get<std::string>(),
                    header.at("class_names").get<std::vector<std::string>>()};
}

}  // namespace swat::model
