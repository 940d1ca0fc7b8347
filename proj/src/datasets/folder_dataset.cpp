#include "swat/datasets/folder_dataset.hpp"

#include <algorithm>

#include "swat/core/error.hpp"
#include "swat/core/netpbm.hpp"

namespace swat::datasets {

LabeledSet load_folder_dataset(const std::filesystem::path& root, const retrieval::ConceptVocabulary& vocab) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw IoError("dataset directory '" + root.string() + "' does not exist");
  LabeledSet out = LabeledSet::empty(InputShape{}, vocab.names());
  std::vector<Vector> rows;
  bool have_shape = false;
  for (int c = 0; c < vocab.size(); ++c) {
    const fs::path dir = root / vocab[c].name;
    if (!fs::is_directory(dir)) throw IoError("missing class folder '" + dir.string() + "'");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      const auto ext = entry.path().extension().string();
      if (entry.is_regular_file() && (ext == ".pgm" || ext == ".ppm")) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      const Image img = read_netpbm(f);
      const InputShape shape = InputShape::image(img.channels, img.height, img.width);
      if (!have_shape) {
        out.shape = shape;
        have_shape = true;
      } else if (shape != out.shape) {
        throw IoError("image '" + f.string() + "' has a different shape from the rest of the dataset");
      }
      rows.push_back(Eigen::Map<const Vector>(img.pixels.data(), static_cast<Eigen::Index>(img.pixels.size())));
      out.labels.push_back(c);
      out.sources.push_back(Source::kFewShot);
      out.ids.push_back(vocab[c].name + "/" + f.filename().string());
    }
  }
  out.inputs.resize(static_cast<Eigen::Index>(rows.size()), out.shape.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out.inputs.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return out;
}

}  // namespace swat::datasets
