#pragma once

#include <filesystem>

#include "swat/datasets/labeled_set.hpp"
#include "swat/retrieval/vocabulary.hpp"

namespace swat::datasets {

// Loads root/<class>/<file>.{pgm,ppm}. Classes follow vocabulary order and
// every vocabulary concept must have a folder; all images share one shape.
// Example ids are "<class>/<file name>".
LabeledSet load_folder_dataset(const std::filesystem::path& root, const retrieval::ConceptVocabulary& vocab);

}  // namespace swat::datasets
