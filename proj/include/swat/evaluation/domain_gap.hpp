#pragma once

#include <cstdint>

#include "swat/core/json_io.hpp"
#include "swat/core/types.hpp"

namespace swat::evaluation {

struct ProbeConfig {
  int epochs = 100;
  double lr = 1e-3;
  int batch_size = 32;
  double test_fraction = 0.2;
  bool standardize = true;  // z-score with training-split statistics
  std::uint64_t seed = 0;

  void validate() const;
  Json to_json() const;
  static ProbeConfig from_json(const Json& j, const std::string& where = "probe");
};

struct ProbeResult {
  double accuracy = 0.0;  // held-out, percent
  int n_train = 0;
  int n_test = 0;

  Json to_json() const;
};

// Trains a logistic classifier (Adam) to tell rows of `a` (label 0) from rows
// of `b` (label 1) on a stratified split and reports held-out accuracy.
// Throws when a source has fewer than 20 rows or fewer than 5 held out.
ProbeResult domain_gap_probe(const Matrix& a, const Matrix& b, const ProbeConfig& cfg);

}  // namespace swat::evaluation
