#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "swat/core/json_io.hpp"
#include "swat/core/svg_plot.hpp"

namespace swat::evaluation {

// Accuracy of one fresh run trained for `epochs` epochs with `seed`.
using CurveCell = std::function<double(int epochs, std::uint64_t seed)>;

struct CurveSeries {
  std::vector<int> epochs;
  std::vector<std::uint64_t> seeds;
  std::vector<std::vector<double>> per_seed;  // [epoch index][seed index]
  std::vector<double> mean;
  std::vector<double> std;

  Json to_json() const;
  std::string to_csv() const;
  PlotSeries plot_series(const std::string& label) const;
};

// Runs every (epoch, seed) cell; cells may run concurrently but results are
// aggregated in grid order. Throws on an empty or non-ascending grid or an
// empty seed list.
CurveSeries curve_study(const CurveCell& cell, const std::vector<int>& epoch_grid,
                        const std::vector<std::uint64_t>& seeds, std::size_t max_threads = 1);

}  // namespace swat::evaluation
