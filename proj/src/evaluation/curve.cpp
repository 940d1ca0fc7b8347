#include "swat/evaluation/curve.hpp"

#include <sstream>

#include "swat/core/error.hpp"
#include "swat/core/parallel.hpp"
#include "swat/evaluation/evaluate.hpp"

namespace swat::evaluation {

Json CurveSeries::to_json() const {
  return Json{{"epochs", epochs}, {"seeds", seeds}, {"mean", mean}, {"std", std}, {"per_seed", per_seed}};
}

std::string CurveSeries::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "epochs,mean,std";
  for (auto s : seeds) out << ",seed_" << s;
  out << "\n";
  for (std::size_t i = 0; i < epochs.size(); ++i) {
    out << epochs[i] << "," << mean[i] << "," << std[i];
    for (double v : per_seed[i]) out << "," << v;
    out << "\n";
  }
  return out.str();
}

PlotSeries CurveSeries::plot_series(const std::string& label) const {
  PlotSeries s;
  s.label = label;
  for (int e : epochs) s.x.push_back(e);
  s.y = mean;
  s.err = std;
  return s;
}

CurveSeries curve_study(const CurveCell& cell, const std::vector<int>& epoch_grid,
                        const std::vector<std::uint64_t>& seeds, std::size_t max_threads) {
  if (epoch_grid.empty()) throw InvalidArgument("curve study needs at least one epoch count");
  if (seeds.empty()) throw InvalidArgument("curve study needs at least one seed");
  for (std::size_t i = 0; i < epoch_grid.size(); ++i) {
    if (epoch_grid[i] < 1) throw InvalidArgument("curve epochs must be >= 1");
    if (i > 0 && epoch_grid[i] <= epoch_grid[i - 1]) throw InvalidArgument("curve epoch grid must be ascending");
  }
  const std::size_t S = seeds.size();
  std::vector<double> flat(epoch_grid.size() * S);
  parallel_for(
      flat.size(), [&](std::size_t k) { flat[k] = cell(epoch_grid[k / S], seeds[k % S]); }, max_threads);

  CurveSeries out;
  out.epochs = epoch_grid;
  out.seeds = seeds;
  for (std::size_t i = 0; i < epoch_grid.size(); ++i) {
    std::vector<double> row(flat.begin() + static_cast<std::ptrdiff_t>(i * S),
                            flat.begin() + static_cast<std::ptrdiff_t>((i + 1) * S));
    const auto ms = mean_std(row);
    out.mean.push_back(ms.mean);
    out.std.push_back(ms.std);
    out.per_seed.push_back(std::move(row));
  }
  return out;
}

}  // namespace swat::evaluation
