#include "ioda/harness/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ioda::harness {

double mean(const std::vector<double>& xs) {
  if (xs.empty()) throw UndefinedStatistic("mean of an empty series");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double stddev(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

Correlation pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw DimensionError("pearson: series lengths differ");
  if (xs.size() < 3) throw UndefinedStatistic("pearson: need at least 3 pairs");
  const double mx = mean(xs), my = mean(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedStatistic("pearson: zero variance");
  return {std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0), xs.size()};
}

}  // namespace ioda::harness
