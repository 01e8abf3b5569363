#pragma once

#include "ioda/core/types.hpp"

#include <vector>

namespace ioda::harness {

class UndefinedStatistic : public Error {
 public:
  using Error::Error;
};

double mean(const std::vector<double>& xs);
/// Sample standard deviation (n - 1); zero for a single value.
double stddev(const std::vector<double>& xs);

struct Correlation {
  double r = 0.0;
  std::size_t n = 0;
};

/// Pearson r over paired observations. Throws UndefinedStatistic for fewer than 3 pairs or when
/// either series has zero variance.
Correlation pearson(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace ioda::harness
