#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace sfbm {

// Kolmogorov-Smirnov distance between the empirical distribution of the
// samples and the uniform law on [0,1]:
//   sup_x |F_n(x) - x| = max_i max((i+1)/n - x_(i), x_(i) - i/n).
inline double uniform_ks_distance(std::vector<double> samples) {
  if (samples.empty()) {
    throw std::invalid_argument("uniform_ks_distance: empty sample");
  }
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double hi = (i + 1.0) / n - samples[i];
    const double lo = samples[i] - i / n;
    worst = std::max(worst, std::max(hi, lo));
  }
  return worst;
}

}  // namespace sfbm
