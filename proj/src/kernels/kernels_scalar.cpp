#include <algorithm>
#include <limits>

#include "cosmem/kernels.hpp"

namespace cosmem::kernels::scalar {

double sum(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc;
}

MinMax min_max(std::span<const double> v) {
  MinMax r{std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity()};
  for (double x : v) {
    if (x < r.min) r.min = x;
    if (x > r.max) r.max = x;
  }
  return r;
}

std::size_t count_greater(std::span<const double> v, double threshold) {
  std::size_t n = 0;
  for (double x : v) n += (x > threshold) ? 1 : 0;
  return n;
}

GiniSplit gini_best_split(const double* sorted_values, const double* prefix_pos,
                          std::size_t n, double total_pos, std::size_t lo,
                          std::size_t hi) {
  GiniSplit best;
  best.impurity = std::numeric_limits<double>::infinity();
  lo = std::max<std::size_t>(lo, 1);
  hi = std::min(hi, n);
  for (std::size_t i = lo; i < hi; ++i) {
    if (!(sorted_values[i - 1] < sorted_values[i])) continue;
    const double nl = static_cast<double>(i);
    const double nr = static_cast<double>(n - i);
    const double pl = prefix_pos[i];
    const double pr = total_pos - pl;
    // Children Gini impurity scaled by child size: sum of pos*neg/n.
    const double f = (pl * (nl - pl)) / nl + (pr * (nr - pr)) / nr;
    if (f < best.impurity) {
      best.impurity = f;
      best.index = i;
    }
  }
  if (best.index == 0) best.impurity = 0.0;
  return best;
}

} // namespace cosmem::kernels::scalar
