#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace cosmem::kernels {

// Data-parallel inner loops behind the statistics and the forest trainer.
// Each kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant selected once at startup. The gini split scan is elementwise and
// agrees with the scalar reference bit-for-bit; the reductions may differ in
// rounding (different accumulation order), which the equivalence tests bound.

struct MinMax {
  double min;
  double max;
};

// Best split position for a node whose samples are sorted by feature value.
// index == 0 means no valid split (all values equal).
struct GiniSplit {
  std::size_t index = 0;     // left half = samples [0, index)
  double impurity = 0.0;     // weighted children impurity, lower is better
};

double sum(std::span<const double> v);
MinMax min_max(std::span<const double> v);
std::size_t count_greater(std::span<const double> v, double threshold);

// sorted_values[0..n), prefix_pos[i] = positives among the first i samples
// (prefix_pos has n entries, prefix_pos[0] == 0 unused). A split at i is
// legal when sorted_values[i-1] < sorted_values[i] and lo <= i < hi (the
// caller's min-leaf bounds). Ties in impurity resolve to the smallest index.
GiniSplit gini_best_split(const double* sorted_values, const double* prefix_pos,
                          std::size_t n, double total_pos, std::size_t lo,
                          std::size_t hi);

enum class Lane { scalar, avx2 };
Lane active_lane();
const char* lane_name(Lane lane);

namespace scalar {
double sum(std::span<const double> v);
MinMax min_max(std::span<const double> v);
std::size_t count_greater(std::span<const double> v, double threshold);
GiniSplit gini_best_split(const double* sorted_values, const double* prefix_pos,
                          std::size_t n, double total_pos, std::size_t lo,
                          std::size_t hi);
} // namespace scalar

#ifdef COSMEM_WITH_AVX2
namespace avx2 {
double sum(std::span<const double> v);
MinMax min_max(std::span<const double> v);
std::size_t count_greater(std::span<const double> v, double threshold);
GiniSplit gini_best_split(const double* sorted_values, const double* prefix_pos,
                          std::size_t n, double total_pos, std::size_t lo,
                          std::size_t hi);
} // namespace avx2
#endif

} // namespace cosmem::kernels
