#include <cstdlib>
#include <cstring>

#include "cosmem/kernels.hpp"

namespace cosmem::kernels {

namespace {

Lane pick_lane() {
  // COSMEM_KERNELS=scalar pins the reference lane, e.g. when diffing outputs
  // across machines.
  if (const char* env = std::getenv("COSMEM_KERNELS")) {
    if (std::strcmp(env, "scalar") == 0) return Lane::scalar;
  }
#ifdef COSMEM_WITH_AVX2
  if (__builtin_cpu_supports("avx2")) return Lane::avx2;
#endif
  return Lane::scalar;
}

const Lane g_lane = pick_lane();

} // namespace

Lane active_lane() { return g_lane; }

const char* lane_name(Lane lane) {
  switch (lane) {
    case Lane::avx2:
      return "avx2";
    case Lane::scalar:
    default:
      return "scalar";
  }
}

double sum(std::span<const double> v) {
#ifdef COSMEM_WITH_AVX2
  if (g_lane == Lane::avx2) return avx2::sum(v);
#endif
  return scalar::sum(v);
}

MinMax min_max(std::span<const double> v) {
#ifdef COSMEM_WITH_AVX2
  if (g_lane == Lane::avx2) return avx2::min_max(v);
#endif
  return scalar::min_max(v);
}

std::size_t count_greater(std::span<const double> v, double threshold) {
#ifdef COSMEM_WITH_AVX2
  if (g_lane == Lane::avx2) return avx2::count_greater(v, threshold);
#endif
  return scalar::count_greater(v, threshold);
}

GiniSplit gini_best_split(const double* sorted_values, const double* prefix_pos,
                          std::size_t n, double total_pos, std::size_t lo,
                          std::size_t hi) {
#ifdef COSMEM_WITH_AVX2
  if (g_lane == Lane::avx2)
    return avx2::gini_best_split(sorted_values, prefix_pos, n, total_pos, lo,
                                 hi);
#endif
  return scalar::gini_best_split(sorted_values, prefix_pos, n, total_pos, lo,
                                 hi);
}

} // namespace cosmem::kernels
