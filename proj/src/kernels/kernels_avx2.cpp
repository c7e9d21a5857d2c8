#include "cosmem/kernels.hpp"

#ifdef COSMEM_WITH_AVX2

#include <immintrin.h>

#include <algorithm>
#include <bit>
#include <limits>

namespace cosmem::kernels::avx2 {

double sum(std::span<const double> v) {
  const double* p = v.data();
  std::size_t n = v.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_loadu_pd(p + i));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double total = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) total += p[i];
  return total;
}

MinMax min_max(std::span<const double> v) {
  const double* p = v.data();
  std::size_t n = v.size();
  MinMax r{std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity()};
  std::size_t i = 0;
  if (n >= 4) {
    __m256d vmin = _mm256_loadu_pd(p);
    __m256d vmax = vmin;
    for (i = 4; i + 4 <= n; i += 4) {
      __m256d x = _mm256_loadu_pd(p + i);
      vmin = _mm256_min_pd(vmin, x);
      vmax = _mm256_max_pd(vmax, x);
    }
    alignas(32) double lo[4], hi[4];
    _mm256_store_pd(lo, vmin);
    _mm256_store_pd(hi, vmax);
    for (int k = 0; k < 4; ++k) {
      if (lo[k] < r.min) r.min = lo[k];
      if (hi[k] > r.max) r.max = hi[k];
    }
  }
  for (; i < n; ++i) {
    if (p[i] < r.min) r.min = p[i];
    if (p[i] > r.max) r.max = p[i];
  }
  return r;
}

std::size_t count_greater(std::span<const double> v, double threshold) {
  const double* p = v.data();
  std::size_t n = v.size();
  const __m256d t = _mm256_set1_pd(threshold);
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d cmp = _mm256_cmp_pd(_mm256_loadu_pd(p + i), t, _CMP_GT_OQ);
    count += std::popcount(
        static_cast<unsigned>(_mm256_movemask_pd(cmp)));
  }
  for (; i < n; ++i) count += (p[i] > threshold) ? 1 : 0;
  return count;
}

GiniSplit gini_best_split(const double* sorted_values, const double* prefix_pos,
                          std::size_t n, double total_pos, std::size_t lo,
                          std::size_t hi) {
  lo = std::max<std::size_t>(lo, 1);
  hi = std::min(hi, n);
  if (hi <= lo || hi - lo < 16) {
    return scalar::gini_best_split(sorted_values, prefix_pos, n, total_pos, lo,
                                   hi);
  }
  const double inf = std::numeric_limits<double>::infinity();
  const __m256d vinf = _mm256_set1_pd(inf);
  const __m256d vn = _mm256_set1_pd(static_cast<double>(n));
  const __m256d vtp = _mm256_set1_pd(total_pos);
  __m256d best_f = vinf;
  __m256d best_i = _mm256_setzero_pd();

  std::size_t i = lo;
  for (; i + 4 <= hi; i += 4) {
    __m256d prev = _mm256_loadu_pd(sorted_values + i - 1);
    __m256d cur = _mm256_loadu_pd(sorted_values + i);
    __m256d legal = _mm256_cmp_pd(prev, cur, _CMP_LT_OQ);
    __m256d nl = _mm256_set_pd(static_cast<double>(i + 3),
                               static_cast<double>(i + 2),
                               static_cast<double>(i + 1),
                               static_cast<double>(i));
    __m256d nr = _mm256_sub_pd(vn, nl);
    __m256d pl = _mm256_loadu_pd(prefix_pos + i);
    __m256d pr = _mm256_sub_pd(vtp, pl);
    // Same elementwise expression as the scalar reference; no FMA so the two
    // lanes agree exactly.
    __m256d fl = _mm256_div_pd(_mm256_mul_pd(pl, _mm256_sub_pd(nl, pl)), nl);
    __m256d fr = _mm256_div_pd(_mm256_mul_pd(pr, _mm256_sub_pd(nr, pr)), nr);
    __m256d f = _mm256_blendv_pd(vinf, _mm256_add_pd(fl, fr), legal);
    __m256d better = _mm256_cmp_pd(f, best_f, _CMP_LT_OQ);
    best_f = _mm256_blendv_pd(best_f, f, better);
    best_i = _mm256_blendv_pd(best_i, nl, better);
  }

  alignas(32) double fl[4], il[4];
  _mm256_store_pd(fl, best_f);
  _mm256_store_pd(il, best_i);
  GiniSplit best;
  best.impurity = inf;
  for (int k = 0; k < 4; ++k) {
    std::size_t idx = static_cast<std::size_t>(il[k]);
    if (fl[k] < best.impurity ||
        (fl[k] == best.impurity && idx < best.index)) {
      best.impurity = fl[k];
      best.index = idx;
    }
  }
  for (; i < hi; ++i) {
    if (!(sorted_values[i - 1] < sorted_values[i])) continue;
    const double nl = static_cast<double>(i);
    const double nr = static_cast<double>(n - i);
    const double pl = prefix_pos[i];
    const double pr = total_pos - pl;
    const double f = (pl * (nl - pl)) / nl + (pr * (nr - pr)) / nr;
    if (f < best.impurity) {
      best.impurity = f;
      best.index = i;
    }
  }
  if (best.index == 0) best.impurity = 0.0;
  return best;
}

} // namespace cosmem::kernels::avx2

#endif // COSMEM_WITH_AVX2
