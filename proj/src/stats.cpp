#include "cosmem/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cosmem/kernels.hpp"

namespace cosmem {

const char* to_string(TestStatus s) {
  switch (s) {
    case TestStatus::ok:
      return "ok";
    case TestStatus::untestable_constant:
      return "untestable_constant";
    case TestStatus::too_few_points:
      return "too_few_points";
  }
  return "?";
}

namespace {

// Tie statistics needed for tau-b and the variance of C-D, accumulated over
// runs of equal values in a sorted sequence.
struct TieSums {
  double pairs = 0;        // sum t(t-1)/2
  double v_term = 0;       // sum t(t-1)(2t+5)
  double pair_sum = 0;     // sum t(t-1)
  double triple_sum = 0;   // sum t(t-1)(t-2)
};

template <typename Next>
TieSums tie_sums(std::size_t n, Next&& same_as_prev) {
  TieSums s;
  double run = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i < n && same_as_prev(i)) {
      ++run;
      continue;
    }
    if (run > 1) {
      s.pairs += run * (run - 1) / 2;
      s.v_term += run * (run - 1) * (2 * run + 5);
      s.pair_sum += run * (run - 1);
      s.triple_sum += run * (run - 1) * (run - 2);
    }
    run = 1;
  }
  return s;
}

// Counts strict inversions (y[i] > y[j], i < j) while merge-sorting.
double count_inversions(std::vector<double>& y) {
  const std::size_t n = y.size();
  std::vector<double> tmp(n);
  double inversions = 0;
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo + width < n; lo += 2 * width) {
      const std::size_t mid = lo + width;
      const std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (y[i] <= y[j]) {
          tmp[k++] = y[i++];
        } else {
          inversions += static_cast<double>(mid - i);
          tmp[k++] = y[j++];
        }
      }
      while (i < mid) tmp[k++] = y[i++];
      while (j < hi) tmp[k++] = y[j++];
      std::copy(tmp.begin() + lo, tmp.begin() + hi, y.begin() + lo);
    }
  }
  return inversions;
}

double normal_two_sided_p(double z) {
  return std::erfc(std::fabs(z) / std::sqrt(2.0));
}

} // namespace

CorrelationResult kendall_tau_b(std::span<const double> x,
                                std::span<const double> y) {
  if (x.size() != y.size()) {
    throw LengthMismatch("kendall_tau_b: series lengths differ");
  }
  const std::size_t n = x.size();
  CorrelationResult r;
  r.n = n;
  if (n < 3) {
    r.status = TestStatus::too_few_points;
    return r;
  }
  const auto xr = kernels::min_max(x);
  const auto yr = kernels::min_max(y);
  if (xr.min == xr.max || yr.min == yr.max) {
    r.status = TestStatus::untestable_constant;
    return r;
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (x[a] != x[b]) return x[a] < x[b];
    return y[a] < y[b];
  });

  const TieSums tx =
      tie_sums(n, [&](std::size_t i) { return x[order[i]] == x[order[i - 1]]; });
  const TieSums txy = tie_sums(n, [&](std::size_t i) {
    return x[order[i]] == x[order[i - 1]] && y[order[i]] == y[order[i - 1]];
  });

  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
  const double discordant = count_inversions(ys); // leaves ys sorted
  const TieSums ty = tie_sums(n, [&](std::size_t i) { return ys[i] == ys[i - 1]; });

  const double nd = static_cast<double>(n);
  const double n0 = nd * (nd - 1) / 2;
  const double con_minus_dis =
      n0 - tx.pairs - ty.pairs + txy.pairs - 2 * discordant;
  const double denom = std::sqrt((n0 - tx.pairs) * (n0 - ty.pairs));
  r.tau_b = con_minus_dis / denom;

  // Tie-corrected variance of C-D.
  const double v0 = nd * (nd - 1) * (2 * nd + 5);
  double var = (v0 - tx.v_term - ty.v_term) / 18.0;
  var += tx.triple_sum * ty.triple_sum / (9.0 * nd * (nd - 1) * (nd - 2));
  var += tx.pair_sum * ty.pair_sum / (2.0 * nd * (nd - 1));
  if (var > 0) {
    r.p_raw = std::min(1.0, normal_two_sided_p(con_minus_dis / std::sqrt(var)));
  } else {
    r.p_raw = 1.0;
  }
  return r;
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw EmptySample("ks_two_sample: empty sample");
  }
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < sa.size() && j < sb.size()) {
    const double v = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == v) ++i;
    while (j < sb.size() && sb[j] == v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na -
                              static_cast<double>(j) / nb));
  }

  KsResult r;
  r.n_high = sa.size();
  r.n_rest = sb.size();
  r.d_stat = d;
  if (d == 0.0) {
    r.p_raw = 1.0;
    return r;
  }
  const double ne = na * nb / (na + nb);
  const double lambda =
      (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  double p = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 1000; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    p += sign * term;
    if (term < 1e-12) break;
    sign = -sign;
  }
  r.p_raw = std::clamp(2.0 * p, 0.0, 1.0);
  return r;
}

std::vector<double> by_adjust(std::span<const double> p) {
  const std::size_t m = p.size();
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("by_adjust: p-value outside [0, 1]");
    }
  }
  std::vector<double> adjusted(m, 0.0);
  if (m == 0) return adjusted;

  double cm = 0.0;
  for (std::size_t k = 1; k <= m; ++k) cm += 1.0 / static_cast<double>(k);

  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });

  const double md = static_cast<double>(m);
  double running = std::numeric_limits<double>::infinity();
  for (std::size_t rank = m; rank >= 1; --rank) {
    const double q = p[order[rank - 1]] * md * cm / static_cast<double>(rank);
    running = std::min(running, q);
    adjusted[order[rank - 1]] = std::min(1.0, running);
  }
  return adjusted;
}

double percentile(std::span<const double> sample, double q) {
  if (sample.empty()) throw EmptySample("percentile: empty sample");
  if (!(q >= 0.0 && q <= 100.0)) {
    throw std::invalid_argument("percentile: q outside [0, 100]");
  }
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  const double h = static_cast<double>(s.size() - 1) * q / 100.0;
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= s.size()) return s.back();
  const double frac = h - static_cast<double>(lo);
  return s[lo] + frac * (s[lo + 1] - s[lo]);
}

ThresholdPartition partition_by_threshold(
    std::span<const double> neutron_means, std::span<const double> error_values,
    double threshold) {
  if (neutron_means.size() != error_values.size()) {
    throw LengthMismatch("partition_by_threshold: series lengths differ");
  }
  ThresholdPartition out;
  const std::size_t n_high = kernels::count_greater(neutron_means, threshold);
  out.high.reserve(n_high);
  out.rest.reserve(neutron_means.size() - n_high);
  for (std::size_t i = 0; i < neutron_means.size(); ++i) {
    (neutron_means[i] > threshold ? out.high : out.rest)
        .push_back(error_values[i]);
  }
  return out;
}

} // namespace cosmem
