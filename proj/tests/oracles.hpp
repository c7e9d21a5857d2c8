#pragma once

// Brute-force reference implementations used only by tests. These stay
// independent of the library's fast paths: the Kendall oracle classifies
// every pair, the KS oracle evaluates both ECDFs at every breakpoint, and
// the BY oracle builds the step-up from explicit intermediate arrays.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "cosmem/rng.hpp"

namespace cosmem::test {

struct KendallOracle {
  double tau_b = 0.0;
  double con_minus_dis = 0.0;
  bool defined = false;
};

inline KendallOracle kendall_oracle(std::span<const double> x,
                                    std::span<const double> y) {
  const std::size_t n = x.size();
  KendallOracle r;
  double con = 0, dis = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx != 0 && dy != 0) {
        if ((dx < 0) == (dy < 0)) {
          con += 1;
        } else {
          dis += 1;
        }
      }
    }
  }
  std::map<double, double> tx, ty;
  for (std::size_t i = 0; i < n; ++i) {
    tx[x[i]] += 1;
    ty[y[i]] += 1;
  }
  double n1 = 0, n2 = 0;
  for (const auto& [v, t] : tx) n1 += t * (t - 1) / 2;
  for (const auto& [v, t] : ty) n2 += t * (t - 1) / 2;
  const double n0 = static_cast<double>(n) * (n - 1) / 2;
  if (n0 - n1 <= 0 || n0 - n2 <= 0) return r;
  r.defined = true;
  r.con_minus_dis = con - dis;
  r.tau_b = (con - dis) / std::sqrt((n0 - n1) * (n0 - n2));
  return r;
}

inline double ks_oracle(std::span<const double> a, std::span<const double> b) {
  std::vector<double> points(a.begin(), a.end());
  points.insert(points.end(), b.begin(), b.end());
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  double d = 0;
  for (double p : points) {
    double fa = 0, fb = 0;
    for (double v : a) fa += v <= p ? 1 : 0;
    for (double v : b) fb += v <= p ? 1 : 0;
    d = std::max(d, std::fabs(fa / static_cast<double>(a.size()) -
                              fb / static_cast<double>(b.size())));
  }
  return d;
}

// Step-up BY built from explicit arrays: q values, suffix minima, rank map.
// The per-element expression matches the library's canonical form
// p * m * c(m) / rank so exact (bitwise) agreement is well-defined.
inline std::vector<double> by_oracle(std::span<const double> p) {
  const std::size_t m = p.size();
  std::vector<double> out(m, 0.0);
  if (m == 0) return out;
  double cm = 0;
  for (std::size_t k = 1; k <= m; ++k) cm += 1.0 / static_cast<double>(k);

  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });

  std::vector<double> q(m);
  for (std::size_t r = 0; r < m; ++r) {
    q[r] = p[order[r]] * static_cast<double>(m) * cm /
           static_cast<double>(r + 1);
  }
  std::vector<double> suffix_min(m);
  suffix_min[m - 1] = q[m - 1];
  for (std::size_t r = m - 1; r-- > 0;) {
    suffix_min[r] = std::min(q[r], suffix_min[r + 1]);
  }
  for (std::size_t r = 0; r < m; ++r) {
    out[order[r]] = std::min(1.0, suffix_min[r]);
  }
  return out;
}

// Pearson chi-square statistic against a uniform 24-bin profile.
inline double chi2_uniform(std::span<const double> bins) {
  double total = 0;
  for (double b : bins) total += b;
  if (total == 0) return 0;
  const double expected = total / static_cast<double>(bins.size());
  double stat = 0;
  for (double b : bins) {
    stat += (b - expected) * (b - expected) / expected;
  }
  return stat;
}

// 0.95 quantile of chi-square with 23 degrees of freedom.
inline constexpr double kChi2Crit23_95 = 35.17246162690806;

inline std::vector<double> random_series(std::mt19937_64& rng, std::size_t n,
                                         int distinct) {
  std::vector<double> v(n);
  for (auto& x : v) {
    x = static_cast<double>(uniform_below(rng, distinct));
  }
  return v;
}

} // namespace cosmem::test
