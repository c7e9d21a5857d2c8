#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cosmem/errors.hpp"

namespace cosmem {

enum class TestStatus : std::uint8_t {
  ok,
  untestable_constant, // one variable has a single distinct value
  too_few_points,      // n < 3, or an empty partition side
};

const char* to_string(TestStatus s);

struct CorrelationResult {
  TestStatus status = TestStatus::ok;
  std::optional<double> tau_b; // present iff status == ok
  std::optional<double> p_raw;
  std::size_t n = 0;
};

struct KsResult {
  TestStatus status = TestStatus::ok;
  std::optional<double> d_stat;
  std::optional<double> p_raw;
  std::size_t n_high = 0;
  std::size_t n_rest = 0;
};

// Kendall tau-b with tie correction in both variables. Pair counting uses a
// merge-sort inversion count; the two-sided p-value comes from the normal
// approximation with the tie-corrected variance of C-D. Throws LengthMismatch.
CorrelationResult kendall_tau_b(std::span<const double> x,
                                std::span<const double> y);

// Two-sample Kolmogorov-Smirnov. d = sup |ECDF_a - ECDF_b|; p from the
// asymptotic Kolmogorov series with effective size na*nb/(na+nb). Throws
// EmptySample.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

// Benjamini-Yekutieli step-up adjustment, valid under arbitrary dependence.
// Output is index-aligned with the input. Throws std::invalid_argument for
// p outside [0, 1].
std::vector<double> by_adjust(std::span<const double> p);

// Linear interpolation of order statistics, q in [0, 100].
double percentile(std::span<const double> sample, double q);

// Splits window-level error values into (neutron mean > threshold, rest).
struct ThresholdPartition {
  std::vector<double> high;
  std::vector<double> rest;
};
ThresholdPartition partition_by_threshold(std::span<const double> neutron_means,
                                          std::span<const double> error_values,
                                          double threshold);

} // namespace cosmem
