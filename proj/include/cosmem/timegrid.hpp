#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cosmem/types.hpp"

namespace cosmem {

enum class Granularity : std::uint8_t { hour, day, week, month };

const char* to_string(Granularity g);

// Half-open calendar-aligned window [start, end). The first and last windows
// of an interval are clipped to it.
struct Window {
  UtcTime start;
  UtcTime end;
};

std::vector<Window> make_windows(UtcTime lo, UtcTime hi, Granularity g);

// Event reduced to what the grid needs. `dimm` indexes a caller-owned id
// table; kNoDimm marks events without one (scrubber logs).
struct WeightedEvent {
  UtcTime timestamp;
  double weight = 1.0;
  std::uint32_t dimm = kNoDimm;

  static constexpr std::uint32_t kNoDimm = 0xffffffffu;
};

enum class Metric : std::uint8_t { event_count, dimm_count };

struct CountSeries {
  std::vector<double> values; // one per window
};

// event_count sums weights; dimm_count counts distinct DIMMs with at least
// one event in the window. Events outside every window are ignored.
CountSeries aggregate_events(std::span<const WeightedEvent> events,
                             std::span<const Window> windows, Metric metric);

// Windows with their neutron mean and error value; windows without neutron
// coverage are dropped from both sides.
struct PairedSeries {
  std::vector<Window> windows;
  std::vector<double> neutron; // mean counts/s per window
  std::vector<double> errors;
};

PairedSeries align(const NeutronSeries& neutron,
                   std::span<const Window> windows,
                   const CountSeries& counts);

// Errors per scanned MB. Exposure records overlapping a window boundary are
// split proportionally to time. Windows with zero scanned MB are dropped and
// reported via `dropped`.
struct ExposureNormalized {
  std::vector<std::size_t> kept; // indices into the input windows
  CountSeries values;
  std::vector<std::size_t> dropped;
};

ExposureNormalized normalize_by_exposure(
    const CountSeries& counts, std::span<const ScanExposureRecord> exposure,
    std::span<const Window> windows);

// Scanned megabytes attributed to each window (proportional split).
std::vector<double> scanned_mb_per_window(
    std::span<const ScanExposureRecord> exposure,
    std::span<const Window> windows);

// Total event weight per hour of day after applying a fixed UTC offset.
std::array<double, 24> hour_of_day_profile(std::span<const WeightedEvent> events,
                                           std::int64_t utc_offset_seconds = 0);

// Removes the ceil(fraction * distinct-DIMM-count) DIMMs with the highest
// total weight; ties break by DIMM id ascending. fraction 0 is the identity.
struct TopDimmExclusion {
  std::vector<WeightedEvent> kept_events;
  std::vector<std::uint32_t> excluded_dimms;
};

TopDimmExclusion exclude_top_dimms(std::span<const WeightedEvent> events,
                                   double fraction,
                                   const std::vector<std::string>& dimm_ids);

struct Heatmap {
  std::vector<double> x_edges; // x_bins + 1
  std::vector<double> y_edges; // y_bins + 1, log10 values when y_log
  std::vector<std::uint64_t> counts; // row-major [y][x]
  std::size_t x_bins = 0;
  std::size_t y_bins = 0;
  bool y_log = false;
};

// Observation-count histogram over (neutron mean, error value). With y_log
// the y axis bins log10(value); non-positive values land in the lowest bin.
Heatmap heatmap_bins(const PairedSeries& paired, std::size_t x_bins,
                     std::size_t y_bins, bool y_log);

} // namespace cosmem
