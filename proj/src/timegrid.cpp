#include "cosmem/timegrid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cosmem/kernels.hpp"

namespace cosmem {

const char* to_string(Granularity g) {
  switch (g) {
    case Granularity::hour:
      return "hour";
    case Granularity::day:
      return "day";
    case Granularity::week:
      return "week";
    case Granularity::month:
      return "month";
  }
  return "?";
}

namespace {

UtcTime floor_to(UtcTime t, Granularity g) {
  switch (g) {
    case Granularity::hour:
      return floor_hour(t);
    case Granularity::day:
      return floor_day(t);
    case Granularity::week:
      return floor_week(t);
    case Granularity::month:
      return floor_month(t);
  }
  return t;
}

UtcTime next_boundary(UtcTime aligned, Granularity g) {
  switch (g) {
    case Granularity::hour:
      return aligned + kSecondsPerHour;
    case Granularity::day:
      return aligned + kSecondsPerDay;
    case Granularity::week:
      return aligned + kSecondsPerWeek;
    case Granularity::month:
      return add_months(aligned, 1);
  }
  return aligned;
}

// Index of the window containing t, or npos.
std::size_t window_index(std::span<const Window> windows, UtcTime t) {
  auto it = std::upper_bound(
      windows.begin(), windows.end(), t,
      [](UtcTime v, const Window& w) { return v < w.start; });
  if (it == windows.begin()) return static_cast<std::size_t>(-1);
  --it;
  if (t >= it->start && t < it->end) {
    return static_cast<std::size_t>(it - windows.begin());
  }
  return static_cast<std::size_t>(-1);
}

} // namespace

std::vector<Window> make_windows(UtcTime lo, UtcTime hi, Granularity g) {
  std::vector<Window> out;
  if (lo >= hi) return out;
  UtcTime boundary = floor_to(lo, g);
  while (boundary < hi) {
    UtcTime next = next_boundary(boundary, g);
    out.push_back({std::max(boundary, lo), std::min(next, hi)});
    boundary = next;
  }
  return out;
}

CountSeries aggregate_events(std::span<const WeightedEvent> events,
                             std::span<const Window> windows, Metric metric) {
  CountSeries out;
  out.values.assign(windows.size(), 0.0);
  if (windows.empty()) return out;

  if (metric == Metric::event_count) {
    for (const auto& e : events) {
      std::size_t w = window_index(windows, e.timestamp);
      if (w != static_cast<std::size_t>(-1)) out.values[w] += e.weight;
    }
    return out;
  }

  // dimm_count: distinct DIMMs with at least one event per window.
  std::vector<std::pair<std::size_t, std::uint32_t>> hits;
  hits.reserve(events.size());
  for (const auto& e : events) {
    if (e.dimm == WeightedEvent::kNoDimm) continue;
    std::size_t w = window_index(windows, e.timestamp);
    if (w != static_cast<std::size_t>(-1)) hits.emplace_back(w, e.dimm);
  }
  std::sort(hits.begin(), hits.end());
  hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
  for (const auto& [w, dimm] : hits) {
    (void)dimm;
    out.values[w] += 1.0;
  }
  return out;
}

PairedSeries align(const NeutronSeries& neutron,
                   std::span<const Window> windows, const CountSeries& counts) {
  PairedSeries out;
  const auto& samples = neutron.samples;
  std::vector<double> rates(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) rates[i] = samples[i].rate;

  for (std::size_t w = 0; w < windows.size(); ++w) {
    auto lo = std::lower_bound(
        samples.begin(), samples.end(), windows[w].start,
        [](const NeutronSample& s, UtcTime t) { return s.timestamp < t; });
    auto hi = std::lower_bound(
        samples.begin(), samples.end(), windows[w].end,
        [](const NeutronSample& s, UtcTime t) { return s.timestamp < t; });
    const std::size_t count = static_cast<std::size_t>(hi - lo);
    if (count == 0) continue; // no neutron coverage: drop the window
    const std::size_t first = static_cast<std::size_t>(lo - samples.begin());
    const double mean =
        kernels::sum({rates.data() + first, count}) / static_cast<double>(count);
    out.windows.push_back(windows[w]);
    out.neutron.push_back(mean);
    out.errors.push_back(counts.values[w]);
  }
  return out;
}

std::vector<double> scanned_mb_per_window(
    std::span<const ScanExposureRecord> exposure,
    std::span<const Window> windows) {
  std::vector<double> scanned(windows.size(), 0.0);
  for (const auto& rec : exposure) {
    const double duration =
        static_cast<double>(rec.interval_end - rec.interval_start);
    if (duration <= 0 || rec.mb_scanned <= 0) continue;
    // Records can straddle several windows; split proportionally to time.
    auto it = std::upper_bound(
        windows.begin(), windows.end(), rec.interval_start,
        [](UtcTime t, const Window& w) { return t < w.end; });
    for (; it != windows.end() && it->start < rec.interval_end; ++it) {
      const UtcTime lo = std::max(it->start, rec.interval_start);
      const UtcTime hi = std::min(it->end, rec.interval_end);
      if (lo >= hi) continue;
      scanned[static_cast<std::size_t>(it - windows.begin())] +=
          rec.mb_scanned * static_cast<double>(hi - lo) / duration;
    }
  }
  return scanned;
}

ExposureNormalized normalize_by_exposure(
    const CountSeries& counts, std::span<const ScanExposureRecord> exposure,
    std::span<const Window> windows) {
  const std::vector<double> scanned = scanned_mb_per_window(exposure, windows);
  ExposureNormalized out;
  for (std::size_t w = 0; w < windows.size(); ++w) {
    if (scanned[w] > 0.0) {
      out.kept.push_back(w);
      out.values.values.push_back(counts.values[w] / scanned[w]);
    } else {
      out.dropped.push_back(w);
    }
  }
  return out;
}

std::array<double, 24> hour_of_day_profile(
    std::span<const WeightedEvent> events, std::int64_t utc_offset_seconds) {
  std::array<double, 24> bins{};
  for (const auto& e : events) {
    std::int64_t local = e.timestamp.seconds + utc_offset_seconds;
    std::int64_t sec_of_day = local % kSecondsPerDay;
    if (sec_of_day < 0) sec_of_day += kSecondsPerDay;
    bins[static_cast<std::size_t>(sec_of_day / kSecondsPerHour)] += e.weight;
  }
  return bins;
}

TopDimmExclusion exclude_top_dimms(std::span<const WeightedEvent> events,
                                   double fraction,
                                   const std::vector<std::string>& dimm_ids) {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("exclude_top_dimms: fraction outside [0, 1)");
  }
  std::vector<double> totals(dimm_ids.size(), 0.0);
  std::vector<char> seen(dimm_ids.size(), 0);
  std::size_t distinct = 0;
  for (const auto& e : events) {
    if (e.dimm == WeightedEvent::kNoDimm) continue;
    if (!seen[e.dimm]) {
      seen[e.dimm] = 1;
      ++distinct;
    }
    totals[e.dimm] += e.weight;
  }

  const std::size_t k = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(distinct)));
  TopDimmExclusion out;
  if (k > 0) {
    std::vector<std::uint32_t> ranked;
    ranked.reserve(distinct);
    for (std::uint32_t d = 0; d < seen.size(); ++d) {
      if (seen[d]) ranked.push_back(d);
    }
    std::sort(ranked.begin(), ranked.end(),
              [&](std::uint32_t a, std::uint32_t b) {
                if (totals[a] != totals[b]) return totals[a] > totals[b];
                return dimm_ids[a] < dimm_ids[b];
              });
    ranked.resize(std::min(k, ranked.size()));
    out.excluded_dimms = std::move(ranked);
  }

  std::vector<char> excluded(dimm_ids.size(), 0);
  for (std::uint32_t d : out.excluded_dimms) excluded[d] = 1;
  out.kept_events.reserve(events.size());
  for (const auto& e : events) {
    if (e.dimm != WeightedEvent::kNoDimm && excluded[e.dimm]) continue;
    out.kept_events.push_back(e);
  }
  return out;
}

Heatmap heatmap_bins(const PairedSeries& paired, std::size_t x_bins,
                     std::size_t y_bins, bool y_log) {
  if (x_bins == 0 || y_bins == 0) {
    throw std::invalid_argument("heatmap_bins: zero bin count");
  }
  Heatmap hm;
  hm.x_bins = x_bins;
  hm.y_bins = y_bins;
  hm.y_log = y_log;
  hm.counts.assign(x_bins * y_bins, 0);
  if (paired.windows.empty()) return hm;

  auto edges = [](double lo, double hi, std::size_t bins) {
    if (lo == hi) {
      lo -= 0.5;
      hi += 0.5;
    }
    std::vector<double> e(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) {
      e[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
    }
    return e;
  };
  auto bin_of = [](const std::vector<double>& e, double v) {
    const std::size_t bins = e.size() - 1;
    if (v <= e.front()) return std::size_t{0};
    if (v >= e.back()) return bins - 1;
    double t = (v - e.front()) / (e.back() - e.front());
    std::size_t b = static_cast<std::size_t>(t * static_cast<double>(bins));
    return std::min(b, bins - 1);
  };

  const auto xr = kernels::min_max(paired.neutron);
  hm.x_edges = edges(xr.min, xr.max, x_bins);

  std::vector<double> yv = paired.errors;
  if (y_log) {
    // Log axis: zeros and negatives cannot be mapped, pin them to the lowest
    // positive value so they land in the first bin.
    double min_pos = std::numeric_limits<double>::infinity();
    for (double v : yv) {
      if (v > 0 && v < min_pos) min_pos = v;
    }
    if (!std::isfinite(min_pos)) min_pos = 1.0;
    for (double& v : yv) v = std::log10(v > 0 ? v : min_pos);
  }
  const auto yr = kernels::min_max(yv);
  hm.y_edges = edges(yr.min, yr.max, y_bins);

  for (std::size_t i = 0; i < paired.windows.size(); ++i) {
    const std::size_t bx = bin_of(hm.x_edges, paired.neutron[i]);
    const std::size_t by = bin_of(hm.y_edges, yv[i]);
    ++hm.counts[by * x_bins + bx];
  }
  return hm;
}

} // namespace cosmem
