#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "cosmem/rng.hpp"
#include "cosmem/time_util.hpp"
#include "cosmem/timegrid.hpp"

using namespace cosmem;

namespace {

UtcTime at(const char* iso) { return *parse_iso8601(iso); }

} // namespace

TEST_CASE("make_windows clips and aligns") {
  // Jan 15 .. Mar 10 at month granularity: clipped Jan, full Feb, clipped Mar.
  const auto months = make_windows(at("2015-01-15T00:00:00Z"),
                                   at("2015-03-10T00:00:00Z"),
                                   Granularity::month);
  REQUIRE(months.size() == 3);
  CHECK(months[0].start == at("2015-01-15T00:00:00Z"));
  CHECK(months[0].end == at("2015-02-01T00:00:00Z"));
  CHECK(months[1].start == at("2015-02-01T00:00:00Z"));
  CHECK(months[1].end == at("2015-03-01T00:00:00Z"));
  CHECK(months[2].end == at("2015-03-10T00:00:00Z"));

  const auto hours = make_windows(at("2015-01-01T00:00:00Z"),
                                  at("2015-01-02T00:00:00Z"),
                                  Granularity::hour);
  CHECK(hours.size() == 24);

  CHECK(make_windows(at("2015-01-01T00:00:00Z"), at("2015-01-01T00:00:00Z"),
                     Granularity::day)
            .empty());

  // Weeks start Monday 00:00 UTC.
  const auto weeks = make_windows(at("2015-06-03T12:00:00Z"),
                                  at("2015-06-20T00:00:00Z"),
                                  Granularity::week);
  CHECK(weeks[0].start == at("2015-06-03T12:00:00Z"));
  CHECK(weeks[0].end == at("2015-06-08T00:00:00Z"));
  CHECK(weeks[1].start == at("2015-06-08T00:00:00Z"));
}

TEST_CASE("aggregate_events metrics") {
  const auto windows = make_windows(at("2015-01-01T00:00:00Z"),
                                    at("2015-01-01T03:00:00Z"),
                                    Granularity::hour);
  const std::vector<WeightedEvent> events{
      {at("2015-01-01T00:10:00Z"), 1.0, 0},
      {at("2015-01-01T00:20:00Z"), 2.0, 0},
      {at("2015-01-01T00:30:00Z"), 4.0, 1},
      {at("2015-01-01T05:00:00Z"), 8.0, 1}, // outside every window
  };
  const auto counts = aggregate_events(events, windows, Metric::event_count);
  CHECK(counts.values[0] == doctest::Approx(7.0));
  CHECK(counts.values[1] == 0.0);
  CHECK(counts.values[2] == 0.0);

  const auto dimms = aggregate_events(events, windows, Metric::dimm_count);
  CHECK(dimms.values[0] == doctest::Approx(2.0));
  CHECK(dimms.values[1] == 0.0);

  const auto none = aggregate_events({}, windows, Metric::event_count);
  CHECK(std::accumulate(none.values.begin(), none.values.end(), 0.0) == 0.0);
}

TEST_CASE("align drops windows without neutron coverage") {
  NeutronSeries neutron;
  neutron.samples = {{at("2015-01-01T00:00:00Z"), 70.0},
                     {at("2015-01-01T00:30:00Z"), 72.0},
                     {at("2015-01-01T02:00:00Z"), 74.0}};
  const auto windows = make_windows(at("2015-01-01T00:00:00Z"),
                                    at("2015-01-01T03:00:00Z"),
                                    Granularity::hour);
  CountSeries counts;
  counts.values = {5.0, 6.0, 7.0};
  const auto paired = align(neutron, windows, counts);
  REQUIRE(paired.windows.size() == 2); // hour 1 has no samples
  CHECK(paired.neutron[0] == doctest::Approx(71.0));
  CHECK(paired.errors[0] == 5.0);
  CHECK(paired.neutron[1] == doctest::Approx(74.0));
  CHECK(paired.errors[1] == 7.0);
}

TEST_CASE("exposure normalization") {
  const auto windows = make_windows(at("2015-01-01T00:00:00Z"),
                                    at("2015-01-03T00:00:00Z"),
                                    Granularity::day);
  CountSeries counts;
  counts.values = {10.0, 4.0};

  // 5 MB on day one; nothing on day two.
  std::vector<ScanExposureRecord> exposure{
      {at("2015-01-01T00:00:00Z"), at("2015-01-02T00:00:00Z"), "n1", 5.0}};
  const auto norm = normalize_by_exposure(counts, exposure, windows);
  REQUIRE(norm.kept.size() == 1);
  CHECK(norm.values.values[0] == doctest::Approx(2.0));
  REQUIRE(norm.dropped.size() == 1);
  CHECK(norm.dropped[0] == 1);

  // Proportional split across a boundary: 6 MB over [18:00, 06:00).
  std::vector<ScanExposureRecord> straddle{
      {at("2015-01-01T18:00:00Z"), at("2015-01-02T06:00:00Z"), "n1", 6.0}};
  const auto scanned = scanned_mb_per_window(straddle, windows);
  CHECK(scanned[0] == doctest::Approx(3.0));
  CHECK(scanned[1] == doctest::Approx(3.0));

  // Zero errors with positive exposure stays a valid zero.
  CountSeries zeros;
  zeros.values = {0.0, 0.0};
  const auto norm0 = normalize_by_exposure(zeros, exposure, windows);
  CHECK(norm0.values.values[0] == 0.0);
}

TEST_CASE("normalization homogeneity") {
  auto rng = make_stream(21, "norm-prop");
  const auto windows = make_windows(at("2015-01-01T00:00:00Z"),
                                    at("2015-01-11T00:00:00Z"),
                                    Granularity::day);
  CountSeries counts;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    counts.values.push_back(static_cast<double>(uniform_below(rng, 20)));
  }
  std::vector<ScanExposureRecord> exposure;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    exposure.push_back({windows[i].start, windows[i].end, "n1",
                        1.0 + uniform01(rng) * 10.0});
  }
  const auto base = normalize_by_exposure(counts, exposure, windows);
  const double k = 3.5;
  for (auto& rec : exposure) rec.mb_scanned *= k;
  const auto scaled = normalize_by_exposure(counts, exposure, windows);
  REQUIRE(base.kept == scaled.kept);
  for (std::size_t i = 0; i < base.values.values.size(); ++i) {
    CHECK(scaled.values.values[i] ==
          doctest::Approx(base.values.values[i] / k).epsilon(1e-12));
  }
}

TEST_CASE("hour-of-day profile") {
  std::vector<WeightedEvent> events{{at("2015-01-01T09:05:00Z"), 2.0, 0},
                                    {at("2015-01-02T09:59:59Z"), 3.0, 0}};
  const auto bins = hour_of_day_profile(events);
  CHECK(bins[9] == doctest::Approx(5.0));
  double total = 0;
  for (double b : bins) total += b;
  CHECK(total == doctest::Approx(5.0));

  // Offset +2h moves the peak; empty events give all-zero bins.
  const auto shifted = hour_of_day_profile(events, 2 * kSecondsPerHour);
  CHECK(shifted[11] == doctest::Approx(5.0));
  const auto empty = hour_of_day_profile({});
  for (double b : empty) CHECK(b == 0.0);
}

TEST_CASE("exclude_top_dimms ranking, ceil and identity") {
  const std::vector<std::string> ids{"a", "b", "c", "d"};
  std::vector<WeightedEvent> events;
  auto add = [&](std::uint32_t dimm, double w) {
    events.push_back({at("2015-01-01T00:00:00Z"), w, dimm});
  };
  add(0, 10.0);
  add(1, 10.0);
  add(2, 1.0);
  add(3, 50.0);

  // fraction 0: identity
  const auto none = exclude_top_dimms(events, 0.0, ids);
  CHECK(none.excluded_dimms.empty());
  CHECK(none.kept_events.size() == events.size());

  // ceil(0.3 * 4) = 2: top weight "d", then tie a/b broken by id -> "a".
  const auto top = exclude_top_dimms(events, 0.3, ids);
  REQUIRE(top.excluded_dimms.size() == 2);
  CHECK(ids[top.excluded_dimms[0]] == "d");
  CHECK(ids[top.excluded_dimms[1]] == "a");
  CHECK(top.kept_events.size() == 2);

  CHECK_THROWS_AS(exclude_top_dimms(events, 1.0, ids), std::invalid_argument);
}

TEST_CASE("conservation over windows") {
  auto rng = make_stream(22, "conservation");
  const UtcTime from = at("2015-01-01T00:00:00Z");
  const UtcTime to = at("2015-02-15T00:00:00Z");
  std::vector<WeightedEvent> events;
  double total = 0;
  for (int i = 0; i < 500; ++i) {
    const auto t = from + static_cast<std::int64_t>(
                              uniform_below(rng, (to - from)));
    const double w = 1.0 + static_cast<double>(uniform_below(rng, 3));
    events.push_back({t, w, static_cast<std::uint32_t>(uniform_below(rng, 5))});
    total += w;
  }
  for (Granularity g : {Granularity::hour, Granularity::day, Granularity::week,
                        Granularity::month}) {
    const auto windows = make_windows(from, to, g);
    const auto counts = aggregate_events(events, windows, Metric::event_count);
    CHECK(std::accumulate(counts.values.begin(), counts.values.end(), 0.0) ==
          doctest::Approx(total));
  }
}

TEST_CASE("heatmap binning") {
  PairedSeries paired;
  for (int i = 0; i < 10; ++i) {
    paired.windows.push_back({UtcTime{i * 3600}, UtcTime{(i + 1) * 3600}});
    paired.neutron.push_back(70.0 + i);
    paired.errors.push_back(i < 5 ? 0.0 : std::pow(10.0, i - 4));
  }
  const auto hm = heatmap_bins(paired, 5, 4, /*y_log=*/true);
  CHECK(hm.x_edges.size() == 6);
  CHECK(hm.y_edges.size() == 5);
  std::uint64_t total = 0;
  for (auto c : hm.counts) total += c;
  CHECK(total == 10);

  const auto linear = heatmap_bins(paired, 3, 3, /*y_log=*/false);
  std::uint64_t total2 = 0;
  for (auto c : linear.counts) total2 += c;
  CHECK(total2 == 10);
  CHECK_THROWS_AS(heatmap_bins(paired, 0, 3, false), std::invalid_argument);
}
