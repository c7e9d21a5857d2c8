#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cosmem/types.hpp"

namespace cosmem {

// Parsers for the five input file families. Every function either returns
// objects satisfying the type invariants or throws a located ParseError;
// there is no partial output. Schemas (header row required, '#' comments
// ignored):
//
//   neutron:   timestamp,rate
//   ce:        timestamp,node,dimm,rank,bank,row,column,detection,multiplicity
//   ue:        timestamp,node,dimm,cause
//   scrub:     timestamp,node,address,bits_flipped
//   exposure:  interval_start,interval_end,node,mb_scanned
//   inventory: dimm,node,socket,rack,manufacturer,technology,capacity_mb
//
// Timestamps are ISO-8601 with optional offset and are normalized to UTC.
// The neutron log requires strictly increasing timestamps; event logs only
// need to be non-decreasing (events from different nodes can share a second).

NeutronSeries parse_neutron_log(std::istream& in);
std::vector<CorrectedErrorEvent> parse_ce_log(std::istream& in);
std::vector<UncorrectedErrorEvent> parse_ue_log(std::istream& in);
std::vector<ScrubberErrorEvent> parse_scrub_log(std::istream& in);
std::vector<ScanExposureRecord> parse_exposure_log(std::istream& in);
Topology load_inventory(std::istream& in);

// Writers emitting the exact schemas above; parse(write(x)) == x.
void write_neutron_log(std::ostream& out, const NeutronSeries& s);
void write_ce_log(std::ostream& out,
                  const std::vector<CorrectedErrorEvent>& events);
void write_ue_log(std::ostream& out,
                  const std::vector<UncorrectedErrorEvent>& events);
void write_scrub_log(std::ostream& out,
                     const std::vector<ScrubberErrorEvent>& events);
void write_exposure_log(std::ostream& out,
                        const std::vector<ScanExposureRecord>& records);
void write_inventory(std::ostream& out, const Topology& topology);

struct Finding {
  enum class Severity : std::uint8_t { warning, error };
  Severity severity = Severity::warning;
  std::string code;   // e.g. "unknown_dimm"
  std::string detail; // offending id or description
  std::uint64_t count = 0;
};

// Cross-checks events against the inventory and, when given, the declared
// observation interval. Reference checks are skipped when the inventory is
// empty (nothing was declared). Never mutates the dataset.
std::vector<Finding> validate_dataset(const Dataset& dataset,
                                      std::optional<UtcTime> from = {},
                                      std::optional<UtcTime> to = {});

// Shortest-round-trip decimal formatting used by every writer.
std::string format_double(double v);

} // namespace cosmem
