#include "cosmem/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <limits>
#include <map>
#include <ostream>

#include "cosmem/csv.hpp"
#include "cosmem/errors.hpp"

namespace cosmem {

namespace {

UtcTime parse_time_field(const CsvReader& r, const std::string& field,
                         const char* what) {
  auto t = parse_iso8601(field);
  if (!t) r.fail(std::string("bad ") + what + " '" + field + "'");
  return *t;
}

std::optional<std::uint32_t> parse_optional_u32(const CsvReader& r,
                                                const std::string& field,
                                                const char* what) {
  if (field.empty()) return std::nullopt;
  std::uint32_t v;
  if (!parse_u32_field(field, v)) {
    r.fail(std::string("bad ") + what + " '" + field + "'");
  }
  return v;
}

void require_fields(const CsvReader& r, std::size_t expected) {
  if (r.fields().size() != expected) {
    r.fail("expected " + std::to_string(expected) + " fields, got " +
           std::to_string(r.fields().size()));
  }
}

void check_order(const CsvReader& r, UtcTime prev, UtcTime cur, bool strict) {
  if (cur < prev || (strict && cur == prev)) {
    throw ParseError(ParseError::Kind::non_monotonic_timestamp, r.line_number(),
                     strict ? "timestamp repeats or decreases"
                            : "timestamp decreases");
  }
}

constexpr UtcTime kMinTime{std::numeric_limits<std::int64_t>::min()};

} // namespace

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

NeutronSeries parse_neutron_log(std::istream& in) {
  CsvReader r(in, "timestamp,rate");
  NeutronSeries series;
  UtcTime prev = kMinTime;
  bool first = true;
  while (r.next_row()) {
    require_fields(r, 2);
    NeutronSample s;
    s.timestamp = parse_time_field(r, r.fields()[0], "timestamp");
    if (!parse_double_field(r.fields()[1], s.rate) || s.rate < 0) {
      r.fail("bad rate '" + r.fields()[1] + "'");
    }
    if (!first) check_order(r, prev, s.timestamp, /*strict=*/true);
    first = false;
    prev = s.timestamp;
    series.samples.push_back(s);
  }
  for (const auto& [key, value] : r.directives()) {
    if (key == "monitor_id") {
      series.monitor_id = value;
    } else if (key == "corrected") {
      series.corrected = (value == "true" || value == "1");
    }
  }
  return series;
}

std::vector<CorrectedErrorEvent> parse_ce_log(std::istream& in) {
  CsvReader r(in,
              "timestamp,node,dimm,rank,bank,row,column,detection,"
              "multiplicity");
  std::vector<CorrectedErrorEvent> events;
  UtcTime prev = kMinTime;
  while (r.next_row()) {
    require_fields(r, 9);
    const auto& f = r.fields();
    CorrectedErrorEvent e;
    e.timestamp = parse_time_field(r, f[0], "timestamp");
    check_order(r, prev, e.timestamp, /*strict=*/false);
    prev = e.timestamp;
    e.node = f[1];
    e.dimm = f[2];
    if (e.node.empty() || e.dimm.empty()) r.fail("empty node or dimm id");
    e.rank = parse_optional_u32(r, f[3], "rank");
    e.bank = parse_optional_u32(r, f[4], "bank");
    e.row = parse_optional_u32(r, f[5], "row");
    e.column = parse_optional_u32(r, f[6], "column");
    if ((e.row || e.column) && (!e.rank || !e.bank)) {
      r.fail("row/column present without rank and bank");
    }
    if (f[7] == "read") {
      e.detection = Detection::memory_read;
    } else if (f[7] == "scrub") {
      e.detection = Detection::patrol_scrub;
    } else if (f[7] == "unknown") {
      e.detection = Detection::unknown;
    } else {
      r.fail("bad detection '" + f[7] + "'");
    }
    if (!parse_u64_field(f[8], e.multiplicity) || e.multiplicity == 0) {
      r.fail("bad multiplicity '" + f[8] + "'");
    }
    events.push_back(std::move(e));
  }
  return events;
}

std::vector<UncorrectedErrorEvent> parse_ue_log(std::istream& in) {
  CsvReader r(in, "timestamp,node,dimm,cause");
  std::vector<UncorrectedErrorEvent> events;
  UtcTime prev = kMinTime;
  while (r.next_row()) {
    require_fields(r, 4);
    const auto& f = r.fields();
    UncorrectedErrorEvent e;
    e.timestamp = parse_time_field(r, f[0], "timestamp");
    check_order(r, prev, e.timestamp, /*strict=*/false);
    prev = e.timestamp;
    e.node = f[1];
    e.dimm = f[2];
    if (e.node.empty() || e.dimm.empty()) r.fail("empty node or dimm id");
    if (f[3] == "uncorrected_ecc") {
      e.cause = UeCause::uncorrected_ecc;
    } else if (f[3] == "scrub_failed") {
      e.cause = UeCause::scrub_failed;
    } else if (f[3] == "ue_warning") {
      e.cause = UeCause::ue_warning;
    } else {
      r.fail("bad cause '" + f[3] + "'");
    }
    events.push_back(std::move(e));
  }
  return events;
}

std::vector<ScrubberErrorEvent> parse_scrub_log(std::istream& in) {
  CsvReader r(in, "timestamp,node,address,bits_flipped");
  std::vector<ScrubberErrorEvent> events;
  UtcTime prev = kMinTime;
  while (r.next_row()) {
    require_fields(r, 4);
    const auto& f = r.fields();
    ScrubberErrorEvent e;
    e.timestamp = parse_time_field(r, f[0], "timestamp");
    check_order(r, prev, e.timestamp, /*strict=*/false);
    prev = e.timestamp;
    e.node = f[1];
    if (e.node.empty()) r.fail("empty node id");
    if (!parse_u64_field(f[2], e.address)) {
      r.fail("bad address '" + f[2] + "'");
    }
    if (!parse_u32_field(f[3], e.bits_flipped) || e.bits_flipped == 0) {
      r.fail("bad bits_flipped '" + f[3] + "'");
    }
    events.push_back(std::move(e));
  }
  return events;
}

std::vector<ScanExposureRecord> parse_exposure_log(std::istream& in) {
  CsvReader r(in, "interval_start,interval_end,node,mb_scanned");
  std::vector<ScanExposureRecord> records;
  UtcTime prev = kMinTime;
  while (r.next_row()) {
    require_fields(r, 4);
    const auto& f = r.fields();
    ScanExposureRecord rec;
    rec.interval_start = parse_time_field(r, f[0], "interval_start");
    rec.interval_end = parse_time_field(r, f[1], "interval_end");
    if (rec.interval_start >= rec.interval_end) {
      r.fail("interval_start not before interval_end");
    }
    check_order(r, prev, rec.interval_start, /*strict=*/false);
    prev = rec.interval_start;
    rec.node = f[2];
    if (rec.node.empty()) r.fail("empty node id");
    if (!parse_double_field(f[3], rec.mb_scanned) || rec.mb_scanned < 0) {
      r.fail("bad mb_scanned '" + f[3] + "'");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

Topology load_inventory(std::istream& in) {
  CsvReader r(in, "dimm,node,socket,rack,manufacturer,technology,capacity_mb");
  std::vector<DimmRecord> dimms;
  // Duplicate / containment checks run here so errors carry line numbers;
  // the Topology constructor re-validates for programmatic callers.
  std::map<std::string, std::string> node_rack;
  std::map<std::string, std::string> socket_node;
  std::map<std::string, std::size_t> seen;
  while (r.next_row()) {
    require_fields(r, 7);
    const auto& f = r.fields();
    DimmRecord d;
    d.dimm = f[0];
    d.node = f[1];
    d.socket = f[2];
    d.rack = f[3];
    if (d.dimm.empty() || d.node.empty() || d.socket.empty() ||
        d.rack.empty()) {
      r.fail("empty id field");
    }
    if (seen.count(d.dimm)) {
      throw ParseError(ParseError::Kind::duplicate_dimm, r.line_number(),
                       "duplicate DIMM id '" + d.dimm + "'");
    }
    seen.emplace(d.dimm, r.line_number());
    if (f[4] == "A") {
      d.manufacturer = Manufacturer::A;
    } else if (f[4] == "B") {
      d.manufacturer = Manufacturer::B;
    } else if (f[4] == "C") {
      d.manufacturer = Manufacturer::C;
    } else {
      r.fail("bad manufacturer '" + f[4] + "'");
    }
    if (f[5] == "3x") {
      d.technology = Technology::t3x;
    } else if (f[5] == "2y") {
      d.technology = Technology::t2y;
    } else if (f[5] == "2z") {
      d.technology = Technology::t2z;
    } else {
      r.fail("bad technology '" + f[5] + "'");
    }
    if (!parse_u64_field(f[6], d.capacity_mb) || d.capacity_mb == 0) {
      r.fail("bad capacity_mb '" + f[6] + "'");
    }
    auto [nit, fresh_node] = node_rack.emplace(d.node, d.rack);
    if (!fresh_node && nit->second != d.rack) {
      throw ParseError(ParseError::Kind::inconsistent_containment,
                       r.line_number(),
                       "node '" + d.node + "' appears under racks '" +
                           nit->second + "' and '" + d.rack + "'");
    }
    auto [sit, fresh_socket] = socket_node.emplace(d.socket, d.node);
    if (!fresh_socket && sit->second != d.node) {
      throw ParseError(ParseError::Kind::inconsistent_containment,
                       r.line_number(),
                       "socket '" + d.socket + "' appears under nodes '" +
                           sit->second + "' and '" + d.node + "'");
    }
    dimms.push_back(std::move(d));
  }
  return Topology(std::move(dimms));
}

namespace {

std::string opt_field(const std::optional<std::uint32_t>& v) {
  return v ? std::to_string(*v) : std::string();
}

} // namespace

void write_neutron_log(std::ostream& out, const NeutronSeries& s) {
  out << "# monitor_id: " << s.monitor_id << "\n";
  out << "# corrected: " << (s.corrected ? "true" : "false") << "\n";
  out << "timestamp,rate\n";
  for (const auto& sample : s.samples) {
    out << format_iso8601(sample.timestamp) << ','
        << format_double(sample.rate) << "\n";
  }
}

void write_ce_log(std::ostream& out,
                  const std::vector<CorrectedErrorEvent>& events) {
  out << "timestamp,node,dimm,rank,bank,row,column,detection,multiplicity\n";
  for (const auto& e : events) {
    out << format_iso8601(e.timestamp) << ',' << e.node << ',' << e.dimm << ','
        << opt_field(e.rank) << ',' << opt_field(e.bank) << ','
        << opt_field(e.row) << ',' << opt_field(e.column) << ','
        << to_string(e.detection) << ',' << e.multiplicity << "\n";
  }
}

void write_ue_log(std::ostream& out,
                  const std::vector<UncorrectedErrorEvent>& events) {
  out << "timestamp,node,dimm,cause\n";
  for (const auto& e : events) {
    out << format_iso8601(e.timestamp) << ',' << e.node << ',' << e.dimm << ','
        << to_string(e.cause) << "\n";
  }
}

void write_scrub_log(std::ostream& out,
                     const std::vector<ScrubberErrorEvent>& events) {
  out << "timestamp,node,address,bits_flipped\n";
  for (const auto& e : events) {
    out << format_iso8601(e.timestamp) << ',' << e.node << ',' << e.address
        << ',' << e.bits_flipped << "\n";
  }
}

void write_exposure_log(std::ostream& out,
                        const std::vector<ScanExposureRecord>& records) {
  out << "interval_start,interval_end,node,mb_scanned\n";
  for (const auto& rec : records) {
    out << format_iso8601(rec.interval_start) << ','
        << format_iso8601(rec.interval_end) << ',' << rec.node << ','
        << format_double(rec.mb_scanned) << "\n";
  }
}

void write_inventory(std::ostream& out, const Topology& topology) {
  out << "dimm,node,socket,rack,manufacturer,technology,capacity_mb\n";
  for (const auto& d : topology.dimms()) {
    out << d.dimm << ',' << d.node << ',' << d.socket << ',' << d.rack << ','
        << to_string(d.manufacturer) << ',' << to_string(d.technology) << ','
        << d.capacity_mb << "\n";
  }
}

std::vector<Finding> validate_dataset(const Dataset& dataset,
                                      std::optional<UtcTime> from,
                                      std::optional<UtcTime> to) {
  std::map<std::pair<std::string, std::string>, std::uint64_t> tallies;
  const bool have_inventory = !dataset.topology.dimms().empty();

  auto check_refs = [&](const std::string& node, const std::string& dimm) {
    if (!have_inventory) return;
    if (!dimm.empty() && dataset.topology.find_dimm(dimm) == nullptr) {
      ++tallies[{"unknown_dimm", dimm}];
    }
    if (!node.empty() && dataset.topology.rack_of_node(node) == nullptr) {
      ++tallies[{"unknown_node", node}];
    }
  };
  auto check_interval = [&](UtcTime t, const char* kind) {
    if ((from && t < *from) || (to && t >= *to)) {
      ++tallies[{"out_of_interval", kind}];
    }
  };

  for (const auto& e : dataset.ce) {
    check_refs(e.node, e.dimm);
    check_interval(e.timestamp, "ce");
  }
  for (const auto& e : dataset.ue) {
    check_refs(e.node, e.dimm);
    check_interval(e.timestamp, "ue");
  }
  for (const auto& e : dataset.scrub) {
    check_refs(e.node, {});
    check_interval(e.timestamp, "scrub");
  }
  for (const auto& rec : dataset.exposure) {
    check_refs(rec.node, {});
  }

  std::vector<Finding> findings;
  findings.reserve(tallies.size());
  for (const auto& [key, count] : tallies) {
    findings.push_back(
        {Finding::Severity::warning, key.first, key.second, count});
  }
  return findings;
}

} // namespace cosmem
