#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cosmem/time_util.hpp"

namespace cosmem {

struct NeutronSample {
  UtcTime timestamp;
  double rate = 0.0; // counts per second, pressure/efficiency corrected
};

struct NeutronSeries {
  std::string monitor_id = "unknown";
  bool corrected = true;
  std::vector<NeutronSample> samples; // strictly increasing timestamps

  bool empty() const { return samples.empty(); }
};

enum class Detection : std::uint8_t { memory_read, patrol_scrub, unknown };

struct CorrectedErrorEvent {
  UtcTime timestamp;
  std::string node;
  std::string dimm;
  // Location detail exists only for a subset of errors; absent fields stay
  // absent rather than carrying sentinels.
  std::optional<std::uint32_t> rank;
  std::optional<std::uint32_t> bank;
  std::optional<std::uint32_t> row;
  std::optional<std::uint32_t> column;
  Detection detection = Detection::unknown;
  std::uint64_t multiplicity = 1; // errors represented by this record

  bool has_cell() const { return row.has_value() && column.has_value(); }
};

enum class UeCause : std::uint8_t { uncorrected_ecc, scrub_failed, ue_warning };

struct UncorrectedErrorEvent {
  UtcTime timestamp;
  std::string node;
  std::string dimm;
  UeCause cause = UeCause::uncorrected_ecc;
};

struct ScrubberErrorEvent {
  UtcTime timestamp;
  std::string node;
  std::uint64_t address = 0;
  std::uint32_t bits_flipped = 1;
};

struct ScanExposureRecord {
  UtcTime interval_start;
  UtcTime interval_end;
  std::string node;
  double mb_scanned = 0.0;
};

enum class Manufacturer : std::uint8_t { A, B, C, unknown };
enum class Technology : std::uint8_t { t3x, t2y, t2z, unknown };

const char* to_string(Manufacturer m);
const char* to_string(Technology t);
const char* to_string(Detection d);
const char* to_string(UeCause c);

struct DimmRecord {
  std::string dimm;
  std::string node;
  std::string socket;
  std::string rack;
  Manufacturer manufacturer = Manufacturer::unknown;
  Technology technology = Technology::unknown;
  std::uint64_t capacity_mb = 0;
};

// DIMM inventory plus the containment indexes the test scopes are built from.
// Construction validates uniqueness and single-parent containment.
class Topology {
public:
  Topology() = default;
  explicit Topology(std::vector<DimmRecord> dimms);

  const std::vector<DimmRecord>& dimms() const { return dimms_; }

  // Sorted, deduplicated id lists; the suite scope ordering comes from these.
  const std::vector<std::string>& racks() const { return racks_; }
  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<std::string>& sockets() const { return sockets_; }

  const DimmRecord* find_dimm(const std::string& id) const;
  // Rack containing a node, or nullptr for nodes absent from the inventory.
  const std::string* rack_of_node(const std::string& node) const;

  // 1 (system) + racks + nodes + sockets; DIMM scopes are counted separately.
  std::size_t scope_count() const {
    return 1 + racks_.size() + nodes_.size() + sockets_.size();
  }

private:
  std::vector<DimmRecord> dimms_;
  std::vector<std::string> racks_;
  std::vector<std::string> nodes_;
  std::vector<std::string> sockets_;
  std::unordered_map<std::string, std::size_t> dimm_index_;
  std::unordered_map<std::string, std::string> node_rack_;
};

// One parsed input bundle. Individual members may be empty; commands check
// for what they need.
struct Dataset {
  Topology topology;
  std::vector<CorrectedErrorEvent> ce;
  std::vector<UncorrectedErrorEvent> ue;
  std::vector<ScrubberErrorEvent> scrub;
  std::vector<ScanExposureRecord> exposure;
};

} // namespace cosmem
