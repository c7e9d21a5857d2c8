#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cosmem/stats.hpp"
#include "cosmem/timegrid.hpp"
#include "cosmem/types.hpp"

namespace cosmem {

enum class ErrorClass : std::uint8_t { CE, UE, MB };

// Filter domains. `All` is the identity filter: it keeps every event,
// including ones whose label or join is unknown, so totals stay consistent
// with raw counts. Specific values exclude unknowns.
enum class MfgFilter : std::uint8_t { A, B, C, All };
enum class TechFilter : std::uint8_t { t3x, t2y, t2z, All };
enum class TransienceFilter : std::uint8_t { transient, non_transient, All };
enum class DetectionFilter : std::uint8_t { memory_read, patrol_scrub, All };
enum class CellFilter : std::uint8_t { single, multi, All };
enum class UeCauseFilter : std::uint8_t { uncorrected_ecc, scrub_failed, All };
enum class ScopeKind : std::uint8_t { system, rack, node, socket, dimm };

const char* to_string(ErrorClass c);
const char* to_string(ScopeKind k);

// Index into a ScopeTable; kind system has index 0.
struct ScopeRef {
  ScopeKind kind = ScopeKind::system;
  std::uint32_t index = 0;

  friend auto operator<=>(const ScopeRef&, const ScopeRef&) = default;
};

// Stable scope ordering derived from the inventory: system, then racks,
// nodes, sockets (and DIMMs when enabled), each id-ascending.
class ScopeTable {
public:
  ScopeTable(const Topology& topology, bool include_dimms);

  std::size_t size() const { return flat_.size(); }
  ScopeRef ref_at(std::size_t flat_index) const { return flat_[flat_index]; }
  const std::string& id_of(ScopeRef ref) const;

private:
  std::vector<ScopeRef> flat_;
  std::vector<std::string> racks_, nodes_, sockets_, dimms_;
  static const std::string kSystemId;
};

// One (error category, time window, system scope) test. Fields that do not
// apply to the error class hold their All value and are printed blank.
struct TestSpec {
  ErrorClass cls = ErrorClass::CE;
  MfgFilter manufacturer = MfgFilter::All;
  TechFilter technology = TechFilter::All;
  TransienceFilter transience = TransienceFilter::All; // CE
  DetectionFilter detection = DetectionFilter::All;    // CE
  CellFilter cell = CellFilter::All;                   // CE
  Metric metric = Metric::event_count;                 // CE
  UeCauseFilter ue_cause = UeCauseFilter::All;         // UE
  std::uint8_t bit_class = 7;                          // MB: 1..6 (6 = "6+"), 7 = All
  Granularity window = Granularity::hour;
  ScopeRef scope;
};

struct EnumerateOptions {
  // Empty = the class default (hour/day/week/month; MB omits hour).
  std::vector<Granularity> windows;
  bool include_dimm_scope = false;
  // Empty = every scope kind the table holds.
  std::vector<ScopeKind> scope_kinds;
};

// Cartesian product of the class's filter domains, windows and scopes.
// MB (scrubber-log) tests carry no manufacturer/technology dimension and
// run at system scope only: their logs identify nodes, not DIMMs.
std::vector<TestSpec> enumerate_specs(ErrorClass cls, const Topology& topology,
                                      const EnumerateOptions& opts = {});

// Closed-form size of enumerate_specs' output.
std::uint64_t spec_space_size(ErrorClass cls, const Topology& topology,
                              const EnumerateOptions& opts = {});

enum class TestKind : std::uint8_t { kendall, ks };

enum class OutcomeStatus : std::uint8_t {
  ok,
  no_matching_dimms,   // scope holds no DIMM matching the category filters
  constant_series,     // aggregated error series constant (incl. all-zero)
  untestable_constant, // the neutron side is constant
  too_few_points,
};

const char* to_string(OutcomeStatus s);

struct TestOutcome {
  TestSpec spec;
  TestKind kind = TestKind::kendall;
  double percentile = 0.0; // ks only; 0 when not applicable
  OutcomeStatus status = OutcomeStatus::ok;
  std::optional<double> stat;  // tau_b or d_stat
  std::optional<double> p_raw;
  std::optional<double> p_adj; // joint BY over the suite's ok outcomes
  std::uint32_t n = 0;
  std::uint32_t n_high = 0, n_rest = 0; // ks partition sizes
};

struct SuiteOptions {
  std::vector<Granularity> windows; // empty = class default
  bool include_dimm_scope = false;
  std::vector<ScopeKind> scope_kinds; // empty = all
  bool drop_zero_windows = false; // kendall: drop windows with zero errors
  std::vector<double> percentiles{90.0, 95.0, 99.0, 99.9};
  unsigned threads = 1;
};

// Executes a suite over the full enumerated spec space. Untestable specs are
// recorded with their status, never dropped: the reduction from enumerated to
// testable is a first-class output. Output order is the enumeration order
// (lexicographic over the spec tuple), independent of `threads`.
class SuiteRunner {
public:
  SuiteRunner(const Dataset& dataset, const NeutronSeries& neutron,
              UtcTime from, UtcTime to, SuiteOptions options);

  std::vector<TestOutcome> run_kendall(ErrorClass cls) const;
  std::vector<TestOutcome> run_ks(ErrorClass cls) const;

  // Error series for one spec over its kept windows, as the suites see it.
  std::vector<double> aggregate_for(const TestSpec& spec) const;

  const ScopeTable& scopes() const { return scope_table_; }

private:
  struct PreparedEvent {
    UtcTime timestamp;
    double weight = 1.0;
    std::uint32_t dimm = WeightedEvent::kNoDimm;
    Manufacturer manufacturer = Manufacturer::unknown;
    Technology technology = Technology::unknown;
    // CE labels
    std::uint8_t transient = 2; // Tristate
    std::uint8_t single_cell = 2;
    Detection detection = Detection::unknown;
    // UE cause / MB bit class
    UeCause cause = UeCause::uncorrected_ecc;
    std::uint8_t bit_class = 0;
  };

  struct ClassData {
    std::vector<PreparedEvent> events;
    // Event indices per scope, aligned with the ScopeTable flat order.
    std::vector<std::vector<std::uint32_t>> scope_events;
  };

  struct GranularityData {
    std::vector<Window> windows;
    // Windows kept after requiring neutron coverage (and scanned MB for MB).
    std::vector<std::size_t> kept;
    std::vector<double> neutron_means;  // aligned with kept
    std::vector<double> scanned_mb;     // aligned with kept; empty if unused
  };

  const GranularityData& grid(Granularity g, bool mb) const;
  ClassData prepare_class(ErrorClass cls) const;
  bool scope_has_matching_dimm(const TestSpec& spec) const;
  bool event_matches(const TestSpec& spec, const PreparedEvent& e) const;
  std::vector<double> aggregate_spec(const TestSpec& spec, const ClassData& cd,
                                     const GranularityData& gd) const;
  std::vector<TestOutcome> run(ErrorClass cls, TestKind kind) const;

  const Dataset& dataset_;
  const NeutronSeries& neutron_;
  UtcTime from_, to_;
  SuiteOptions options_;
  ScopeTable scope_table_;
  std::vector<std::string> dimm_ids_; // union of inventory and event DIMM ids
  std::array<GranularityData, 4> grids_;
  std::array<GranularityData, 4> grids_mb_;
  // Per-scope DIMM counts by (manufacturer, technology) for feasibility.
  std::vector<std::array<std::array<std::uint32_t, 3>, 3>> scope_dimm_counts_;
};

struct SuiteSummary {
  std::vector<double> coefficients_sorted; // ok outcomes, ascending
  std::array<std::uint64_t, 20> raw_hist{};
  std::array<std::uint64_t, 20> adj_hist{};
  std::map<OutcomeStatus, std::uint64_t> status_tally;
  struct Significant {
    std::size_t outcome_index;
    double stat = 0.0;
    double p_adj = 1.0;
    bool moderate_or_high = false; // |stat| >= 0.5
  };
  std::vector<Significant> significant; // p_adj < alpha
  double alpha = 0.05;
};

SuiteSummary summarize(const std::vector<TestOutcome>& outcomes,
                       double alpha = 0.05);

// Suite table I/O (schema in the header comment of the emitted file).
void write_suite_table(std::ostream& out,
                       const std::vector<TestOutcome>& outcomes,
                       const ScopeTable& scopes);

} // namespace cosmem
