#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cosmem/types.hpp"

namespace cosmem {

// Seeded generator of synthetic neutron series, topologies and error logs.
// Identical configs produce byte-identical outputs: every random draw comes
// from a per-entity substream keyed on (seed, entity id).

struct TopologyShape {
  std::size_t racks = 1;
  std::size_t nodes_per_rack = 2;
  std::size_t sockets_per_node = 2;
  std::size_t dimms_per_socket = 2;
  std::uint64_t capacity_mb = 16384;
};

struct NeutronModel {
  double base_rate = 70.0;      // counts/s
  double trend_per_day = 0.0;   // linear drift
  double noise_std = 0.0;       // Gaussian, clamped at 0
  std::string monitor_id = "SYNTH";
};

struct FaultModel {
  enum class Kind : std::uint8_t {
    null_model,        // homogeneous Poisson per DIMM
    linear_coupled,    // intensity follows the neutron rate linearly
    threshold_coupled, // intensity multiplied above a neutron percentile
    hot_dimm,          // a few DIMMs repeat errors on fixed cells in bursts
  };
  Kind kind = Kind::null_model;
  double ce_rate_per_dimm_hour = 0.01;
  double coupling_slope = 0.0;    // linear_coupled, per unit neutron rate
  double percentile = 90.0;       // threshold_coupled
  double multiplier = 1.0;        // threshold_coupled, >= 1
  std::size_t hot_dimm_count = 0; // hot_dimm
  std::size_t hot_cell_count = 1;
  double repeat_rate_per_day = 0.0; // hot_dimm: events/day per hot DIMM
};

// Optional hour-of-day modulation of the CE intensity. Off by default so
// profiles are flat by construction; switching it on reproduces the daytime-
// peak artifact that per-DIMM exclusion is meant to expose.
struct DiurnalInjection {
  bool enabled = false;
  int peak_hour = 12;
  double amplitude = 0.0; // multiplicative, in [0, 1]
};

struct JobModel {
  double jobs_per_node_day = 0.0;
  double mean_hours = 4.0;
};

struct SynthConfig {
  std::uint64_t seed = 1;
  UtcTime start;
  UtcTime end;
  TopologyShape topology;
  NeutronModel neutron;
  FaultModel fault;
  DiurnalInjection diurnal;
  double ue_rate_per_node_hour = 0.0;
  double scrub_rate_per_node_hour = 0.0; // software-scrubber errors (MB class)
  double exposure_duty_min = 1.0;        // per node-day scan duty fraction
  double exposure_duty_max = 1.0;
  JobModel jobs;
};

struct JobRecord {
  std::string node;
  UtcTime start;
  UtcTime end;
};

struct SynthOutput {
  Dataset dataset;
  NeutronSeries neutron;
  std::vector<JobRecord> jobs;
};

Topology gen_topology(const SynthConfig& config);
NeutronSeries gen_neutron(const SynthConfig& config);
std::vector<JobRecord> gen_jobs(const SynthConfig& config);

// Generates everything: topology, neutron series, CE/UE/scrubber events,
// exposure records and jobs. Event logs come out time-sorted and parseable
// by the ingest schemas.
SynthOutput gen_dataset(const SynthConfig& config);

// JSON config document (see README for the field reference).
SynthConfig load_synth_config(std::istream& in);
std::string synth_config_to_json(const SynthConfig& config);

void write_jobs_log(std::ostream& out, const std::vector<JobRecord>& jobs);

} // namespace cosmem
