#include "cosmem/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>

#include <json.hpp>

#include "cosmem/ingest.hpp"
#include "cosmem/rng.hpp"
#include "cosmem/stats.hpp"

namespace cosmem {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string rack_id(std::size_t r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "rack%03zu", r);
  return buf;
}

std::string node_id(std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "node%05zu", n);
  return buf;
}

UtcTime ceil_hour(UtcTime t) {
  UtcTime f = floor_hour(t);
  return f == t ? t : f + kSecondsPerHour;
}

double exp_sample(std::mt19937_64& rng, double mean) {
  double u = uniform01(rng);
  while (u <= 0.0) u = uniform01(rng);
  return -mean * std::log(u);
}

void check_config(const SynthConfig& c) {
  if (c.start >= c.end) {
    throw std::invalid_argument("synth: start must precede end");
  }
  if (c.fault.ce_rate_per_dimm_hour < 0 || c.ue_rate_per_node_hour < 0 ||
      c.scrub_rate_per_node_hour < 0 || c.fault.repeat_rate_per_day < 0 ||
      c.neutron.noise_std < 0) {
    throw std::invalid_argument("synth: rates must be non-negative");
  }
  if (c.fault.multiplier < 1.0) {
    throw std::invalid_argument("synth: multiplier must be >= 1");
  }
  if (c.diurnal.amplitude < 0 || c.diurnal.amplitude > 1) {
    throw std::invalid_argument("synth: diurnal amplitude outside [0, 1]");
  }
}

} // namespace

Topology gen_topology(const SynthConfig& config) {
  const TopologyShape& shape = config.topology;
  std::vector<DimmRecord> dimms;
  dimms.reserve(shape.racks * shape.nodes_per_rack * shape.sockets_per_node *
                shape.dimms_per_socket);
  std::size_t node_counter = 0;
  for (std::size_t r = 0; r < shape.racks; ++r) {
    for (std::size_t n = 0; n < shape.nodes_per_rack; ++n) {
      const std::string node = node_id(node_counter++);
      // Every DIMM of a node shares manufacturer and technology, as real
      // procurement does; that is what makes many filter combinations
      // infeasible per scope.
      auto rng = make_stream(config.seed, "node-attrs:" + node);
      const auto mfg = static_cast<Manufacturer>(uniform_below(rng, 3));
      const auto tech = static_cast<Technology>(uniform_below(rng, 3));
      for (std::size_t s = 0; s < shape.sockets_per_node; ++s) {
        const std::string socket = node + "-s" + std::to_string(s);
        for (std::size_t d = 0; d < shape.dimms_per_socket; ++d) {
          DimmRecord rec;
          rec.dimm = socket + "-d" + std::to_string(d);
          rec.node = node;
          rec.socket = socket;
          rec.rack = rack_id(r);
          rec.manufacturer = mfg;
          rec.technology = tech;
          rec.capacity_mb = shape.capacity_mb;
          dimms.push_back(std::move(rec));
        }
      }
    }
  }
  return Topology(std::move(dimms));
}

NeutronSeries gen_neutron(const SynthConfig& config) {
  check_config(config);
  NeutronSeries series;
  series.monitor_id = config.neutron.monitor_id;
  series.corrected = true;
  auto rng = make_stream(config.seed, "neutron");
  const UtcTime first = ceil_hour(config.start);
  std::size_t k = 0;
  for (UtcTime t = first; t < config.end; t = t + kSecondsPerHour, ++k) {
    double rate = config.neutron.base_rate +
                  config.neutron.trend_per_day * (static_cast<double>(k) / 24.0);
    if (config.neutron.noise_std > 0) {
      rate += normal(rng, 0.0, config.neutron.noise_std);
    }
    series.samples.push_back({t, std::max(0.0, rate)});
  }
  return series;
}

std::vector<JobRecord> gen_jobs(const SynthConfig& config) {
  std::vector<JobRecord> jobs;
  if (config.jobs.jobs_per_node_day <= 0) return jobs;
  const std::size_t node_count =
      config.topology.racks * config.topology.nodes_per_rack;
  const double mean_cycle_h = 24.0 / config.jobs.jobs_per_node_day;
  const double mean_gap_h =
      std::max(0.1, mean_cycle_h - config.jobs.mean_hours);
  for (std::size_t n = 0; n < node_count; ++n) {
    const std::string node = node_id(n);
    auto rng = make_stream(config.seed, "jobs:" + node);
    double t = static_cast<double>(config.start.seconds);
    const double end = static_cast<double>(config.end.seconds);
    while (true) {
      t += exp_sample(rng, mean_gap_h * 3600.0);
      const double dur = exp_sample(rng, config.jobs.mean_hours * 3600.0);
      if (t + dur >= end) break;
      jobs.push_back({node, UtcTime{static_cast<std::int64_t>(t)},
                      UtcTime{static_cast<std::int64_t>(t + dur)}});
      t += dur;
    }
  }
  std::sort(jobs.begin(), jobs.end(), [](const JobRecord& a, const JobRecord& b) {
    if (a.start != b.start) return a.start < b.start;
    return a.node < b.node;
  });
  return jobs;
}

SynthOutput gen_dataset(const SynthConfig& config) {
  check_config(config);
  SynthOutput out;
  out.dataset.topology = gen_topology(config);
  out.neutron = gen_neutron(config);
  out.jobs = gen_jobs(config);

  const Topology& topo = out.dataset.topology;
  const auto& samples = out.neutron.samples;
  const std::size_t hours = samples.size();
  const UtcTime first = ceil_hour(config.start);

  // Per-hour CE intensity multiplier shared by every DIMM.
  std::vector<double> hour_factor(hours, 1.0);
  {
    std::vector<double> rates(hours);
    for (std::size_t h = 0; h < hours; ++h) rates[h] = samples[h].rate;
    switch (config.fault.kind) {
      case FaultModel::Kind::linear_coupled: {
        const double mean =
            hours == 0 ? 0.0
                       : std::accumulate(rates.begin(), rates.end(), 0.0) /
                             static_cast<double>(hours);
        for (std::size_t h = 0; h < hours; ++h) {
          hour_factor[h] = std::max(
              0.0, 1.0 + config.fault.coupling_slope * (rates[h] - mean));
        }
        break;
      }
      case FaultModel::Kind::threshold_coupled: {
        if (hours > 0) {
          const double thr = percentile(rates, config.fault.percentile);
          for (std::size_t h = 0; h < hours; ++h) {
            if (rates[h] > thr) hour_factor[h] = config.fault.multiplier;
          }
        }
        break;
      }
      case FaultModel::Kind::null_model:
      case FaultModel::Kind::hot_dimm:
        break;
    }
    if (config.diurnal.enabled) {
      for (std::size_t h = 0; h < hours; ++h) {
        const std::int64_t hod =
            ((samples[h].timestamp.seconds / kSecondsPerHour) % 24 + 24) % 24;
        hour_factor[h] *=
            1.0 + config.diurnal.amplitude *
                      std::cos(2.0 * kPi *
                               (static_cast<double>(hod) -
                                config.diurnal.peak_hour) /
                               24.0);
      }
    }
  }

  // Background CEs, one independent stream per DIMM.
  auto& ce = out.dataset.ce;
  for (const auto& d : topo.dimms()) {
    auto rng = make_stream(config.seed, "ce:" + d.dimm);
    for (std::size_t h = 0; h < hours; ++h) {
      const double lambda =
          config.fault.ce_rate_per_dimm_hour * hour_factor[h];
      if (lambda <= 0) continue;
      const std::uint64_t n = poisson(rng, lambda);
      for (std::uint64_t k = 0; k < n; ++k) {
        CorrectedErrorEvent e;
        e.timestamp = samples[h].timestamp +
                      static_cast<std::int64_t>(uniform_below(rng, 3600));
        e.node = d.node;
        e.dimm = d.dimm;
        const double detail = uniform01(rng);
        if (detail < 0.90) {
          e.rank = static_cast<std::uint32_t>(uniform_below(rng, 4));
          e.bank = static_cast<std::uint32_t>(uniform_below(rng, 16));
          if (detail < 0.80) {
            e.row = static_cast<std::uint32_t>(uniform_below(rng, 32768));
            e.column = static_cast<std::uint32_t>(uniform_below(rng, 1024));
          }
        }
        const double det = uniform01(rng);
        e.detection = det < 0.65   ? Detection::memory_read
                      : det < 0.95 ? Detection::patrol_scrub
                                   : Detection::unknown;
        const double mult = uniform01(rng);
        e.multiplicity = mult < 0.90 ? 1 : (mult < 0.97 ? 2 : 3);
        ce.push_back(std::move(e));
      }
    }
  }

  // Hot DIMMs: bursts repeated on a few fixed cells, all at one seeded hour
  // of the day.
  if (config.fault.kind == FaultModel::Kind::hot_dimm &&
      config.fault.hot_dimm_count > 0 && !topo.dimms().empty()) {
    auto select_rng = make_stream(config.seed, "hot-select");
    std::vector<std::size_t> indices(topo.dimms().size());
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    const std::size_t k =
        std::min(config.fault.hot_dimm_count, indices.size());
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j =
          i + uniform_below(select_rng, indices.size() - i);
      std::swap(indices[i], indices[j]);
    }
    for (std::size_t i = 0; i < k; ++i) {
      const DimmRecord& d = topo.dimms()[indices[i]];
      auto rng = make_stream(config.seed, "hot:" + d.dimm);
      const std::int64_t burst_hour =
          static_cast<std::int64_t>(uniform_below(rng, 24));
      struct Cell {
        std::uint32_t rank, bank, row, column;
      };
      std::vector<Cell> cells(std::max<std::size_t>(1, config.fault.hot_cell_count));
      for (auto& c : cells) {
        c = {static_cast<std::uint32_t>(uniform_below(rng, 4)),
             static_cast<std::uint32_t>(uniform_below(rng, 16)),
             static_cast<std::uint32_t>(uniform_below(rng, 32768)),
             static_cast<std::uint32_t>(uniform_below(rng, 1024))};
      }
      std::size_t emitted = 0;
      for (UtcTime day = floor_day(first); day < config.end;
           day = day + kSecondsPerDay) {
        const std::uint64_t n = poisson(rng, config.fault.repeat_rate_per_day);
        for (std::uint64_t e = 0; e < n; ++e) {
          const UtcTime ts = day + burst_hour * kSecondsPerHour +
                             static_cast<std::int64_t>(uniform_below(rng, 3600));
          if (ts < first || ts >= config.end) continue;
          const Cell& c = cells[emitted % cells.size()];
          ++emitted;
          CorrectedErrorEvent ev;
          ev.timestamp = ts;
          ev.node = d.node;
          ev.dimm = d.dimm;
          ev.rank = c.rank;
          ev.bank = c.bank;
          ev.row = c.row;
          ev.column = c.column;
          ev.detection = Detection::memory_read;
          ev.multiplicity = 1;
          ce.push_back(std::move(ev));
        }
      }
    }
  }

  std::sort(ce.begin(), ce.end(),
            [](const CorrectedErrorEvent& a, const CorrectedErrorEvent& b) {
              if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
              if (a.node != b.node) return a.node < b.node;
              return a.dimm < b.dimm;
            });

  // UEs: rare, uncoupled Poisson per node.
  if (config.ue_rate_per_node_hour > 0) {
    auto& ue = out.dataset.ue;
    for (const auto& node : topo.nodes()) {
      auto rng = make_stream(config.seed, "ue:" + node);
      std::vector<const DimmRecord*> node_dimms;
      for (const auto& d : topo.dimms()) {
        if (d.node == node) node_dimms.push_back(&d);
      }
      for (std::size_t h = 0; h < hours; ++h) {
        const std::uint64_t n = poisson(rng, config.ue_rate_per_node_hour);
        for (std::uint64_t k = 0; k < n; ++k) {
          UncorrectedErrorEvent e;
          e.timestamp = samples[h].timestamp +
                        static_cast<std::int64_t>(uniform_below(rng, 3600));
          e.node = node;
          e.dimm = node_dimms.empty()
                       ? node + "-d?"
                       : node_dimms[uniform_below(rng, node_dimms.size())]->dimm;
          const double c = uniform01(rng);
          e.cause = c < 0.6   ? UeCause::uncorrected_ecc
                    : c < 0.9 ? UeCause::scrub_failed
                              : UeCause::ue_warning;
          ue.push_back(std::move(e));
        }
      }
    }
    std::sort(ue.begin(), ue.end(),
              [](const UncorrectedErrorEvent& a, const UncorrectedErrorEvent& b) {
                if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                return a.node < b.node;
              });
  }

  // Scrubber errors follow the same hour factors as CEs so coupled fault
  // models show up in the MB-class analyses too.
  if (config.scrub_rate_per_node_hour > 0) {
    auto& scrub = out.dataset.scrub;
    const std::uint64_t node_capacity_bytes =
        config.topology.sockets_per_node * config.topology.dimms_per_socket *
        config.topology.capacity_mb * (1ull << 20);
    for (const auto& node : topo.nodes()) {
      auto rng = make_stream(config.seed, "scrub:" + node);
      for (std::size_t h = 0; h < hours; ++h) {
        const double lambda = config.scrub_rate_per_node_hour * hour_factor[h];
        if (lambda <= 0) continue;
        const std::uint64_t n = poisson(rng, lambda);
        for (std::uint64_t k = 0; k < n; ++k) {
          ScrubberErrorEvent e;
          e.timestamp = samples[h].timestamp +
                        static_cast<std::int64_t>(uniform_below(rng, 3600));
          e.node = node;
          e.address = uniform_below(rng, node_capacity_bytes);
          const double b = uniform01(rng);
          if (b < 0.55) {
            e.bits_flipped = 1;
          } else if (b < 0.75) {
            e.bits_flipped = 2;
          } else if (b < 0.85) {
            e.bits_flipped = 3;
          } else if (b < 0.91) {
            e.bits_flipped = 4;
          } else if (b < 0.95) {
            e.bits_flipped = 5;
          } else {
            e.bits_flipped =
                6 + static_cast<std::uint32_t>(uniform_below(rng, 4));
          }
          scrub.push_back(std::move(e));
        }
      }
    }
    std::sort(scrub.begin(), scrub.end(),
              [](const ScrubberErrorEvent& a, const ScrubberErrorEvent& b) {
                if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                return a.node < b.node;
              });

    // One exposure record per node-day; duty varies with utilization.
    auto& exposure = out.dataset.exposure;
    const double node_capacity_mb = static_cast<double>(
        config.topology.sockets_per_node * config.topology.dimms_per_socket *
        config.topology.capacity_mb);
    for (const auto& node : topo.nodes()) {
      auto rng = make_stream(config.seed, "exposure:" + node);
      for (UtcTime day = floor_day(first); day < config.end;
           day = day + kSecondsPerDay) {
        const UtcTime lo = std::max(day, first);
        const UtcTime hi = std::min(day + kSecondsPerDay, config.end);
        if (lo >= hi) continue;
        const double duty =
            config.exposure_duty_min +
            uniform01(rng) *
                (config.exposure_duty_max - config.exposure_duty_min);
        const double span_hours = static_cast<double>(hi - lo) / 3600.0;
        ScanExposureRecord rec;
        rec.interval_start = lo;
        rec.interval_end = hi;
        rec.node = node;
        rec.mb_scanned = node_capacity_mb * span_hours * duty;
        exposure.push_back(std::move(rec));
      }
    }
    std::sort(exposure.begin(), exposure.end(),
              [](const ScanExposureRecord& a, const ScanExposureRecord& b) {
                if (a.interval_start != b.interval_start) {
                  return a.interval_start < b.interval_start;
                }
                return a.node < b.node;
              });
  }

  return out;
}

void write_jobs_log(std::ostream& out, const std::vector<JobRecord>& jobs) {
  out << "node,start,end\n";
  for (const auto& j : jobs) {
    out << j.node << ',' << format_iso8601(j.start) << ','
        << format_iso8601(j.end) << "\n";
  }
}

namespace {

using nlohmann::json;

UtcTime parse_time_or_throw(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw std::invalid_argument(std::string("synth config: missing '") + key +
                                "'");
  }
  auto t = parse_iso8601(j[key].get<std::string>());
  if (!t) {
    throw std::invalid_argument(std::string("synth config: bad timestamp in '") +
                                key + "'");
  }
  return *t;
}

} // namespace

SynthConfig load_synth_config(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("synth config: ") + e.what());
  }
  SynthConfig c;
  c.seed = j.value("seed", c.seed);
  c.start = parse_time_or_throw(j, "start");
  c.end = parse_time_or_throw(j, "end");
  if (j.contains("topology")) {
    const auto& t = j["topology"];
    c.topology.racks = t.value("racks", c.topology.racks);
    c.topology.nodes_per_rack =
        t.value("nodes_per_rack", c.topology.nodes_per_rack);
    c.topology.sockets_per_node =
        t.value("sockets_per_node", c.topology.sockets_per_node);
    c.topology.dimms_per_socket =
        t.value("dimms_per_socket", c.topology.dimms_per_socket);
    c.topology.capacity_mb = t.value("capacity_mb", c.topology.capacity_mb);
  }
  if (j.contains("neutron")) {
    const auto& n = j["neutron"];
    c.neutron.base_rate = n.value("base_rate", c.neutron.base_rate);
    c.neutron.trend_per_day = n.value("trend_per_day", c.neutron.trend_per_day);
    c.neutron.noise_std = n.value("noise_std", c.neutron.noise_std);
    c.neutron.monitor_id = n.value("monitor_id", c.neutron.monitor_id);
  }
  if (j.contains("fault")) {
    const auto& f = j["fault"];
    const std::string kind = f.value("kind", std::string("null"));
    if (kind == "null") {
      c.fault.kind = FaultModel::Kind::null_model;
    } else if (kind == "linear_coupled") {
      c.fault.kind = FaultModel::Kind::linear_coupled;
    } else if (kind == "threshold_coupled") {
      c.fault.kind = FaultModel::Kind::threshold_coupled;
    } else if (kind == "hot_dimm") {
      c.fault.kind = FaultModel::Kind::hot_dimm;
    } else {
      throw std::invalid_argument("synth config: unknown fault kind '" + kind +
                                  "'");
    }
    c.fault.ce_rate_per_dimm_hour =
        f.value("ce_rate_per_dimm_hour", c.fault.ce_rate_per_dimm_hour);
    c.fault.coupling_slope = f.value("coupling_slope", c.fault.coupling_slope);
    c.fault.percentile = f.value("percentile", c.fault.percentile);
    c.fault.multiplier = f.value("multiplier", c.fault.multiplier);
    c.fault.hot_dimm_count = f.value("hot_dimm_count", c.fault.hot_dimm_count);
    c.fault.hot_cell_count = f.value("hot_cell_count", c.fault.hot_cell_count);
    c.fault.repeat_rate_per_day =
        f.value("repeat_rate_per_day", c.fault.repeat_rate_per_day);
  }
  if (j.contains("diurnal")) {
    const auto& d = j["diurnal"];
    c.diurnal.enabled = d.value("enabled", c.diurnal.enabled);
    c.diurnal.peak_hour = d.value("peak_hour", c.diurnal.peak_hour);
    c.diurnal.amplitude = d.value("amplitude", c.diurnal.amplitude);
  }
  c.ue_rate_per_node_hour =
      j.value("ue_rate_per_node_hour", c.ue_rate_per_node_hour);
  c.scrub_rate_per_node_hour =
      j.value("scrub_rate_per_node_hour", c.scrub_rate_per_node_hour);
  c.exposure_duty_min = j.value("exposure_duty_min", c.exposure_duty_min);
  c.exposure_duty_max = j.value("exposure_duty_max", c.exposure_duty_max);
  if (j.contains("jobs")) {
    const auto& jb = j["jobs"];
    c.jobs.jobs_per_node_day =
        jb.value("jobs_per_node_day", c.jobs.jobs_per_node_day);
    c.jobs.mean_hours = jb.value("mean_hours", c.jobs.mean_hours);
  }
  check_config(c);
  return c;
}

std::string synth_config_to_json(const SynthConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["start"] = format_iso8601(c.start);
  j["end"] = format_iso8601(c.end);
  j["topology"] = {{"racks", c.topology.racks},
                   {"nodes_per_rack", c.topology.nodes_per_rack},
                   {"sockets_per_node", c.topology.sockets_per_node},
                   {"dimms_per_socket", c.topology.dimms_per_socket},
                   {"capacity_mb", c.topology.capacity_mb}};
  j["neutron"] = {{"base_rate", c.neutron.base_rate},
                  {"trend_per_day", c.neutron.trend_per_day},
                  {"noise_std", c.neutron.noise_std},
                  {"monitor_id", c.neutron.monitor_id}};
  const char* kind = "null";
  switch (c.fault.kind) {
    case FaultModel::Kind::null_model:
      kind = "null";
      break;
    case FaultModel::Kind::linear_coupled:
      kind = "linear_coupled";
      break;
    case FaultModel::Kind::threshold_coupled:
      kind = "threshold_coupled";
      break;
    case FaultModel::Kind::hot_dimm:
      kind = "hot_dimm";
      break;
  }
  j["fault"] = {{"kind", kind},
                {"ce_rate_per_dimm_hour", c.fault.ce_rate_per_dimm_hour},
                {"coupling_slope", c.fault.coupling_slope},
                {"percentile", c.fault.percentile},
                {"multiplier", c.fault.multiplier},
                {"hot_dimm_count", c.fault.hot_dimm_count},
                {"hot_cell_count", c.fault.hot_cell_count},
                {"repeat_rate_per_day", c.fault.repeat_rate_per_day}};
  j["diurnal"] = {{"enabled", c.diurnal.enabled},
                  {"peak_hour", c.diurnal.peak_hour},
                  {"amplitude", c.diurnal.amplitude}};
  j["ue_rate_per_node_hour"] = c.ue_rate_per_node_hour;
  j["scrub_rate_per_node_hour"] = c.scrub_rate_per_node_hour;
  j["exposure_duty_min"] = c.exposure_duty_min;
  j["exposure_duty_max"] = c.exposure_duty_max;
  j["jobs"] = {{"jobs_per_node_day", c.jobs.jobs_per_node_day},
               {"mean_hours", c.jobs.mean_hours}};
  return j.dump(2);
}

} // namespace cosmem
