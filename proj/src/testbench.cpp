#include "cosmem/testbench.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <ostream>

#include "cosmem/classify.hpp"
#include "cosmem/ingest.hpp"
#include "cosmem/kernels.hpp"
#include "cosmem/parallel.hpp"

namespace cosmem {

const char* to_string(ErrorClass c) {
  switch (c) {
    case ErrorClass::CE:
      return "CE";
    case ErrorClass::UE:
      return "UE";
    case ErrorClass::MB:
      return "MB";
  }
  return "?";
}

const char* to_string(ScopeKind k) {
  switch (k) {
    case ScopeKind::system:
      return "system";
    case ScopeKind::rack:
      return "rack";
    case ScopeKind::node:
      return "node";
    case ScopeKind::socket:
      return "socket";
    case ScopeKind::dimm:
      return "dimm";
  }
  return "?";
}

const char* to_string(OutcomeStatus s) {
  switch (s) {
    case OutcomeStatus::ok:
      return "ok";
    case OutcomeStatus::no_matching_dimms:
      return "no_matching_dimms";
    case OutcomeStatus::constant_series:
      return "constant_series";
    case OutcomeStatus::untestable_constant:
      return "untestable_constant";
    case OutcomeStatus::too_few_points:
      return "too_few_points";
  }
  return "?";
}

const std::string ScopeTable::kSystemId = "";

ScopeTable::ScopeTable(const Topology& topology, bool include_dimms)
    : racks_(topology.racks()),
      nodes_(topology.nodes()),
      sockets_(topology.sockets()) {
  if (include_dimms) {
    dimms_.reserve(topology.dimms().size());
    for (const auto& d : topology.dimms()) dimms_.push_back(d.dimm);
    std::sort(dimms_.begin(), dimms_.end());
  }
  flat_.reserve(1 + racks_.size() + nodes_.size() + sockets_.size() +
                dimms_.size());
  flat_.push_back({ScopeKind::system, 0});
  for (std::uint32_t i = 0; i < racks_.size(); ++i)
    flat_.push_back({ScopeKind::rack, i});
  for (std::uint32_t i = 0; i < nodes_.size(); ++i)
    flat_.push_back({ScopeKind::node, i});
  for (std::uint32_t i = 0; i < sockets_.size(); ++i)
    flat_.push_back({ScopeKind::socket, i});
  for (std::uint32_t i = 0; i < dimms_.size(); ++i)
    flat_.push_back({ScopeKind::dimm, i});
}

const std::string& ScopeTable::id_of(ScopeRef ref) const {
  switch (ref.kind) {
    case ScopeKind::system:
      return kSystemId;
    case ScopeKind::rack:
      return racks_[ref.index];
    case ScopeKind::node:
      return nodes_[ref.index];
    case ScopeKind::socket:
      return sockets_[ref.index];
    case ScopeKind::dimm:
      return dimms_[ref.index];
  }
  return kSystemId;
}

namespace {

std::vector<Granularity> default_windows(ErrorClass cls) {
  if (cls == ErrorClass::MB) {
    return {Granularity::day, Granularity::week, Granularity::month};
  }
  return {Granularity::hour, Granularity::day, Granularity::week,
          Granularity::month};
}

// MB tests never run hourly; an explicit window list is clipped to honor it.
std::vector<Granularity> class_windows(ErrorClass cls,
                                       const std::vector<Granularity>& req) {
  if (req.empty()) return default_windows(cls);
  if (cls != ErrorClass::MB) return req;
  std::vector<Granularity> out;
  for (Granularity g : req) {
    if (g != Granularity::hour) out.push_back(g);
  }
  return out;
}

std::size_t flat_scope_index(const ScopeRef& ref, std::size_t racks,
                             std::size_t nodes, std::size_t sockets) {
  switch (ref.kind) {
    case ScopeKind::system:
      return 0;
    case ScopeKind::rack:
      return 1 + ref.index;
    case ScopeKind::node:
      return 1 + racks + ref.index;
    case ScopeKind::socket:
      return 1 + racks + nodes + ref.index;
    case ScopeKind::dimm:
      return 1 + racks + nodes + sockets + ref.index;
  }
  return 0;
}

std::uint32_t index_of(const std::vector<std::string>& sorted,
                       const std::string& id) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), id);
  if (it != sorted.end() && *it == id) {
    return static_cast<std::uint32_t>(it - sorted.begin());
  }
  return WeightedEvent::kNoDimm;
}

} // namespace

std::vector<TestSpec> enumerate_specs(ErrorClass cls, const Topology& topology,
                                      const EnumerateOptions& opts) {
  const std::vector<Granularity> windows = class_windows(cls, opts.windows);
  ScopeTable scopes(topology, opts.include_dimm_scope);

  std::vector<TestSpec> specs;
  specs.reserve(spec_space_size(cls, topology, opts));

  if (cls == ErrorClass::MB) {
    // Scrubber logs carry no DIMM identity: no manufacturer/technology
    // dimension and system scope only.
    for (std::uint8_t bit = 1; bit <= 7; ++bit) {
      for (Granularity g : windows) {
        TestSpec s;
        s.cls = cls;
        s.bit_class = bit;
        s.window = g;
        s.scope = {ScopeKind::system, 0};
        specs.push_back(s);
      }
    }
    return specs;
  }

  for (int mfg = 0; mfg < 4; ++mfg) {
    for (int tech = 0; tech < 4; ++tech) {
      auto emit_tail = [&](TestSpec base) {
        for (Granularity g : windows) {
          for (std::size_t sc = 0; sc < scopes.size(); ++sc) {
            const ScopeRef ref = scopes.ref_at(sc);
            if (!opts.scope_kinds.empty() &&
                std::find(opts.scope_kinds.begin(), opts.scope_kinds.end(),
                          ref.kind) == opts.scope_kinds.end()) {
              continue;
            }
            TestSpec s = base;
            s.window = g;
            s.scope = ref;
            specs.push_back(s);
          }
        }
      };
      TestSpec base;
      base.cls = cls;
      base.manufacturer = static_cast<MfgFilter>(mfg);
      base.technology = static_cast<TechFilter>(tech);
      if (cls == ErrorClass::UE) {
        for (int cause = 0; cause < 3; ++cause) {
          base.ue_cause = static_cast<UeCauseFilter>(cause);
          emit_tail(base);
        }
      } else {
        for (int tr = 0; tr < 3; ++tr) {
          for (int det = 0; det < 3; ++det) {
            for (int cell = 0; cell < 3; ++cell) {
              for (int metric = 0; metric < 2; ++metric) {
                base.transience = static_cast<TransienceFilter>(tr);
                base.detection = static_cast<DetectionFilter>(det);
                base.cell = static_cast<CellFilter>(cell);
                base.metric = static_cast<Metric>(metric);
                emit_tail(base);
              }
            }
          }
        }
      }
    }
  }
  return specs;
}

std::uint64_t spec_space_size(ErrorClass cls, const Topology& topology,
                              const EnumerateOptions& opts) {
  const std::uint64_t windows = class_windows(cls, opts.windows).size();
  if (cls == ErrorClass::MB) return 7 * windows;
  std::uint64_t scopes = 0;
  auto kind_on = [&](ScopeKind k) {
    return opts.scope_kinds.empty() ||
           std::find(opts.scope_kinds.begin(), opts.scope_kinds.end(), k) !=
               opts.scope_kinds.end();
  };
  if (kind_on(ScopeKind::system)) scopes += 1;
  if (kind_on(ScopeKind::rack)) scopes += topology.racks().size();
  if (kind_on(ScopeKind::node)) scopes += topology.nodes().size();
  if (kind_on(ScopeKind::socket)) scopes += topology.sockets().size();
  if (opts.include_dimm_scope && kind_on(ScopeKind::dimm)) {
    scopes += topology.dimms().size();
  }
  const std::uint64_t categories =
      cls == ErrorClass::UE ? 4ull * 4 * 3 : 4ull * 4 * 3 * 3 * 3 * 2;
  return categories * windows * scopes;
}

SuiteRunner::SuiteRunner(const Dataset& dataset, const NeutronSeries& neutron,
                         UtcTime from, UtcTime to, SuiteOptions options)
    : dataset_(dataset),
      neutron_(neutron),
      from_(from),
      to_(to),
      options_(std::move(options)),
      scope_table_(dataset.topology, options_.include_dimm_scope) {
  // DIMM id table: inventory plus ids that only appear in event logs.
  for (const auto& d : dataset_.topology.dimms()) dimm_ids_.push_back(d.dimm);
  for (const auto& e : dataset_.ce) dimm_ids_.push_back(e.dimm);
  for (const auto& e : dataset_.ue) dimm_ids_.push_back(e.dimm);
  std::sort(dimm_ids_.begin(), dimm_ids_.end());
  dimm_ids_.erase(std::unique(dimm_ids_.begin(), dimm_ids_.end()),
                  dimm_ids_.end());

  // Feasibility index: DIMM counts per scope by (manufacturer, technology).
  const auto& topo = dataset_.topology;
  const std::size_t scope_total = 1 + topo.racks().size() +
                                  topo.nodes().size() + topo.sockets().size() +
                                  (options_.include_dimm_scope
                                       ? topo.dimms().size()
                                       : 0);
  scope_dimm_counts_.assign(scope_total, {});
  std::vector<std::string> sorted_dimm_scope;
  if (options_.include_dimm_scope) {
    sorted_dimm_scope.reserve(topo.dimms().size());
    for (const auto& d : topo.dimms()) sorted_dimm_scope.push_back(d.dimm);
    std::sort(sorted_dimm_scope.begin(), sorted_dimm_scope.end());
  }
  for (const auto& d : topo.dimms()) {
    if (d.manufacturer == Manufacturer::unknown ||
        d.technology == Technology::unknown) {
      continue;
    }
    const int m = static_cast<int>(d.manufacturer);
    const int t = static_cast<int>(d.technology);
    auto bump = [&](std::size_t flat) { ++scope_dimm_counts_[flat][m][t]; };
    bump(0);
    bump(flat_scope_index({ScopeKind::rack, index_of(topo.racks(), d.rack)},
                          topo.racks().size(), topo.nodes().size(),
                          topo.sockets().size()));
    bump(flat_scope_index({ScopeKind::node, index_of(topo.nodes(), d.node)},
                          topo.racks().size(), topo.nodes().size(),
                          topo.sockets().size()));
    bump(flat_scope_index(
        {ScopeKind::socket, index_of(topo.sockets(), d.socket)},
        topo.racks().size(), topo.nodes().size(), topo.sockets().size()));
    if (options_.include_dimm_scope) {
      bump(flat_scope_index(
          {ScopeKind::dimm, index_of(sorted_dimm_scope, d.dimm)},
          topo.racks().size(), topo.nodes().size(), topo.sockets().size()));
    }
  }

  // Window grids and per-window neutron means, once per granularity.
  const auto& samples = neutron_.samples;
  std::vector<double> rates(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) rates[i] = samples[i].rate;
  for (int gi = 0; gi < 4; ++gi) {
    const Granularity g = static_cast<Granularity>(gi);
    GranularityData gd;
    gd.windows = make_windows(from_, to_, g);
    std::vector<double> scanned =
        scanned_mb_per_window(dataset_.exposure, gd.windows);
    GranularityData gd_mb;
    gd_mb.windows = gd.windows;
    for (std::size_t w = 0; w < gd.windows.size(); ++w) {
      auto lo = std::lower_bound(
          samples.begin(), samples.end(), gd.windows[w].start,
          [](const NeutronSample& s, UtcTime t) { return s.timestamp < t; });
      auto hi = std::lower_bound(
          samples.begin(), samples.end(), gd.windows[w].end,
          [](const NeutronSample& s, UtcTime t) { return s.timestamp < t; });
      const std::size_t count = static_cast<std::size_t>(hi - lo);
      if (count == 0) continue;
      const std::size_t first = static_cast<std::size_t>(lo - samples.begin());
      const double mean = kernels::sum({rates.data() + first, count}) /
                          static_cast<double>(count);
      gd.kept.push_back(w);
      gd.neutron_means.push_back(mean);
      if (scanned[w] > 0.0) {
        gd_mb.kept.push_back(w);
        gd_mb.neutron_means.push_back(mean);
        gd_mb.scanned_mb.push_back(scanned[w]);
      }
    }
    grids_[gi] = std::move(gd);
    grids_mb_[gi] = std::move(gd_mb);
  }
}

const SuiteRunner::GranularityData& SuiteRunner::grid(Granularity g,
                                                      bool mb) const {
  return mb ? grids_mb_[static_cast<int>(g)] : grids_[static_cast<int>(g)];
}

SuiteRunner::ClassData SuiteRunner::prepare_class(ErrorClass cls) const {
  const auto& topo = dataset_.topology;
  ClassData cd;
  const std::size_t scope_total = scope_dimm_counts_.size();
  cd.scope_events.resize(scope_total);

  std::vector<std::string> sorted_dimm_scope;
  if (options_.include_dimm_scope) {
    for (const auto& d : topo.dimms()) sorted_dimm_scope.push_back(d.dimm);
    std::sort(sorted_dimm_scope.begin(), sorted_dimm_scope.end());
  }

  auto bucket_event = [&](std::uint32_t idx, const std::string& node,
                          const std::string& dimm) {
    cd.scope_events[0].push_back(idx);
    const std::size_t racks = topo.racks().size();
    const std::size_t nodes = topo.nodes().size();
    const std::size_t sockets = topo.sockets().size();
    const DimmRecord* rec = dimm.empty() ? nullptr : topo.find_dimm(dimm);
    // Rack/node placement works through the node id even when the DIMM is
    // not in the inventory; socket and DIMM scopes need the inventory row.
    const std::string* rack = topo.rack_of_node(node);
    if (!rack && rec) rack = &rec->rack;
    if (rack) {
      const std::uint32_t r = index_of(topo.racks(), *rack);
      if (r != WeightedEvent::kNoDimm) {
        cd.scope_events[flat_scope_index({ScopeKind::rack, r}, racks, nodes,
                                         sockets)]
            .push_back(idx);
      }
    }
    const std::uint32_t n = index_of(topo.nodes(), node);
    if (n != WeightedEvent::kNoDimm) {
      cd.scope_events[flat_scope_index({ScopeKind::node, n}, racks, nodes,
                                       sockets)]
          .push_back(idx);
    }
    if (rec) {
      const std::uint32_t s = index_of(topo.sockets(), rec->socket);
      if (s != WeightedEvent::kNoDimm) {
        cd.scope_events[flat_scope_index({ScopeKind::socket, s}, racks, nodes,
                                         sockets)]
            .push_back(idx);
      }
      if (options_.include_dimm_scope) {
        const std::uint32_t d = index_of(sorted_dimm_scope, rec->dimm);
        if (d != WeightedEvent::kNoDimm) {
          cd.scope_events[flat_scope_index({ScopeKind::dimm, d}, racks, nodes,
                                           sockets)]
              .push_back(idx);
        }
      }
    }
  };

  if (cls == ErrorClass::CE) {
    const CeLabels labels = label_ce_events(dataset_.ce);
    cd.events.reserve(dataset_.ce.size());
    for (std::size_t i = 0; i < dataset_.ce.size(); ++i) {
      const auto& e = dataset_.ce[i];
      PreparedEvent p;
      p.timestamp = e.timestamp;
      p.weight = static_cast<double>(e.multiplicity);
      p.dimm = index_of(dimm_ids_, e.dimm);
      const Category cat = derive_category(e.dimm, topo);
      p.manufacturer = cat.manufacturer;
      p.technology = cat.technology;
      p.transient = static_cast<std::uint8_t>(labels.transient[i]);
      p.single_cell = static_cast<std::uint8_t>(labels.single_cell[i]);
      p.detection = e.detection;
      const std::uint32_t idx = static_cast<std::uint32_t>(cd.events.size());
      cd.events.push_back(p);
      bucket_event(idx, e.node, e.dimm);
    }
  } else if (cls == ErrorClass::UE) {
    cd.events.reserve(dataset_.ue.size());
    for (const auto& e : dataset_.ue) {
      PreparedEvent p;
      p.timestamp = e.timestamp;
      p.weight = 1.0;
      p.dimm = index_of(dimm_ids_, e.dimm);
      const Category cat = derive_category(e.dimm, topo);
      p.manufacturer = cat.manufacturer;
      p.technology = cat.technology;
      p.cause = e.cause;
      const std::uint32_t idx = static_cast<std::uint32_t>(cd.events.size());
      cd.events.push_back(p);
      bucket_event(idx, e.node, e.dimm);
    }
  } else {
    cd.events.reserve(dataset_.scrub.size());
    for (const auto& e : dataset_.scrub) {
      PreparedEvent p;
      p.timestamp = e.timestamp;
      p.weight = 1.0;
      p.bit_class = static_cast<std::uint8_t>(classify_bit_width(e));
      const std::uint32_t idx = static_cast<std::uint32_t>(cd.events.size());
      cd.events.push_back(p);
      cd.scope_events[0].push_back(idx); // MB runs at system scope
    }
  }
  return cd;
}

bool SuiteRunner::scope_has_matching_dimm(const TestSpec& spec) const {
  const auto& counts = scope_dimm_counts_[flat_scope_index(
      spec.scope, dataset_.topology.racks().size(),
      dataset_.topology.nodes().size(), dataset_.topology.sockets().size())];
  for (int m = 0; m < 3; ++m) {
    if (spec.manufacturer != MfgFilter::All &&
        m != static_cast<int>(spec.manufacturer)) {
      continue;
    }
    for (int t = 0; t < 3; ++t) {
      if (spec.technology != TechFilter::All &&
          t != static_cast<int>(spec.technology)) {
        continue;
      }
      if (counts[m][t] > 0) return true;
    }
  }
  return false;
}

bool SuiteRunner::event_matches(const TestSpec& spec,
                                const PreparedEvent& e) const {
  if (spec.cls == ErrorClass::MB) {
    return spec.bit_class == 7 || e.bit_class == spec.bit_class;
  }
  if (spec.manufacturer != MfgFilter::All &&
      (e.manufacturer == Manufacturer::unknown ||
       static_cast<int>(e.manufacturer) !=
           static_cast<int>(spec.manufacturer))) {
    return false;
  }
  if (spec.technology != TechFilter::All &&
      (e.technology == Technology::unknown ||
       static_cast<int>(e.technology) != static_cast<int>(spec.technology))) {
    return false;
  }
  if (spec.cls == ErrorClass::UE) {
    if (spec.ue_cause != UeCauseFilter::All &&
        static_cast<int>(e.cause) != static_cast<int>(spec.ue_cause)) {
      return false;
    }
    return true;
  }
  // CE
  if (spec.transience != TransienceFilter::All) {
    const auto want = spec.transience == TransienceFilter::transient
                          ? Tristate::yes
                          : Tristate::no;
    if (static_cast<Tristate>(e.transient) != want) return false;
  }
  if (spec.detection != DetectionFilter::All) {
    const auto want = spec.detection == DetectionFilter::memory_read
                          ? Detection::memory_read
                          : Detection::patrol_scrub;
    if (e.detection != want) return false;
  }
  if (spec.cell != CellFilter::All) {
    const auto want =
        spec.cell == CellFilter::single ? Tristate::yes : Tristate::no;
    if (static_cast<Tristate>(e.single_cell) != want) return false;
  }
  return true;
}

std::vector<double> SuiteRunner::aggregate_spec(
    const TestSpec& spec, const ClassData& cd,
    const GranularityData& gd) const {
  const auto& bucket = cd.scope_events[flat_scope_index(
      spec.scope, dataset_.topology.racks().size(),
      dataset_.topology.nodes().size(), dataset_.topology.sockets().size())];

  std::vector<double> values(gd.windows.size(), 0.0);
  auto window_of = [&](UtcTime t) -> std::size_t {
    auto it = std::upper_bound(
        gd.windows.begin(), gd.windows.end(), t,
        [](UtcTime v, const Window& w) { return v < w.start; });
    if (it == gd.windows.begin()) return static_cast<std::size_t>(-1);
    --it;
    if (t >= it->start && t < it->end) {
      return static_cast<std::size_t>(it - gd.windows.begin());
    }
    return static_cast<std::size_t>(-1);
  };

  const bool use_dimm_count =
      spec.cls == ErrorClass::CE && spec.metric == Metric::dimm_count;
  if (!use_dimm_count) {
    for (std::uint32_t idx : bucket) {
      const PreparedEvent& e = cd.events[idx];
      if (!event_matches(spec, e)) continue;
      const std::size_t w = window_of(e.timestamp);
      if (w != static_cast<std::size_t>(-1)) values[w] += e.weight;
    }
  } else {
    std::vector<std::pair<std::size_t, std::uint32_t>> hits;
    for (std::uint32_t idx : bucket) {
      const PreparedEvent& e = cd.events[idx];
      if (e.dimm == WeightedEvent::kNoDimm) continue;
      if (!event_matches(spec, e)) continue;
      const std::size_t w = window_of(e.timestamp);
      if (w != static_cast<std::size_t>(-1)) hits.emplace_back(w, e.dimm);
    }
    std::sort(hits.begin(), hits.end());
    hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
    for (const auto& h : hits) values[h.first] += 1.0;
  }

  // Keep only covered windows; normalize MB counts per scanned MB.
  std::vector<double> out;
  out.reserve(gd.kept.size());
  for (std::size_t k = 0; k < gd.kept.size(); ++k) {
    double v = values[gd.kept[k]];
    if (!gd.scanned_mb.empty()) v /= gd.scanned_mb[k];
    out.push_back(v);
  }
  return out;
}

std::vector<TestOutcome> SuiteRunner::run(ErrorClass cls, TestKind kind) const {
  EnumerateOptions eopts;
  eopts.windows = options_.windows;
  eopts.include_dimm_scope = options_.include_dimm_scope;
  eopts.scope_kinds = options_.scope_kinds;
  const std::vector<TestSpec> specs =
      enumerate_specs(cls, dataset_.topology, eopts);
  const ClassData cd = prepare_class(cls);

  const std::size_t per_spec =
      kind == TestKind::ks ? options_.percentiles.size() : 1;
  std::vector<TestOutcome> outcomes(specs.size() * per_spec);

  parallel_for(specs.size(), options_.threads, [&](std::size_t si) {
    const TestSpec& spec = specs[si];
    const GranularityData& gd = grid(spec.window, spec.cls == ErrorClass::MB);
    TestOutcome* slot = &outcomes[si * per_spec];
    for (std::size_t p = 0; p < per_spec; ++p) {
      slot[p].spec = spec;
      slot[p].kind = kind;
      if (kind == TestKind::ks) slot[p].percentile = options_.percentiles[p];
    }

    if (spec.cls != ErrorClass::MB && !scope_has_matching_dimm(spec)) {
      for (std::size_t p = 0; p < per_spec; ++p) {
        slot[p].status = OutcomeStatus::no_matching_dimms;
      }
      return;
    }

    std::vector<double> errors = aggregate_spec(spec, cd, gd);
    std::vector<double> neutron = gd.neutron_means;
    if (kind == TestKind::kendall && options_.drop_zero_windows) {
      std::size_t w = 0;
      for (std::size_t i = 0; i < errors.size(); ++i) {
        if (errors[i] == 0.0) continue;
        errors[w] = errors[i];
        neutron[w] = neutron[i];
        ++w;
      }
      errors.resize(w);
      neutron.resize(w);
    }

    const auto n = static_cast<std::uint32_t>(errors.size());
    for (std::size_t p = 0; p < per_spec; ++p) slot[p].n = n;
    if (n < 3) {
      for (std::size_t p = 0; p < per_spec; ++p) {
        slot[p].status = OutcomeStatus::too_few_points;
      }
      return;
    }
    const auto range = kernels::min_max(errors);
    if (range.min == range.max) {
      for (std::size_t p = 0; p < per_spec; ++p) {
        slot[p].status = OutcomeStatus::constant_series;
      }
      return;
    }

    if (kind == TestKind::kendall) {
      const CorrelationResult r = kendall_tau_b(neutron, errors);
      switch (r.status) {
        case TestStatus::ok:
          slot->status = OutcomeStatus::ok;
          slot->stat = r.tau_b;
          slot->p_raw = r.p_raw;
          break;
        case TestStatus::untestable_constant:
          slot->status = OutcomeStatus::untestable_constant;
          break;
        case TestStatus::too_few_points:
          slot->status = OutcomeStatus::too_few_points;
          break;
      }
      return;
    }

    for (std::size_t p = 0; p < per_spec; ++p) {
      const double threshold = percentile(neutron, options_.percentiles[p]);
      const ThresholdPartition parts =
          partition_by_threshold(neutron, errors, threshold);
      slot[p].n_high = static_cast<std::uint32_t>(parts.high.size());
      slot[p].n_rest = static_cast<std::uint32_t>(parts.rest.size());
      if (parts.high.empty() || parts.rest.empty()) {
        slot[p].status = OutcomeStatus::too_few_points;
        continue;
      }
      const KsResult r = ks_two_sample(parts.high, parts.rest);
      slot[p].status = OutcomeStatus::ok;
      slot[p].stat = r.d_stat;
      slot[p].p_raw = r.p_raw;
    }
  });

  // Joint FDR correction over the suite's testable outcomes.
  std::vector<double> raw;
  std::vector<std::size_t> raw_index;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].status == OutcomeStatus::ok) {
      raw.push_back(*outcomes[i].p_raw);
      raw_index.push_back(i);
    }
  }
  const std::vector<double> adjusted = by_adjust(raw);
  for (std::size_t k = 0; k < raw_index.size(); ++k) {
    outcomes[raw_index[k]].p_adj = adjusted[k];
  }
  return outcomes;
}

std::vector<double> SuiteRunner::aggregate_for(const TestSpec& spec) const {
  return aggregate_spec(spec, prepare_class(spec.cls),
                        grid(spec.window, spec.cls == ErrorClass::MB));
}

std::vector<TestOutcome> SuiteRunner::run_kendall(ErrorClass cls) const {
  return run(cls, TestKind::kendall);
}

std::vector<TestOutcome> SuiteRunner::run_ks(ErrorClass cls) const {
  return run(cls, TestKind::ks);
}

SuiteSummary summarize(const std::vector<TestOutcome>& outcomes, double alpha) {
  SuiteSummary s;
  s.alpha = alpha;
  auto hist_bin = [](double p) {
    auto b = static_cast<std::size_t>(p * 20.0);
    return std::min<std::size_t>(b, 19);
  };
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const TestOutcome& o = outcomes[i];
    ++s.status_tally[o.status];
    if (o.status != OutcomeStatus::ok) continue;
    s.coefficients_sorted.push_back(*o.stat);
    ++s.raw_hist[hist_bin(*o.p_raw)];
    ++s.adj_hist[hist_bin(*o.p_adj)];
    if (*o.p_adj < alpha) {
      s.significant.push_back(
          {i, *o.stat, *o.p_adj, std::fabs(*o.stat) >= 0.5});
    }
  }
  std::sort(s.coefficients_sorted.begin(), s.coefficients_sorted.end());
  std::sort(s.significant.begin(), s.significant.end(),
            [](const auto& a, const auto& b) {
              if (a.p_adj != b.p_adj) return a.p_adj < b.p_adj;
              return a.outcome_index < b.outcome_index;
            });
  return s;
}

namespace {

void write_suite_row(std::ostream& out, const TestOutcome& o,
                     const ScopeTable& scopes) {
  const TestSpec& s = o.spec;
  const bool ce = s.cls == ErrorClass::CE;
  const bool ue = s.cls == ErrorClass::UE;
  const bool mb = s.cls == ErrorClass::MB;

  auto mfg_name = [](MfgFilter f) {
    static const char* names[] = {"A", "B", "C", "All"};
    return names[static_cast<int>(f)];
  };
  auto tech_name = [](TechFilter f) {
    static const char* names[] = {"3x", "2y", "2z", "All"};
    return names[static_cast<int>(f)];
  };
  auto transience_name = [](TransienceFilter f) {
    static const char* names[] = {"transient", "non_transient", "All"};
    return names[static_cast<int>(f)];
  };
  auto detection_name = [](DetectionFilter f) {
    static const char* names[] = {"memory_read", "patrol_scrub", "All"};
    return names[static_cast<int>(f)];
  };
  auto cell_name = [](CellFilter f) {
    static const char* names[] = {"single", "multi", "All"};
    return names[static_cast<int>(f)];
  };
  auto cause_name = [](UeCauseFilter f) {
    static const char* names[] = {"uncorrected_ecc", "scrub_failed", "All"};
    return names[static_cast<int>(f)];
  };

  out << to_string(s.cls) << ',';
  out << (mb ? "" : mfg_name(s.manufacturer)) << ',';
  out << (mb ? "" : tech_name(s.technology)) << ',';
  out << (ce ? transience_name(s.transience) : "") << ',';
  out << (ce ? detection_name(s.detection) : "") << ',';
  out << (ce ? cell_name(s.cell) : "") << ',';
  out << (ce ? (s.metric == Metric::event_count ? "event_count" : "dimm_count")
             : "")
      << ',';
  out << (ue ? cause_name(s.ue_cause) : "") << ',';
  out << (mb ? (s.bit_class == 7 ? "All" : bit_class_name(s.bit_class)) : "")
      << ',';
  out << to_string(s.window) << ',';
  out << to_string(s.scope.kind) << ',';
  out << scopes.id_of(s.scope) << ',';
  out << (o.kind == TestKind::kendall ? "kendall" : "ks") << ',';
  out << (o.kind == TestKind::ks ? format_double(o.percentile) : "") << ',';
  out << o.n << ',';
  out << (o.stat ? format_double(*o.stat) : "") << ',';
  out << (o.p_raw ? format_double(*o.p_raw) : "") << ',';
  out << (o.p_adj ? format_double(*o.p_adj) : "") << ',';
  out << to_string(o.status) << "\n";
}

} // namespace

void write_suite_table(std::ostream& out,
                       const std::vector<TestOutcome>& outcomes,
                       const ScopeTable& scopes) {
  out << "# error_class,manufacturer,technology,transience,detection,cell,"
         "metric,ue_cause,bit_class,window,scope_kind,scope_id,kind,"
         "percentile,n,stat,p_raw,p_adj,status\n";
  for (const auto& o : outcomes) write_suite_row(out, o, scopes);
}

} // namespace cosmem
