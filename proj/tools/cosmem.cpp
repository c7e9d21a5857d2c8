// Command-line surface of the toolkit. Every command reads the CSV inputs,
// writes plot-ready tables plus a replayable run manifest into --out, and is
// deterministic given the same inputs and seeds.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cosmem/classify.hpp"
#include "cosmem/errors.hpp"
#include "cosmem/ingest.hpp"
#include "cosmem/manifest.hpp"
#include "cosmem/mlpredict.hpp"
#include "cosmem/synth.hpp"
#include "cosmem/testbench.hpp"
#include "cosmem/timegrid.hpp"
#include "cosmem/version.hpp"

namespace fs = std::filesystem;
using namespace cosmem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitInternalError = 2;

struct CommonArgs {
  std::string neutron_path, ce_path, ue_path, scrub_path, exposure_path,
      inventory_path;
  std::string from, to;
  std::string out_dir = ".";
  unsigned threads = 0; // 0 = COSMEM_THREADS or 1
};

void add_input_options(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--neutron", args.neutron_path, "Neutron monitor log");
  cmd->add_option("--ce", args.ce_path, "Corrected-error log");
  cmd->add_option("--ue", args.ue_path, "Uncorrected-error log");
  cmd->add_option("--scrub", args.scrub_path, "Scrubber error log");
  cmd->add_option("--exposure", args.exposure_path, "Scan exposure log");
  cmd->add_option("--inventory", args.inventory_path, "DIMM inventory");
  cmd->add_option("--from", args.from, "Observation start (ISO-8601)");
  cmd->add_option("--to", args.to, "Observation end (ISO-8601)");
  cmd->add_option("--out", args.out_dir, "Output directory");
  cmd->add_option("--threads", args.threads,
                  "Worker threads (default: COSMEM_THREADS or 1)");
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("COSMEM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return 1;
}

struct LoadedInputs {
  Dataset dataset;
  NeutronSeries neutron;
  std::vector<std::pair<std::string, std::string>> digests;
};

template <typename Parser>
auto parse_file(const std::string& path, Parser&& parser,
                std::vector<std::pair<std::string, std::string>>& digests) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("cannot open input '" + path + "'");
  }
  digests.emplace_back(path, sha256_hex_of_file(path));
  return parser(in);
}

LoadedInputs load_inputs(const CommonArgs& args) {
  LoadedInputs in;
  if (!args.inventory_path.empty()) {
    in.dataset.topology =
        parse_file(args.inventory_path, load_inventory, in.digests);
  }
  if (!args.neutron_path.empty()) {
    in.neutron = parse_file(args.neutron_path, parse_neutron_log, in.digests);
  }
  if (!args.ce_path.empty()) {
    in.dataset.ce = parse_file(args.ce_path, parse_ce_log, in.digests);
  }
  if (!args.ue_path.empty()) {
    in.dataset.ue = parse_file(args.ue_path, parse_ue_log, in.digests);
  }
  if (!args.scrub_path.empty()) {
    in.dataset.scrub = parse_file(args.scrub_path, parse_scrub_log, in.digests);
  }
  if (!args.exposure_path.empty()) {
    in.dataset.exposure =
        parse_file(args.exposure_path, parse_exposure_log, in.digests);
  }
  return in;
}

UtcTime parse_time_arg(const std::string& text, const char* what) {
  auto t = parse_iso8601(text);
  if (!t) {
    throw std::invalid_argument(std::string("bad ") + what + " '" + text +
                                "'");
  }
  return *t;
}

// Default observation interval: the neutron coverage when present, otherwise
// the event span. Explicit --from/--to win.
std::pair<UtcTime, UtcTime> resolve_interval(const CommonArgs& args,
                                             const LoadedInputs& in) {
  std::optional<UtcTime> lo, hi;
  if (!in.neutron.samples.empty()) {
    lo = in.neutron.samples.front().timestamp;
    hi = in.neutron.samples.back().timestamp + kSecondsPerHour;
  } else {
    auto widen = [&](UtcTime t) {
      if (!lo || t < *lo) lo = t;
      if (!hi || t + 1 > *hi) hi = t + 1;
    };
    for (const auto& e : in.dataset.ce) widen(e.timestamp);
    for (const auto& e : in.dataset.ue) widen(e.timestamp);
    for (const auto& e : in.dataset.scrub) widen(e.timestamp);
  }
  if (!args.from.empty()) lo = parse_time_arg(args.from, "--from");
  if (!args.to.empty()) hi = parse_time_arg(args.to, "--to");
  if (!lo || !hi || !(*lo < *hi)) {
    throw std::invalid_argument(
        "cannot determine an observation interval; pass --from/--to");
  }
  return {*lo, *hi};
}

std::ofstream open_output(const fs::path& dir, const std::string& name,
                          std::vector<std::string>& outputs) {
  fs::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write output '" + (dir / name).string() +
                             "'");
  }
  outputs.push_back(name);
  return out;
}

void finish_manifest(RunManifest manifest, const CommonArgs& args) {
  manifest.version = kVersion;
  std::sort(manifest.outputs.begin(), manifest.outputs.end());
  write_manifest(manifest,
                 (fs::path(args.out_dir) / (manifest.command + ".manifest.json"))
                     .string());
}

ErrorClass parse_class(const std::string& name) {
  if (name == "CE" || name == "ce") return ErrorClass::CE;
  if (name == "UE" || name == "ue") return ErrorClass::UE;
  if (name == "MB" || name == "mb") return ErrorClass::MB;
  throw std::invalid_argument("unknown error class '" + name + "'");
}

Granularity parse_granularity(const std::string& name) {
  if (name == "hour") return Granularity::hour;
  if (name == "day") return Granularity::day;
  if (name == "week") return Granularity::week;
  if (name == "month") return Granularity::month;
  throw std::invalid_argument("unknown granularity '" + name + "'");
}

std::vector<Granularity> parse_windows_arg(const std::string& csv) {
  std::vector<Granularity> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_granularity(item));
  }
  return out;
}

std::vector<ScopeKind> parse_scopes_arg(const std::string& csv) {
  std::vector<ScopeKind> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "system") {
      out.push_back(ScopeKind::system);
    } else if (item == "rack") {
      out.push_back(ScopeKind::rack);
    } else if (item == "node") {
      out.push_back(ScopeKind::node);
    } else if (item == "socket") {
      out.push_back(ScopeKind::socket);
    } else if (item == "dimm") {
      out.push_back(ScopeKind::dimm);
    } else if (!item.empty()) {
      throw std::invalid_argument("unknown scope kind '" + item + "'");
    }
  }
  return out;
}

// Events of one class reduced for the grid, system-wide. CE weights carry
// multiplicity. Returns the dimm id table used for exclusion reports.
std::pair<std::vector<WeightedEvent>, std::vector<std::string>>
weighted_events(const Dataset& ds, ErrorClass cls, bool transient_only) {
  std::vector<std::string> dimm_ids;
  for (const auto& e : ds.ce) dimm_ids.push_back(e.dimm);
  for (const auto& e : ds.ue) dimm_ids.push_back(e.dimm);
  std::sort(dimm_ids.begin(), dimm_ids.end());
  dimm_ids.erase(std::unique(dimm_ids.begin(), dimm_ids.end()),
                 dimm_ids.end());
  auto dimm_index = [&](const std::string& id) {
    auto it = std::lower_bound(dimm_ids.begin(), dimm_ids.end(), id);
    return static_cast<std::uint32_t>(it - dimm_ids.begin());
  };

  std::vector<WeightedEvent> events;
  if (cls == ErrorClass::CE) {
    CeLabels labels;
    if (transient_only) labels = label_ce_events(ds.ce);
    for (std::size_t i = 0; i < ds.ce.size(); ++i) {
      if (transient_only && labels.transient[i] != Tristate::yes) continue;
      events.push_back({ds.ce[i].timestamp,
                        static_cast<double>(ds.ce[i].multiplicity),
                        dimm_index(ds.ce[i].dimm)});
    }
  } else if (cls == ErrorClass::UE) {
    for (const auto& e : ds.ue) {
      events.push_back({e.timestamp, 1.0, dimm_index(e.dimm)});
    }
  } else {
    for (const auto& e : ds.scrub) {
      events.push_back({e.timestamp, 1.0, WeightedEvent::kNoDimm});
    }
  }
  return {std::move(events), std::move(dimm_ids)};
}

// Paired (neutron mean, error value) series at one granularity, system
// scope, All filters; MB values are normalized per scanned MB when exposure
// records are present.
PairedSeries paired_series(const LoadedInputs& in, ErrorClass cls,
                           Granularity g, UtcTime from, UtcTime to) {
  const auto [events, ids] = weighted_events(in.dataset, cls, false);
  const std::vector<Window> windows = make_windows(from, to, g);
  CountSeries counts = aggregate_events(events, windows, Metric::event_count);
  if (cls == ErrorClass::MB && !in.dataset.exposure.empty()) {
    const ExposureNormalized norm =
        normalize_by_exposure(counts, in.dataset.exposure, windows);
    std::vector<Window> kept_windows;
    kept_windows.reserve(norm.kept.size());
    for (std::size_t k : norm.kept) kept_windows.push_back(windows[k]);
    return align(in.neutron, kept_windows, norm.values);
  }
  return align(in.neutron, windows, counts);
}

nlohmann::json summary_to_json(const SuiteSummary& summary,
                               const std::vector<TestOutcome>& outcomes,
                               const ScopeTable& scopes) {
  nlohmann::json j;
  j["alpha"] = summary.alpha;
  nlohmann::json statuses = nlohmann::json::object();
  for (const auto& [status, count] : summary.status_tally) {
    statuses[to_string(status)] = count;
  }
  j["statuses"] = statuses;
  j["tested"] = summary.coefficients_sorted.size();
  j["enumerated"] = outcomes.size();
  nlohmann::json sig = nlohmann::json::array();
  for (const auto& s : summary.significant) {
    const TestOutcome& o = outcomes[s.outcome_index];
    nlohmann::json row;
    row["stat"] = s.stat;
    row["p_adj"] = s.p_adj;
    row["moderate_or_high"] = s.moderate_or_high;
    row["window"] = to_string(o.spec.window);
    row["scope_kind"] = to_string(o.spec.scope.kind);
    row["scope_id"] = scopes.id_of(o.spec.scope);
    if (o.kind == TestKind::ks) row["percentile"] = o.percentile;
    sig.push_back(row);
  }
  j["significant"] = sig;
  return j;
}

void write_histograms(std::ostream& out, const SuiteSummary& s) {
  out << "# bin_low,bin_high,raw_count,adj_count\n";
  for (int b = 0; b < 20; ++b) {
    out << format_double(b / 20.0) << ',' << format_double((b + 1) / 20.0)
        << ',' << s.raw_hist[b] << ',' << s.adj_hist[b] << "\n";
  }
}

void write_sorted_coefficients(std::ostream& out, const SuiteSummary& s) {
  out << "# index,coefficient\n";
  for (std::size_t i = 0; i < s.coefficients_sorted.size(); ++i) {
    out << i << ',' << format_double(s.coefficients_sorted[i]) << "\n";
  }
}

// ---------------------------------------------------------------- commands

int cmd_validate(const CommonArgs& args) {
  LoadedInputs in = load_inputs(args);
  std::optional<UtcTime> from, to;
  if (!args.from.empty()) from = parse_time_arg(args.from, "--from");
  if (!args.to.empty()) to = parse_time_arg(args.to, "--to");
  const std::vector<Finding> findings = validate_dataset(in.dataset, from, to);

  RunManifest manifest;
  manifest.command = "validate";
  manifest.inputs = in.digests;
  auto out = open_output(args.out_dir, "findings.csv", manifest.outputs);
  out << "# severity,code,detail,count\n";
  bool any_error = false;
  for (const auto& f : findings) {
    any_error |= f.severity == Finding::Severity::error;
    out << (f.severity == Finding::Severity::error ? "error" : "warning")
        << ',' << f.code << ',' << f.detail << ',' << f.count << "\n";
  }
  finish_manifest(std::move(manifest), args);
  std::cout << "validate: " << findings.size() << " finding(s)\n";
  return any_error ? kExitInputError : kExitOk;
}

int cmd_timeline(const CommonArgs& args, const std::string& cls_name,
                 const std::string& granularity_name) {
  LoadedInputs in = load_inputs(args);
  if (in.neutron.samples.empty()) {
    throw std::invalid_argument("timeline requires --neutron");
  }
  const ErrorClass cls = parse_class(cls_name);
  const Granularity g = parse_granularity(granularity_name);
  const auto [from, to] = resolve_interval(args, in);

  const PairedSeries paired = paired_series(in, cls, g, from, to);
  const PairedSeries monthly =
      paired_series(in, cls, Granularity::month, from, to);

  RunManifest manifest;
  manifest.command = "timeline";
  manifest.inputs = in.digests;
  auto out = open_output(args.out_dir, "timeline.csv", manifest.outputs);
  out << "# window_start,window_end,neutron_mean,errors,month_start,"
         "month_neutron_mean,month_errors\n";
  for (std::size_t i = 0; i < paired.windows.size(); ++i) {
    const UtcTime month = floor_month(paired.windows[i].start);
    std::size_t mi = monthly.windows.size();
    for (std::size_t m = 0; m < monthly.windows.size(); ++m) {
      if (floor_month(monthly.windows[m].start) == month) {
        mi = m;
        break;
      }
    }
    out << format_iso8601(paired.windows[i].start) << ','
        << format_iso8601(paired.windows[i].end) << ','
        << format_double(paired.neutron[i]) << ','
        << format_double(paired.errors[i]) << ',';
    if (mi < monthly.windows.size()) {
      out << format_iso8601(monthly.windows[mi].start) << ','
          << format_double(monthly.neutron[mi]) << ','
          << format_double(monthly.errors[mi]) << "\n";
    } else {
      out << ",,\n";
    }
  }
  finish_manifest(std::move(manifest), args);
  return kExitOk;
}

struct SuiteArgs {
  std::string cls = "CE";
  std::string windows;
  std::string scopes;
  bool drop_zero_windows = false;
  bool dimm_scope = false;
  double alpha = 0.05;
  std::string percentiles = "90,95,99,99.9";
};

int cmd_suite(const CommonArgs& args, const SuiteArgs& sargs, TestKind kind) {
  LoadedInputs in = load_inputs(args);
  if (in.neutron.samples.empty()) {
    throw std::invalid_argument("correlation suites require --neutron");
  }
  const ErrorClass cls = parse_class(sargs.cls);
  const auto [from, to] = resolve_interval(args, in);

  SuiteOptions options;
  options.windows = parse_windows_arg(sargs.windows);
  options.scope_kinds = parse_scopes_arg(sargs.scopes);
  options.drop_zero_windows = sargs.drop_zero_windows;
  options.include_dimm_scope = sargs.dimm_scope;
  options.threads = resolve_threads(args.threads);
  if (kind == TestKind::ks) {
    options.percentiles.clear();
    std::stringstream ss(sargs.percentiles);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) options.percentiles.push_back(std::stod(item));
    }
    if (options.percentiles.empty()) {
      throw std::invalid_argument("ks needs at least one percentile");
    }
  }

  const SuiteRunner runner(in.dataset, in.neutron, from, to, options);
  const std::vector<TestOutcome> outcomes =
      kind == TestKind::kendall ? runner.run_kendall(cls) : runner.run_ks(cls);
  const SuiteSummary summary = summarize(outcomes, sargs.alpha);

  const std::string command = kind == TestKind::kendall ? "correlate" : "ks";
  RunManifest manifest;
  manifest.command = command;
  manifest.inputs = in.digests;
  {
    auto out = open_output(args.out_dir, "suite.csv", manifest.outputs);
    write_suite_table(out, outcomes, runner.scopes());
  }
  {
    auto out = open_output(args.out_dir, "p_hist.csv", manifest.outputs);
    write_histograms(out, summary);
  }
  if (kind == TestKind::kendall) {
    auto out =
        open_output(args.out_dir, "coefficients.csv", manifest.outputs);
    write_sorted_coefficients(out, summary);
  }
  {
    auto out = open_output(args.out_dir, "summary.json", manifest.outputs);
    out << summary_to_json(summary, outcomes, runner.scopes()).dump(2) << "\n";
  }
  finish_manifest(std::move(manifest), args);

  std::cout << command << ": " << outcomes.size() << " outcomes, "
            << summary.coefficients_sorted.size() << " tested, "
            << summary.significant.size() << " significant at " << sargs.alpha
            << "\n";
  return kExitOk;
}

int cmd_hourly(const CommonArgs& args, const std::string& cls_name,
               int utc_offset_hours, double exclude_fraction,
               bool transient_only) {
  LoadedInputs in = load_inputs(args);
  const ErrorClass cls = parse_class(cls_name);
  if (cls == ErrorClass::MB && exclude_fraction > 0) {
    throw std::invalid_argument(
        "--exclude-top-dimms needs DIMM identities; not applicable to MB");
  }
  auto [events, dimm_ids] = weighted_events(in.dataset, cls, transient_only);

  const auto before =
      hour_of_day_profile(events, utc_offset_hours * kSecondsPerHour);
  const TopDimmExclusion excl =
      exclude_top_dimms(events, exclude_fraction, dimm_ids);
  const auto after =
      hour_of_day_profile(excl.kept_events, utc_offset_hours * kSecondsPerHour);

  RunManifest manifest;
  manifest.command = "hourly";
  manifest.inputs = in.digests;
  {
    auto out = open_output(args.out_dir, "hourly.csv", manifest.outputs);
    out << "# hour,errors,errors_after_exclusion\n";
    for (int h = 0; h < 24; ++h) {
      out << h << ',' << format_double(before[h]) << ','
          << format_double(after[h]) << "\n";
    }
  }
  {
    auto out = open_output(args.out_dir, "excluded_dimms.csv",
                           manifest.outputs);
    out << "# dimm\n";
    for (std::uint32_t d : excl.excluded_dimms) out << dimm_ids[d] << "\n";
  }
  finish_manifest(std::move(manifest), args);
  return kExitOk;
}

int cmd_heatmap(const CommonArgs& args, const std::string& cls_name,
                const std::string& granularity_name, std::size_t x_bins,
                std::size_t y_bins, bool y_log) {
  LoadedInputs in = load_inputs(args);
  if (in.neutron.samples.empty()) {
    throw std::invalid_argument("heatmap requires --neutron");
  }
  const ErrorClass cls = parse_class(cls_name);
  const Granularity g = parse_granularity(granularity_name);
  const auto [from, to] = resolve_interval(args, in);
  const PairedSeries paired = paired_series(in, cls, g, from, to);
  const Heatmap hm = heatmap_bins(paired, x_bins, y_bins, y_log);

  RunManifest manifest;
  manifest.command = "heatmap";
  manifest.inputs = in.digests;
  auto out = open_output(args.out_dir, "heatmap.csv", manifest.outputs);
  out << "# x_low,x_high,y_low,y_high,count";
  if (y_log) out << " (y edges are log10 of the error value)";
  out << "\n";
  for (std::size_t by = 0; by < hm.y_bins; ++by) {
    for (std::size_t bx = 0; bx < hm.x_bins; ++bx) {
      out << format_double(hm.x_edges[bx]) << ','
          << format_double(hm.x_edges[bx + 1]) << ','
          << format_double(hm.y_edges[by]) << ','
          << format_double(hm.y_edges[by + 1]) << ','
          << hm.counts[by * hm.x_bins + bx] << "\n";
    }
  }
  finish_manifest(std::move(manifest), args);
  return kExitOk;
}

struct PredictArgs {
  std::string target = "ue";
  std::int64_t tick = 60;
  std::uint64_t seed = 1;
  bool permute_neutron = false;
  double undersample_ratio = 1.0;
  std::string grid = "full";
  double decision_threshold = 0.5;
  CostParams cost;
};

int cmd_predict(const CommonArgs& args, const PredictArgs& pargs) {
  LoadedInputs in = load_inputs(args);
  if (in.neutron.samples.empty()) {
    throw std::invalid_argument("predict requires --neutron");
  }
  const auto [from, to] = resolve_interval(args, in);
  if (pargs.target != "ue" && pargs.target != "ce") {
    throw std::invalid_argument("unknown target '" + pargs.target + "'");
  }
  const PredictionTarget target = pargs.target == "ue"
                                      ? PredictionTarget::ue_next_day
                                      : PredictionTarget::ce_next_hour;
  const unsigned threads = resolve_threads(args.threads);

  LabeledDataset ds =
      build_dataset(in.dataset, in.neutron, target, pargs.tick, from, to);
  if (pargs.permute_neutron) {
    permute_group(ds, FeatureGroup::neutron, pargs.seed);
  }
  const SplitIndices split = split_chronological(ds);
  std::vector<std::uint32_t> train = split.train;
  if (target == PredictionTarget::ue_next_day) {
    train = undersample_majority(ds, train, pargs.undersample_ratio,
                                 pargs.seed);
  }

  TuneGrid grid;
  if (pargs.grid == "full") {
    grid = TuneGrid::default_grid();
  } else if (pargs.grid == "small") {
    grid.candidates = {{50, 8, 1}};
  } else {
    throw std::invalid_argument("unknown grid '" + pargs.grid + "'");
  }
  const TuneResult tuned =
      tune(ds, train, split.validation, grid, pargs.seed, threads);

  // Retrain on train+validation with the winning hyperparameters.
  std::vector<std::uint32_t> train_val = train;
  train_val.insert(train_val.end(), split.validation.begin(),
                   split.validation.end());
  std::sort(train_val.begin(), train_val.end());
  const ForestModel model =
      train_forest(ds, train_val, tuned.best, pargs.seed, threads);

  std::vector<std::uint8_t> test_labels;
  test_labels.reserve(split.test.size());
  for (std::uint32_t r : split.test) test_labels.push_back(ds.y[r]);
  const std::vector<double> scores = predict_scores(model, ds, split.test);
  const double auc = evaluate_auc(scores, test_labels);
  const std::vector<double> importance = gini_group_importance(model);

  RunManifest manifest;
  manifest.command = "predict";
  manifest.inputs = in.digests;
  manifest.seeds = {pargs.seed};
  {
    auto out = open_output(args.out_dir, "model.txt", manifest.outputs);
    save_forest(out, model);
  }
  nlohmann::json report;
  report["target"] = pargs.target;
  report["tick_seconds"] = pargs.tick;
  report["permuted_neutron"] = pargs.permute_neutron;
  report["rows"] = ds.rows;
  report["auc"] = auc;
  report["validation_auc"] = tuned.validation_auc;
  report["hyperparams"] = {{"trees", tuned.best.trees},
                           {"max_depth", tuned.best.max_depth},
                           {"min_leaf", tuned.best.min_leaf}};
  nlohmann::json gi = nlohmann::json::object();
  for (int g = 0; g < kFeatureGroupCount; ++g) {
    gi[to_string(static_cast<FeatureGroup>(g))] = importance[g];
  }
  report["group_importance"] = gi;
  if (target == PredictionTarget::ue_next_day) {
    std::vector<std::uint8_t> preds(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
      preds[i] = scores[i] > pargs.decision_threshold ? 1 : 0;
    }
    report["saved_node_hours"] = cost_benefit(test_labels, preds, pargs.cost);
  }
  {
    auto out = open_output(args.out_dir, "report.json", manifest.outputs);
    out << report.dump(2) << "\n";
  }
  nlohmann::json config;
  config["target"] = pargs.target;
  config["tick_seconds"] = pargs.tick;
  config["permute_neutron"] = pargs.permute_neutron;
  config["undersample_ratio"] = pargs.undersample_ratio;
  config["grid"] = pargs.grid;
  config["decision_threshold"] = pargs.decision_threshold;
  config["cost"] = {{"mitigation", pargs.cost.mitigation_cost_node_hours},
                    {"benefit", pargs.cost.benefit_per_tp_node_hours},
                    {"training", pargs.cost.training_cost_node_hours}};
  manifest.config_json = config.dump();
  finish_manifest(std::move(manifest), args);
  std::cout << "predict: auc " << auc << "\n";
  return kExitOk;
}

int cmd_synth(const CommonArgs& args, const std::string& config_path) {
  std::ifstream cfg_in(config_path, std::ios::binary);
  if (!cfg_in) {
    throw std::invalid_argument("cannot open config '" + config_path + "'");
  }
  const SynthConfig config = load_synth_config(cfg_in);
  const SynthOutput generated = gen_dataset(config);

  RunManifest manifest;
  manifest.command = "synth";
  manifest.inputs.emplace_back(config_path, sha256_hex_of_file(config_path));
  manifest.seeds = {config.seed};
  manifest.config_json = synth_config_to_json(config);

  {
    auto out = open_output(args.out_dir, "neutron.csv", manifest.outputs);
    write_neutron_log(out, generated.neutron);
  }
  {
    auto out = open_output(args.out_dir, "ce.csv", manifest.outputs);
    write_ce_log(out, generated.dataset.ce);
  }
  {
    auto out = open_output(args.out_dir, "ue.csv", manifest.outputs);
    write_ue_log(out, generated.dataset.ue);
  }
  {
    auto out = open_output(args.out_dir, "scrub.csv", manifest.outputs);
    write_scrub_log(out, generated.dataset.scrub);
  }
  {
    auto out = open_output(args.out_dir, "exposure.csv", manifest.outputs);
    write_exposure_log(out, generated.dataset.exposure);
  }
  {
    auto out = open_output(args.out_dir, "inventory.csv", manifest.outputs);
    write_inventory(out, generated.dataset.topology);
  }
  {
    auto out = open_output(args.out_dir, "jobs.csv", manifest.outputs);
    write_jobs_log(out, generated.jobs);
  }
  finish_manifest(std::move(manifest), args);
  std::cout << "synth: " << generated.dataset.ce.size() << " CEs, "
            << generated.dataset.ue.size() << " UEs, "
            << generated.dataset.scrub.size() << " scrub errors\n";
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cosmic-ray / DRAM-error correlation toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonArgs common;

  auto* validate = app.add_subcommand("validate", "Cross-check input files");
  add_input_options(validate, common);

  auto* timeline =
      app.add_subcommand("timeline", "Windowed neutron and error series");
  add_input_options(timeline, common);
  std::string tl_class = "CE", tl_granularity = "hour";
  timeline->add_option("--class", tl_class, "CE|UE|MB");
  timeline->add_option("--granularity", tl_granularity, "hour|day|week|month");

  SuiteArgs suite_args;
  auto* correlate =
      app.add_subcommand("correlate", "Kendall correlation suite");
  add_input_options(correlate, common);
  correlate->add_option("--class", suite_args.cls, "CE|UE|MB");
  correlate->add_option("--windows", suite_args.windows,
                        "Comma-separated granularities");
  correlate->add_option("--scopes", suite_args.scopes,
                        "Comma-separated scope kinds");
  correlate->add_flag("--drop-zero-windows", suite_args.drop_zero_windows,
                      "Drop windows with zero errors from the pairing");
  correlate->add_flag("--dimm-scope", suite_args.dimm_scope,
                      "Also enumerate per-DIMM scopes");
  correlate->add_option("--alpha", suite_args.alpha, "Significance level");

  auto* ks = app.add_subcommand("ks", "High-percentile KS suite");
  add_input_options(ks, common);
  ks->add_option("--class", suite_args.cls, "CE|UE|MB");
  ks->add_option("--windows", suite_args.windows,
                 "Comma-separated granularities");
  ks->add_option("--scopes", suite_args.scopes, "Comma-separated scope kinds");
  ks->add_option("--percentiles", suite_args.percentiles,
                 "Comma-separated neutron percentiles");
  ks->add_flag("--dimm-scope", suite_args.dimm_scope,
               "Also enumerate per-DIMM scopes");
  ks->add_option("--alpha", suite_args.alpha, "Significance level");

  auto* hourly = app.add_subcommand("hourly", "Hour-of-day error profile");
  add_input_options(hourly, common);
  std::string hr_class = "CE";
  int utc_offset = 0;
  double exclude_fraction = 0.0;
  bool transient_only = false;
  hourly->add_option("--class", hr_class, "CE|UE|MB");
  hourly->add_option("--utc-offset", utc_offset, "Fixed offset in hours");
  hourly->add_option("--exclude-top-dimms", exclude_fraction,
                     "Fraction of loudest DIMMs to drop");
  hourly->add_flag("--transient-only", transient_only,
                   "Keep only transient CEs");

  auto* heatmap =
      app.add_subcommand("heatmap", "Neutron-vs-errors observation histogram");
  add_input_options(heatmap, common);
  std::string hm_class = "CE", hm_granularity = "hour";
  std::size_t x_bins = 40, y_bins = 40;
  bool y_log = false;
  heatmap->add_option("--class", hm_class, "CE|UE|MB");
  heatmap->add_option("--granularity", hm_granularity, "hour|day|week|month");
  heatmap->add_option("--x-bins", x_bins, "Neutron-axis bins");
  heatmap->add_option("--y-bins", y_bins, "Error-axis bins");
  heatmap->add_flag("--y-log", y_log, "Log-scale error axis");

  PredictArgs predict_args;
  auto* predict = app.add_subcommand("predict", "Random-forest prediction");
  add_input_options(predict, common);
  predict->add_option("--target", predict_args.target, "ue|ce");
  predict->add_option("--tick", predict_args.tick, "Tick seconds");
  predict->add_option("--seed", predict_args.seed, "Training seed");
  predict->add_flag("--permute-neutron", predict_args.permute_neutron,
                    "Train the permuted-neutron reference model");
  predict->add_option("--undersample-ratio", predict_args.undersample_ratio,
                      "Negatives per positive for UE training");
  predict->add_option("--grid", predict_args.grid, "full|small");
  predict->add_option("--decision-threshold", predict_args.decision_threshold,
                      "Score cut for mitigation decisions");
  predict->add_option("--mitigation-cost",
                      predict_args.cost.mitigation_cost_node_hours,
                      "Node-hours per mitigation");
  predict->add_option("--benefit", predict_args.cost.benefit_per_tp_node_hours,
                      "Node-hours saved per true positive");
  predict->add_option("--training-cost",
                      predict_args.cost.training_cost_node_hours,
                      "Node-hours consumed by training");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  std::string config_path;
  synth->add_option("--config", config_path, "JSON config")->required();
  synth->add_option("--out", common.out_dir, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(validate)) return cmd_validate(common);
    if (app.got_subcommand(timeline)) {
      return cmd_timeline(common, tl_class, tl_granularity);
    }
    if (app.got_subcommand(correlate)) {
      return cmd_suite(common, suite_args, TestKind::kendall);
    }
    if (app.got_subcommand(ks)) {
      return cmd_suite(common, suite_args, TestKind::ks);
    }
    if (app.got_subcommand(hourly)) {
      return cmd_hourly(common, hr_class, utc_offset, exclude_fraction,
                        transient_only);
    }
    if (app.got_subcommand(heatmap)) {
      return cmd_heatmap(common, hm_class, hm_granularity, x_bins, y_bins,
                         y_log);
    }
    if (app.got_subcommand(predict)) return cmd_predict(common, predict_args);
    if (app.got_subcommand(synth)) return cmd_synth(common, config_path);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
  return kExitOk;
}
