#include "cosmem/mlpredict.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "cosmem/ingest.hpp"
#include "cosmem/kernels.hpp"
#include "cosmem/parallel.hpp"
#include "cosmem/rng.hpp"

namespace cosmem {

const char* to_string(FeatureGroup g) {
  switch (g) {
    case FeatureGroup::ce:
      return "ce";
    case FeatureGroup::location:
      return "location";
    case FeatureGroup::ue:
      return "ue";
    case FeatureGroup::ue_warning:
      return "ue_warning";
    case FeatureGroup::neutron:
      return "neutron";
  }
  return "?";
}

namespace {

constexpr std::int64_t kNeutronSpans[6] = {
    kSecondsPerHour,      5 * kSecondsPerHour, 10 * kSecondsPerHour,
    kSecondsPerDay,       kSecondsPerWeek,     30 * kSecondsPerDay};
const char* kNeutronSpanNames[6] = {"1h", "5h", "10h", "1d", "1w", "1m"};

struct DimmHistory {
  // Sorted per-DIMM event times; CE entries carry multiplicity.
  std::vector<std::pair<UtcTime, double>> ce;
  std::vector<UtcTime> ue;       // uncorrected_ecc + scrub_failed
  std::vector<UtcTime> warnings; // ue_warning
  std::vector<std::uint32_t> ranks, banks, rows, columns; // aligned with ce
  // Pointer state advanced tick by tick. Trailing weight over a span is
  // cumulative weight minus the weight already aged out of the span.
  std::size_t ce_cum = 0, ce_1h = 0, ce_1d = 0, ce_1w = 0;
  double ce_weight_cum = 0;
  double ce_removed_1h = 0, ce_removed_1d = 0, ce_removed_1w = 0;
  std::size_t ce_label = 0, ue_label = 0;
  std::set<std::uint32_t> distinct_ranks, distinct_banks, distinct_rows,
      distinct_columns;
};

// Events in (lo, hi], for the small per-DIMM UE/warning vectors.
std::size_t count_between(const std::vector<UtcTime>& v, UtcTime lo,
                          UtcTime hi) {
  return static_cast<std::size_t>(
      std::upper_bound(v.begin(), v.end(), hi) -
      std::upper_bound(v.begin(), v.end(), lo));
}

} // namespace

LabeledDataset build_dataset(const Dataset& dataset,
                             const NeutronSeries& neutron,
                             PredictionTarget target,
                             std::int64_t tick_seconds, UtcTime from,
                             UtcTime to) {
  if (tick_seconds <= 0) {
    throw std::invalid_argument("build_dataset: tick must be positive");
  }
  const std::int64_t horizon =
      target == PredictionTarget::ue_next_day ? kSecondsPerDay : kSecondsPerHour;

  // DIMM universe: inventory plus DIMMs seen only in logs.
  std::vector<std::string> dimm_ids;
  for (const auto& d : dataset.topology.dimms()) dimm_ids.push_back(d.dimm);
  for (const auto& e : dataset.ce) dimm_ids.push_back(e.dimm);
  for (const auto& e : dataset.ue) dimm_ids.push_back(e.dimm);
  std::sort(dimm_ids.begin(), dimm_ids.end());
  dimm_ids.erase(std::unique(dimm_ids.begin(), dimm_ids.end()),
                 dimm_ids.end());

  std::unordered_map<std::string, std::size_t> dimm_index;
  for (std::size_t i = 0; i < dimm_ids.size(); ++i) dimm_index[dimm_ids[i]] = i;

  std::vector<DimmHistory> history(dimm_ids.size());
  for (const auto& e : dataset.ce) {
    DimmHistory& h = history[dimm_index[e.dimm]];
    h.ce.emplace_back(e.timestamp, static_cast<double>(e.multiplicity));
    h.ranks.push_back(e.rank.value_or(0xffffffffu));
    h.banks.push_back(e.bank.value_or(0xffffffffu));
    h.rows.push_back(e.row.value_or(0xffffffffu));
    h.columns.push_back(e.column.value_or(0xffffffffu));
  }
  for (const auto& e : dataset.ue) {
    DimmHistory& h = history[dimm_index[e.dimm]];
    if (e.cause == UeCause::ue_warning) {
      h.warnings.push_back(e.timestamp);
    } else {
      h.ue.push_back(e.timestamp);
    }
  }
  // Input logs are time-sorted per file, which keeps per-DIMM order too; be
  // defensive about programmatic callers.
  for (auto& h : history) {
    std::sort(h.ue.begin(), h.ue.end());
    std::sort(h.warnings.begin(), h.warnings.end());
  }

  LabeledDataset ds;
  ds.feature_names = {"ce_total", "ce_1h", "ce_1d", "ce_1w",
                      "distinct_ranks", "distinct_banks", "distinct_rows",
                      "distinct_columns", "ue_total", "ue_1d", "ue_1w",
                      "warn_total", "warn_1d", "warn_1w"};
  ds.feature_group.assign(
      {FeatureGroup::ce, FeatureGroup::ce, FeatureGroup::ce, FeatureGroup::ce,
       FeatureGroup::location, FeatureGroup::location, FeatureGroup::location,
       FeatureGroup::location, FeatureGroup::ue, FeatureGroup::ue,
       FeatureGroup::ue, FeatureGroup::ue_warning, FeatureGroup::ue_warning,
       FeatureGroup::ue_warning});
  for (int span = 0; span < 6; ++span) {
    for (const char* stat : {"mean", "std", "pctvar"}) {
      ds.feature_names.push_back(std::string("neutron_") + stat + "_" +
                                 kNeutronSpanNames[span]);
      ds.feature_group.push_back(FeatureGroup::neutron);
    }
  }
  ds.cols = ds.feature_names.size();

  std::vector<UtcTime> ticks;
  for (UtcTime t = from; t + horizon <= to; t = t + tick_seconds) {
    ticks.push_back(t);
  }
  ds.tick_count = ticks.size();
  ds.rows = ticks.size() * dimm_ids.size();
  ds.x.assign(ds.rows * ds.cols, 0.0);
  ds.y.assign(ds.rows, 0);
  ds.tick_of_row.assign(ds.rows, 0);

  // Neutron prefix sums for O(log n) trailing-window stats per tick.
  const auto& samples = neutron.samples;
  std::vector<double> prefix(samples.size() + 1, 0.0);
  std::vector<double> prefix_sq(samples.size() + 1, 0.0);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    prefix[i + 1] = prefix[i] + samples[i].rate;
    prefix_sq[i + 1] = prefix_sq[i] + samples[i].rate * samples[i].rate;
  }
  auto sample_index = [&](UtcTime t) {
    // first sample with timestamp > t
    return static_cast<std::size_t>(
        std::upper_bound(samples.begin(), samples.end(), t,
                         [](UtcTime v, const NeutronSample& s) {
                           return v < s.timestamp;
                         }) -
        samples.begin());
  };

  std::vector<double> neutron_block(18, 0.0);
  std::size_t row = 0;
  for (std::size_t ti = 0; ti < ticks.size(); ++ti) {
    const UtcTime t = ticks[ti];
    for (int span = 0; span < 6; ++span) {
      const std::size_t hi = sample_index(t);
      const std::size_t lo = sample_index(t - kNeutronSpans[span]);
      double mean = 0, stddev = 0, pctvar = 0;
      if (hi > lo) {
        const double n = static_cast<double>(hi - lo);
        mean = (prefix[hi] - prefix[lo]) / n;
        const double ms = (prefix_sq[hi] - prefix_sq[lo]) / n;
        stddev = std::sqrt(std::max(0.0, ms - mean * mean));
        const double first = samples[lo].rate;
        const double last = samples[hi - 1].rate;
        pctvar = first == 0.0 ? 0.0 : (last - first) / first;
      }
      neutron_block[span * 3 + 0] = mean;
      neutron_block[span * 3 + 1] = stddev;
      neutron_block[span * 3 + 2] = pctvar;
    }

    for (std::size_t di = 0; di < dimm_ids.size(); ++di, ++row) {
      DimmHistory& h = history[di];
      ds.tick_of_row[row] = static_cast<std::uint32_t>(ti);

      // Advance cumulative pointer through events with timestamp <= t.
      while (h.ce_cum < h.ce.size() && h.ce[h.ce_cum].first <= t) {
        h.ce_weight_cum += h.ce[h.ce_cum].second;
        if (h.ranks[h.ce_cum] != 0xffffffffu)
          h.distinct_ranks.insert(h.ranks[h.ce_cum]);
        if (h.banks[h.ce_cum] != 0xffffffffu)
          h.distinct_banks.insert(h.banks[h.ce_cum]);
        if (h.rows[h.ce_cum] != 0xffffffffu)
          h.distinct_rows.insert(h.rows[h.ce_cum]);
        if (h.columns[h.ce_cum] != 0xffffffffu)
          h.distinct_columns.insert(h.columns[h.ce_cum]);
        ++h.ce_cum;
      }
      auto age_out = [&](std::size_t& ptr, double& removed,
                         std::int64_t span) {
        while (ptr < h.ce_cum && h.ce[ptr].first <= t - span) {
          removed += h.ce[ptr].second;
          ++ptr;
        }
      };
      age_out(h.ce_1h, h.ce_removed_1h, kSecondsPerHour);
      age_out(h.ce_1d, h.ce_removed_1d, kSecondsPerDay);
      age_out(h.ce_1w, h.ce_removed_1w, kSecondsPerWeek);

      const UtcTime epoch{std::numeric_limits<std::int64_t>::min()};
      const std::size_t ue_cum = count_between(h.ue, epoch, t);
      const std::size_t ue_1d = count_between(h.ue, t - kSecondsPerDay, t);
      const std::size_t ue_1w = count_between(h.ue, t - kSecondsPerWeek, t);
      const std::size_t warn_cum = count_between(h.warnings, epoch, t);
      const std::size_t warn_1d =
          count_between(h.warnings, t - kSecondsPerDay, t);
      const std::size_t warn_1w =
          count_between(h.warnings, t - kSecondsPerWeek, t);

      double* x = &ds.x[row * ds.cols];
      x[0] = h.ce_weight_cum;
      x[1] = h.ce_weight_cum - h.ce_removed_1h;
      x[2] = h.ce_weight_cum - h.ce_removed_1d;
      x[3] = h.ce_weight_cum - h.ce_removed_1w;
      x[4] = static_cast<double>(h.distinct_ranks.size());
      x[5] = static_cast<double>(h.distinct_banks.size());
      x[6] = static_cast<double>(h.distinct_rows.size());
      x[7] = static_cast<double>(h.distinct_columns.size());
      x[8] = static_cast<double>(ue_cum);
      x[9] = static_cast<double>(ue_1d);
      x[10] = static_cast<double>(ue_1w);
      x[11] = static_cast<double>(warn_cum);
      x[12] = static_cast<double>(warn_1d);
      x[13] = static_cast<double>(warn_1w);
      std::copy(neutron_block.begin(), neutron_block.end(), x + 14);

      // Label: a target-class event for this DIMM within (t, t + horizon].
      bool label = false;
      if (target == PredictionTarget::ue_next_day) {
        while (h.ue_label < h.ue.size() && h.ue[h.ue_label] <= t) ++h.ue_label;
        label = h.ue_label < h.ue.size() &&
                h.ue[h.ue_label] <= t + horizon;
      } else {
        while (h.ce_label < h.ce.size() && h.ce[h.ce_label].first <= t)
          ++h.ce_label;
        label = h.ce_label < h.ce.size() &&
                h.ce[h.ce_label].first <= t + horizon;
      }
      ds.y[row] = label ? 1 : 0;
    }
  }
  return ds;
}

SplitIndices split_chronological(const LabeledDataset& ds) {
  SplitIndices s;
  const std::size_t t60 = ds.tick_count * 6 / 10;
  const std::size_t t80 = ds.tick_count * 8 / 10;
  for (std::uint32_t r = 0; r < ds.rows; ++r) {
    const std::uint32_t tick = ds.tick_of_row[r];
    if (tick < t60) {
      s.train.push_back(r);
    } else if (tick < t80) {
      s.validation.push_back(r);
    } else {
      s.test.push_back(r);
    }
  }
  return s;
}

std::vector<std::uint32_t> undersample_majority(
    const LabeledDataset& ds, std::span<const std::uint32_t> rows, double ratio,
    std::uint64_t seed) {
  if (ratio <= 0) throw std::invalid_argument("undersample: ratio must be > 0");
  std::vector<std::uint32_t> positives, negatives;
  for (std::uint32_t r : rows) {
    (ds.y[r] ? positives : negatives).push_back(r);
  }
  const auto target = static_cast<std::size_t>(
      ratio * static_cast<double>(positives.size()));
  if (negatives.size() > target) {
    auto rng = make_stream(seed, "undersample");
    for (std::size_t i = 0; i < target; ++i) {
      const std::size_t j = i + uniform_below(rng, negatives.size() - i);
      std::swap(negatives[i], negatives[j]);
    }
    negatives.resize(target);
  }
  std::vector<std::uint32_t> out;
  out.reserve(positives.size() + negatives.size());
  out.insert(out.end(), positives.begin(), positives.end());
  out.insert(out.end(), negatives.begin(), negatives.end());
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

struct TreeBuilder {
  const LabeledDataset& ds;
  const ForestHyperparams& hp;
  std::mt19937_64 rng;
  std::vector<ForestModel::Node> nodes;
  std::vector<double> importance; // impurity decrease, root-normalized
  std::vector<std::uint32_t> samples;
  std::size_t feature_sample_size;

  // scratch
  std::vector<std::pair<double, std::uint8_t>> sorted;
  std::vector<double> values, prefix_pos;
  std::vector<std::uint32_t> feature_pool;

  void build() {
    nodes.clear();
    nodes.reserve(64);
    grow(0, samples.size(), 0);
  }

  // Grows the subtree over samples[begin, end); returns its node index.
  std::uint32_t grow(std::size_t begin, std::size_t end, std::size_t depth) {
    const std::uint32_t id = static_cast<std::uint32_t>(nodes.size());
    nodes.emplace_back();
    const std::size_t n = end - begin;
    double pos = 0;
    for (std::size_t i = begin; i < end; ++i) pos += ds.y[samples[i]];

    auto make_leaf = [&] {
      nodes[id].feature = -1;
      nodes[id].value = pos / static_cast<double>(n);
      return id;
    };
    if (n < 2 * hp.min_leaf || pos == 0 ||
        pos == static_cast<double>(n) ||
        (hp.max_depth != 0 && depth >= hp.max_depth)) {
      return make_leaf();
    }

    // Draw the per-split feature subset.
    for (std::size_t i = 0; i < feature_sample_size; ++i) {
      const std::size_t j = i + uniform_below(rng, feature_pool.size() - i);
      std::swap(feature_pool[i], feature_pool[j]);
    }

    int best_feature = -1;
    kernels::GiniSplit best;
    best.impurity = std::numeric_limits<double>::infinity();
    double best_threshold = 0;
    for (std::size_t fi = 0; fi < feature_sample_size; ++fi) {
      const std::uint32_t f = feature_pool[fi];
      sorted.clear();
      for (std::size_t i = begin; i < end; ++i) {
        sorted.emplace_back(ds.at(samples[i], f), ds.y[samples[i]]);
      }
      std::sort(sorted.begin(), sorted.end());
      values.resize(n);
      prefix_pos.resize(n);
      double acc = 0;
      for (std::size_t i = 0; i < n; ++i) {
        values[i] = sorted[i].first;
        prefix_pos[i] = acc;
        acc += sorted[i].second;
      }
      const kernels::GiniSplit split = kernels::gini_best_split(
          values.data(), prefix_pos.data(), n, pos, hp.min_leaf,
          n - hp.min_leaf + 1);
      if (split.index != 0 && split.impurity < best.impurity) {
        best = split;
        best_feature = static_cast<int>(f);
        best_threshold =
            (values[split.index - 1] + values[split.index]) / 2.0;
      }
    }
    if (best_feature < 0) return make_leaf();

    const double parent_impurity =
        pos * (static_cast<double>(n) - pos) / static_cast<double>(n);
    importance[best_feature] +=
        (parent_impurity - best.impurity) / static_cast<double>(samples.size());

    // Partition in place; stable to keep the recursion deterministic.
    const auto mid = std::stable_partition(
        samples.begin() + begin, samples.begin() + end, [&](std::uint32_t r) {
          return ds.at(r, best_feature) < best_threshold;
        });
    const std::size_t mid_idx = static_cast<std::size_t>(mid - samples.begin());
    // Midpoint thresholds always separate the sorted halves.
    nodes[id].feature = best_feature;
    nodes[id].threshold = best_threshold;
    const std::uint32_t left = grow(begin, mid_idx, depth + 1);
    const std::uint32_t right = grow(mid_idx, end, depth + 1);
    nodes[id].left = left;
    nodes[id].right = right;
    return id;
  }
};

} // namespace

double ForestModel::predict(const double* row) const {
  double sum = 0;
  for (const auto& tree : trees) {
    std::uint32_t at = 0;
    while (tree[at].feature >= 0) {
      at = row[tree[at].feature] < tree[at].threshold ? tree[at].left
                                                      : tree[at].right;
    }
    sum += tree[at].value;
  }
  return trees.empty() ? 0.0 : sum / static_cast<double>(trees.size());
}

ForestModel train_forest(const LabeledDataset& ds,
                         std::span<const std::uint32_t> rows,
                         const ForestHyperparams& hp, std::uint64_t seed,
                         unsigned threads) {
  if (rows.empty()) throw std::invalid_argument("train_forest: no rows");
  ForestModel model;
  model.hyperparams = hp;
  model.seed = seed;
  model.feature_group = ds.feature_group;
  model.feature_names = ds.feature_names;
  model.trees.resize(hp.trees);
  model.feature_importance.assign(ds.cols, 0.0);

  std::vector<std::vector<double>> tree_importance(
      hp.trees, std::vector<double>(ds.cols, 0.0));
  const std::size_t feature_sample = static_cast<std::size_t>(
      std::ceil(std::sqrt(static_cast<double>(ds.cols))));

  parallel_for(hp.trees, threads, [&](std::size_t t) {
    TreeBuilder builder{ds,
                        hp,
                        make_stream(seed, t),
                        {},
                        std::vector<double>(ds.cols, 0.0),
                        {},
                        feature_sample,
                        {},
                        {},
                        {},
                        {}};
    builder.samples.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      builder.samples[i] = rows[uniform_below(builder.rng, rows.size())];
    }
    builder.feature_pool.resize(ds.cols);
    for (std::size_t f = 0; f < ds.cols; ++f) {
      builder.feature_pool[f] = static_cast<std::uint32_t>(f);
    }
    builder.build();
    model.trees[t] = std::move(builder.nodes);
    tree_importance[t] = std::move(builder.importance);
  });

  for (const auto& imp : tree_importance) {
    for (std::size_t f = 0; f < ds.cols; ++f) {
      model.feature_importance[f] += imp[f];
    }
  }
  for (double& v : model.feature_importance) {
    v /= static_cast<double>(hp.trees);
  }
  return model;
}

std::vector<double> predict_scores(const ForestModel& model,
                                   const LabeledDataset& ds,
                                   std::span<const std::uint32_t> rows) {
  std::vector<double> scores(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    scores[i] = model.predict(ds.row(rows[i]));
  }
  return scores;
}

double evaluate_auc(std::span<const double> scores,
                    std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("evaluate_auc: size mismatch");
  }
  const std::size_t n = scores.size();
  std::size_t pos = 0;
  for (auto y : labels) pos += y;
  const std::size_t neg = n - pos;
  if (pos == 0 || neg == 0) return 0.5;

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });
  // Average ranks across ties (1-based).
  double rank_sum_pos = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) +
                             static_cast<double>(j)) /
                            2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]]) rank_sum_pos += avg_rank;
    }
    i = j;
  }
  const double p = static_cast<double>(pos);
  return (rank_sum_pos - p * (p + 1) / 2.0) /
         (p * static_cast<double>(neg));
}

void permute_group(LabeledDataset& ds, FeatureGroup group, std::uint64_t seed) {
  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < ds.cols; ++c) {
    if (ds.feature_group[c] == group) cols.push_back(c);
  }
  if (cols.empty()) return;
  std::vector<std::size_t> perm(ds.rows);
  for (std::size_t r = 0; r < ds.rows; ++r) perm[r] = r;
  auto rng = make_stream(seed, "permute-group");
  for (std::size_t r = 0; r + 1 < ds.rows; ++r) {
    const std::size_t j = r + uniform_below(rng, ds.rows - r);
    std::swap(perm[r], perm[j]);
  }
  // One permutation applied jointly: the group's internal structure is
  // preserved, only its alignment with the labels is broken.
  std::vector<double> column(ds.rows);
  for (std::size_t c : cols) {
    for (std::size_t r = 0; r < ds.rows; ++r) {
      column[r] = ds.at(perm[r], c);
    }
    for (std::size_t r = 0; r < ds.rows; ++r) {
      ds.x[r * ds.cols + c] = column[r];
    }
  }
}

std::vector<double> gini_group_importance(const ForestModel& model) {
  std::vector<double> groups(kFeatureGroupCount, 0.0);
  for (std::size_t f = 0; f < model.feature_importance.size(); ++f) {
    groups[static_cast<int>(model.feature_group[f])] +=
        model.feature_importance[f];
  }
  double total = 0;
  for (double g : groups) total += g;
  if (total > 0) {
    for (double& g : groups) g /= total;
  }
  return groups;
}

TuneGrid TuneGrid::default_grid() {
  TuneGrid grid;
  for (std::size_t trees : {100, 300}) {
    for (std::size_t depth : {std::size_t{8}, std::size_t{16}, std::size_t{0}}) {
      for (std::size_t leaf : {std::size_t{1}, std::size_t{5}}) {
        grid.candidates.push_back({trees, depth, leaf});
      }
    }
  }
  return grid;
}

TuneResult tune(const LabeledDataset& ds, std::span<const std::uint32_t> train,
                std::span<const std::uint32_t> validation, const TuneGrid& grid,
                std::uint64_t seed, unsigned threads) {
  if (grid.candidates.empty()) {
    throw std::invalid_argument("tune: empty grid");
  }
  std::vector<std::uint8_t> val_labels;
  val_labels.reserve(validation.size());
  for (std::uint32_t r : validation) val_labels.push_back(ds.y[r]);

  TuneResult result;
  result.validation_auc = -1;
  for (const auto& hp : grid.candidates) {
    const ForestModel model = train_forest(ds, train, hp, seed, threads);
    const double auc =
        evaluate_auc(predict_scores(model, ds, validation), val_labels);
    if (auc > result.validation_auc) {
      result.validation_auc = auc;
      result.best = hp;
    }
  }
  return result;
}

double cost_benefit(std::span<const std::uint8_t> y_true,
                    std::span<const std::uint8_t> y_pred,
                    const CostParams& params) {
  if (y_true.size() != y_pred.size()) {
    throw std::invalid_argument("cost_benefit: size mismatch");
  }
  double tp = 0, positives = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_pred[i]) {
      ++positives;
      if (y_true[i]) ++tp;
    }
  }
  return tp * params.benefit_per_tp_node_hours -
         positives * params.mitigation_cost_node_hours -
         params.training_cost_node_hours;
}

void save_forest(std::ostream& out, const ForestModel& model) {
  out << "cosmem-forest v1\n";
  out << "seed " << model.seed << "\n";
  out << "hyperparams trees " << model.hyperparams.trees << " max_depth "
      << model.hyperparams.max_depth << " min_leaf "
      << model.hyperparams.min_leaf << "\n";
  out << "features " << model.feature_names.size() << "\n";
  for (std::size_t f = 0; f < model.feature_names.size(); ++f) {
    out << "feature " << f << ' ' << to_string(model.feature_group[f]) << ' '
        << model.feature_names[f] << ' '
        << format_double(model.feature_importance[f]) << "\n";
  }
  out << "trees " << model.trees.size() << "\n";
  for (const auto& tree : model.trees) {
    out << "tree " << tree.size() << "\n";
    for (const auto& n : tree) {
      out << n.feature << ' ' << format_double(n.threshold) << ' ' << n.left
          << ' ' << n.right << ' ' << format_double(n.value) << "\n";
    }
  }
}

namespace {

FeatureGroup group_from_name(const std::string& name) {
  for (int g = 0; g < kFeatureGroupCount; ++g) {
    if (name == to_string(static_cast<FeatureGroup>(g))) {
      return static_cast<FeatureGroup>(g);
    }
  }
  throw std::invalid_argument("load_forest: unknown feature group '" + name +
                              "'");
}

} // namespace

ForestModel load_forest(std::istream& in) {
  auto bad = [](const std::string& what) {
    throw std::invalid_argument("load_forest: " + what);
  };
  std::string line;
  if (!std::getline(in, line) || line != "cosmem-forest v1") {
    bad("bad magic");
  }
  ForestModel model;
  std::string word;
  in >> word >> model.seed;
  if (word != "seed") bad("expected seed");
  in >> word >> word >> model.hyperparams.trees >> word >>
      model.hyperparams.max_depth >> word >> model.hyperparams.min_leaf;
  std::size_t features = 0;
  in >> word >> features;
  if (word != "features") bad("expected features");
  model.feature_names.resize(features);
  model.feature_group.resize(features);
  model.feature_importance.resize(features);
  for (std::size_t f = 0; f < features; ++f) {
    std::size_t idx;
    std::string group, name;
    double imp;
    in >> word >> idx >> group >> name >> imp;
    if (word != "feature" || idx != f) bad("bad feature row");
    model.feature_group[f] = group_from_name(group);
    model.feature_names[f] = name;
    model.feature_importance[f] = imp;
  }
  std::size_t trees = 0;
  in >> word >> trees;
  if (word != "trees") bad("expected trees");
  model.trees.resize(trees);
  for (std::size_t t = 0; t < trees; ++t) {
    std::size_t count = 0;
    in >> word >> count;
    if (word != "tree") bad("bad tree header");
    model.trees[t].resize(count);
    for (std::size_t n = 0; n < count; ++n) {
      auto& node = model.trees[t][n];
      in >> node.feature >> node.threshold >> node.left >> node.right >>
          node.value;
    }
  }
  if (!in) bad("truncated model");
  return model;
}

} // namespace cosmem
