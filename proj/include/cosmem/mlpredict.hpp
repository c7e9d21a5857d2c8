#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cosmem/types.hpp"

namespace cosmem {

enum class PredictionTarget : std::uint8_t { ue_next_day, ce_next_hour };

enum class FeatureGroup : std::uint8_t { ce, location, ue, ue_warning, neutron };
inline constexpr int kFeatureGroupCount = 5;

const char* to_string(FeatureGroup g);

// Row-major feature matrix, one row per (DIMM, tick) in chronological
// tick-major order. The neutron feature block is identical across DIMMs at
// the same tick.
struct LabeledDataset {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> x;
  std::vector<std::uint8_t> y;
  std::vector<FeatureGroup> feature_group; // per column
  std::vector<std::string> feature_names;
  std::vector<std::uint32_t> tick_of_row;
  std::size_t tick_count = 0;

  double at(std::size_t r, std::size_t c) const { return x[r * cols + c]; }
  const double* row(std::size_t r) const { return &x[r * cols]; }
};

// Builds per-(DIMM, tick) vectors from the logs. Features at tick t use only
// data with timestamp <= t; the label looks ahead one horizon (1 day for UE,
// 1 hour for CE). Error history features are cumulative plus trailing-window
// counts; the neutron block is mean / standard deviation / percentage
// variation over trailing 1h, 5h, 10h, 1d, 1w and 1m spans.
LabeledDataset build_dataset(const Dataset& dataset,
                             const NeutronSeries& neutron,
                             PredictionTarget target,
                             std::int64_t tick_seconds, UtcTime from,
                             UtcTime to);

struct SplitIndices {
  std::vector<std::uint32_t> train;      // first 60% of ticks
  std::vector<std::uint32_t> validation; // next 20%
  std::vector<std::uint32_t> test;       // final 20%
};

// Chronological 60/20/20 split at tick boundaries; no shuffling.
SplitIndices split_chronological(const LabeledDataset& ds);

// Keeps all positives and a seeded sample of negatives, ratio negatives per
// positive. Row order stays chronological.
std::vector<std::uint32_t> undersample_majority(
    const LabeledDataset& ds, std::span<const std::uint32_t> rows,
    double ratio, std::uint64_t seed);

struct ForestHyperparams {
  std::size_t trees = 100;
  std::size_t max_depth = 0; // 0 = unlimited
  std::size_t min_leaf = 1;

  friend bool operator==(const ForestHyperparams&,
                         const ForestHyperparams&) = default;
};

struct ForestModel {
  struct Node {
    std::int32_t feature = -1; // -1 = leaf
    double threshold = 0.0;
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    double value = 0.0; // positive fraction at leaves
  };
  std::vector<std::vector<Node>> trees;
  std::vector<double> feature_importance; // mean impurity decrease per feature
  std::vector<FeatureGroup> feature_group;
  std::vector<std::string> feature_names;
  ForestHyperparams hyperparams;
  std::uint64_t seed = 0;

  double predict(const double* row) const;
};

// Bootstrap aggregation with sqrt-feature subsampling and Gini splits.
// Per-tree randomness derives from (seed, tree index): parallel and serial
// training produce identical forests.
ForestModel train_forest(const LabeledDataset& ds,
                         std::span<const std::uint32_t> rows,
                         const ForestHyperparams& hp, std::uint64_t seed,
                         unsigned threads = 1);

std::vector<double> predict_scores(const ForestModel& model,
                                   const LabeledDataset& ds,
                                   std::span<const std::uint32_t> rows);

// Trapezoidal ROC area; ties handled by average rank, so constant scores
// give 0.5 exactly.
double evaluate_auc(std::span<const double> scores,
                    std::span<const std::uint8_t> labels);

// Applies one seeded row permutation jointly to every column of the group.
void permute_group(LabeledDataset& ds, FeatureGroup group, std::uint64_t seed);

// Per-group share of total impurity decrease; sums to 1, or all zeros for a
// forest with no splits.
std::vector<double> gini_group_importance(const ForestModel& model);

struct TuneGrid {
  std::vector<ForestHyperparams> candidates;
  static TuneGrid default_grid();
};

struct TuneResult {
  ForestHyperparams best;
  double validation_auc = 0.0;
};

// Trains each candidate on `train`, scores on `validation`, returns the best
// (ties keep the earliest candidate). Callers retrain on train+validation.
TuneResult tune(const LabeledDataset& ds, std::span<const std::uint32_t> train,
                std::span<const std::uint32_t> validation, const TuneGrid& grid,
                std::uint64_t seed, unsigned threads = 1);

struct CostParams {
  double mitigation_cost_node_hours = 0.5;
  double benefit_per_tp_node_hours = 24.0;
  double training_cost_node_hours = 10.0;
};

// saved = TP * benefit - positives * cost - training cost.
double cost_benefit(std::span<const std::uint8_t> y_true,
                    std::span<const std::uint8_t> y_pred,
                    const CostParams& params);

// Self-describing text serialization; load(save(m)) reproduces predictions.
void save_forest(std::ostream& out, const ForestModel& model);
ForestModel load_forest(std::istream& in);

} // namespace cosmem
