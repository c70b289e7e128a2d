#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

#include "tfkg/records.hpp"

namespace tfkg {

struct GbdtParams {
  std::size_t n_trees = 30;
  std::size_t max_depth = 3;
  double shrinkage = 0.1;
  std::size_t min_samples_leaf = 2;
};

/// Flat tree node. Internal nodes send x[feature] <= threshold to `left`.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
  int leaf_ordinal = -1;

  bool is_leaf() const noexcept { return feature < 0; }
};

class RegressionTree {
 public:
  RegressionTree() = default;
  /// Node 0 is the root. Throws ArgumentError if leaf ordinals are not a
  /// permutation of 0..n_leaves-1 or a child index is out of range.
  explicit RegressionTree(std::vector<TreeNode> nodes);

  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  std::size_t leaf_count() const noexcept { return leaf_count_; }

  const TreeNode& leaf_for(std::span<const double> x) const;

 private:
  std::vector<TreeNode> nodes_;
  std::size_t leaf_count_ = 0;
};

struct GbdtModel {
  double init_score = 0.0;
  double shrinkage = 1.0;
  GbdtParams params;
  std::size_t feature_count = kFeatureCount;
  std::vector<RegressionTree> trees;

  /// Length of every feature_cross vector.
  std::size_t total_leaves() const noexcept;
};

/// Row-major sample matrix.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

FeatureMatrix to_matrix(std::span<const TransformerRecord> records);

/// Fault -> 1, Stable -> 0.
std::vector<double> label_targets(std::span<const TransformerRecord> records);

struct SplitChoice {
  bool found = false;
  std::size_t feature = 0;
  double threshold = 0.0;
  double gain = 0.0;  // reduction in sum of squared errors
};

/// Greedy split over all midpoints between consecutive distinct values of each
/// feature, restricted to `samples`. Ties keep the lowest feature, then the
/// lowest threshold. Both children must hold at least min_samples_leaf rows.
SplitChoice best_split(const FeatureMatrix& x, std::span<const double> targets,
                       std::span<const std::size_t> samples, std::size_t min_samples_leaf);

/// Depth-bounded least-squares regression tree; leaf value is the mean target.
RegressionTree fit_tree(const FeatureMatrix& x, std::span<const double> targets,
                        std::size_t max_depth, std::size_t min_samples_leaf);

/// Squared-error gradient boosting on arbitrary real targets.
GbdtModel fit_gbdt(const FeatureMatrix& x, std::span<const double> targets, const GbdtParams& params);

/// Boosting on the Fault/Stable label. Needs at least two records, both classes
/// present, and at least min_samples_leaf records.
GbdtModel train_gbdt(std::span<const TransformerRecord> records, const GbdtParams& params);

double predict_raw(const GbdtModel& model, std::span<const double> features);

/// Concatenated one-hot leaf indicators, one block per tree.
std::vector<double> feature_cross(const GbdtModel& model, std::span<const double> features);

/// Training MSE of the partial ensembles f_0 .. f_M.
std::vector<double> staged_mse(const GbdtModel& model, const FeatureMatrix& x,
                               std::span<const double> targets);

nlohmann::json to_json(const GbdtModel& model);
GbdtModel gbdt_from_json(const nlohmann::json& doc);

}  // namespace tfkg
