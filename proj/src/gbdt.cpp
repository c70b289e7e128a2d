#include "tfkg/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tfkg/errors.hpp"

namespace tfkg {

namespace {

constexpr double kMinGain = 1e-14;

double mean_of(std::span<const double> targets, std::span<const std::size_t> samples) {
  double sum = 0.0;
  for (std::size_t i : samples) sum += targets[i];
  return samples.empty() ? 0.0 : sum / static_cast<double>(samples.size());
}

class TreeBuilder {
 public:
  TreeBuilder(const FeatureMatrix& x, std::span<const double> targets, std::size_t max_depth,
              std::size_t min_samples_leaf)
      : x_(x), targets_(targets), max_depth_(max_depth), min_leaf_(min_samples_leaf) {}

  std::vector<TreeNode> build(std::vector<std::size_t> samples) {
    grow(std::move(samples), 0);
    return std::move(nodes_);
  }

 private:
  int grow(std::vector<std::size_t> samples, std::size_t depth) {
    const int index = static_cast<int>(nodes_.size());
    nodes_.emplace_back();

    SplitChoice split;
    if (depth < max_depth_) split = best_split(x_, targets_, samples, min_leaf_);

    if (!split.found || split.gain <= kMinGain) {
      TreeNode& leaf = nodes_[static_cast<std::size_t>(index)];
      leaf.value = mean_of(targets_, samples);
      leaf.leaf_ordinal = next_leaf_++;
      return index;
    }

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t i : samples) {
      (x_.at(i, split.feature) <= split.threshold ? left : right).push_back(i);
    }
    samples.clear();
    samples.shrink_to_fit();

    const int l = grow(std::move(left), depth + 1);
    const int r = grow(std::move(right), depth + 1);
    TreeNode& node = nodes_[static_cast<std::size_t>(index)];
    node.feature = static_cast<int>(split.feature);
    node.threshold = split.threshold;
    node.left = l;
    node.right = r;
    return index;
  }

  const FeatureMatrix& x_;
  std::span<const double> targets_;
  std::size_t max_depth_;
  std::size_t min_leaf_;
  std::vector<TreeNode> nodes_;
  int next_leaf_ = 0;
};

void validate_params(const GbdtParams& params) {
  if (!(params.shrinkage > 0.0 && params.shrinkage <= 1.0)) {
    throw ArgumentError("shrinkage must lie in (0, 1]");
  }
  if (params.min_samples_leaf == 0) throw ArgumentError("min_samples_leaf must be at least 1");
}

nlohmann::json node_to_json(const RegressionTree& tree, int index) {
  const TreeNode& n = tree.nodes()[static_cast<std::size_t>(index)];
  if (n.is_leaf()) return {{"leaf", n.leaf_ordinal}, {"value", n.value}};
  return {{"feature", n.feature},
          {"threshold", n.threshold},
          {"left", node_to_json(tree, n.left)},
          {"right", node_to_json(tree, n.right)}};
}

int node_from_json(const nlohmann::json& j, std::vector<TreeNode>& nodes, std::size_t feature_count) {
  const int index = static_cast<int>(nodes.size());
  nodes.emplace_back();
  if (j.contains("leaf")) {
    TreeNode& leaf = nodes.back();
    leaf.leaf_ordinal = j.at("leaf").get<int>();
    leaf.value = j.at("value").get<double>();
    if (!std::isfinite(leaf.value)) throw DataError("gbdt leaf value is not finite");
    return index;
  }
  const int feature = j.at("feature").get<int>();
  const double threshold = j.at("threshold").get<double>();
  if (feature < 0 || static_cast<std::size_t>(feature) >= feature_count) {
    throw DataError("gbdt node tests feature " + std::to_string(feature) + " out of range");
  }
  if (!std::isfinite(threshold)) throw DataError("gbdt node threshold is not finite");
  const int l = node_from_json(j.at("left"), nodes, feature_count);
  const int r = node_from_json(j.at("right"), nodes, feature_count);
  TreeNode& node = nodes[static_cast<std::size_t>(index)];
  node.feature = feature;
  node.threshold = threshold;
  node.left = l;
  node.right = r;
  return index;
}

}  // namespace

RegressionTree::RegressionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw ArgumentError("tree has no nodes");
  std::vector<int> ordinals;
  for (const auto& n : nodes_) {
    if (n.is_leaf()) {
      ordinals.push_back(n.leaf_ordinal);
      continue;
    }
    const auto size = static_cast<int>(nodes_.size());
    if (n.left <= 0 || n.left >= size || n.right <= 0 || n.right >= size) {
      throw ArgumentError("tree child index out of range");
    }
  }
  std::sort(ordinals.begin(), ordinals.end());
  for (std::size_t k = 0; k < ordinals.size(); ++k) {
    if (ordinals[k] != static_cast<int>(k)) {
      throw ArgumentError("tree leaf ordinals are not 0..n_leaves-1");
    }
  }
  leaf_count_ = ordinals.size();
}

const TreeNode& RegressionTree::leaf_for(std::span<const double> x) const {
  const TreeNode* node = &nodes_.front();
  while (!node->is_leaf()) {
    const auto next = x[static_cast<std::size_t>(node->feature)] <= node->threshold ? node->left : node->right;
    node = &nodes_[static_cast<std::size_t>(next)];
  }
  return *node;
}

std::size_t GbdtModel::total_leaves() const noexcept {
  std::size_t n = 0;
  for (const auto& t : trees) n += t.leaf_count();
  return n;
}

FeatureMatrix to_matrix(std::span<const TransformerRecord> records) {
  FeatureMatrix m;
  m.rows = records.size();
  m.cols = kFeatureCount;
  m.values.reserve(m.rows * m.cols);
  for (const auto& r : records) m.values.insert(m.values.end(), r.features.begin(), r.features.end());
  return m;
}

std::vector<double> label_targets(std::span<const TransformerRecord> records) {
  std::vector<double> y;
  y.reserve(records.size());
  for (const auto& r : records) y.push_back(r.label == Label::fault ? 1.0 : 0.0);
  return y;
}

SplitChoice best_split(const FeatureMatrix& x, std::span<const double> targets,
                       std::span<const std::size_t> samples, std::size_t min_samples_leaf) {
  SplitChoice best;
  const std::size_t n = samples.size();
  if (n < 2 || n < 2 * min_samples_leaf) return best;

  double total = 0.0;
  for (std::size_t i : samples) total += targets[i];
  const double parent_term = total * total / static_cast<double>(n);

  std::vector<std::size_t> order(samples.begin(), samples.end());
  for (std::size_t f = 0; f < x.cols; ++f) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x.at(a, f) < x.at(b, f); });
    double left_sum = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      left_sum += targets[order[k]];
      const double lo = x.at(order[k], f);
      const double hi = x.at(order[k + 1], f);
      if (!(lo < hi)) continue;
      const std::size_t n_left = k + 1;
      const std::size_t n_right = n - n_left;
      if (n_left < min_samples_leaf || n_right < min_samples_leaf) continue;
      const double right_sum = total - left_sum;
      const double gain = left_sum * left_sum / static_cast<double>(n_left) +
                          right_sum * right_sum / static_cast<double>(n_right) - parent_term;
      if (!best.found || gain > best.gain) {
        best.found = true;
        best.feature = f;
        best.threshold = lo + (hi - lo) / 2.0;
        best.gain = gain;
      }
    }
  }
  return best;
}

RegressionTree fit_tree(const FeatureMatrix& x, std::span<const double> targets, std::size_t max_depth,
                        std::size_t min_samples_leaf) {
  std::vector<std::size_t> samples(x.rows);
  std::iota(samples.begin(), samples.end(), std::size_t{0});
  TreeBuilder builder(x, targets, max_depth, min_samples_leaf);
  return RegressionTree(builder.build(std::move(samples)));
}

GbdtModel fit_gbdt(const FeatureMatrix& x, std::span<const double> targets, const GbdtParams& params) {
  validate_params(params);
  if (x.rows == 0) throw ArgumentError("cannot fit gbdt on zero rows");
  if (targets.size() != x.rows) throw ShapeError("target count does not match row count");
  if (x.rows < params.min_samples_leaf) {
    throw ArgumentError("fewer rows (" + std::to_string(x.rows) + ") than min_samples_leaf (" +
                        std::to_string(params.min_samples_leaf) + ")");
  }
  for (double v : x.values) {
    if (!std::isfinite(v)) throw ArgumentError("training features must be finite");
  }

  GbdtModel model;
  model.params = params;
  model.shrinkage = params.shrinkage;
  model.feature_count = x.cols;
  model.init_score = std::accumulate(targets.begin(), targets.end(), 0.0) / static_cast<double>(x.rows);

  std::vector<double> current(x.rows, model.init_score);
  std::vector<double> residual(x.rows);
  model.trees.reserve(params.n_trees);
  for (std::size_t m = 0; m < params.n_trees; ++m) {
    for (std::size_t i = 0; i < x.rows; ++i) residual[i] = targets[i] - current[i];
    RegressionTree tree = fit_tree(x, residual, params.max_depth, params.min_samples_leaf);
    for (std::size_t i = 0; i < x.rows; ++i) {
      current[i] += params.shrinkage * tree.leaf_for(x.row(i)).value;
    }
    model.trees.push_back(std::move(tree));
  }
  return model;
}

GbdtModel train_gbdt(std::span<const TransformerRecord> records, const GbdtParams& params) {
  if (records.size() < 2) throw ArgumentError("gbdt needs at least two records");
  const ClassCounts counts = count_classes(records);
  if (counts.fault == 0 || counts.stable == 0) {
    throw ArgumentError("gbdt needs both fault and stable records");
  }
  const FeatureMatrix x = to_matrix(records);
  const std::vector<double> y = label_targets(records);
  return fit_gbdt(x, y, params);
}

double predict_raw(const GbdtModel& model, std::span<const double> features) {
  if (features.size() != model.feature_count) {
    throw ShapeError("expected " + std::to_string(model.feature_count) + " features, got " +
                     std::to_string(features.size()));
  }
  check_finite(features);
  double sum = 0.0;
  for (const auto& tree : model.trees) sum += tree.leaf_for(features).value;
  return model.init_score + model.shrinkage * sum;
}

std::vector<double> feature_cross(const GbdtModel& model, std::span<const double> features) {
  if (model.trees.empty()) throw ArgumentError("no trees to cross");
  if (features.size() != model.feature_count) {
    throw ShapeError("expected " + std::to_string(model.feature_count) + " features, got " +
                     std::to_string(features.size()));
  }
  check_finite(features);
  std::vector<double> cross(model.total_leaves(), 0.0);
  std::size_t offset = 0;
  for (const auto& tree : model.trees) {
    cross[offset + static_cast<std::size_t>(tree.leaf_for(features).leaf_ordinal)] = 1.0;
    offset += tree.leaf_count();
  }
  return cross;
}

std::vector<double> staged_mse(const GbdtModel& model, const FeatureMatrix& x,
                               std::span<const double> targets) {
  std::vector<double> current(x.rows, model.init_score);
  auto mse = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) s += (targets[i] - current[i]) * (targets[i] - current[i]);
    return s / static_cast<double>(x.rows);
  };
  std::vector<double> trace{mse()};
  for (const auto& tree : model.trees) {
    for (std::size_t i = 0; i < x.rows; ++i) current[i] += model.shrinkage * tree.leaf_for(x.row(i)).value;
    trace.push_back(mse());
  }
  return trace;
}

nlohmann::json to_json(const GbdtModel& model) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : model.trees) trees.push_back(node_to_json(t, 0));
  return {{"init_score", model.init_score},
          {"shrinkage", model.shrinkage},
          {"feature_count", model.feature_count},
          {"params",
           {{"n_trees", model.params.n_trees},
            {"max_depth", model.params.max_depth},
            {"min_samples_leaf", model.params.min_samples_leaf}}},
          {"trees", std::move(trees)}};
}

GbdtModel gbdt_from_json(const nlohmann::json& doc) {
  try {
    GbdtModel model;
    model.init_score = doc.at("init_score").get<double>();
    model.shrinkage = doc.at("shrinkage").get<double>();
    model.feature_count = doc.value("feature_count", kFeatureCount);
    model.params.shrinkage = model.shrinkage;
    if (doc.contains("params")) {
      const auto& p = doc.at("params");
      model.params.n_trees = p.value("n_trees", std::size_t{0});
      model.params.max_depth = p.value("max_depth", std::size_t{0});
      model.params.min_samples_leaf = p.value("min_samples_leaf", std::size_t{1});
    }
    for (const auto& t : doc.at("trees")) {
      std::vector<TreeNode> nodes;
      node_from_json(t, nodes, model.feature_count);
      model.trees.emplace_back(std::move(nodes));
    }
    model.params.n_trees = model.trees.size();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed gbdt json: ") + e.what());
  } catch (const ArgumentError& e) {
    throw DataError(std::string("malformed gbdt json: ") + e.what());
  }
}

}  // namespace tfkg
