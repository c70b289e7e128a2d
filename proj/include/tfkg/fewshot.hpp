#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tfkg/triples.hpp"

namespace tfkg {

/// Entity embeddings stored row-major in id order.
struct EmbeddingTable {
  std::size_t dim = 0;
  std::vector<std::string> ids;  // sorted, unique
  std::vector<double> values;    // ids.size() x dim

  std::size_t size() const noexcept { return ids.size(); }
  /// Throws LookupError for an unknown id.
  std::size_t index_of(const std::string& id) const;
  std::span<const double> row(std::size_t i) const { return {values.data() + i * dim, dim}; }
  std::span<double> row(std::size_t i) { return {values.data() + i * dim, dim}; }
  std::span<const double> operator[](const std::string& id) const { return row(index_of(id)); }
};

/// Rows drawn from N(0, 1/dim). `ids` may be unsorted and contain repeats.
EmbeddingTable init_embeddings(std::span<const std::string> ids, std::size_t dim, std::uint64_t seed);

struct DenseLayer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<double> weights;  // outputs x inputs
  std::vector<double> bias;

  bool operator==(const DenseLayer&) const = default;
};

/// MLP from h ⊕ t (2 dim inputs) to a dim-sized relation vector. Hidden layers
/// use LeakyReLU, the last layer is affine.
struct RelationMetaNet {
  std::size_t dim = 0;
  double negative_slope = 0.01;
  std::vector<DenseLayer> layers;

  /// Throws ShapeError unless the layers chain from 2 dim to dim.
  void validate() const;
  std::size_t parameter_count() const noexcept;
  bool operator==(const RelationMetaNet&) const = default;
};

/// `layers` affine maps; hidden width 0 means 2 dim. Xavier-uniform weights,
/// zero biases.
RelationMetaNet init_meta_net(std::size_t dim, std::size_t layers, std::size_t hidden, double negative_slope,
                              std::uint64_t seed);

struct TaskExample {
  Triple positive;
  std::string negative_tail;
};

struct Task {
  Relation relation = Relation::similar;
  std::vector<TaskExample> support;
  std::vector<TaskExample> query;
};

std::vector<double> relation_meta(const RelationMetaNet& net, std::span<const double> head,
                                  std::span<const double> tail);

std::vector<double> aggregate_meta(std::span<const std::vector<double>> metas);

/// [gamma + pos - neg]_+
double margin_hinge(double gamma, double pos, double neg) noexcept;

/// Sum of margin hinges with L2 scores ‖h + R − t‖ against the corrupted tail.
double support_loss(const EmbeddingTable& emb, std::span<const TaskExample> support, std::span<const double> relation,
                    double gamma);
double query_loss(const EmbeddingTable& emb, std::span<const TaskExample> query, std::span<const double> relation,
                  double gamma);

/// Subgradient of support_loss with respect to the relation vector.
std::vector<double> gradient_meta(const EmbeddingTable& emb, std::span<const TaskExample> support,
                                  std::span<const double> relation, double gamma);

std::vector<double> update_meta(std::span<const double> relation, std::span<const double> gradient, double beta);

/// Mean relation_meta over the support pairs.
std::vector<double> support_relation(const EmbeddingTable& emb, const RelationMetaNet& net, const Task& task);

/// R' = R − beta G for the task's support set.
std::vector<double> adapted_relation(const EmbeddingTable& emb, const RelationMetaNet& net, const Task& task,
                                     double beta, double gamma);

/// Query loss after the fast update, as a function of all parameters.
double task_query_loss(const EmbeddingTable& emb, const RelationMetaNet& net, const Task& task, double beta,
                       double gamma);

struct MetaGradients {
  std::vector<DenseLayer> layers;  // same shapes as the net
  std::vector<double> embeddings;  // same shape as EmbeddingTable::values
  double support_loss = 0.0;
  double query_loss = 0.0;
};

/// Gradient of task_query_loss, differentiating through the fast update.
MetaGradients task_gradients(const EmbeddingTable& emb, const RelationMetaNet& net, const Task& task, double beta,
                             double gamma);

/// One task per relation present: k uniformly chosen support triples, the
/// rest as query. A relation needs more than 2k triples so the query set
/// outnumbers the support set. Each triple gets one corrupted tail that is not a known
/// triple of `triples`.
std::vector<Task> sample_tasks(std::span<const Triple> triples, std::size_t k, std::uint64_t seed);

struct MetaHyper {
  double beta = 1.0;
  double gamma = 1.0;
  double learning_rate = 0.001;
  std::size_t epochs = 50;
  std::size_t dim = 32;
  std::size_t layers = 3;
  std::size_t hidden = 0;  // 0: 2 dim
  double negative_slope = 0.01;
  std::uint64_t seed = 0;
};

struct MetaTrainResult {
  EmbeddingTable embeddings;
  RelationMetaNet net;
  /// Summed query loss over all tasks: entry 0 at init, then after each epoch.
  std::vector<double> loss_trace;
};

/// One Adam step per task per epoch, tasks in the given order.
MetaTrainResult train_meta(std::span<const Task> tasks, const MetaHyper& hyper);

/// Same as above from given initial parameters.
MetaTrainResult train_meta(std::span<const Task> tasks, const MetaHyper& hyper, EmbeddingTable embeddings,
                           RelationMetaNet net);

struct LinkPredictResult {
  std::vector<std::size_t> ranks;  // 1-based, one per query triple
  double hits1 = 0.0;
  double hits5 = 0.0;
  double mrr = 0.0;
};

/// Ranks every candidate tail by ‖h + R' − t‖ for each query triple; ties are
/// broken by candidate id.
LinkPredictResult link_predict(const EmbeddingTable& emb, const RelationMetaNet& net, const Task& task,
                               std::span<const std::string> candidates, double beta, double gamma);

nlohmann::json to_json(const Task& task);
Task task_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const EmbeddingTable& emb);
nlohmann::json to_json(const RelationMetaNet& net);

}  // namespace tfkg
