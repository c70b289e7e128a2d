#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "tfkg/adam.hpp"
#include "tfkg/triples.hpp"

namespace tfkg {

enum class Norm { l1, l2 };

std::string_view to_string(Norm norm) noexcept;
Norm parse_norm(std::string_view text);

/// Entity id -> entity representation S (feature cross or raw features).
using EntityVectors = std::unordered_map<std::string, std::vector<double>>;

/// Feature weights W and one translation vector per relation, all of length n.
/// `norm` is the distance used by every score computed with these params.
struct KgParams {
  Norm norm = Norm::l1;
  std::vector<double> weights;
  std::vector<double> r_similar;
  std::vector<double> r_nonsimilar;

  std::size_t dim() const noexcept { return weights.size(); }
  const std::vector<double>& relation_vector(Relation r) const noexcept {
    return r == Relation::similar ? r_similar : r_nonsimilar;
  }
  std::vector<double>& relation_vector(Relation r) noexcept {
    return r == Relation::similar ? r_similar : r_nonsimilar;
  }
  bool operator==(const KgParams&) const = default;
};

struct KgHyper {
  double learning_rate = 0.001;
  std::size_t epochs = 200;
  std::size_t batch_size = 64;
  Norm norm = Norm::l1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;
};

/// Elementwise W * S.
std::vector<double> entity_vector(std::span<const double> weights, std::span<const double> cross);

/// ||h + r - t|| under the chosen norm.
double score_pair(std::span<const double> h, std::span<const double> r, std::span<const double> t,
                  Norm norm = Norm::l2);

/// Distance of (head, tail) under relation r: ||W*S_h + r - W*S_t||.
double relation_score(const KgParams& params, std::span<const double> head_cross,
                      std::span<const double> tail_cross, Relation r);

/// max(e_true - e_false, 0).
double triple_loss(const KgParams& params, std::span<const double> head_cross,
                   std::span<const double> tail_cross, Relation true_relation);

struct KgExample {
  std::span<const double> head;
  std::span<const double> tail;
  Relation relation;
};

struct KgGradients {
  std::vector<double> weights;
  std::vector<double> r_similar;
  std::vector<double> r_nonsimilar;
  double mean_loss = 0.0;
};

/// Subgradient of the mean triple_loss over a non-empty batch. Inactive hinges
/// and zero-norm residual coordinates contribute zero.
KgGradients kg_gradients(const KgParams& params, std::span<const KgExample> batch);

/// W ~ U[0.5, 1.5], relation vectors ~ U[-0.5, 0.5] / sqrt(n).
KgParams init_kg_params(std::size_t n, Norm norm, std::uint64_t seed);

struct KgTrainResult {
  KgParams params;
  /// Entry 0 is the mean loss at initialization, entry e the mean loss after
  /// epoch e.
  std::vector<double> loss_trace;
};

/// Shuffled mini-batch Adam on the mean hinge loss, starting from `initial`.
KgTrainResult train_kg(std::span<const Triple> triples, const EntityVectors& entities, const KgHyper& hyper,
                       KgParams initial);

/// As above, starting from init_kg_params(n, hyper.norm, hyper.seed).
KgTrainResult train_kg(std::span<const Triple> triples, const EntityVectors& entities, const KgHyper& hyper);

struct RelationPrediction {
  Relation relation = Relation::similar;
  double e_similar = 0.0;
  double e_nonsimilar = 0.0;
};

/// Relation with the smaller distance; exact ties go to Similar.
RelationPrediction predict_relation(const KgParams& params, std::span<const double> head_cross,
                                    std::span<const double> tail_cross);

double evaluate_accuracy(const KgParams& params, std::span<const Triple> triples, const EntityVectors& entities);

nlohmann::json to_json(const KgParams& params);
KgParams kg_params_from_json(const nlohmann::json& doc);

}  // namespace tfkg
