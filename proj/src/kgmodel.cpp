#include "tfkg/kgmodel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tfkg/errors.hpp"
#include "tfkg/rng.hpp"

namespace tfkg {

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw ShapeError(std::string(what) + ": length " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

double norm_of_residual(std::span<const double> w, std::span<const double> sh, std::span<const double> r,
                        std::span<const double> st, Norm norm) {
  double acc = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double z = w[k] * sh[k] + r[k] - w[k] * st[k];
    acc += norm == Norm::l1 ? std::abs(z) : z * z;
  }
  return norm == Norm::l1 ? acc : std::sqrt(acc);
}

// Writes d||z||/dz into `out`; zero where the norm is not differentiable.
double residual_and_direction(std::span<const double> w, std::span<const double> sh, std::span<const double> r,
                              std::span<const double> st, Norm norm, std::vector<double>& out) {
  out.resize(r.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double z = w[k] * sh[k] + r[k] - w[k] * st[k];
    out[k] = z;
    acc += norm == Norm::l1 ? std::abs(z) : z * z;
  }
  if (norm == Norm::l1) {
    for (double& z : out) z = z > 0.0 ? 1.0 : (z < 0.0 ? -1.0 : 0.0);
    return acc;
  }
  const double len = std::sqrt(acc);
  for (double& z : out) z = len > 0.0 ? z / len : 0.0;
  return len;
}

struct ResolvedTriple {
  const std::vector<double>* head;
  const std::vector<double>* tail;
  Relation relation;
};

std::vector<ResolvedTriple> resolve(std::span<const Triple> triples, const EntityVectors& entities,
                                    std::size_t n) {
  std::vector<ResolvedTriple> out;
  out.reserve(triples.size());
  auto lookup = [&](const std::string& id) -> const std::vector<double>* {
    const auto it = entities.find(id);
    if (it == entities.end()) throw LookupError("no entity vector for id '" + id + "'");
    if (it->second.size() != n) {
      throw DimensionError("entity '" + id + "' has dimension " + std::to_string(it->second.size()) +
                           ", model expects " + std::to_string(n));
    }
    return &it->second;
  };
  for (const auto& t : triples) out.push_back({lookup(t.head), lookup(t.tail), t.relation});
  return out;
}

double mean_loss(const KgParams& params, std::span<const ResolvedTriple> triples) {
  double sum = 0.0;
  for (const auto& t : triples) sum += triple_loss(params, *t.head, *t.tail, t.relation);
  return triples.empty() ? 0.0 : sum / static_cast<double>(triples.size());
}

}  // namespace

std::string_view to_string(Norm norm) noexcept { return norm == Norm::l1 ? "l1" : "l2"; }

Norm parse_norm(std::string_view text) {
  if (text == "l1") return Norm::l1;
  if (text == "l2") return Norm::l2;
  throw ConfigError("unknown norm '" + std::string(text) + "' (expected l1 or l2)");
}

std::vector<double> entity_vector(std::span<const double> weights, std::span<const double> cross) {
  require_same_size(weights.size(), cross.size(), "entity_vector");
  std::vector<double> h(weights.size());
  for (std::size_t k = 0; k < h.size(); ++k) h[k] = weights[k] * cross[k];
  return h;
}

double score_pair(std::span<const double> h, std::span<const double> r, std::span<const double> t, Norm norm) {
  require_same_size(h.size(), r.size(), "score_pair");
  require_same_size(h.size(), t.size(), "score_pair");
  double acc = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const double z = h[k] + r[k] - t[k];
    acc += norm == Norm::l1 ? std::abs(z) : z * z;
  }
  return norm == Norm::l1 ? acc : std::sqrt(acc);
}

double relation_score(const KgParams& params, std::span<const double> head_cross,
                      std::span<const double> tail_cross, Relation r) {
  const std::size_t n = params.dim();
  require_same_size(head_cross.size(), n, "head cross");
  require_same_size(tail_cross.size(), n, "tail cross");
  return norm_of_residual(params.weights, head_cross, params.relation_vector(r), tail_cross, params.norm);
}

double triple_loss(const KgParams& params, std::span<const double> head_cross, std::span<const double> tail_cross,
                   Relation true_relation) {
  const double e1 = relation_score(params, head_cross, tail_cross, true_relation);
  const double e2 = relation_score(params, head_cross, tail_cross, other(true_relation));
  return std::max(e1 - e2, 0.0);
}

KgGradients kg_gradients(const KgParams& params, std::span<const KgExample> batch) {
  if (batch.empty()) throw ArgumentError("kg_gradients needs a non-empty batch");
  const std::size_t n = params.dim();
  KgGradients g;
  g.weights.assign(n, 0.0);
  g.r_similar.assign(n, 0.0);
  g.r_nonsimilar.assign(n, 0.0);

  std::vector<double> dir_true;
  std::vector<double> dir_false;
  double loss_sum = 0.0;
  for (const auto& ex : batch) {
    require_same_size(ex.head.size(), n, "head cross");
    require_same_size(ex.tail.size(), n, "tail cross");
    const auto& r_true = params.relation_vector(ex.relation);
    const auto& r_false = params.relation_vector(other(ex.relation));
    const double e1 = residual_and_direction(params.weights, ex.head, r_true, ex.tail, params.norm, dir_true);
    const double e2 = residual_and_direction(params.weights, ex.head, r_false, ex.tail, params.norm, dir_false);
    if (!(e1 - e2 > 0.0)) continue;
    loss_sum += e1 - e2;
    auto& g_true = ex.relation == Relation::similar ? g.r_similar : g.r_nonsimilar;
    auto& g_false = ex.relation == Relation::similar ? g.r_nonsimilar : g.r_similar;
    for (std::size_t k = 0; k < n; ++k) {
      const double diff = ex.head[k] - ex.tail[k];
      g.weights[k] += (dir_true[k] - dir_false[k]) * diff;
      g_true[k] += dir_true[k];
      g_false[k] -= dir_false[k];
    }
  }
  const double scale = 1.0 / static_cast<double>(batch.size());
  for (auto* v : {&g.weights, &g.r_similar, &g.r_nonsimilar}) {
    for (double& x : *v) x *= scale;
  }
  g.mean_loss = loss_sum * scale;
  return g;
}

KgParams init_kg_params(std::size_t n, Norm norm, std::uint64_t seed) {
  if (n == 0) throw ArgumentError("kg dimension must be at least 1");
  Rng rng(mix_seed(seed, 0));
  KgParams p;
  p.norm = norm;
  p.weights.resize(n);
  p.r_similar.resize(n);
  p.r_nonsimilar.resize(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (double& w : p.weights) w = rng.uniform(0.5, 1.5);
  for (double& r : p.r_similar) r = rng.uniform(-0.5, 0.5) * scale;
  for (double& r : p.r_nonsimilar) r = rng.uniform(-0.5, 0.5) * scale;
  return p;
}

KgTrainResult train_kg(std::span<const Triple> triples, const EntityVectors& entities, const KgHyper& hyper,
                       KgParams initial) {
  if (!(hyper.learning_rate > 0.0)) throw ArgumentError("kg learning_rate must be positive");
  if (hyper.epochs == 0) throw ArgumentError("kg epochs must be at least 1");
  if (hyper.batch_size == 0) throw ArgumentError("kg batch_size must be at least 1");
  if (triples.empty()) throw ArgumentError("kg training needs at least one triple");
  const std::size_t n = initial.dim();
  if (n == 0) throw ArgumentError("kg dimension must be at least 1");

  const auto resolved = resolve(triples, entities, n);
  KgTrainResult result{std::move(initial), {}};
  KgParams& params = result.params;
  AdamState adam({hyper.learning_rate, hyper.beta1, hyper.beta2, hyper.epsilon}, 3 * n);
  Rng rng(mix_seed(hyper.seed, 1));

  std::vector<std::size_t> order(resolved.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<KgExample> batch;
  batch.reserve(hyper.batch_size);

  result.loss_trace.push_back(mean_loss(params, resolved));
  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += hyper.batch_size) {
      batch.clear();
      const std::size_t stop = std::min(order.size(), start + hyper.batch_size);
      for (std::size_t k = start; k < stop; ++k) {
        const auto& t = resolved[order[k]];
        batch.push_back({*t.head, *t.tail, t.relation});
      }
      const KgGradients g = kg_gradients(params, batch);
      const ParamBlock blocks[] = {{params.weights, g.weights},
                                   {params.r_similar, g.r_similar},
                                   {params.r_nonsimilar, g.r_nonsimilar}};
      adam_step(adam, blocks);
    }
    const double loss = mean_loss(params, resolved);
    if (!std::isfinite(loss)) {
      throw NumericError("kg loss became non-finite at epoch " + std::to_string(epoch + 1));
    }
    result.loss_trace.push_back(loss);
  }
  return result;
}

KgTrainResult train_kg(std::span<const Triple> triples, const EntityVectors& entities, const KgHyper& hyper) {
  if (triples.empty()) throw ArgumentError("kg training needs at least one triple");
  const auto it = entities.find(triples.front().head);
  if (it == entities.end()) throw LookupError("no entity vector for id '" + triples.front().head + "'");
  return train_kg(triples, entities, hyper, init_kg_params(it->second.size(), hyper.norm, hyper.seed));
}

RelationPrediction predict_relation(const KgParams& params, std::span<const double> head_cross,
                                    std::span<const double> tail_cross) {
  RelationPrediction p;
  p.e_similar = relation_score(params, head_cross, tail_cross, Relation::similar);
  p.e_nonsimilar = relation_score(params, head_cross, tail_cross, Relation::non_similar);
  p.relation = p.e_similar <= p.e_nonsimilar ? Relation::similar : Relation::non_similar;
  return p;
}

double evaluate_accuracy(const KgParams& params, std::span<const Triple> triples, const EntityVectors& entities) {
  if (triples.empty()) throw ArgumentError("cannot evaluate accuracy on an empty test set");
  const auto resolved = resolve(triples, entities, params.dim());
  std::size_t correct = 0;
  for (const auto& t : resolved) {
    if (predict_relation(params, *t.head, *t.tail).relation == t.relation) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(resolved.size());
}

nlohmann::json to_json(const KgParams& params) {
  return {{"n", params.dim()},
          {"norm", std::string(to_string(params.norm))},
          {"W", params.weights},
          {"r_similar", params.r_similar},
          {"r_nonsimilar", params.r_nonsimilar}};
}

KgParams kg_params_from_json(const nlohmann::json& doc) {
  try {
    KgParams p;
    const auto n = doc.at("n").get<std::size_t>();
    p.norm = doc.contains("norm") ? parse_norm(doc.at("norm").get<std::string>()) : Norm::l2;
    p.weights = doc.at("W").get<std::vector<double>>();
    p.r_similar = doc.at("r_similar").get<std::vector<double>>();
    p.r_nonsimilar = doc.at("r_nonsimilar").get<std::vector<double>>();
    if (p.weights.size() != n || p.r_similar.size() != n || p.r_nonsimilar.size() != n) {
      throw DataError("kg params vectors disagree with n = " + std::to_string(n));
    }
    for (const auto* v : {&p.weights, &p.r_similar, &p.r_nonsimilar}) {
      for (double x : *v) {
        if (!std::isfinite(x)) throw DataError("kg params contain a non-finite entry");
      }
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed kg params json: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(e.what());
  }
}

}  // namespace tfkg
