#include "tfkg/fewshot.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tfkg/adam.hpp"
#include "tfkg/errors.hpp"
#include "tfkg/rng.hpp"

namespace tfkg {

namespace {

double leaky(double z, double slope) { return z > 0.0 ? z : slope * z; }
double leaky_grad(double z, double slope) { return z > 0.0 ? 1.0 : slope; }

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void check_dim(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    throw ShapeError(std::string(what) + " has dimension " + std::to_string(got) + ", expected " +
                     std::to_string(expected));
  }
}

// Activations of one forward pass; inputs[l] feeds layer l, pre[l] is its
// affine output.
struct MlpTrace {
  std::vector<std::vector<double>> inputs;
  std::vector<std::vector<double>> pre;
};

std::vector<double> mlp_forward(const RelationMetaNet& net, std::span<const double> head,
                                std::span<const double> tail, MlpTrace* trace) {
  check_dim(net.dim, head.size(), "head embedding");
  check_dim(net.dim, tail.size(), "tail embedding");
  std::vector<double> x(head.begin(), head.end());
  x.insert(x.end(), tail.begin(), tail.end());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const DenseLayer& layer = net.layers[l];
    std::vector<double> z(layer.bias);
    for (std::size_t o = 0; o < layer.outputs; ++o) {
      const double* w = layer.weights.data() + o * layer.inputs;
      for (std::size_t i = 0; i < layer.inputs; ++i) z[o] += w[i] * x[i];
    }
    if (trace) {
      trace->inputs.push_back(std::move(x));
      trace->pre.push_back(z);
    }
    if (l + 1 < net.layers.size()) {
      for (double& v : z) v = leaky(v, net.negative_slope);
    }
    x = std::move(z);
  }
  return x;
}

// Accumulates parameter gradients into `grads` and returns d/d(h ⊕ t).
std::vector<double> mlp_backward(const RelationMetaNet& net, const MlpTrace& trace, std::span<const double> d_out,
                                 std::vector<DenseLayer>& grads) {
  std::vector<double> d_act(d_out.begin(), d_out.end());
  for (std::size_t l = net.layers.size(); l-- > 0;) {
    const DenseLayer& layer = net.layers[l];
    DenseLayer& g = grads[l];
    std::vector<double> dz(d_act);
    if (l + 1 < net.layers.size()) {
      for (std::size_t o = 0; o < dz.size(); ++o) dz[o] *= leaky_grad(trace.pre[l][o], net.negative_slope);
    }
    const std::vector<double>& x = trace.inputs[l];
    std::vector<double> dx(layer.inputs, 0.0);
    for (std::size_t o = 0; o < layer.outputs; ++o) {
      g.bias[o] += dz[o];
      const double* w = layer.weights.data() + o * layer.inputs;
      double* gw = g.weights.data() + o * layer.inputs;
      for (std::size_t i = 0; i < layer.inputs; ++i) {
        gw[i] += dz[o] * x[i];
        dx[i] += w[i] * dz[o];
      }
    }
    d_act = std::move(dx);
  }
  return d_act;
}

std::vector<DenseLayer> zero_like(const RelationMetaNet& net) {
  std::vector<DenseLayer> out;
  out.reserve(net.layers.size());
  for (const auto& l : net.layers) {
    out.push_back({l.inputs, l.outputs, std::vector<double>(l.weights.size(), 0.0), std::vector<double>(l.bias.size(), 0.0)});
  }
  return out;
}

void check_examples(std::span<const TaskExample> examples, const char* what) {
  if (examples.empty()) throw ArgumentError(std::string(what) + " set is empty");
  for (const auto& e : examples) {
    if (e.negative_tail.empty()) {
      throw ArgumentError(std::string(what) + " triple (" + e.positive.head + ", " + e.positive.tail +
                          ") has no negative");
    }
  }
}

// Rows of one example: head, tail and corrupted tail.
struct ExampleRows {
  std::size_t head;
  std::size_t tail;
  std::size_t negative;
};

ExampleRows rows_of(const EmbeddingTable& emb, const TaskExample& e) {
  return {emb.index_of(e.positive.head), emb.index_of(e.positive.tail), emb.index_of(e.negative_tail)};
}

// h + R − t
std::vector<double> translate(std::span<const double> h, std::span<const double> r, std::span<const double> t) {
  std::vector<double> out(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) out[k] = h[k] + r[k] - t[k];
  return out;
}

double hinge_sum(const EmbeddingTable& emb, std::span<const TaskExample> examples, std::span<const double> relation,
                 double gamma, const char* what) {
  check_examples(examples, what);
  if (!(gamma >= 0.0)) throw ArgumentError("margin gamma must be non-negative");
  check_dim(emb.dim, relation.size(), "relation vector");
  double sum = 0.0;
  for (const auto& e : examples) {
    const ExampleRows r = rows_of(emb, e);
    const double pos = norm2(translate(emb.row(r.head), relation, emb.row(r.tail)));
    const double neg = norm2(translate(emb.row(r.head), relation, emb.row(r.negative)));
    sum += margin_hinge(gamma, pos, neg);
  }
  return sum;
}

// Unit vector of v, zero at the origin.
std::vector<double> unit(std::vector<double> v) {
  const double n = norm2(v);
  for (double& x : v) x = n > 0.0 ? x / n : 0.0;
  return v;
}

// (I − v̂ v̂ᵀ) g / ‖v‖, the adjoint of v ↦ v̂.
std::vector<double> unit_adjoint(std::span<const double> v, std::span<const double> g) {
  const double n = norm2(v);
  std::vector<double> out(v.size(), 0.0);
  if (n == 0.0) return out;
  double dot = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) dot += v[k] * g[k];
  dot /= n * n;
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = (g[k] - dot * v[k]) / n;
  return out;
}

void add_to(std::span<double> dst, std::span<const double> src, double scale = 1.0) {
  for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += scale * src[k];
}

}  // namespace

std::size_t EmbeddingTable::index_of(const std::string& id) const {
  const auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it == ids.end() || *it != id) throw LookupError("no embedding for entity '" + id + "'");
  return static_cast<std::size_t>(it - ids.begin());
}

EmbeddingTable init_embeddings(std::span<const std::string> ids, std::size_t dim, std::uint64_t seed) {
  if (dim == 0) throw ArgumentError("embedding dimension must be positive");
  EmbeddingTable t;
  t.dim = dim;
  t.ids.assign(ids.begin(), ids.end());
  std::sort(t.ids.begin(), t.ids.end());
  t.ids.erase(std::unique(t.ids.begin(), t.ids.end()), t.ids.end());
  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  t.values.resize(t.ids.size() * dim);
  for (double& v : t.values) v = scale * rng.normal();
  return t;
}

void RelationMetaNet::validate() const {
  if (dim == 0) throw ShapeError("relation meta net has dimension 0");
  if (layers.empty()) throw ShapeError("relation meta net has no layers");
  std::size_t expected = 2 * dim;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const DenseLayer& layer = layers[l];
    if (layer.inputs != expected) {
      throw ShapeError("layer " + std::to_string(l + 1) + " takes " + std::to_string(layer.inputs) +
                       " inputs, expected " + std::to_string(expected));
    }
    if (layer.weights.size() != layer.inputs * layer.outputs || layer.bias.size() != layer.outputs) {
      throw ShapeError("layer " + std::to_string(l + 1) + " parameter sizes do not match its shape");
    }
    expected = layer.outputs;
  }
  if (expected != dim) throw ShapeError("last layer must output " + std::to_string(dim) + " values");
}

std::size_t RelationMetaNet::parameter_count() const noexcept {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weights.size() + l.bias.size();
  return n;
}

RelationMetaNet init_meta_net(std::size_t dim, std::size_t layers, std::size_t hidden, double negative_slope,
                              std::uint64_t seed) {
  if (dim == 0) throw ArgumentError("relation dimension must be positive");
  if (layers == 0) throw ArgumentError("relation meta net needs at least one layer");
  if (hidden == 0) hidden = 2 * dim;
  RelationMetaNet net;
  net.dim = dim;
  net.negative_slope = negative_slope;
  Rng rng(seed);
  std::size_t in = 2 * dim;
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t out = l + 1 == layers ? dim : hidden;
    DenseLayer layer{in, out, std::vector<double>(in * out), std::vector<double>(out, 0.0)};
    const double a = std::sqrt(6.0 / static_cast<double>(in + out));
    for (double& w : layer.weights) w = rng.uniform(-a, a);
    net.layers.push_back(std::move(layer));
    in = out;
  }
  return net;
}

std::vector<double> relation_meta(const RelationMetaNet& net, std::span<const double> head,
                                  std::span<const double> tail) {
  net.validate();
  return mlp_forward(net, head, tail, nullptr);
}

std::vector<double> aggregate_meta(std::span<const std::vector<double>> metas) {
  if (metas.empty()) throw ArgumentError("cannot aggregate an empty list of relation metas");
  std::vector<double> mean(metas.front().size(), 0.0);
  for (const auto& m : metas) {
    check_dim(mean.size(), m.size(), "relation meta");
    add_to(mean, m);
  }
  for (double& v : mean) v /= static_cast<double>(metas.size());
  return mean;
}

double margin_hinge(double gamma, double pos, double neg) noexcept { return std::max(gamma + pos - neg, 0.0); }

double support_loss(const EmbeddingTable& emb, std::span<const TaskExample> support, std::span<const double> relation,
                    double gamma) {
  return hinge_sum(emb, support, relation, gamma, "support");
}

double query_loss(const EmbeddingTable& emb, std::span<const TaskExample> query, std::span<const double> relation,
                  double gamma) {
  return hinge_sum(emb, query, relation, gamma, "query");
}

std::vector<double> gradient_meta(const EmbeddingTable& emb, std::span<const TaskExample> support,
                                  std::span<const double> relation, double gamma) {
  check_examples(support, "support");
  if (!(gamma >= 0.0)) throw ArgumentError("margin gamma must be non-negative");
  check_dim(emb.dim, relation.size(), "relation vector");
  std::vector<double> g(emb.dim, 0.0);
  for (const auto& e : support) {
    const ExampleRows r = rows_of(emb, e);
    const auto a = translate(emb.row(r.head), relation, emb.row(r.tail));
    const auto b = translate(emb.row(r.head), relation, emb.row(r.negative));
    if (margin_hinge(gamma, norm2(a), norm2(b)) <= 0.0) continue;
    add_to(g, unit(a));
    add_to(g, unit(b), -1.0);
  }
  return g;
}

std::vector<double> update_meta(std::span<const double> relation, std::span<const double> gradient, double beta) {
  check_dim(relation.size(), gradient.size(), "gradient");
  if (!(beta >= 0.0)) throw ArgumentError("fast-update step beta must be non-negative");
  std::vector<double> out(relation.begin(), relation.end());
  add_to(out, gradient, -beta);
  return out;
}

std::vector<double> support_relation(const EmbeddingTable& emb, const RelationMetaNet& net, const Task& task) {
  net.validate();
  check_dim(net.dim, emb.dim, "embedding table");
  if (task.support.empty()) throw ArgumentError("support set is empty");
  std::vector<std::vector<double>> metas;
  metas.reserve(task.support.size());
  for (const auto& e : task.support) {
    metas.push_back(mlp_forward(net, emb[e.positive.head], emb[e.positive.tail], nullptr));
  }
  return aggregate_meta(metas);
}

std::vector<double> adapted_relation(const EmbeddingTable& emb, const RelationMetaNet& net, const Task& task,
                                     double beta, double gamma) {
  const auto r = support_relation(emb, net, task);
  return update_meta(r, gradient_meta(emb, task.support, r, gamma), beta);
}

double task_query_loss(const EmbeddingTable& emb, const RelationMetaNet& net, const Task& task, double beta,
                       double gamma) {
  return query_loss(emb, task.query, adapted_relation(emb, net, task, beta, gamma), gamma);
}

MetaGradients task_gradients(const EmbeddingTable& emb, const RelationMetaNet& net, const Task& task, double beta,
                             double gamma) {
  net.validate();
  check_dim(net.dim, emb.dim, "embedding table");
  check_examples(task.support, "support");
  check_examples(task.query, "query");
  if (!(gamma >= 0.0)) throw ArgumentError("margin gamma must be non-negative");
  if (!(beta >= 0.0)) throw ArgumentError("fast-update step beta must be non-negative");
  const std::size_t d = emb.dim;
  const std::size_t k = task.support.size();

  MetaGradients out;
  out.layers = zero_like(net);
  out.embeddings.assign(emb.values.size(), 0.0);
  auto grad_row = [&](std::size_t i) { return std::span<double>(out.embeddings.data() + i * d, d); };

  // Relation element from the support pairs.
  std::vector<MlpTrace> traces(k);
  std::vector<ExampleRows> support_rows(k);
  std::vector<double> relation(d, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    support_rows[i] = rows_of(emb, task.support[i]);
    add_to(relation, mlp_forward(net, emb.row(support_rows[i].head), emb.row(support_rows[i].tail), &traces[i]));
  }
  for (double& v : relation) v /= static_cast<double>(k);

  // Gradient element and fast update.
  struct ActiveTerm {
    std::size_t index;
    std::vector<double> a;
    std::vector<double> b;
  };
  std::vector<ActiveTerm> active;
  std::vector<double> g(d, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    const ExampleRows& r = support_rows[i];
    auto a = translate(emb.row(r.head), relation, emb.row(r.tail));
    auto b = translate(emb.row(r.head), relation, emb.row(r.negative));
    const double h = margin_hinge(gamma, norm2(a), norm2(b));
    out.support_loss += h;
    if (h <= 0.0) continue;
    add_to(g, unit(a));
    add_to(g, unit(b), -1.0);
    active.push_back({i, std::move(a), std::move(b)});
  }
  const std::vector<double> adapted = update_meta(relation, g, beta);

  // Query loss and its direct gradients.
  std::vector<double> d_adapted(d, 0.0);
  for (const auto& e : task.query) {
    const ExampleRows r = rows_of(emb, e);
    const auto p = translate(emb.row(r.head), adapted, emb.row(r.tail));
    const auto q = translate(emb.row(r.head), adapted, emb.row(r.negative));
    const double h = margin_hinge(gamma, norm2(p), norm2(q));
    out.query_loss += h;
    if (h <= 0.0) continue;
    const auto pu = unit(p);
    const auto qu = unit(q);
    add_to(d_adapted, pu);
    add_to(d_adapted, qu, -1.0);
    add_to(grad_row(r.head), pu);
    add_to(grad_row(r.head), qu, -1.0);
    add_to(grad_row(r.tail), pu, -1.0);
    add_to(grad_row(r.negative), qu);
  }

  // Through R' = R − beta G, with G a sum of unit vectors of the active terms.
  std::vector<double> d_relation(d_adapted);
  std::vector<double> d_g(d);
  for (std::size_t j = 0; j < d; ++j) d_g[j] = -beta * d_adapted[j];
  for (const auto& term : active) {
    const ExampleRows& r = support_rows[term.index];
    const auto da = unit_adjoint(term.a, d_g);
    auto db = unit_adjoint(term.b, d_g);
    for (double& v : db) v = -v;
    add_to(grad_row(r.head), da);
    add_to(grad_row(r.tail), da, -1.0);
    add_to(d_relation, da);
    add_to(grad_row(r.head), db);
    add_to(grad_row(r.negative), db, -1.0);
    add_to(d_relation, db);
  }

  // Through the mean and the MLP.
  for (double& v : d_relation) v /= static_cast<double>(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto dx = mlp_backward(net, traces[i], d_relation, out.layers);
    add_to(grad_row(support_rows[i].head), std::span<const double>(dx.data(), d));
    add_to(grad_row(support_rows[i].tail), std::span<const double>(dx.data() + d, d));
  }
  return out;
}

std::vector<Task> sample_tasks(std::span<const Triple> triples, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw ArgumentError("support size k must be positive");
  if (triples.empty()) throw ArgumentError("no triples to sample tasks from");
  const TripleSet known(triples.begin(), triples.end());
  const std::vector<std::string> entities = entity_ids(triples);

  std::map<Relation, std::vector<Triple>> groups;
  for (const auto& t : triples) groups[t.relation].push_back(t);

  Rng rng(mix_seed(seed, 0));
  std::uint64_t draw = 0;
  std::vector<Task> tasks;
  for (auto& [relation, group] : groups) {
    if (group.size() <= 2 * k) {
      throw ArgumentError("relation '" + std::string(to_string(relation)) + "' has " + std::to_string(group.size()) +
                          " triples; support size k = " + std::to_string(k) + " needs at least " +
                          std::to_string(2 * k + 1) + " so the query set is larger than the support set");
    }
    rng.partial_shuffle(std::span<Triple>(group), k);
    Task task;
    task.relation = relation;
    for (std::size_t i = 0; i < group.size(); ++i) {
      const Triple negative = corrupt_tail(group[i], entities, known, mix_seed(seed, 1000 + draw++));
      (i < k ? task.support : task.query).push_back({group[i], negative.tail});
    }
    tasks.push_back(std::move(task));
  }
  return tasks;
}

MetaTrainResult train_meta(std::span<const Task> tasks, const MetaHyper& hyper) {
  if (tasks.empty()) throw ArgumentError("meta-training needs at least one task");
  std::vector<std::string> ids;
  for (const auto& task : tasks) {
    for (const auto* set : {&task.support, &task.query}) {
      for (const auto& e : *set) {
        ids.push_back(e.positive.head);
        ids.push_back(e.positive.tail);
        ids.push_back(e.negative_tail);
      }
    }
  }
  return train_meta(tasks, hyper, init_embeddings(ids, hyper.dim, mix_seed(hyper.seed, 0)),
                    init_meta_net(hyper.dim, hyper.layers, hyper.hidden, hyper.negative_slope,
                                  mix_seed(hyper.seed, 1)));
}

MetaTrainResult train_meta(std::span<const Task> tasks, const MetaHyper& hyper, EmbeddingTable embeddings,
                           RelationMetaNet net) {
  if (tasks.empty()) throw ArgumentError("meta-training needs at least one task");
  if (!(hyper.learning_rate > 0.0)) throw ArgumentError("meta learning rate must be positive");
  net.validate();
  check_dim(net.dim, embeddings.dim, "embedding table");

  MetaTrainResult result{std::move(embeddings), std::move(net), {}};
  EmbeddingTable& emb = result.embeddings;
  RelationMetaNet& mnet = result.net;

  auto summed_loss = [&](std::size_t epoch) {
    double sum = 0.0;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      const double l = task_query_loss(emb, mnet, tasks[i], hyper.beta, hyper.gamma);
      if (!std::isfinite(l)) {
        throw NumericError("query loss became non-finite at epoch " + std::to_string(epoch) + ", task " +
                           std::to_string(i + 1));
      }
      sum += l;
    }
    return sum;
  };

  AdamConfig cfg;
  cfg.learning_rate = hyper.learning_rate;
  AdamState adam(cfg, mnet.parameter_count() + emb.values.size());
  result.loss_trace.push_back(summed_loss(0));
  for (std::size_t epoch = 1; epoch <= hyper.epochs; ++epoch) {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      const MetaGradients g = task_gradients(emb, mnet, tasks[i], hyper.beta, hyper.gamma);
      if (!std::isfinite(g.query_loss)) {
        throw NumericError("query loss became non-finite at epoch " + std::to_string(epoch) + ", task " +
                           std::to_string(i + 1));
      }
      std::vector<ParamBlock> blocks;
      for (std::size_t l = 0; l < mnet.layers.size(); ++l) {
        blocks.push_back({mnet.layers[l].weights, g.layers[l].weights});
        blocks.push_back({mnet.layers[l].bias, g.layers[l].bias});
      }
      blocks.push_back({emb.values, g.embeddings});
      try {
        adam_step(adam, blocks);
      } catch (const NumericError& e) {
        throw NumericError("epoch " + std::to_string(epoch) + ", task " + std::to_string(i + 1) + ": " + e.what());
      }
    }
    result.loss_trace.push_back(summed_loss(epoch));
  }
  return result;
}

LinkPredictResult link_predict(const EmbeddingTable& emb, const RelationMetaNet& net, const Task& task,
                               std::span<const std::string> candidates, double beta, double gamma) {
  if (task.query.empty()) throw ArgumentError("query set is empty");
  if (candidates.empty()) throw ArgumentError("candidate list is empty");
  const auto adapted = adapted_relation(emb, net, task, beta, gamma);

  std::vector<std::size_t> rows;
  rows.reserve(candidates.size());
  for (const auto& c : candidates) rows.push_back(emb.index_of(c));

  LinkPredictResult out;
  std::vector<double> scores(candidates.size());
  for (const auto& e : task.query) {
    const auto truth = std::find(candidates.begin(), candidates.end(), e.positive.tail);
    if (truth == candidates.end()) {
      throw ArgumentError("true tail '" + e.positive.tail + "' is not among the candidates");
    }
    const std::size_t ti = static_cast<std::size_t>(truth - candidates.begin());
    const auto head = emb[e.positive.head];
    for (std::size_t c = 0; c < candidates.size(); ++c) scores[c] = norm2(translate(head, adapted, emb.row(rows[c])));
    std::size_t rank = 1;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (scores[c] < scores[ti] || (scores[c] == scores[ti] && candidates[c] < candidates[ti])) ++rank;
    }
    out.ranks.push_back(rank);
    out.hits1 += rank <= 1 ? 1.0 : 0.0;
    out.hits5 += rank <= 5 ? 1.0 : 0.0;
    out.mrr += 1.0 / static_cast<double>(rank);
  }
  const double n = static_cast<double>(out.ranks.size());
  out.hits1 /= n;
  out.hits5 /= n;
  out.mrr /= n;
  return out;
}

namespace {

nlohmann::json examples_json(std::span<const TaskExample> examples) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : examples) {
    arr.push_back({{"head", e.positive.head}, {"tail", e.positive.tail}, {"negative_tail", e.negative_tail}});
  }
  return arr;
}

std::vector<TaskExample> examples_from_json(const nlohmann::json& arr, Relation relation) {
  std::vector<TaskExample> out;
  for (const auto& e : arr) {
    out.push_back({{e.at("head").get<std::string>(), relation, e.at("tail").get<std::string>()},
                   e.at("negative_tail").get<std::string>()});
  }
  return out;
}

}  // namespace

nlohmann::json to_json(const Task& task) {
  return {{"relation", std::string(to_string(task.relation))},
          {"support", examples_json(task.support)},
          {"query", examples_json(task.query)}};
}

Task task_from_json(const nlohmann::json& doc) {
  try {
    Task task;
    task.relation = parse_relation(doc.at("relation").get<std::string>());
    task.support = examples_from_json(doc.at("support"), task.relation);
    task.query = examples_from_json(doc.at("query"), task.relation);
    return task;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed task json: ") + e.what());
  }
}

nlohmann::json to_json(const EmbeddingTable& emb) {
  nlohmann::json rows = nlohmann::json::object();
  for (std::size_t i = 0; i < emb.size(); ++i) {
    const auto r = emb.row(i);
    rows[emb.ids[i]] = std::vector<double>(r.begin(), r.end());
  }
  return {{"dim", emb.dim}, {"embeddings", std::move(rows)}};
}

nlohmann::json to_json(const RelationMetaNet& net) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : net.layers) {
    layers.push_back({{"inputs", l.inputs}, {"outputs", l.outputs}, {"weights", l.weights}, {"bias", l.bias}});
  }
  return {{"dim", net.dim}, {"negative_slope", net.negative_slope}, {"layers", std::move(layers)}};
}

}  // namespace tfkg
