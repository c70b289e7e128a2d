#include "tfkg/baselines.hpp"

#include <cmath>
#include <unordered_map>

#include "tfkg/errors.hpp"
#include "tfkg/rng.hpp"

namespace tfkg {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// -log p(y | z) for a logit z.
double cross_entropy(double z, int y) {
  const double softplus = std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
  return softplus - (y == 1 ? z : 0.0);
}

double leaky(double z, double slope) { return z > 0.0 ? z : slope * z; }
double leaky_grad(double z, double slope) { return z > 0.0 ? 1.0 : slope; }

void require_both_labels(std::span<const PairSample> samples) {
  bool pos = false;
  bool neg = false;
  for (const auto& s : samples) (s.label == 1 ? pos : neg) = true;
  if (!pos || !neg) throw ArgumentError("baseline training needs both labels present");
}

double lr_logit(const LrModel& m, std::span<const double> x) {
  double z = m.bias;
  for (std::size_t k = 0; k < m.weights.size(); ++k) z += m.weights[k] * x[k];
  return z;
}

struct AnnForward {
  std::vector<double> pre;
  std::vector<double> act;
  double logit = 0.0;
};

void ann_forward(const AnnModel& m, std::span<const double> x, AnnForward& f) {
  f.pre.resize(m.hidden);
  f.act.resize(m.hidden);
  f.logit = m.b2;
  for (std::size_t j = 0; j < m.hidden; ++j) {
    double z = m.b1[j];
    const double* row = m.w1.data() + j * m.inputs;
    for (std::size_t k = 0; k < m.inputs; ++k) z += row[k] * x[k];
    f.pre[j] = z;
    f.act[j] = leaky(z, m.negative_slope);
    f.logit += m.w2[j] * f.act[j];
  }
}

void check_inputs(std::size_t expected, std::span<const double> x) {
  if (x.size() != expected) {
    throw ShapeError("expected " + std::to_string(expected) + " inputs, got " + std::to_string(x.size()));
  }
}

template <typename Model>
double accuracy_of(const Model& model, std::span<const PairSample> samples, double (*predict)(const Model&, std::span<const double>)) {
  if (samples.empty()) throw ArgumentError("cannot evaluate accuracy on an empty set");
  std::size_t correct = 0;
  for (const auto& s : samples) {
    const int predicted = predict(model, s.features) >= 0.5 ? 1 : 0;
    if (predicted == s.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(samples.size());
}

}  // namespace

std::vector<PairSample> pairize(std::span<const Triple> triples, std::span<const TransformerRecord> records) {
  std::unordered_map<std::string, const TransformerRecord*> by_id;
  for (const auto& r : records) by_id.emplace(r.id, &r);
  auto lookup = [&](const std::string& id) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw LookupError("no record with id '" + id + "'");
    return it->second;
  };
  std::vector<PairSample> samples;
  samples.reserve(triples.size());
  for (const auto& t : triples) {
    PairSample s;
    const auto* h = lookup(t.head);
    const auto* tl = lookup(t.tail);
    std::copy(h->features.begin(), h->features.end(), s.features.begin());
    std::copy(tl->features.begin(), tl->features.end(), s.features.begin() + kFeatureCount);
    s.label = t.relation == Relation::similar ? 1 : 0;
    samples.push_back(s);
  }
  return samples;
}

double predict_lr(const LrModel& model, std::span<const double> features) {
  check_inputs(model.weights.size(), features);
  return sigmoid(lr_logit(model, features));
}

double lr_loss(const LrModel& model, std::span<const PairSample> samples) {
  double sum = 0.0;
  for (const auto& s : samples) sum += cross_entropy(lr_logit(model, s.features), s.label);
  return samples.empty() ? 0.0 : sum / static_cast<double>(samples.size());
}

LrTrainResult train_lr(std::span<const PairSample> samples, const BaselineHyper& hyper) {
  require_both_labels(samples);
  if (!(hyper.learning_rate > 0.0)) throw ArgumentError("learning_rate must be positive");
  Rng rng(mix_seed(hyper.seed, 0));
  LrTrainResult result;
  LrModel& m = result.model;
  for (double& w : m.weights) w = rng.uniform(-0.01, 0.01);

  const double inv_n = 1.0 / static_cast<double>(samples.size());
  std::vector<double> grad(m.weights.size());
  result.loss_trace.push_back(lr_loss(m, samples));
  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_bias = 0.0;
    for (const auto& s : samples) {
      const double err = sigmoid(lr_logit(m, s.features)) - s.label;
      for (std::size_t k = 0; k < grad.size(); ++k) grad[k] += err * s.features[k];
      grad_bias += err;
    }
    for (std::size_t k = 0; k < grad.size(); ++k) m.weights[k] -= hyper.learning_rate * grad[k] * inv_n;
    m.bias -= hyper.learning_rate * grad_bias * inv_n;
    const double loss = lr_loss(m, samples);
    if (!std::isfinite(loss)) throw NumericError("lr loss became non-finite at epoch " + std::to_string(epoch + 1));
    result.loss_trace.push_back(loss);
  }
  return result;
}

AnnModel init_ann(std::size_t inputs, std::size_t hidden, double negative_slope, std::uint64_t seed) {
  if (hidden == 0) throw ArgumentError("ann hidden width must be at least 1");
  Rng rng(mix_seed(seed, 1));
  AnnModel m;
  m.inputs = inputs;
  m.hidden = hidden;
  m.negative_slope = negative_slope;
  m.w1.resize(hidden * inputs);
  m.b1.assign(hidden, 0.0);
  m.w2.resize(hidden);
  const double a1 = 1.0 / std::sqrt(static_cast<double>(inputs));
  const double a2 = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (double& w : m.w1) w = rng.uniform(-a1, a1);
  for (double& w : m.w2) w = rng.uniform(-a2, a2);
  return m;
}

double predict_ann(const AnnModel& model, std::span<const double> features) {
  check_inputs(model.inputs, features);
  AnnForward f;
  ann_forward(model, features, f);
  return sigmoid(f.logit);
}

double ann_loss(const AnnModel& model, std::span<const PairSample> samples) {
  AnnForward f;
  double sum = 0.0;
  for (const auto& s : samples) {
    ann_forward(model, s.features, f);
    sum += cross_entropy(f.logit, s.label);
  }
  return samples.empty() ? 0.0 : sum / static_cast<double>(samples.size());
}

AnnGradients ann_gradients(const AnnModel& model, std::span<const PairSample> samples) {
  if (samples.empty()) throw ArgumentError("ann_gradients needs at least one sample");
  AnnGradients g;
  g.w1.assign(model.w1.size(), 0.0);
  g.b1.assign(model.hidden, 0.0);
  g.w2.assign(model.hidden, 0.0);
  AnnForward f;
  double loss = 0.0;
  for (const auto& s : samples) {
    ann_forward(model, s.features, f);
    loss += cross_entropy(f.logit, s.label);
    const double d_logit = sigmoid(f.logit) - s.label;
    g.b2 += d_logit;
    for (std::size_t j = 0; j < model.hidden; ++j) {
      g.w2[j] += d_logit * f.act[j];
      const double d_pre = d_logit * model.w2[j] * leaky_grad(f.pre[j], model.negative_slope);
      g.b1[j] += d_pre;
      double* row = g.w1.data() + j * model.inputs;
      for (std::size_t k = 0; k < model.inputs; ++k) row[k] += d_pre * s.features[k];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(samples.size());
  for (auto* v : {&g.w1, &g.b1, &g.w2}) {
    for (double& x : *v) x *= inv_n;
  }
  g.b2 *= inv_n;
  g.loss = loss * inv_n;
  return g;
}

AnnTrainResult train_ann(std::span<const PairSample> samples, const BaselineHyper& hyper) {
  require_both_labels(samples);
  if (!(hyper.learning_rate > 0.0)) throw ArgumentError("learning_rate must be positive");
  AnnTrainResult result{init_ann(kPairFeatureCount, hyper.hidden, hyper.negative_slope, hyper.seed), {}};
  AnnModel& m = result.model;
  result.loss_trace.push_back(ann_loss(m, samples));
  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    const AnnGradients g = ann_gradients(m, samples);
    for (std::size_t i = 0; i < m.w1.size(); ++i) m.w1[i] -= hyper.learning_rate * g.w1[i];
    for (std::size_t j = 0; j < m.hidden; ++j) {
      m.b1[j] -= hyper.learning_rate * g.b1[j];
      m.w2[j] -= hyper.learning_rate * g.w2[j];
    }
    m.b2 -= hyper.learning_rate * g.b2;
    const double loss = ann_loss(m, samples);
    if (!std::isfinite(loss)) throw NumericError("ann loss became non-finite at epoch " + std::to_string(epoch + 1));
    result.loss_trace.push_back(loss);
  }
  return result;
}

double accuracy(const LrModel& model, std::span<const PairSample> samples) {
  return accuracy_of(model, samples, &predict_lr);
}

double accuracy(const AnnModel& model, std::span<const PairSample> samples) {
  return accuracy_of(model, samples, &predict_ann);
}

nlohmann::json to_json(const LrModel& model) {
  return {{"kind", "logistic_regression"}, {"weights", model.weights}, {"bias", model.bias}};
}

nlohmann::json to_json(const AnnModel& model) {
  return {{"kind", "ann"},
          {"inputs", model.inputs},
          {"hidden", model.hidden},
          {"negative_slope", model.negative_slope},
          {"w1", model.w1},
          {"b1", model.b1},
          {"w2", model.w2},
          {"b2", model.b2}};
}

LrModel lr_model_from_json(const nlohmann::json& doc) {
  try {
    LrModel m;
    m.weights = doc.at("weights").get<std::vector<double>>();
    m.bias = doc.at("bias").get<double>();
    if (m.weights.size() != kPairFeatureCount) throw DataError("lr model must have 16 weights");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed lr model json: ") + e.what());
  }
}

AnnModel ann_model_from_json(const nlohmann::json& doc) {
  try {
    AnnModel m;
    m.inputs = doc.at("inputs").get<std::size_t>();
    m.hidden = doc.at("hidden").get<std::size_t>();
    m.negative_slope = doc.at("negative_slope").get<double>();
    m.w1 = doc.at("w1").get<std::vector<double>>();
    m.b1 = doc.at("b1").get<std::vector<double>>();
    m.w2 = doc.at("w2").get<std::vector<double>>();
    m.b2 = doc.at("b2").get<double>();
    if (m.w1.size() != m.inputs * m.hidden || m.b1.size() != m.hidden || m.w2.size() != m.hidden) {
      throw DataError("ann model shapes are inconsistent");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed ann model json: ") + e.what());
  }
}

}  // namespace tfkg
