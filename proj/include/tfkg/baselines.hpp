#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "tfkg/records.hpp"
#include "tfkg/triples.hpp"

namespace tfkg {

inline constexpr std::size_t kPairFeatureCount = 2 * kFeatureCount;

/// Raw head features followed by raw tail features; label 1 for Similar.
struct PairSample {
  std::array<double, kPairFeatureCount> features{};
  int label = 0;
};

std::vector<PairSample> pairize(std::span<const Triple> triples, std::span<const TransformerRecord> records);

struct BaselineHyper {
  double learning_rate = 0.1;
  std::size_t epochs = 500;
  std::size_t hidden = 16;
  double negative_slope = 0.01;
  std::uint64_t seed = 0;
};

struct LrModel {
  std::vector<double> weights = std::vector<double>(kPairFeatureCount, 0.0);
  double bias = 0.0;

  bool operator==(const LrModel&) const = default;
};

/// One LeakyReLU hidden layer and a sigmoid output unit.
struct AnnModel {
  std::size_t inputs = kPairFeatureCount;
  std::size_t hidden = 0;
  double negative_slope = 0.01;
  std::vector<double> w1;  // hidden x inputs, row-major
  std::vector<double> b1;
  std::vector<double> w2;
  double b2 = 0.0;

  bool operator==(const AnnModel&) const = default;
};

struct LrTrainResult {
  LrModel model;
  std::vector<double> loss_trace;  // mean cross-entropy; entry 0 at init
};

struct AnnTrainResult {
  AnnModel model;
  std::vector<double> loss_trace;
};

/// Full-batch gradient descent on mean cross-entropy. Both labels must occur.
LrTrainResult train_lr(std::span<const PairSample> samples, const BaselineHyper& hyper);
double predict_lr(const LrModel& model, std::span<const double> features);
double lr_loss(const LrModel& model, std::span<const PairSample> samples);

AnnModel init_ann(std::size_t inputs, std::size_t hidden, double negative_slope, std::uint64_t seed);
AnnTrainResult train_ann(std::span<const PairSample> samples, const BaselineHyper& hyper);
double predict_ann(const AnnModel& model, std::span<const double> features);
double ann_loss(const AnnModel& model, std::span<const PairSample> samples);

/// Gradient of ann_loss, shaped like the model's parameters.
struct AnnGradients {
  std::vector<double> w1;
  std::vector<double> b1;
  std::vector<double> w2;
  double b2 = 0.0;
  double loss = 0.0;
};
AnnGradients ann_gradients(const AnnModel& model, std::span<const PairSample> samples);

/// Share of samples whose thresholded prediction (p >= 0.5 means Similar)
/// matches the label.
double accuracy(const LrModel& model, std::span<const PairSample> samples);
double accuracy(const AnnModel& model, std::span<const PairSample> samples);

nlohmann::json to_json(const LrModel& model);
nlohmann::json to_json(const AnnModel& model);
LrModel lr_model_from_json(const nlohmann::json& doc);
AnnModel ann_model_from_json(const nlohmann::json& doc);

}  // namespace tfkg
