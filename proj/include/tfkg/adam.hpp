#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tfkg {

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Optimizer state for a flat parameter vector of fixed size.
/// Moments start at zero with step = 0.
struct AdamState {
  AdamConfig config;
  std::size_t step = 0;
  std::vector<double> first_moment;
  std::vector<double> second_moment;

  AdamState() = default;
  AdamState(AdamConfig cfg, std::size_t size)
      : config(cfg), first_moment(size, 0.0), second_moment(size, 0.0) {}

  std::size_t size() const noexcept { return first_moment.size(); }
};

/// One parameter block and its gradient. Blocks are laid out back to back in
/// the optimizer state, in the order they are passed.
struct ParamBlock {
  std::span<double> values;
  std::span<const double> grads;
};

/// Bias-corrected Adam update over consecutive blocks. Throws NumericError on a
/// non-finite gradient (nothing is modified) and ShapeError if the total size
/// does not match the state.
void adam_step(AdamState& state, std::span<const ParamBlock> blocks);

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads);

}  // namespace tfkg
