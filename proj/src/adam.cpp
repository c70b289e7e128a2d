#include "tfkg/adam.hpp"

#include <cmath>
#include <string>

#include "tfkg/errors.hpp"

namespace tfkg {

void adam_step(AdamState& state, std::span<const ParamBlock> blocks) {
  std::size_t total = 0;
  for (const auto& block : blocks) {
    if (block.values.size() != block.grads.size()) {
      throw ShapeError("adam block has " + std::to_string(block.values.size()) + " values but " +
                       std::to_string(block.grads.size()) + " gradients");
    }
    for (double g : block.grads) {
      if (!std::isfinite(g)) throw NumericError("non-finite gradient passed to adam");
    }
    total += block.values.size();
  }
  if (total != state.size()) {
    throw ShapeError("adam state holds " + std::to_string(state.size()) + " entries, got " +
                     std::to_string(total));
  }

  const AdamConfig& cfg = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(cfg.beta1, t);
  const double bias2 = 1.0 - std::pow(cfg.beta2, t);

  std::size_t offset = 0;
  for (const auto& block : blocks) {
    for (std::size_t i = 0; i < block.values.size(); ++i, ++offset) {
      const double g = block.grads[i];
      double& m = state.first_moment[offset];
      double& v = state.second_moment[offset];
      m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
      v = cfg.beta2 * v + (1.0 - cfg.beta2) * g * g;
      const double m_hat = m / bias1;
      const double v_hat = v / bias2;
      block.values[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
  }
}

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grads) {
  const ParamBlock block{params, grads};
  adam_step(state, std::span<const ParamBlock>(&block, 1));
}

}  // namespace tfkg
