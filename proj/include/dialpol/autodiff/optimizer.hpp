#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dialpol/autodiff/graph.hpp"

namespace dialpol::ad {

enum class OptimizerKind { sgd, adam };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First-order optimizer over a fixed, ordered parameter list. Adam uses the
// standard bias-corrected moment estimates.
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig config = {});

  const OptimizerConfig& config() const { return config_; }
  std::uint64_t steps() const { return step_; }

  // Throws std::domain_error naming the parameter if a gradient is not
  // finite, and ShapeError if shapes disagree with the parameters.
  void step(std::span<Parameter* const> params, std::span<const Tensor> grads);

 private:
  OptimizerConfig config_;
  std::uint64_t step_ = 0;
  std::vector<Tensor> first_;
  std::vector<Tensor> second_;
};

}  // namespace dialpol::ad
