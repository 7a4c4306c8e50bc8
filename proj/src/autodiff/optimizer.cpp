#include "dialpol/autodiff/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace dialpol::ad {

Optimizer::Optimizer(OptimizerConfig config) : config_(config) {
  if (!(config_.learning_rate > 0.0)) throw std::invalid_argument("optimizer: learning rate must be positive");
}

void Optimizer::step(std::span<Parameter* const> params, std::span<const Tensor> grads) {
  if (params.size() != grads.size()) {
    throw ShapeError("optimizer", std::to_string(params.size()) + " parameters vs " +
                                      std::to_string(grads.size()) + " gradients");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i]->value.shape() != grads[i].shape()) {
      throw ShapeError("optimizer", params[i]->name + " " + to_string(params[i]->value.shape()) +
                                        " vs gradient " + to_string(grads[i].shape()));
    }
    if (!grads[i].all_finite()) {
      throw std::domain_error("optimizer: non-finite gradient for parameter '" + params[i]->name + "'");
    }
  }
  if (config_.kind == OptimizerKind::adam && first_.empty()) {
    for (const Parameter* p : params) {
      first_.push_back(Tensor::zeros_like(p->value));
      second_.push_back(Tensor::zeros_like(p->value));
    }
  }
  if (config_.kind == OptimizerKind::adam && first_.size() != params.size()) {
    throw ShapeError("optimizer", "parameter list changed between steps");
  }

  ++step_;
  const double lr = config_.learning_rate;
  if (config_.kind == OptimizerKind::sgd) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      Tensor& w = params[i]->value;
      for (std::size_t j = 0; j < w.size(); ++j) w[j] -= lr * grads[i][j];
    }
    return;
  }

  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(step_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(step_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& w = params[i]->value;
    Tensor& m = first_[i];
    Tensor& v = second_[i];
    if (m.shape() != w.shape()) throw ShapeError("optimizer", "moment shape drift for " + params[i]->name);
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double g = grads[i][j];
      m[j] = b1 * m[j] + (1.0 - b1) * g;
      v[j] = b2 * v[j] + (1.0 - b2) * g * g;
      const double mhat = m[j] / c1;
      const double vhat = v[j] / c2;
      w[j] -= lr * mhat / (std::sqrt(vhat) + config_.epsilon);
    }
  }
}

}  // namespace dialpol::ad
