#pragma once

#include <cstdint>
#include <vector>

#include "dialpol/policies/layers.hpp"

namespace dialpol::adversarial {

struct CriticConfig {
  std::size_t hidden1 = 128;
  std::size_t hidden2 = 128;
};

// Reward model: ReLU MLP over [state | two-hot action] -> scalar, with
// biases starting at zero.
class RewardModel {
 public:
  RewardModel(std::size_t state_dim, std::size_t atoms, CriticConfig config, std::uint64_t seed);

  // Scores [n, 1] for states [n, D] and actions [n, 2m].
  ad::Var score(ad::Graph& g, ad::Var states, ad::Var actions);
  double score(std::span<const double> state, std::span<const double> action);

  // Gradient of the score with respect to the input rows, built from
  // first-order ops so it can itself be differentiated w.r.t. the weights.
  // ReLU masks are held constant, which is exact almost everywhere.
  ad::Var input_gradient(ad::Graph& g, ad::Var inputs);

  std::vector<ad::Parameter*> parameters();
  std::size_t state_dim() const { return state_dim_; }
  std::size_t atoms() const { return atoms_; }
  std::size_t input_dim() const { return state_dim_ + 2 * atoms_; }
  policies::Mlp& net() { return net_; }

 private:
  std::size_t state_dim_;
  std::size_t atoms_;
  policies::Mlp net_;
};

std::uint64_t parameter_hash(RewardModel& critic);

}  // namespace dialpol::adversarial
