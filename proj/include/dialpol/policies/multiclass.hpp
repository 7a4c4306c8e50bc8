#pragma once

#include <cstdint>

#include "dialpol/policies/layers.hpp"
#include "dialpol/policies/policy.hpp"

namespace dialpol::policies {

struct MultiClassConfig {
  std::size_t hidden1 = 128;
  std::size_t hidden2 = 128;
  double threshold = 0.5;
};

// Three-layer ReLU MLP with one sigmoid per atom; an atom is predicted when
// its probability is strictly above the threshold.
class MultiClassPolicy final : public Policy {
 public:
  MultiClassPolicy(core::ActionSpace actions, std::size_t state_dim, MultiClassConfig config, std::uint64_t seed);

  using Policy::predict;
  Method method() const override { return Method::multiclass; }
  std::vector<ad::Parameter*> parameters() override;
  ad::Var loss(ad::Graph& g, Batch batch) override;
  std::vector<core::ActionSet> predict(std::span<const core::DialogueState> states) override;
  nlohmann::json config() const override;
  std::unique_ptr<Policy> clone() const override { return std::make_unique<MultiClassPolicy>(*this); }

  ad::Var logits(ad::Graph& g, ad::Var states);
  // Sigmoid outputs, shape [n, m].
  ad::Tensor probabilities(std::span<const core::DialogueState> states);
  const MultiClassConfig& settings() const { return config_; }

 private:
  MultiClassConfig config_;
  Mlp net_;
};

}  // namespace dialpol::policies
