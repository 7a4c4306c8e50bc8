#pragma once

#include <cstdint>

#include "dialpol/policies/layers.hpp"
#include "dialpol/policies/policy.hpp"

namespace dialpol::policies {

struct MultiDenseConfig {
  std::size_t hidden = 128;
  std::size_t features = 64;
};

// Two-layer ReLU feature extractor followed by one f -> 2 head per atom.
// Head i owns columns (2i, 2i+1) of the head weight and bias, so heads share
// no parameters. Logit pairs follow the two-hot layout: index 0 "not
// selected", index 1 "selected"; ties resolve to "not selected".
class MultiDensePolicy final : public Policy {
 public:
  MultiDensePolicy(core::ActionSpace actions, std::size_t state_dim, MultiDenseConfig config, std::uint64_t seed);

  using Policy::predict;
  Method method() const override { return Method::multidense; }
  std::vector<ad::Parameter*> parameters() override;
  ad::Var loss(ad::Graph& g, Batch batch) override;
  std::vector<core::ActionSet> predict(std::span<const core::DialogueState> states) override;
  nlohmann::json config() const override;
  std::unique_ptr<Policy> clone() const override { return std::make_unique<MultiDensePolicy>(*this); }

  // Shape [n, 2m].
  ad::Var logits(ad::Graph& g, ad::Var states);
  const MultiDenseConfig& settings() const { return config_; }
  Linear& heads() { return heads_; }

 private:
  MultiDenseConfig config_;
  Mlp features_;
  Linear heads_;
};

// Argmax per logit pair, (z0 >= z1) meaning "not selected".
core::ActionSet select_pairs(std::span<const double> pair_logits);

// Mean two-way cross-entropy over heads and rows between log-softmaxed pairs
// and the two-hot targets of `batch`.
ad::Var two_hot_cross_entropy(ad::Graph& g, ad::Var pair_logits, Batch batch, std::size_t m);

}  // namespace dialpol::policies
