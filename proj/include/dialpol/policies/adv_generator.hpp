#pragma once

#include <cstdint>

#include "dialpol/autodiff/rng.hpp"
#include "dialpol/policies/multidense.hpp"

namespace dialpol::policies {

inline constexpr double kDefaultGumbelTemperature = 0.005;

// MultiDense network whose heads are sampled through Gumbel-Softmax and
// hardened with the straight-through estimator. Its deterministic prediction
// (used for evaluation) is the MultiDense argmax, which is also the hard
// sample under zero noise.
class AdvGenerator final : public Policy {
 public:
  AdvGenerator(core::ActionSpace actions, std::size_t state_dim, MultiDenseConfig config, std::uint64_t seed,
               double temperature = kDefaultGumbelTemperature);
  // Wraps an already trained MultiDense model.
  explicit AdvGenerator(MultiDensePolicy base, double temperature = kDefaultGumbelTemperature);

  using Policy::predict;
  Method method() const override { return Method::diaadv; }
  std::vector<ad::Parameter*> parameters() override { return base_.parameters(); }
  ad::Var loss(ad::Graph& g, Batch batch) override { return base_.loss(g, batch); }
  std::vector<core::ActionSet> predict(std::span<const core::DialogueState> states) override {
    return base_.predict(states);
  }
  nlohmann::json config() const override;
  std::unique_ptr<Policy> clone() const override { return std::make_unique<AdvGenerator>(*this); }

  // Hard two-hot actions [n, 2m] whose gradient follows the soft relaxation.
  ad::Var generate(ad::Graph& g, ad::Var states, ad::Rng& rng);
  // Same with explicit Gumbel noise of shape [n, 2m].
  ad::Var generate(ad::Graph& g, ad::Var states, const ad::Tensor& noise);
  // Soft relaxation only, before hardening.
  ad::Var relaxed(ad::Graph& g, ad::Var states, const ad::Tensor& noise);

  double temperature() const { return temperature_; }
  MultiDensePolicy& base() { return base_; }

 private:
  MultiDensePolicy base_;
  double temperature_;
};

}  // namespace dialpol::policies
