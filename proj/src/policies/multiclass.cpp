#include "dialpol/policies/multiclass.hpp"

namespace dialpol::policies {

MultiClassPolicy::MultiClassPolicy(core::ActionSpace actions, std::size_t state_dim, MultiClassConfig config,
                                   std::uint64_t seed)
    : Policy(std::move(actions), state_dim), config_(config) {
  ad::Rng rng(ad::derive_seed(seed, "multiclass"));
  net_ = Mlp("mlp", {state_dim_, config_.hidden1, config_.hidden2, actions_.size()}, Activation::relu,
             Activation::none, rng);
}

std::vector<ad::Parameter*> MultiClassPolicy::parameters() {
  std::vector<ad::Parameter*> out;
  net_.parameters(out);
  return out;
}

ad::Var MultiClassPolicy::logits(ad::Graph& g, ad::Var states) { return net_(g, states); }

ad::Var MultiClassPolicy::loss(ad::Graph& g, Batch batch) {
  check_batch(batch);
  const std::size_t m = actions_.size();
  ad::Tensor targets({batch.size(), m});
  for (std::size_t i = 0; i < batch.size(); ++i) {
    for (int a : batch[i].actions) targets.at(i, static_cast<std::size_t>(a)) = 1.0;
  }
  return ad::bce_with_logits(logits(g, g.constant(stack_states(batch, state_dim_))), targets);
}

ad::Tensor MultiClassPolicy::probabilities(std::span<const core::DialogueState> states) {
  check_states(states);
  ad::Graph g(ad::Graph::Mode::inference);
  return ad::sigmoid(logits(g, g.constant(stack_states(states, state_dim_)))).value();
}

std::vector<core::ActionSet> MultiClassPolicy::predict(std::span<const core::DialogueState> states) {
  const auto p = probabilities(states);
  std::vector<core::ActionSet> out(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    std::vector<int> ids;
    for (std::size_t a = 0; a < p.cols(); ++a) {
      if (p.at(i, a) > config_.threshold) ids.push_back(static_cast<int>(a));
    }
    out[i] = core::ActionSet::from_ids(std::move(ids));
  }
  return out;
}

nlohmann::json MultiClassPolicy::config() const {
  return {{"hidden1", config_.hidden1}, {"hidden2", config_.hidden2}, {"threshold", config_.threshold}};
}

}  // namespace dialpol::policies
