#include "dialpol/policies/multidense.hpp"

namespace dialpol::policies {

MultiDensePolicy::MultiDensePolicy(core::ActionSpace actions, std::size_t state_dim, MultiDenseConfig config,
                                   std::uint64_t seed)
    : Policy(std::move(actions), state_dim), config_(config) {
  ad::Rng rng(ad::derive_seed(seed, "multidense"));
  features_ = Mlp("features", {state_dim_, config_.hidden, config_.features}, Activation::relu, Activation::relu, rng);
  heads_ = Linear("heads", config_.features, 2 * actions_.size(), rng);
}

std::vector<ad::Parameter*> MultiDensePolicy::parameters() {
  std::vector<ad::Parameter*> out;
  features_.parameters(out);
  heads_.parameters(out);
  return out;
}

ad::Var MultiDensePolicy::logits(ad::Graph& g, ad::Var states) { return heads_(g, features_(g, states)); }

ad::Var two_hot_cross_entropy(ad::Graph& g, ad::Var pair_logits, Batch batch, std::size_t m) {
  ad::Tensor targets({batch.size(), 2 * m});
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto row = core::to_two_hot(batch[i].actions, m);
    for (std::size_t j = 0; j < row.size(); ++j) targets.at(i, j) = row[j];
  }
  auto picked = ad::sum(ad::mul(ad::log_softmax(pair_logits, 2), g.constant(std::move(targets))));
  return ad::scale(picked, -1.0 / static_cast<double>(batch.size() * m));
}

ad::Var MultiDensePolicy::loss(ad::Graph& g, Batch batch) {
  check_batch(batch);
  return two_hot_cross_entropy(g, logits(g, g.constant(stack_states(batch, state_dim_))), batch, actions_.size());
}

core::ActionSet select_pairs(std::span<const double> pair_logits) {
  std::vector<int> ids;
  for (std::size_t i = 0; 2 * i + 1 < pair_logits.size(); ++i) {
    if (pair_logits[2 * i + 1] > pair_logits[2 * i]) ids.push_back(static_cast<int>(i));
  }
  return core::ActionSet::from_ids(std::move(ids));
}

std::vector<core::ActionSet> MultiDensePolicy::predict(std::span<const core::DialogueState> states) {
  check_states(states);
  ad::Graph g(ad::Graph::Mode::inference);
  const auto z = logits(g, g.constant(stack_states(states, state_dim_))).value();
  std::vector<core::ActionSet> out;
  out.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) out.push_back(select_pairs(z.data().subspan(i * z.cols(), z.cols())));
  return out;
}

nlohmann::json MultiDensePolicy::config() const {
  return {{"hidden", config_.hidden}, {"features", config_.features}};
}

}  // namespace dialpol::policies
