#include "dialpol/policies/adv_generator.hpp"

#include "dialpol/autodiff/gumbel.hpp"

namespace dialpol::policies {

AdvGenerator::AdvGenerator(core::ActionSpace actions, std::size_t state_dim, MultiDenseConfig config,
                           std::uint64_t seed, double temperature)
    : AdvGenerator(MultiDensePolicy(std::move(actions), state_dim, config, seed), temperature) {}

AdvGenerator::AdvGenerator(MultiDensePolicy base, double temperature)
    : Policy(base.actions(), base.state_dim()), base_(std::move(base)), temperature_(temperature) {
  if (!(temperature_ > 0.0)) throw std::invalid_argument("generator temperature must be positive");
}

nlohmann::json AdvGenerator::config() const {
  auto j = base_.config();
  j["temperature"] = temperature_;
  return j;
}

ad::Var AdvGenerator::relaxed(ad::Graph& g, ad::Var states, const ad::Tensor& noise) {
  auto log_p = ad::log_softmax(base_.logits(g, states), 2);
  return ad::gumbel_softmax(log_p, temperature_, noise, 2);
}

ad::Var AdvGenerator::generate(ad::Graph& g, ad::Var states, const ad::Tensor& noise) {
  return ad::straight_through(relaxed(g, states, noise), 2);
}

ad::Var AdvGenerator::generate(ad::Graph& g, ad::Var states, ad::Rng& rng) {
  const std::size_t n = states.value().rows();
  auto flat = ad::gumbel_sample(rng, n * 2 * actions_.size());
  ad::Tensor noise({n, 2 * actions_.size()}, flat.values());
  return generate(g, states, noise);
}

}  // namespace dialpol::policies
