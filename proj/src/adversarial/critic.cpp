#include "dialpol/adversarial/critic.hpp"

#include "dialpol/policies/checkpoint.hpp"

namespace dialpol::adversarial {

RewardModel::RewardModel(std::size_t state_dim, std::size_t atoms, CriticConfig config, std::uint64_t seed)
    : state_dim_(state_dim), atoms_(atoms) {
  ad::Rng rng(ad::derive_seed(seed, "critic"));
  net_ = policies::Mlp("critic", {input_dim(), config.hidden1, config.hidden2, 1}, policies::Activation::relu,
                       policies::Activation::none, rng);
  for (auto& layer : net_.layers()) layer.bias().value = ad::Tensor::zeros_like(layer.bias().value);
}

ad::Var RewardModel::score(ad::Graph& g, ad::Var states, ad::Var actions) {
  if (states.value().cols() != state_dim_ || actions.value().cols() != 2 * atoms_ ||
      states.value().rows() != actions.value().rows()) {
    throw ad::ShapeError("critic", "states " + ad::to_string(states.shape()) + " and actions " +
                                       ad::to_string(actions.shape()) + " for state width " +
                                       std::to_string(state_dim_) + " and " + std::to_string(atoms_) + " atoms");
  }
  return net_(g, ad::concat({states, actions}));
}

double RewardModel::score(std::span<const double> state, std::span<const double> action) {
  ad::Graph g(ad::Graph::Mode::inference);
  auto s = g.constant(ad::Tensor({1, state.size()}, {state.begin(), state.end()}));
  auto a = g.constant(ad::Tensor({1, action.size()}, {action.begin(), action.end()}));
  return score(g, s, a).value().item();
}

ad::Var RewardModel::input_gradient(ad::Graph& g, ad::Var inputs) {
  auto& layers = net_.layers();
  std::vector<ad::Tensor> masks;
  ad::Var x = inputs;
  for (std::size_t k = 0; k + 1 < layers.size(); ++k) {
    x = layers[k](g, x);
    ad::Tensor mask = x.value();
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = mask[i] > 0.0 ? 1.0 : 0.0;
    masks.push_back(std::move(mask));
    x = ad::relu(x);
  }
  ad::Var grad = ad::transpose(g.parameter(layers.back().weight()));
  for (std::size_t k = masks.size(); k-- > 0;) {
    grad = ad::mul(g.constant(std::move(masks[k])), grad);
    grad = ad::matmul(grad, ad::transpose(g.parameter(layers[k].weight())));
  }
  return grad;
}

std::vector<ad::Parameter*> RewardModel::parameters() {
  std::vector<ad::Parameter*> out;
  net_.parameters(out);
  return out;
}

std::uint64_t parameter_hash(RewardModel& critic) { return policies::parameter_hash(critic.parameters()); }

}  // namespace dialpol::adversarial
