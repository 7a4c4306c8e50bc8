#include "dialpol/adversarial/losses.hpp"

#include "dialpol/autodiff/gumbel.hpp"

namespace dialpol::adversarial {

namespace {

ad::Tensor join_rows(const ad::Tensor& a, const ad::Tensor& b) {
  ad::Tensor out({a.rows(), a.cols() + b.cols()});
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out.at(i, j) = a.at(i, j);
    for (std::size_t j = 0; j < b.cols(); ++j) out.at(i, a.cols() + j) = b.at(i, j);
  }
  return out;
}

}  // namespace

ad::Var gradient_penalty(ad::Graph& g, RewardModel& critic, const ad::Tensor& real_inputs,
                         const ad::Tensor& fake_inputs, std::span<const double> mix) {
  if (real_inputs.shape() != fake_inputs.shape()) {
    throw ad::ShapeError("gradient_penalty", ad::to_string(real_inputs.shape()) + " vs " +
                                                 ad::to_string(fake_inputs.shape()));
  }
  if (mix.size() != real_inputs.rows()) throw ad::ShapeError("gradient_penalty", "one mixing weight per row needed");
  ad::Tensor x(real_inputs.shape());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      x.at(i, j) = mix[i] * real_inputs.at(i, j) + (1.0 - mix[i]) * fake_inputs.at(i, j);
    }
  }
  auto grad = critic.input_gradient(g, g.constant(std::move(x)));
  auto norm = ad::sqrt(ad::add_scalar(ad::row_sum(ad::mul(grad, grad)), 1e-12));
  auto gap = ad::add_scalar(norm, -1.0);
  return ad::mean(ad::mul(gap, gap));
}

ad::Var critic_loss(ad::Graph& g, RewardModel& critic, const ad::Tensor& states, const ad::Tensor& real_actions,
                    const ad::Tensor& fake_actions, double lambda, std::span<const double> mix) {
  if (real_actions.shape() != fake_actions.shape()) {
    throw ad::ShapeError("critic_loss", "real " + ad::to_string(real_actions.shape()) + " vs fake " +
                                            ad::to_string(fake_actions.shape()));
  }
  if (lambda < 0.0) throw std::invalid_argument("critic_loss: penalty weight must be nonnegative");
  auto s = g.constant(states);
  auto real = ad::mean(critic.score(g, s, g.constant(real_actions)));
  auto fake = ad::mean(critic.score(g, s, g.constant(fake_actions)));
  auto loss = ad::sub(fake, real);
  if (lambda == 0.0) return loss;
  auto penalty = gradient_penalty(g, critic, join_rows(states, real_actions), join_rows(states, fake_actions), mix);
  return ad::add(loss, ad::scale(penalty, lambda));
}

ad::Var critic_loss(ad::Graph& g, RewardModel& critic, const ad::Tensor& states, const ad::Tensor& real_actions,
                    const ad::Tensor& fake_actions, double lambda, ad::Rng& rng) {
  std::vector<double> mix(states.rows());
  for (auto& e : mix) e = rng.uniform();
  return critic_loss(g, critic, states, real_actions, fake_actions, lambda, mix);
}

ad::Var generator_loss(ad::Graph& g, RewardModel& critic, ad::Var states, ad::Var actions) {
  return ad::scale(ad::mean(critic.score(g, states, actions)), -1.0);
}

ad::Var generator_loss(ad::Graph& g, policies::AdvGenerator& gen, RewardModel& critic, const ad::Tensor& states,
                       ad::Rng& rng) {
  auto s = g.constant(states);
  return generator_loss(g, critic, s, gen.generate(g, s, rng));
}

ad::Var sample_from_logits(ad::Var logits, double temperature, const ad::Tensor& noise, bool harden) {
  auto soft = ad::gumbel_softmax(ad::log_softmax(logits, 2), temperature, noise, 2);
  return harden ? ad::straight_through(soft, 2) : soft;
}

}  // namespace dialpol::adversarial
