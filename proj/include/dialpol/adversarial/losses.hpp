#pragma once

#include "dialpol/adversarial/critic.hpp"
#include "dialpol/autodiff/rng.hpp"
#include "dialpol/policies/adv_generator.hpp"

namespace dialpol::adversarial {

inline constexpr double kDefaultPenaltyWeight = 10.0;

// Interpolates x = e * real + (1 - e) * fake row by row and returns
// mean((|grad_x D(x)| - 1)^2).
ad::Var gradient_penalty(ad::Graph& g, RewardModel& critic, const ad::Tensor& real_inputs,
                         const ad::Tensor& fake_inputs, std::span<const double> mix);

// mean D(s, fake) - mean D(s, real) + lambda * penalty; minimizing it pushes
// real pairs above generated ones. `mix` holds one interpolation weight per
// row. Batches must have equal shapes.
ad::Var critic_loss(ad::Graph& g, RewardModel& critic, const ad::Tensor& states, const ad::Tensor& real_actions,
                    const ad::Tensor& fake_actions, double lambda, std::span<const double> mix);
ad::Var critic_loss(ad::Graph& g, RewardModel& critic, const ad::Tensor& states, const ad::Tensor& real_actions,
                    const ad::Tensor& fake_actions, double lambda, ad::Rng& rng);

// -mean D(s, a) where `actions` is the generator output on `g`.
ad::Var generator_loss(ad::Graph& g, RewardModel& critic, ad::Var states, ad::Var actions);
// Samples a_fake through the generator with fresh Gumbel noise.
ad::Var generator_loss(ad::Graph& g, policies::AdvGenerator& gen, RewardModel& critic, const ad::Tensor& states,
                       ad::Rng& rng);

// Head logits [n, 2m] -> hard two-hot through log-softmax, Gumbel-Softmax and
// straight-through; with `harden` false the relaxed sample is returned.
ad::Var sample_from_logits(ad::Var logits, double temperature, const ad::Tensor& noise, bool harden = true);

}  // namespace dialpol::adversarial
