#include "dialpol/adversarial/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "dialpol/env/episode.hpp"
#include "dialpol/env/goal_sampler.hpp"
#include "dialpol/policies/agent.hpp"
#include "dialpol/policies/checkpoint.hpp"

namespace dialpol::adversarial {

namespace {

struct RealBatch {
  ad::Tensor states;
  ad::Tensor actions;
};

RealBatch sample_batch(const std::vector<core::StateActionPair>& pairs, std::size_t n, std::size_t dim,
                       std::size_t m, ad::Rng& rng) {
  RealBatch b{ad::Tensor({n, dim}), ad::Tensor({n, 2 * m})};
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = pairs[rng.below(pairs.size())];
    for (std::size_t j = 0; j < dim; ++j) b.states.at(i, j) = p.state.bits[j];
    const auto two_hot = core::to_two_hot(p.actions, m);
    for (std::size_t j = 0; j < two_hot.size(); ++j) b.actions.at(i, j) = two_hot[j];
  }
  return b;
}

double apply(ad::Graph& g, ad::Var loss, std::vector<ad::Parameter*> params, ad::Optimizer& opt, const char* what) {
  const double value = loss.value().item();
  if (!std::isfinite(value)) throw policies::TrainingError(std::string(what) + " loss is not finite");
  g.backward(loss);
  const auto grads = g.gradients(params);
  try {
    opt.step(params, grads);
  } catch (const std::domain_error& e) {
    throw policies::TrainingError(std::string(what) + ": " + e.what());
  }
  return value;
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double critic_step(RewardModel& critic, ad::Optimizer& opt, policies::AdvGenerator& gen, const ad::Tensor& states,
                   const ad::Tensor& real_actions, double lambda, ad::Rng& rng) {
  ad::Graph sampler(ad::Graph::Mode::inference);
  const ad::Tensor fake = gen.generate(sampler, sampler.constant(states), rng).value();
  ad::Graph g;
  auto loss = critic_loss(g, critic, states, real_actions, fake, lambda, rng);
  return apply(g, loss, critic.parameters(), opt, "critic");
}

double generator_step(policies::AdvGenerator& gen, ad::Optimizer& opt, RewardModel& critic, const ad::Tensor& states,
                      ad::Rng& rng) {
  ad::Graph g;
  auto loss = generator_loss(g, gen, critic, states, rng);
  return apply(g, loss, gen.parameters(), opt, "generator");
}

std::pair<double, double> validation_success(policies::AdvGenerator& gen, const env::Environment& env,
                                             std::size_t episodes, std::uint64_t seed) {
  if (episodes == 0) return {0.0, 0.0};
  policies::PolicyAgent agent(gen);
  ad::Rng goals(ad::derive_seed(seed, "validation"));
  std::size_t wins = 0;
  double turns = 0.0;
  for (std::size_t i = 0; i < episodes; ++i) {
    const auto log = env::run_episode(agent, env, goals);
    wins += log.termination == env::Termination::success;
    turns += log.turn_count;
  }
  const double n = static_cast<double>(episodes);
  return {static_cast<double>(wins) / n, turns / n};
}

AdvTrainResult adversarial_train(policies::AdvGenerator& gen, RewardModel& critic,
                                 const std::vector<core::StateActionPair>& train, const AdvTrainConfig& config,
                                 const env::Environment* validation_env) {
  if (config.critic_steps == 0 || config.batch_size == 0) {
    throw std::invalid_argument("adversarial_train: critic steps and batch size must be positive");
  }
  if (!(config.critic_lr > 0.0) || !(config.generator_lr > 0.0)) {
    throw std::invalid_argument("adversarial_train: learning rates must be positive");
  }
  if (config.penalty_weight < 0.0) throw std::invalid_argument("adversarial_train: penalty weight must be nonnegative");
  if (critic.state_dim() != gen.state_dim() || critic.atoms() != gen.actions().size()) {
    throw ad::ShapeError("adversarial_train", "critic and generator disagree on state width or atom count");
  }
  AdvTrainResult result;
  if (config.iterations == 0) return result;
  if (train.empty()) throw std::invalid_argument("adversarial_train: empty training split");

  const std::size_t dim = gen.state_dim(), m = gen.actions().size();
  ad::Optimizer critic_opt({ad::OptimizerKind::adam, config.critic_lr, 0.5, 0.9, 1e-8});
  ad::Optimizer gen_opt({ad::OptimizerKind::adam, config.generator_lr, 0.5, 0.9, 1e-8});
  ad::Rng rng(ad::derive_seed(config.seed, "adversarial"));
  const bool validate = validation_env != nullptr && config.validate_every > 0;

  std::unique_ptr<policies::Policy> best;
  if (validate) {
    const auto [succ, turns] = validation_success(gen, *validation_env, config.validation_episodes, config.seed);
    result.trace.push_back({0, 0.0, 0.0, succ, turns});
    result.best_success = succ;
    result.best_iteration = 0;
    best = gen.clone();
  }

  for (std::size_t it = 1; it <= config.iterations; ++it) {
    TraceRow row;
    row.iteration = it;
    try {
      double c = 0.0;
      for (std::size_t k = 0; k < config.critic_steps; ++k) {
        const auto b = sample_batch(train, config.batch_size, dim, m, rng);
        c += critic_step(critic, critic_opt, gen, b.states, b.actions, config.penalty_weight, rng);
      }
      row.critic_loss = c / static_cast<double>(config.critic_steps);
      const auto b = sample_batch(train, config.batch_size, dim, m, rng);
      row.generator_loss = generator_step(gen, gen_opt, critic, b.states, rng);
    } catch (const std::exception& e) {
      throw DivergenceError("adversarial training diverged at iteration " + std::to_string(it) + ": " + e.what(),
                            result.trace);
    }
    if (validate && (it % config.validate_every == 0 || it == config.iterations)) {
      const auto [succ, turns] = validation_success(gen, *validation_env, config.validation_episodes, config.seed);
      row.val_success = succ;
      row.val_turns = turns;
      if (succ > *result.best_success) {
        result.best_success = succ;
        result.best_iteration = it;
        best = gen.clone();
      }
    }
    result.trace.push_back(row);
  }
  if (best) policies::copy_parameters(*best, gen);
  if (!validate) result.best_iteration = config.iterations;
  return result;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace) {
  out << "iteration,critic_loss,generator_loss,val_success,val_turns\n";
  for (const auto& r : trace) {
    out << r.iteration << ',' << number(r.critic_loss) << ',' << number(r.generator_loss) << ','
        << (r.val_success ? number(*r.val_success) : "") << ',' << (r.val_turns ? number(*r.val_turns) : "") << '\n';
  }
}

}  // namespace dialpol::adversarial
