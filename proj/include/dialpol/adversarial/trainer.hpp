#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "dialpol/adversarial/critic.hpp"
#include "dialpol/adversarial/losses.hpp"
#include "dialpol/core/corpus.hpp"
#include "dialpol/env/schema.hpp"
#include "dialpol/policies/adv_generator.hpp"
#include "dialpol/policies/trainer.hpp"

namespace dialpol::adversarial {

struct AdvTrainConfig {
  std::size_t iterations = 300;  // generator steps
  std::size_t critic_steps = 5;  // critic steps per generator step
  double penalty_weight = kDefaultPenaltyWeight;
  std::size_t batch_size = 64;
  double critic_lr = 1e-4;
  double generator_lr = 1e-5;
  std::size_t validate_every = 50;  // 0 disables validation
  std::size_t validation_episodes = 100;
  std::uint64_t seed = 0;
};

struct TraceRow {
  std::size_t iteration = 0;
  double critic_loss = 0.0;
  double generator_loss = 0.0;
  std::optional<double> val_success;
  std::optional<double> val_turns;
};

struct AdvTrainResult {
  std::vector<TraceRow> trace;
  std::size_t best_iteration = 0;
  std::optional<double> best_success;
};

// Raised when a loss stops being finite; carries the trace so far.
class DivergenceError : public policies::TrainingError {
 public:
  DivergenceError(const std::string& what, std::vector<TraceRow> trace)
      : policies::TrainingError(what), trace_(std::move(trace)) {}
  const std::vector<TraceRow>& trace() const { return trace_; }

 private:
  std::vector<TraceRow> trace_;
};

// One critic update: fake actions come from the generator on the same states
// and enter as constants. Returns the loss before the update.
double critic_step(RewardModel& critic, ad::Optimizer& opt, policies::AdvGenerator& gen, const ad::Tensor& states,
                   const ad::Tensor& real_actions, double lambda, ad::Rng& rng);
// One generator update against a fixed critic. Returns the loss before it.
double generator_step(policies::AdvGenerator& gen, ad::Optimizer& opt, RewardModel& critic, const ad::Tensor& states,
                      ad::Rng& rng);

// Success rate and mean turns of `gen` over `episodes` fixed goals.
std::pair<double, double> validation_success(policies::AdvGenerator& gen, const env::Environment& env,
                                             std::size_t episodes, std::uint64_t seed);

// Alternating training over the corpus pairs only. With an environment, the
// generator is validated every validate_every iterations (and before the
// first) and the best validated weights are kept; without one the final
// weights are kept.
AdvTrainResult adversarial_train(policies::AdvGenerator& gen, RewardModel& critic,
                                 const std::vector<core::StateActionPair>& train, const AdvTrainConfig& config,
                                 const env::Environment* validation_env = nullptr);

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& trace);

}  // namespace dialpol::adversarial
