#include "dialpol/policies/trainer.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "dialpol/autodiff/rng.hpp"
#include "dialpol/policies/checkpoint.hpp"

namespace dialpol::policies {

double train_step(Policy& policy, ad::Optimizer& optimizer, Batch batch) {
  ad::Graph g;
  double value = 0.0;
  std::vector<ad::Tensor> grads;
  auto params = policy.parameters();
  try {
    auto loss = policy.loss(g, batch);
    value = loss.value().item();
    g.backward(loss);
    grads = g.gradients(params);
  } catch (const ad::NonFiniteError& e) {
    throw TrainingError(to_string(policy.method()) + ": training diverged (" + e.what() + ") on a batch of " +
                        std::to_string(batch.size()));
  }
  if (!std::isfinite(value)) throw TrainingError(to_string(policy.method()) + ": loss is " + std::to_string(value));
  try {
    optimizer.step(params, grads);
  } catch (const std::domain_error& e) {
    throw TrainingError(to_string(policy.method()) + ": " + e.what() + " at loss " + std::to_string(value));
  }
  return value;
}

double batch_loss(Policy& policy, Batch batch) {
  ad::Graph g(ad::Graph::Mode::inference);
  return policy.loss(g, batch).value().item();
}

TrainResult train_supervised(Policy& policy, const std::vector<core::StateActionPair>& train,
                             const std::vector<core::StateActionPair>& val, const TrainConfig& config) {
  if (train.empty()) throw std::invalid_argument("train_supervised: empty training split");
  ad::Optimizer opt(config.optimizer);
  ad::Rng rng(ad::derive_seed(config.seed, "minibatch"));
  const std::size_t bs = config.batch_size == 0 ? train.size() : std::min(config.batch_size, train.size());

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();
  std::vector<core::StateActionPair> batch;

  TrainResult result;
  result.best_val_loss = std::numeric_limits<double>::infinity();
  result.best_val_accuracy = -1.0;
  std::unique_ptr<Policy> best;
  std::size_t stale = 0;
  double last = 0.0;

  for (std::size_t step = 1; step <= config.max_steps; ++step) {
    if (bs == train.size()) {
      last = train_step(policy, opt, train);
    } else {
      batch.clear();
      while (batch.size() < bs) {
        if (cursor == order.size()) {
          rng.shuffle(order);
          cursor = 0;
        }
        batch.push_back(train[order[cursor++]]);
      }
      last = train_step(policy, opt, batch);
    }
    result.steps = step;

    const bool check = config.eval_every > 0 && (step % config.eval_every == 0 || step == config.max_steps);
    if (!check) continue;
    TrainPoint pt{step, last, val.empty() ? last : batch_loss(policy, val), 0.0};
    if (!val.empty() && config.stop_on == StopOn::accuracy) pt.val_accuracy = exact_set_accuracy(policy, val);
    result.history.push_back(pt);
    if (val.empty()) continue;
    const bool better = config.stop_on == StopOn::loss
                            ? pt.val_loss < result.best_val_loss
                            : pt.val_accuracy > result.best_val_accuracy ||
                                  (pt.val_accuracy == result.best_val_accuracy && pt.val_loss < result.best_val_loss);
    if (better) {
      result.best_val_loss = pt.val_loss;
      result.best_val_accuracy = pt.val_accuracy;
      result.best_step = step;
      best = policy.clone();
      stale = 0;
    } else if (++stale >= config.patience) {
      break;
    }
  }
  if (best) copy_parameters(*best, policy);
  if (val.empty() || !best) {
    result.best_step = result.steps;
    result.best_val_loss = last;
    result.best_val_accuracy = 0.0;
  }
  return result;
}

}  // namespace dialpol::policies
