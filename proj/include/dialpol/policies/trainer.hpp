#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dialpol/autodiff/optimizer.hpp"
#include "dialpol/policies/policy.hpp"

namespace dialpol::policies {

// Raised when a loss or gradient stops being finite.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// What early stopping ranks checkpoints by. Accuracy is exact-set accuracy
// with validation loss breaking ties.
enum class StopOn { accuracy, loss };

struct TrainConfig {
  std::size_t max_steps = 3000;
  std::size_t batch_size = 64;  // 0 means full batch
  ad::OptimizerConfig optimizer{ad::OptimizerKind::adam, 1e-3};
  std::size_t eval_every = 200;
  std::size_t patience = 5;  // evaluations without improvement before stopping
  StopOn stop_on = StopOn::accuracy;
  std::uint64_t seed = 0;
};

struct TrainPoint {
  std::size_t step = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainResult {
  std::size_t steps = 0;
  std::size_t best_step = 0;
  double best_val_loss = 0.0;
  double best_val_accuracy = 0.0;
  std::vector<TrainPoint> history;
};

// One optimizer update on `batch`; returns the loss before the update.
double train_step(Policy& policy, ad::Optimizer& optimizer, Batch batch);

double batch_loss(Policy& policy, Batch batch);

// Minibatch training with reshuffling every epoch. With a validation split,
// the model is checked every eval_every steps, training stops after
// `patience` checks without improvement and the best weights are restored.
// max_steps 0 leaves the model untouched.
TrainResult train_supervised(Policy& policy, const std::vector<core::StateActionPair>& train,
                             const std::vector<core::StateActionPair>& val, const TrainConfig& config);

}  // namespace dialpol::policies
