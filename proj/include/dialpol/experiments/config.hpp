#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dialpol/adversarial/trainer.hpp"
#include "dialpol/env/schema.hpp"
#include "dialpol/policies/policy.hpp"
#include "dialpol/policies/trainer.hpp"

namespace dialpol::experiments {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct SupervisedSettings {
  std::size_t max_steps = 4000;
  std::size_t batch_size = 64;
  std::string optimizer = "adam";
  double learning_rate = 1e-3;
  std::size_t eval_every = 250;
  std::size_t patience = 4;
  std::string stop_on = "accuracy";

  policies::TrainConfig to_train_config(std::uint64_t seed) const;
};

struct AdversarialSettings {
  std::size_t iterations = 300;
  std::size_t critic_steps = 5;
  double penalty_weight = 10.0;
  std::size_t batch_size = 64;
  double critic_lr = 1e-4;
  double generator_lr = 1e-5;
  std::size_t validate_every = 50;
  std::size_t validation_episodes = 100;
  double temperature = 0.005;
  std::size_t critic_hidden1 = 128;
  std::size_t critic_hidden2 = 128;

  adversarial::AdvTrainConfig to_train_config(std::uint64_t seed) const;
};

// Everything a command needs. Unknown keys are rejected so that typos do not
// silently fall back to defaults.
struct ExperimentConfig {
  std::optional<std::string> schema;  // JSON schema file; built-in benchmark otherwise
  std::uint64_t schema_seed = 7;
  int entities_per_domain = 50;
  int max_turns = 40;

  std::optional<std::string> corpus;  // JSONL corpus; generated otherwise
  std::size_t corpus_dialogues = 2000;

  std::string method = "multidense";
  std::vector<std::string> methods{"multiclass", "multidense", "diaseq", "diaadv"};
  // Architecture overrides per method, merged over the model defaults.
  std::map<std::string, nlohmann::json> model;
  SupervisedSettings train;
  // Per-method overrides of `train`, as partial objects.
  std::map<std::string, nlohmann::json> train_by_method;
  AdversarialSettings adversarial;

  std::optional<std::string> pretrained;  // MultiDense checkpoint for diaadv
  bool allow_unpretrained = false;

  std::uint64_t seed = 1;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  double fraction = 1.0;
  std::vector<double> fractions{0.1, 0.4, 0.7, 1.0};
  std::size_t episodes = 500;
  std::vector<std::size_t> pretrain_epochs{0, 1, 2, 4, 8};
  std::string out = "out";

  // Settings for `method`, with train_by_method applied.
  SupervisedSettings train_for(const std::string& method) const;
  nlohmann::json model_for(const std::string& method) const;
  void validate() const;
};

// Missing keys keep their defaults. Throws ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j);
// Fully resolved: every key, including defaults.
nlohmann::json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::filesystem::path& path);

env::Environment make_environment(const ExperimentConfig& c);

}  // namespace dialpol::experiments
