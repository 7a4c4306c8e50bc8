#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dialpol/adversarial/trainer.hpp"
#include "dialpol/core/corpus.hpp"
#include "dialpol/eval/metrics.hpp"
#include "dialpol/experiments/config.hpp"
#include "dialpol/policies/policy.hpp"

namespace dialpol::experiments {

// Progress sink; levels are "info" and "debug".
using Logger = std::function<void(const std::string& level, const std::string& message)>;

// Loads the configured corpus, or generates corpus_dialogues expert dialogues
// from the config seed.
core::Corpus obtain_corpus(const ExperimentConfig& config, const env::Environment& env);

// Keeps ceil(fraction * dialogues) whole dialogues of `pairs`, chosen by a
// seeded permutation of the dialogue ids. For one seed the kept sets are
// nested across fractions, and pair order is preserved. Throws
// std::invalid_argument when nothing would be kept.
std::vector<core::StateActionPair> subsample_dialogues(const std::vector<core::StateActionPair>& pairs,
                                                       double fraction, std::uint64_t seed);

struct Trained {
  std::unique_ptr<policies::Policy> policy;
  std::optional<policies::TrainResult> supervised;
  std::optional<adversarial::AdvTrainResult> adversarial;
};

// Supervised training of multiclass, multidense or diaseq from a fresh
// initialization; diaadv fine-tunes `pretrained` (a multidense or diaadv
// model) adversarially. Without a pretrained model diaadv starts from a
// fresh multidense when allow_unpretrained is set and throws ConfigError
// otherwise.
Trained train_method(const ExperimentConfig& config, const std::string& method, const env::Environment& env,
                     const std::vector<core::StateActionPair>& train, const std::vector<core::StateActionPair>& val,
                     std::uint64_t seed, const policies::Policy* pretrained = nullptr, const Logger& log = {});

// Training curve: supervised history or adversarial trace.
void write_curve_csv(std::ostream& out, const Trained& trained);

// Throws std::invalid_argument when the checkpoint's atoms or state width do
// not fit the environment.
void check_compatible(const policies::Policy& policy, const env::Environment& env);

struct AblationCell {
  double fraction = 1.0;
  std::string method;
  std::uint64_t seed = 0;
  eval::Metrics metrics;
};

// Median over seeds of the cells with this fraction and method.
std::pair<double, double> median_turn_success(const std::vector<AblationCell>& cells, double fraction,
                                              const std::string& method);

// Every fraction x method x seed cell: subsample, train, evaluate on
// `episodes` goals of that seed. diaadv cells fine-tune the multidense model
// of the same cell.
std::vector<AblationCell> run_ablation(const ExperimentConfig& config, const env::Environment& env,
                                       const core::Corpus& corpus, const Logger& log = {});

struct SweepRow {
  std::size_t epochs = 0;
  std::size_t steps = 0;
  double pretrain_success = 0.0;
  double adversarial_success = 0.0;
  double gain = 0.0;
};

// Each command writes its artifacts plus config.json (the resolved config)
// into config.out.
void cmd_gen_corpus(const ExperimentConfig& config, const Logger& log = {});
Trained cmd_train(const ExperimentConfig& config, const Logger& log = {});
// `checkpoint` is a checkpoint path or "expert" for the rule-based policy.
eval::AggregateReport cmd_evaluate(const ExperimentConfig& config, const std::string& checkpoint,
                                   const Logger& log = {});
std::vector<AblationCell> cmd_ablate(const ExperimentConfig& config, const Logger& log = {});
std::vector<SweepRow> cmd_pretrain_sweep(const ExperimentConfig& config, const Logger& log = {});

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_ablation_csv(std::ostream& out, const ExperimentConfig& config, const std::vector<AblationCell>& cells);
void write_ablation_text(std::ostream& out, const ExperimentConfig& config, const std::vector<AblationCell>& cells);

}  // namespace dialpol::experiments
