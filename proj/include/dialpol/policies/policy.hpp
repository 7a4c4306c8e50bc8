#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dialpol/autodiff/graph.hpp"
#include "dialpol/core/action_space.hpp"
#include "dialpol/core/corpus.hpp"
#include "dialpol/core/state.hpp"

namespace dialpol::policies {

enum class Method { multiclass, multidense, diaseq, diaadv };

std::string to_string(Method m);
// Accepts the names printed by to_string; throws std::invalid_argument.
Method parse_method(const std::string& name);

using Batch = std::span<const core::StateActionPair>;

// Rows of 0/1 features, shape [n, dim].
ad::Tensor stack_states(std::span<const core::DialogueState> states, std::size_t dim);
ad::Tensor stack_states(Batch batch, std::size_t dim);

// A per-turn map from dialogue state to a set of atomic actions.
class Policy {
 public:
  Policy(core::ActionSpace actions, std::size_t state_dim);
  virtual ~Policy() = default;

  virtual Method method() const = 0;
  virtual std::vector<ad::Parameter*> parameters() = 0;
  // Mean training loss of `batch` recorded on `g`.
  virtual ad::Var loss(ad::Graph& g, Batch batch) = 0;
  virtual std::vector<core::ActionSet> predict(std::span<const core::DialogueState> states) = 0;
  // Architecture hyperparameters, enough to rebuild the model.
  virtual nlohmann::json config() const = 0;
  virtual std::unique_ptr<Policy> clone() const = 0;

  core::ActionSet predict(const core::DialogueState& state);
  const core::ActionSpace& actions() const { return actions_; }
  std::size_t state_dim() const { return state_dim_; }
  std::size_t param_count();

 protected:
  void check_states(std::span<const core::DialogueState> states) const;
  void check_batch(Batch batch) const;

  core::ActionSpace actions_;
  std::size_t state_dim_;
};

std::size_t count_params(Policy& policy);

// Fraction of pairs whose predicted set equals the target set.
double exact_set_accuracy(Policy& policy, Batch batch);

}  // namespace dialpol::policies
