#include "dialpol/policies/policy.hpp"

#include <stdexcept>

#include "dialpol/policies/layers.hpp"

namespace dialpol::policies {

std::string to_string(Method m) {
  switch (m) {
    case Method::multiclass:
      return "multiclass";
    case Method::multidense:
      return "multidense";
    case Method::diaseq:
      return "diaseq";
    case Method::diaadv:
      return "diaadv";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  for (auto m : {Method::multiclass, Method::multidense, Method::diaseq, Method::diaadv}) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown method '" + name + "' (expected multiclass, multidense, diaseq or diaadv)");
}

ad::Tensor stack_states(std::span<const core::DialogueState> states, std::size_t dim) {
  ad::Tensor t({states.size(), dim});
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].size() != dim) {
      throw ad::ShapeError("stack_states", "state " + std::to_string(i) + " has width " +
                                               std::to_string(states[i].size()) + ", expected " + std::to_string(dim));
    }
    for (std::size_t j = 0; j < dim; ++j) t.at(i, j) = states[i].bits[j];
  }
  return t;
}

ad::Tensor stack_states(Batch batch, std::size_t dim) {
  std::vector<core::DialogueState> states;
  states.reserve(batch.size());
  for (const auto& p : batch) states.push_back(p.state);
  return stack_states(states, dim);
}

Policy::Policy(core::ActionSpace actions, std::size_t state_dim) : actions_(std::move(actions)), state_dim_(state_dim) {
  if (actions_.size() == 0) throw std::invalid_argument("policy: empty action space");
  if (state_dim_ == 0) throw std::invalid_argument("policy: zero state dimension");
}

core::ActionSet Policy::predict(const core::DialogueState& state) {
  return predict(std::span<const core::DialogueState>(&state, 1)).front();
}

std::size_t Policy::param_count() { return policies::count_params(parameters()); }

void Policy::check_states(std::span<const core::DialogueState> states) const {
  for (const auto& s : states) {
    if (s.size() != state_dim_) {
      throw ad::ShapeError(to_string(method()), "state width " + std::to_string(s.size()) + ", expected " +
                                                    std::to_string(state_dim_));
    }
  }
}

void Policy::check_batch(Batch batch) const {
  if (batch.empty()) throw std::invalid_argument(to_string(method()) + ": empty batch");
  for (const auto& p : batch) {
    if (p.state.size() != state_dim_) {
      throw ad::ShapeError(to_string(method()), "state width " + std::to_string(p.state.size()) + ", expected " +
                                                    std::to_string(state_dim_));
    }
    for (int a : p.actions) {
      if (!actions_.is_atom(a)) throw core::UnknownActionError("atom id " + std::to_string(a));
    }
  }
}

std::size_t count_params(Policy& policy) { return policy.param_count(); }

double exact_set_accuracy(Policy& policy, Batch batch) {
  if (batch.empty()) return 0.0;
  std::vector<core::DialogueState> states;
  for (const auto& p : batch) states.push_back(p.state);
  const auto pred = policy.predict(states);
  std::size_t hit = 0;
  for (std::size_t i = 0; i < batch.size(); ++i) hit += pred[i] == batch[i].actions;
  return static_cast<double>(hit) / static_cast<double>(batch.size());
}

}  // namespace dialpol::policies
