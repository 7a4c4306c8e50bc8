#pragma once

#include "dialpol/env/episode.hpp"
#include "dialpol/policies/policy.hpp"

namespace dialpol::policies {

// Lets a trained policy drive episodes.
class PolicyAgent final : public env::SystemPolicy {
 public:
  explicit PolicyAgent(Policy& policy) : policy_(&policy) {}
  core::ActionSet act(const core::DialogueState& state, const env::TrackerState&) override {
    return policy_->predict(state);
  }

 private:
  Policy* policy_;
};

}  // namespace dialpol::policies
