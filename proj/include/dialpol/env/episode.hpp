#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <vector>

#include <json.hpp>

#include "dialpol/autodiff/rng.hpp"
#include "dialpol/core/goal.hpp"
#include "dialpol/core/state.hpp"
#include "dialpol/env/schema.hpp"
#include "dialpol/env/tracker.hpp"

namespace dialpol::env {

// Anything that maps an encoded state to a system action set.
class SystemPolicy {
 public:
  virtual ~SystemPolicy() = default;
  virtual core::ActionSet act(const core::DialogueState& state, const TrackerState& tracker) = 0;
};

class ExpertPolicy final : public SystemPolicy {
 public:
  explicit ExpertPolicy(const Environment& env) : env_(&env) {}
  core::ActionSet act(const core::DialogueState& state, const TrackerState& tracker) override;

 private:
  const Environment* env_;
};

enum class Termination { success, failure_timeout };

struct TurnRecord {
  core::DialogueState state;
  core::ActionSet system;
  std::map<int, int> offered;
  UserAction user;
};

struct EpisodeLog {
  core::UserGoal goal;
  UserAction opening;
  std::vector<TurnRecord> turns;
  Termination termination = Termination::failure_timeout;
  int turn_count = 0;
  double reward = 0.0;
};

// -turns, plus 2*max_turns on success or -max_turns otherwise.
double episode_reward(int turn_count, bool success, int max_turns);

// The user opens, then each system turn runs tracker, encoder, policy and
// user. Stops when the user is satisfied or after env.max_turns system turns.
// Throws core::UnknownActionError when the policy emits an atom outside the
// system catalog.
EpisodeLog run_episode(SystemPolicy& policy, const Environment& env, const core::UserGoal& goal);
EpisodeLog run_episode(SystemPolicy& policy, const Environment& env, ad::Rng& rng);

nlohmann::json episode_to_json(const EpisodeLog& log, const Environment& env);
void write_episode_jsonl(std::ostream& out, const EpisodeLog& log, const Environment& env);

}  // namespace dialpol::env
