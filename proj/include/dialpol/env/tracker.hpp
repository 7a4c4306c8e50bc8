#pragma once

#include <vector>

#include "dialpol/core/action_space.hpp"
#include "dialpol/core/state.hpp"
#include "dialpol/env/schema.hpp"

namespace dialpol::env {

// One user dialogue act. `value` is a value id or kDontCare for informs, the
// party size for a booking, and unused for requests.
struct UserAct {
  int atom = 0;
  int value = -1;
  bool operator==(const UserAct&) const = default;
};

using UserAction = std::vector<UserAct>;

core::ActionSet atoms_of(const UserAction& action);

inline constexpr int kNoQuery = -1;

struct TrackerState {
  std::vector<std::vector<int>> belief;  // [domain][informable slot]
  std::vector<int> people;               // [domain], -1 when unknown
  core::ActionSet last_user;
  core::ActionSet last_system;
  int active_domain = -1;
  int result_count = kNoQuery;

  static TrackerState fresh(const Schema& schema);
  bool operator==(const TrackerState&) const = default;
};

// Applies a user turn: informs overwrite beliefs in order (later wins), the
// active domain follows the last act, and the result count is recomputed
// from the active domain's beliefs. Throws core::UnknownActionError for an
// atom outside the user catalog.
TrackerState dst_update(TrackerState tracker, const UserAction& user, const Environment& env);

// Records the system turn in the tracker.
void note_system_action(TrackerState& tracker, const core::ActionSet& system);

// 0: no query yet, 1: none, 2: one, 3: two to four, 4: five or more.
int result_bucket(int result_count);

core::DialogueState encode_state(const TrackerState& tracker, const Environment& env);

}  // namespace dialpol::env
