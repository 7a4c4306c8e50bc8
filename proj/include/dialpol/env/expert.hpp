#pragma once

#include "dialpol/core/action_space.hpp"
#include "dialpol/env/schema.hpp"
#include "dialpol/env/tracker.hpp"

namespace dialpol::env {

// Scripted system policy over the tracker: while the active domain has slots
// with unknown belief, request the first two of them; otherwise inform every
// slot the user just requested and book if the user asked to book; otherwise
// say nothing.
core::ActionSet expert_policy(const TrackerState& tracker, const Environment& env);

}  // namespace dialpol::env
