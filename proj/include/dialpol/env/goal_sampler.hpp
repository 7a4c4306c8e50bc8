#pragma once

#include "dialpol/autodiff/rng.hpp"
#include "dialpol/core/goal.hpp"
#include "dialpol/env/schema.hpp"

namespace dialpol::env {

// Draws 1-3 distinct domains. Each domain's constraints are a random nonempty
// subset of the slot values of one random entity, so at least that entity
// matches; 1 to min(4, #requestable) requests; bookable domains require a
// booking for 1..max_people people with probability 1/2.
// Throws std::invalid_argument for a schema without domains or entities.
core::UserGoal sample_goal(ad::Rng& rng, const Schema& schema);

}  // namespace dialpol::env
