#pragma once

#include <map>
#include <set>
#include <vector>

#include "dialpol/core/goal.hpp"
#include "dialpol/env/schema.hpp"
#include "dialpol/env/tracker.hpp"

namespace dialpol::env {

// A system turn as the user perceives it: the atoms plus, per domain, the
// entity the informs and bookings refer to (absent when none matched).
struct SystemTurn {
  core::ActionSet action;
  std::map<int, int> offered;
};

// Rule user that pursues the goal's domains one at a time.
//
// Each turn it first settles the system turn: an inform of a requested slot
// is accepted when the offered entity satisfies the domain's constraints, a
// booking when a booking is wanted, the party size was given and the entity
// is consistent. Then it emits, for the domain in focus: answers to the
// system's requests (the goal value, or dontcare for unconstrained slots);
// else up to two pending constraints; else every unanswered request plus the
// booking request. With nothing new from the system the request phase
// repeats itself.
class UserAgenda {
 public:
  struct Step {
    UserAction action;
    bool done = false;
  };

  UserAgenda(core::UserGoal goal, const Environment& env);

  Step step(const SystemTurn& turn);
  bool done() const { return focus_ >= goal_.domains.size(); }
  const core::UserGoal& goal() const { return goal_; }
  std::size_t focus() const { return focus_; }

  bool delivered(std::size_t goal_domain, int slot) const;
  bool answered(std::size_t goal_domain, int request) const;
  bool booked(std::size_t goal_domain) const;

 private:
  struct Progress {
    std::vector<int> pending;  // constraint slots not yet volunteered, in order
    std::set<int> delivered;
    std::set<int> answered;
    bool people_given = false;
    bool booked = false;
  };

  bool complete(std::size_t i) const;
  int constraint_value(std::size_t i, int slot) const;

  core::UserGoal goal_;
  const Environment* env_;
  std::vector<Progress> progress_;
  std::size_t focus_ = 0;
};

}  // namespace dialpol::env
