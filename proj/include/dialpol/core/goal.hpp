#pragma once

#include <optional>
#include <vector>

namespace dialpol::core {

// Value index of an informable slot the user requires.
struct Constraint {
  int slot = 0;
  int value = 0;
  bool operator==(const Constraint&) const = default;
};

struct DomainGoal {
  int domain = 0;
  std::vector<Constraint> constraints;  // sorted by slot
  std::vector<int> requests;            // requestable slot ids, sorted
  std::optional<int> book_people;       // set when a booking is required

  bool operator==(const DomainGoal&) const = default;
};

// Per-domain constraints and requests, in the order the user pursues them.
struct UserGoal {
  std::vector<DomainGoal> domains;

  const DomainGoal* find(int domain) const {
    for (const auto& d : domains) {
      if (d.domain == domain) return &d;
    }
    return nullptr;
  }
  bool operator==(const UserGoal&) const = default;
};

}  // namespace dialpol::core
