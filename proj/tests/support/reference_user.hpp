#pragma once

// Second, independently written rule user used as a trace oracle.

#include <map>
#include <set>
#include <vector>

#include "dialpol/env/schema.hpp"
#include "dialpol/env/tracker.hpp"

namespace dialpol::testing {

class ReferenceUser {
 public:
  ReferenceUser(const core::UserGoal& goal, const env::Environment& env) : goal_(goal), env_(env) {
    for (const auto& g : goal.domains) {
      Ledger l;
      for (const auto& c : g.constraints) l.untold[c.slot] = c.value;
      l.wanted.insert(g.requests.begin(), g.requests.end());
      l.booking = g.book_people.has_value();
      ledgers_.push_back(l);
    }
  }

  // Returns the user action; `done` is set when every domain is finished.
  env::UserAction step(const core::ActionSet& system, const std::map<int, int>& offered, bool& done) {
    for (int a : system) {
      const auto& info = env_.system.info(a);
      for (std::size_t i = 0; i < goal_.domains.size(); ++i) {
        if (goal_.domains[i].domain != info.domain) continue;
        auto it = offered.find(info.domain);
        bool ok = it != offered.end();
        if (ok) {
          const auto& row = env_.schema.entities[static_cast<std::size_t>(info.domain)][static_cast<std::size_t>(it->second)];
          for (const auto& c : goal_.domains[i].constraints) ok = ok && row.values[static_cast<std::size_t>(c.slot)] == c.value;
        }
        if (!ok) continue;
        if (info.kind == env::ActKind::inform) ledgers_[i].wanted.erase(info.slot);
        if (info.kind == env::ActKind::book && ledgers_[i].booking && ledgers_[i].people_given) ledgers_[i].booked = true;
      }
    }
    std::size_t cur = 0;
    while (cur < ledgers_.size() && finished(cur)) ++cur;
    done = cur == ledgers_.size();
    if (done) return {};

    auto& l = ledgers_[cur];
    const int d = goal_.domains[cur].domain;
    env::UserAction out;
    for (int a : system) {
      const auto& info = env_.system.info(a);
      if (info.domain != d || info.kind != env::ActKind::request) continue;
      int v = env::kDontCare;
      for (const auto& c : goal_.domains[cur].constraints) {
        if (c.slot == info.slot) v = c.value;
      }
      out.push_back({env_.user.id(d, env::ActKind::inform, info.slot), v});
      l.untold.erase(info.slot);
    }
    if (!out.empty()) return out;
    if (!l.untold.empty()) {
      auto it = l.untold.begin();
      for (int k = 0; k < 2 && it != l.untold.end(); ++k) {
        out.push_back({env_.user.id(d, env::ActKind::inform, it->first), it->second});
        it = l.untold.erase(it);
      }
      return out;
    }
    for (int r : l.wanted) out.push_back({env_.user.id(d, env::ActKind::request, r), -1});
    if (l.booking && !l.booked) {
      out.push_back({env_.user.id(d, env::ActKind::book, -1), *goal_.domains[cur].book_people});
      l.people_given = true;
    }
    return out;
  }

 private:
  struct Ledger {
    std::map<int, int> untold;
    std::set<int> wanted;
    bool booking = false;
    bool people_given = false;
    bool booked = false;
  };

  bool finished(std::size_t i) const {
    const auto& l = ledgers_[i];
    return l.untold.empty() && l.wanted.empty() && (!l.booking || l.booked);
  }

  core::UserGoal goal_;
  const env::Environment& env_;
  std::vector<Ledger> ledgers_;
};

}  // namespace dialpol::testing
