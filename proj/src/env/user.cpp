#include "dialpol/env/user.hpp"

#include <algorithm>

namespace dialpol::env {

UserAgenda::UserAgenda(core::UserGoal goal, const Environment& env) : goal_(std::move(goal)), env_(&env) {
  for (const auto& g : goal_.domains) {
    Progress p;
    for (const auto& c : g.constraints) p.pending.push_back(c.slot);
    progress_.push_back(std::move(p));
  }
}

bool UserAgenda::delivered(std::size_t i, int slot) const { return progress_.at(i).delivered.count(slot) > 0; }
bool UserAgenda::answered(std::size_t i, int request) const { return progress_.at(i).answered.count(request) > 0; }
bool UserAgenda::booked(std::size_t i) const { return progress_.at(i).booked; }

bool UserAgenda::complete(std::size_t i) const {
  const auto& g = goal_.domains[i];
  const auto& p = progress_[i];
  for (const auto& c : g.constraints) {
    if (!p.delivered.count(c.slot)) return false;
  }
  for (int r : g.requests) {
    if (!p.answered.count(r)) return false;
  }
  return !g.book_people || p.booked;
}

int UserAgenda::constraint_value(std::size_t i, int slot) const {
  for (const auto& c : goal_.domains[i].constraints) {
    if (c.slot == slot) return c.value;
  }
  return kDontCare;
}

UserAgenda::Step UserAgenda::step(const SystemTurn& turn) {
  const auto& sys = env_->system;
  for (int atom : turn.action) {
    if (!sys.space().is_atom(atom)) throw core::UnknownActionError("system atom id " + std::to_string(atom));
    const auto& info = sys.info(atom);
    std::size_t i = 0;
    while (i < goal_.domains.size() && goal_.domains[i].domain != info.domain) ++i;
    if (i == goal_.domains.size()) continue;
    const auto& g = goal_.domains[i];
    auto& p = progress_[i];
    const auto it = turn.offered.find(info.domain);
    const bool consistent = it != turn.offered.end() && env_->schema.satisfies(info.domain, it->second, g);
    if (info.kind == ActKind::inform && consistent &&
        std::binary_search(g.requests.begin(), g.requests.end(), info.slot)) {
      p.answered.insert(info.slot);
    } else if (info.kind == ActKind::book && consistent && g.book_people && p.people_given) {
      p.booked = true;
    }
  }

  while (!done() && complete(focus_)) ++focus_;
  if (done()) return {{}, true};

  const auto& g = goal_.domains[focus_];
  auto& p = progress_[focus_];
  const int d = g.domain;
  const auto& usr = env_->user;
  Step out;

  for (int atom : turn.action) {
    const auto& info = sys.info(atom);
    if (info.kind != ActKind::request || info.domain != d) continue;
    const int value = constraint_value(focus_, info.slot);
    out.action.push_back({usr.id(d, ActKind::inform, info.slot), value});
    if (value != kDontCare) {
      p.delivered.insert(info.slot);
      std::erase(p.pending, info.slot);
    }
  }
  if (!out.action.empty()) return out;

  if (!p.pending.empty()) {
    const std::size_t n = std::min<std::size_t>(2, p.pending.size());
    for (std::size_t k = 0; k < n; ++k) {
      const int slot = p.pending[k];
      out.action.push_back({usr.id(d, ActKind::inform, slot), constraint_value(focus_, slot)});
      p.delivered.insert(slot);
    }
    p.pending.erase(p.pending.begin(), p.pending.begin() + static_cast<std::ptrdiff_t>(n));
    return out;
  }

  for (int r : g.requests) {
    if (!p.answered.count(r)) out.action.push_back({usr.id(d, ActKind::request, r), -1});
  }
  if (g.book_people && !p.booked) {
    out.action.push_back({usr.id(d, ActKind::book, -1), *g.book_people});
    p.people_given = true;
  }
  return out;
}

}  // namespace dialpol::env
