#include "dialpol/env/tracker.hpp"

namespace dialpol::env {

core::ActionSet atoms_of(const UserAction& action) {
  std::vector<int> ids;
  ids.reserve(action.size());
  for (const auto& a : action) ids.push_back(a.atom);
  return core::ActionSet::from_ids(std::move(ids));
}

TrackerState TrackerState::fresh(const Schema& schema) {
  TrackerState t;
  for (const auto& dom : schema.domains) t.belief.emplace_back(dom.informable.size(), kUnknown);
  t.people.assign(schema.domains.size(), -1);
  return t;
}

TrackerState dst_update(TrackerState tracker, const UserAction& user, const Environment& env) {
  for (const auto& act : user) {
    if (!env.user.space().is_atom(act.atom)) {
      throw core::UnknownActionError("user atom id " + std::to_string(act.atom));
    }
    const auto& info = env.user.info(act.atom);
    const auto d = static_cast<std::size_t>(info.domain);
    switch (info.kind) {
      case ActKind::inform:
        tracker.belief[d][static_cast<std::size_t>(info.slot)] = act.value;
        break;
      case ActKind::book:
        tracker.people[d] = act.value;
        break;
      case ActKind::request:
        break;
    }
    tracker.active_domain = info.domain;
  }
  tracker.last_user = atoms_of(user);
  if (tracker.active_domain >= 0) {
    tracker.result_count = static_cast<int>(
        env.schema.count_matches(tracker.active_domain, tracker.belief[static_cast<std::size_t>(tracker.active_domain)]));
  }
  return tracker;
}

void note_system_action(TrackerState& tracker, const core::ActionSet& system) { tracker.last_system = system; }

int result_bucket(int result_count) {
  if (result_count < 0) return 0;
  if (result_count == 0) return 1;
  if (result_count == 1) return 2;
  if (result_count <= 4) return 3;
  return 4;
}

core::DialogueState encode_state(const TrackerState& tracker, const Environment& env) {
  core::DialogueState out;
  out.bits.assign(env.state_dim(), 0);
  const auto& schema = env.schema;

  const auto& q = env.layout.segment("query_results");
  if (tracker.active_domain >= 0) out.bits[q.offset + static_cast<std::size_t>(tracker.active_domain)] = 1;
  out.bits[q.offset + schema.domains.size() + static_cast<std::size_t>(result_bucket(tracker.result_count))] = 1;

  const auto& u = env.layout.segment("last_user_action");
  for (int a : tracker.last_user) out.bits[u.offset + static_cast<std::size_t>(a)] = 1;
  const auto& s = env.layout.segment("last_system_action");
  for (int a : tracker.last_system) out.bits[s.offset + static_cast<std::size_t>(a)] = 1;

  std::size_t pos = env.layout.segment("belief").offset;
  for (std::size_t d = 0; d < schema.domains.size(); ++d) {
    const auto& dom = schema.domains[d];
    for (std::size_t k = 0; k < dom.informable.size(); ++k) {
      const int b = tracker.belief[d][k];
      const std::size_t width = dom.informable[k].values.size() + 1;
      if (b >= 0) out.bits[pos + static_cast<std::size_t>(b)] = 1;
      if (b == kDontCare) out.bits[pos + width - 1] = 1;
      pos += width;
    }
    if (dom.bookable) {
      if (tracker.people[d] > 0) out.bits[pos] = 1;
      ++pos;
    }
  }
  return out;
}

}  // namespace dialpol::env
