#include "dialpol/env/expert.hpp"

namespace dialpol::env {

core::ActionSet expert_policy(const TrackerState& tracker, const Environment& env) {
  core::ActionSet out;
  const int d = tracker.active_domain;
  if (d < 0) return out;
  const auto& belief = tracker.belief[static_cast<std::size_t>(d)];

  int asked = 0;
  for (std::size_t s = 0; s < belief.size() && asked < 2; ++s) {
    if (belief[s] == kUnknown) {
      out.insert(env.system.id(d, ActKind::request, static_cast<int>(s)));
      ++asked;
    }
  }
  if (asked > 0) return out;

  for (int atom : tracker.last_user) {
    const auto& info = env.user.info(atom);
    if (info.domain != d) continue;
    if (info.kind == ActKind::request) out.insert(env.system.id(d, ActKind::inform, info.slot));
    if (info.kind == ActKind::book) out.insert(env.system.id(d, ActKind::book, -1));
  }
  return out;
}

}  // namespace dialpol::env
