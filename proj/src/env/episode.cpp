#include "dialpol/env/episode.hpp"

#include <ostream>

#include "dialpol/env/expert.hpp"
#include "dialpol/env/goal_sampler.hpp"
#include "dialpol/env/user.hpp"

namespace dialpol::env {

using nlohmann::json;

core::ActionSet ExpertPolicy::act(const core::DialogueState&, const TrackerState& tracker) {
  return expert_policy(tracker, *env_);
}

double episode_reward(int turn_count, bool success, int max_turns) {
  return -static_cast<double>(turn_count) + (success ? 2.0 * max_turns : -static_cast<double>(max_turns));
}

EpisodeLog run_episode(SystemPolicy& policy, const Environment& env, const core::UserGoal& goal) {
  EpisodeLog log;
  log.goal = goal;
  UserAgenda user(goal, env);
  TrackerState tracker = TrackerState::fresh(env.schema);

  auto step = user.step({});
  log.opening = step.action;
  int t = 0;
  while (!step.done && t < env.max_turns) {
    tracker = dst_update(std::move(tracker), step.action, env);
    TurnRecord rec;
    rec.state = encode_state(tracker, env);
    rec.system = policy.act(rec.state, tracker);
    for (int a : rec.system) {
      if (!env.system.space().is_atom(a)) throw core::UnknownActionError("policy emitted atom id " + std::to_string(a));
    }
    note_system_action(tracker, rec.system);
    for (int a : rec.system) {
      const auto& info = env.system.info(a);
      if (info.kind == ActKind::request || rec.offered.count(info.domain)) continue;
      if (auto e = env.schema.first_match(info.domain, tracker.belief[static_cast<std::size_t>(info.domain)])) {
        rec.offered.emplace(info.domain, *e);
      }
    }
    step = user.step({rec.system, rec.offered});
    rec.user = step.action;
    log.turns.push_back(std::move(rec));
    ++t;
  }
  log.turn_count = t;
  log.termination = step.done ? Termination::success : Termination::failure_timeout;
  log.reward = episode_reward(t, step.done, env.max_turns);
  return log;
}

EpisodeLog run_episode(SystemPolicy& policy, const Environment& env, ad::Rng& rng) {
  return run_episode(policy, env, sample_goal(rng, env.schema));
}

namespace {

json user_action_json(const UserAction& action, const Environment& env) {
  json out = json::array();
  for (const auto& a : action) {
    const auto& info = env.user.info(a.atom);
    json j{{"act", env.user.space().name(a.atom)}};
    if (info.kind == ActKind::inform) {
      const auto& slot = env.schema.domains[static_cast<std::size_t>(info.domain)].informable[static_cast<std::size_t>(info.slot)];
      j["value"] = a.value == kDontCare ? std::string("dontcare") : slot.values.at(static_cast<std::size_t>(a.value));
    } else if (info.kind == ActKind::book) {
      j["value"] = a.value;
    }
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace

json episode_to_json(const EpisodeLog& log, const Environment& env) {
  json goal = json::array();
  for (const auto& g : log.goal.domains) {
    const auto& dom = env.schema.domains[static_cast<std::size_t>(g.domain)];
    json cons = json::object();
    for (const auto& c : g.constraints) {
      const auto& slot = dom.informable[static_cast<std::size_t>(c.slot)];
      cons[slot.name] = slot.values[static_cast<std::size_t>(c.value)];
    }
    json req = json::array();
    for (int r : g.requests) req.push_back(dom.requestable[static_cast<std::size_t>(r)]);
    json jg{{"domain", dom.name}, {"constraints", cons}, {"requests", req}};
    jg["book_people"] = g.book_people ? json(*g.book_people) : json(nullptr);
    goal.push_back(std::move(jg));
  }
  json turns = json::array();
  for (const auto& t : log.turns) {
    std::string bits;
    bits.reserve(t.state.size());
    for (auto b : t.state.bits) bits.push_back(b ? '1' : '0');
    json sys = json::array();
    for (int a : t.system) sys.push_back(env.system.space().name(a));
    json offered = json::object();
    for (const auto& [d, e] : t.offered) offered[env.schema.domains[static_cast<std::size_t>(d)].name] = e;
    turns.push_back({{"state", bits}, {"system", sys}, {"offered", offered}, {"user", user_action_json(t.user, env)}});
  }
  json out = json::object();
  out["goal"] = goal;
  out["opening"] = user_action_json(log.opening, env);
  out["turns"] = turns;
  out["termination"] = log.termination == Termination::success ? "success" : "failure-timeout";
  out["turn_count"] = log.turn_count;
  out["reward"] = log.reward;
  return out;
}

void write_episode_jsonl(std::ostream& out, const EpisodeLog& log, const Environment& env) {
  out << episode_to_json(log, env).dump() << '\n';
}

}  // namespace dialpol::env
