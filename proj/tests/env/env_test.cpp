#include <gtest/gtest.h>

#include <sstream>

#include "dialpol/core/corpus.hpp"
#include "dialpol/env/corpus_gen.hpp"
#include "dialpol/env/episode.hpp"
#include "dialpol/env/expert.hpp"
#include "dialpol/env/goal_sampler.hpp"
#include "dialpol/env/user.hpp"
#include "support/reference_user.hpp"

namespace dialpol::env {
namespace {

const Environment& bench() {
  static const Environment env = Environment::make(default_schema());
  return env;
}

int uatom(const std::string& name) { return bench().user.space().index_of(name); }
int satom(const std::string& name) { return bench().system.space().index_of(name); }

// Straight scan over the entity table.
std::size_t scan_count(const Schema& s, int d, const std::vector<int>& beliefs) {
  std::size_t n = 0;
  for (const auto& e : s.entities[static_cast<std::size_t>(d)]) {
    bool ok = true;
    for (std::size_t k = 0; k < beliefs.size(); ++k) {
      if (beliefs[k] >= 0 && beliefs[k] != e.values[k]) ok = false;
    }
    n += ok;
  }
  return n;
}

TEST(Schema, DefaultBenchmarkShape) {
  const auto& env = bench();
  EXPECT_EQ(env.schema.domains.size(), 7u);
  EXPECT_EQ(env.system.size(), 45u);
  EXPECT_EQ(env.user.size(), 45u);
  for (const auto& table : env.schema.entities) EXPECT_EQ(table.size(), 50u);
  EXPECT_EQ(env.system.space().name(0), "restaurant-request-food");
  EXPECT_TRUE(env.system.space().find("hotel-book-ref"));
  EXPECT_FALSE(env.system.space().find("attraction-book-ref"));
  EXPECT_TRUE(env.system.space().find("taxi-inform-car"));
  EXPECT_FALSE(env.system.space().find("police-book-ref"));
}

TEST(Schema, LayoutAudit) {
  const auto& env = bench();
  std::size_t expect = env.schema.domains.size() + 5 + env.user.size() + env.system.size();
  for (const auto& d : env.schema.domains) {
    for (const auto& s : d.informable) expect += s.values.size() + 1;
    expect += d.bookable ? 1 : 0;
  }
  std::size_t sum = 0;
  for (const auto& seg : env.layout.segments()) sum += seg.width;
  EXPECT_EQ(sum, expect);
  EXPECT_EQ(env.state_dim(), expect);
  EXPECT_EQ(env.state_dim(), 210u);
}

TEST(Schema, JsonRoundTrip) {
  const auto& s = bench().schema;
  const auto back = schema_from_json(schema_to_json(s));
  EXPECT_EQ(schema_to_json(back), schema_to_json(s));
  for (std::size_t d = 0; d < s.domains.size(); ++d) {
    for (std::size_t e = 0; e < s.entities[d].size(); ++e) {
      EXPECT_EQ(back.entities[d][e].values, s.entities[d][e].values);
    }
  }
}

TEST(Schema, RejectsIncompleteEntity) {
  auto j = schema_to_json(bench().schema);
  j["entities"]["hotel"][3].erase("stars");
  EXPECT_THROW(schema_from_json(j), std::invalid_argument);
  auto k = schema_to_json(bench().schema);
  k["entities"]["hotel"][0]["stars"] = "7";
  EXPECT_THROW(schema_from_json(k), std::invalid_argument);
}

TEST(GoalSampler, SingleDomainSchemaForcesDomain) {
  Schema s = bench().schema;
  s.domains.resize(1);
  s.entities.resize(1);
  ad::Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const auto g = sample_goal(rng, s);
    ASSERT_EQ(g.domains.size(), 1u);
    EXPECT_EQ(g.domains[0].domain, 0);
    EXPECT_GE(scan_count(s, 0, [&] {
                std::vector<int> b(s.domains[0].informable.size(), kUnknown);
                for (auto c : g.domains[0].constraints) b[static_cast<std::size_t>(c.slot)] = c.value;
                return b;
              }()),
              1u);
  }
}

TEST(GoalSampler, RestaurantGoalStructure) {
  // Search for a goal shaped like {food, area, book-people} / {phone, address}.
  const auto& env = bench();
  ad::Rng rng(11);
  bool found = false;
  for (int i = 0; i < 20000 && !found; ++i) {
    const auto g = sample_goal(rng, env.schema);
    for (const auto& d : g.domains) {
      if (d.domain != 0 || d.constraints.size() != 2 || !d.book_people || d.requests.size() != 2) continue;
      if (d.constraints[0].slot == 0 && d.constraints[1].slot == 1 && d.requests[0] == 0 && d.requests[1] == 1) {
        found = true;
        EXPECT_GE(*d.book_people, 1);
        EXPECT_LE(*d.book_people, env.schema.max_people);
      }
    }
  }
  EXPECT_TRUE(found);
}

TEST(GoalSampler, ThousandGoalsAllSatisfiable) {
  const auto& s = bench().schema;
  ad::Rng rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const auto g = sample_goal(rng, s);
    ASSERT_GE(g.domains.size(), 1u);
    ASSERT_LE(g.domains.size(), 3u);
    std::set<int> seen;
    for (const auto& d : g.domains) {
      EXPECT_TRUE(seen.insert(d.domain).second);
      std::vector<int> b(s.domains[static_cast<std::size_t>(d.domain)].informable.size(), kUnknown);
      for (auto c : d.constraints) b[static_cast<std::size_t>(c.slot)] = c.value;
      EXPECT_GE(scan_count(s, d.domain, b), 1u);
      EXPECT_GE(d.constraints.size(), 1u);
      EXPECT_GE(d.requests.size(), 1u);
      EXPECT_LE(d.requests.size(), 4u);
      if (!s.domains[static_cast<std::size_t>(d.domain)].bookable) {
        EXPECT_FALSE(d.book_people);
      }
    }
  }
}

TEST(GoalSampler, RejectsEmptySchema) {
  ad::Rng rng(1);
  EXPECT_THROW(sample_goal(rng, Schema{}), std::invalid_argument);
  Schema s = bench().schema;
  s.entities[1].clear();
  EXPECT_THROW(sample_goal(rng, s), std::invalid_argument);
}

TEST(Tracker, InformSetsBelief) {
  const auto& env = bench();
  auto t = dst_update(TrackerState::fresh(env.schema), {{uatom("restaurant-inform-food"), 0}}, env);
  EXPECT_EQ(t.belief[0][0], 0);
  EXPECT_EQ(env.schema.domains[0].informable[0].values[0], "thai");
  EXPECT_EQ(t.active_domain, 0);
}

TEST(Tracker, LaterInformWins) {
  const auto& env = bench();
  const int food = uatom("restaurant-inform-food");
  auto t = dst_update(TrackerState::fresh(env.schema), {{food, 0}, {food, 3}}, env);
  EXPECT_EQ(t.belief[0][0], 3);
  t = dst_update(t, {{food, 1}}, env);
  EXPECT_EQ(t.belief[0][0], 1);
  t = dst_update(t, {{food, kDontCare}}, env);
  EXPECT_EQ(t.belief[0][0], kDontCare);
}

TEST(Tracker, ResultCountMatchesDbFilter) {
  const auto& env = bench();
  ad::Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    auto t = TrackerState::fresh(env.schema);
    const int turns = 1 + static_cast<int>(rng.below(6));
    for (int k = 0; k < turns; ++k) {
      const int atom = static_cast<int>(rng.below(env.user.size()));
      const auto& info = env.user.info(atom);
      int v = -1;
      if (info.kind == ActKind::inform) {
        const auto n = env.schema.domains[static_cast<std::size_t>(info.domain)].informable[static_cast<std::size_t>(info.slot)].values.size();
        v = rng.bernoulli(0.2) ? kDontCare : static_cast<int>(rng.below(n));
      } else if (info.kind == ActKind::book) {
        v = 2;
      }
      t = dst_update(t, {{atom, v}}, env);
      ASSERT_EQ(t.result_count, static_cast<int>(scan_count(env.schema, t.active_domain, t.belief[static_cast<std::size_t>(t.active_domain)])));
    }
  }
}

TEST(Tracker, UnknownUserAtomThrows) {
  const auto& env = bench();
  EXPECT_THROW(dst_update(TrackerState::fresh(env.schema), {{99, 0}}, env), core::UnknownActionError);
}

TEST(Encoder, FreshTrackerOnlyNoQueryBucket) {
  const auto& env = bench();
  const auto s = encode_state(TrackerState::fresh(env.schema), env);
  ASSERT_EQ(s.size(), env.state_dim());
  std::size_t ones = 0;
  for (auto b : s.bits) ones += b;
  EXPECT_EQ(ones, 1u);
  EXPECT_EQ(s.bits[env.layout.segment("query_results").offset + env.schema.domains.size()], 1);
}

TEST(Encoder, DeterministicAndSegmented) {
  const auto& env = bench();
  auto t = dst_update(TrackerState::fresh(env.schema),
                      {{uatom("hotel-inform-stars"), 2}, {uatom("hotel-request-phone"), -1}}, env);
  note_system_action(t, {satom("hotel-request-area")});
  const auto a = encode_state(t, env);
  const auto b = encode_state(TrackerState(t), env);
  EXPECT_EQ(a, b);
  const auto& u = env.layout.segment("last_user_action");
  EXPECT_EQ(a.bits[u.offset + static_cast<std::size_t>(uatom("hotel-request-phone"))], 1);
  const auto& sys = env.layout.segment("last_system_action");
  EXPECT_EQ(a.bits[sys.offset + static_cast<std::size_t>(satom("hotel-request-area"))], 1);
  const auto& q = env.layout.segment("query_results");
  EXPECT_EQ(a.bits[q.offset + 1], 1);
}

TEST(Expert, InformsOpenRequestOnceConstraintsKnown) {
  const auto& env = bench();
  auto t = TrackerState::fresh(env.schema);
  t = dst_update(t, {{uatom("restaurant-inform-food"), 0}, {uatom("restaurant-inform-area"), 2}}, env);
  t = dst_update(t, {{uatom("restaurant-inform-pricerange"), kDontCare}, {uatom("restaurant-inform-seating"), kDontCare}}, env);
  t = dst_update(t, {{uatom("restaurant-request-phone"), -1}}, env);
  const auto a = expert_policy(t, env);
  EXPECT_TRUE(a.contains(satom("restaurant-inform-phone")));
  EXPECT_EQ(a.size(), 1u);
}

TEST(Expert, BooksWhenConstraintsComplete) {
  const auto& env = bench();
  auto t = TrackerState::fresh(env.schema);
  t = dst_update(t, {{uatom("hotel-inform-type"), 0}, {uatom("hotel-inform-area"), 1}, {uatom("hotel-inform-pricerange"), 1},
                     {uatom("hotel-inform-stars"), 0}, {uatom("hotel-inform-parking"), kDontCare}},
                 env);
  t = dst_update(t, {{uatom("hotel-book-people"), 4}}, env);
  const auto a = expert_policy(t, env);
  EXPECT_EQ(a, core::ActionSet{satom("hotel-book-ref")});
}

TEST(Expert, RequestsMissingSlots) {
  const auto& env = bench();
  auto t = dst_update(TrackerState::fresh(env.schema), {{uatom("restaurant-inform-area"), 0}}, env);
  EXPECT_EQ(expert_policy(t, env), (core::ActionSet{satom("restaurant-request-food"), satom("restaurant-request-pricerange")}));
  EXPECT_TRUE(expert_policy(TrackerState::fresh(env.schema), env).empty());
}

core::UserGoal restaurant_goal() {
  core::DomainGoal g;
  g.domain = 0;
  const auto& e = bench().schema.entities[0][0];
  g.constraints = {{0, e.values[0]}, {1, e.values[1]}};
  g.requests = {0, 1};
  g.book_people = 4;
  return {{g}};
}

TEST(User, InformedRequestLeavesAgenda) {
  const auto& env = bench();
  UserAgenda user(restaurant_goal(), env);
  user.step({});
  user.step({});
  const auto req = user.step({});
  EXPECT_EQ(atoms_of(req.action), (core::ActionSet{uatom("restaurant-request-phone"), uatom("restaurant-request-address"),
                                                   uatom("restaurant-book-people")}));
  const auto next = user.step({{satom("restaurant-inform-phone")}, {{0, 0}}});
  EXPECT_TRUE(user.answered(0, 0));
  EXPECT_FALSE(user.answered(0, 1));
  EXPECT_EQ(atoms_of(next.action), (core::ActionSet{uatom("restaurant-request-address"), uatom("restaurant-book-people")}));
}

TEST(User, EmptySystemActionRepeatsTopAct) {
  const auto& env = bench();
  UserAgenda user(restaurant_goal(), env);
  const auto open = user.step({});
  EXPECT_EQ(open.action.size(), 2u);
  const auto req = user.step({});
  const auto again = user.step({});
  EXPECT_EQ(req.action, again.action);
  EXPECT_FALSE(again.done);
}

TEST(User, InconsistentEntityIsRejected) {
  const auto& env = bench();
  const auto goal = restaurant_goal();
  int bad = -1;
  for (std::size_t e = 0; e < env.schema.entities[0].size() && bad < 0; ++e) {
    if (!env.schema.satisfies(0, static_cast<int>(e), goal.domains[0])) bad = static_cast<int>(e);
  }
  ASSERT_GE(bad, 0);
  UserAgenda user(goal, env);
  user.step({});
  user.step({{satom("restaurant-inform-phone")}, {{0, bad}}});
  EXPECT_FALSE(user.answered(0, 0));
}

TEST(User, FuzzAgainstReferenceAgenda) {
  const auto& env = bench();
  ad::Rng rng(77);
  for (int ep = 0; ep < 50; ++ep) {
    const auto goal = sample_goal(rng, env.schema);
    UserAgenda user(goal, env);
    testing::ReferenceUser ref(goal, env);
    bool ref_done = false;
    auto a = user.step({});
    auto b = ref.step({}, {}, ref_done);
    ASSERT_EQ(a.action, b);
    ASSERT_EQ(a.done, ref_done);
    for (int t = 0; t < 60 && !a.done; ++t) {
      SystemTurn turn;
      std::vector<int> ids;
      for (std::size_t k = 0; k < env.system.size(); ++k) {
        if (rng.bernoulli(0.15)) ids.push_back(static_cast<int>(k));
      }
      turn.action = core::ActionSet::from_ids(ids);
      for (int d = 0; d < static_cast<int>(env.schema.domains.size()); ++d) {
        if (rng.bernoulli(0.7)) {
          // Bias toward goal-consistent offers so that progress happens.
          const auto* g = goal.find(d);
          int e = static_cast<int>(rng.below(env.schema.entities[static_cast<std::size_t>(d)].size()));
          if (g && rng.bernoulli(0.7)) {
            std::vector<int> b(env.schema.domains[static_cast<std::size_t>(d)].informable.size(), kUnknown);
            for (auto c : g->constraints) b[static_cast<std::size_t>(c.slot)] = c.value;
            e = *env.schema.first_match(d, b);
          }
          turn.offered[d] = e;
        }
      }
      a = user.step(turn);
      b = ref.step(turn.action, turn.offered, ref_done);
      ASSERT_EQ(a.action, b) << "episode " << ep << " turn " << t;
      ASSERT_EQ(a.done, ref_done);
    }
  }
}

class SilentPolicy final : public SystemPolicy {
 public:
  core::ActionSet act(const core::DialogueState&, const TrackerState&) override { return {}; }
};

class RoguePolicy final : public SystemPolicy {
 public:
  core::ActionSet act(const core::DialogueState&, const TrackerState&) override { return {45}; }
};

TEST(Episode, RewardFormula) {
  EXPECT_DOUBLE_EQ(episode_reward(5, true, 40), 75.0);
  EXPECT_DOUBLE_EQ(episode_reward(40, false, 40), -80.0);
}

TEST(Episode, TimeoutReward) {
  const auto& env = bench();
  SilentPolicy p;
  const auto log = run_episode(p, env, restaurant_goal());
  EXPECT_EQ(log.termination, Termination::failure_timeout);
  EXPECT_EQ(log.turn_count, 40);
  EXPECT_EQ(log.turns.size(), 40u);
  EXPECT_DOUBLE_EQ(log.reward, -80.0);
}

TEST(Episode, ExpertSucceedsOnFixedGoal) {
  const auto& env = bench();
  ExpertPolicy p(env);
  const auto log = run_episode(p, env, restaurant_goal());
  EXPECT_EQ(log.termination, Termination::success);
  EXPECT_DOUBLE_EQ(log.reward, 80.0 - log.turn_count);
}

TEST(Episode, UnknownAtomThrows) {
  const auto& env = bench();
  RoguePolicy p;
  EXPECT_THROW(run_episode(p, env, restaurant_goal()), core::UnknownActionError);
}

TEST(Episode, ExpertSelfPlay) {
  const auto& env = bench();
  ExpertPolicy p(env);
  ad::Rng rng(1234);
  int wins = 0;
  for (int i = 0; i < 500; ++i) {
    const auto log = run_episode(p, env, rng);
    ASSERT_LE(log.turn_count, env.max_turns);
    ASSERT_DOUBLE_EQ(log.reward, episode_reward(log.turn_count, log.termination == Termination::success, 40));
    wins += log.termination == Termination::success;
  }
  EXPECT_GE(wins / 500.0, 0.98);
}

TEST(Episode, DeterministicAndJsonl) {
  const auto& env = bench();
  ExpertPolicy p(env);
  ad::Rng r1(9), r2(9);
  std::ostringstream a, b;
  for (int i = 0; i < 5; ++i) {
    write_episode_jsonl(a, run_episode(p, env, r1), env);
    write_episode_jsonl(b, run_episode(p, env, r2), env);
  }
  EXPECT_EQ(a.str(), b.str());
  std::istringstream in(a.str());
  std::string line;
  std::getline(in, line);
  const auto j = nlohmann::json::parse(line);
  EXPECT_EQ(j.at("turns").size(), static_cast<std::size_t>(j.at("turn_count").get<int>()));
  EXPECT_EQ(j.at("turns")[0].at("state").get<std::string>().size(), env.state_dim());
}

TEST(CorpusGen, SingleDialogue) {
  const auto& env = bench();
  ad::Rng rng(4), again(4);
  const auto c = generate_corpus(env, 1, rng);
  ExpertPolicy p(env);
  const auto log = run_episode(p, env, again);
  EXPECT_EQ(c.pairs.size(), log.turns.size());
  EXPECT_EQ(c.count(core::Split::train), c.pairs.size());
}

TEST(CorpusGen, BitIdenticalAcrossRuns) {
  const auto& env = bench();
  ad::Rng r1(31), r2(31);
  std::ostringstream a, b;
  core::write_corpus(generate_corpus(env, 50, r1), env.system.space(), a);
  core::write_corpus(generate_corpus(env, 50, r2), env.system.space(), b);
  EXPECT_EQ(a.str(), b.str());
}

TEST(CorpusGen, SplitProportions) {
  std::size_t counts[3] = {0, 0, 0};
  for (std::size_t i = 0; i < 2000; ++i) ++counts[static_cast<int>(split_of(i, 2000))];
  EXPECT_EQ(counts[0], 1600u);
  EXPECT_EQ(counts[1], 200u);
  EXPECT_EQ(counts[2], 200u);
  EXPECT_THROW(({ ad::Rng r(1); generate_corpus(bench(), 0, r); }), std::invalid_argument);
}

// Plays back recorded system actions.
class Replay final : public SystemPolicy {
 public:
  explicit Replay(std::vector<core::ActionSet> actions) : actions_(std::move(actions)) {}
  core::ActionSet act(const core::DialogueState&, const TrackerState&) override { return actions_.at(next_++); }

 private:
  std::vector<core::ActionSet> actions_;
  std::size_t next_ = 0;
};

TEST(CorpusGen, ReplayReproducesStates) {
  const auto& env = bench();
  ad::Rng rng(555);
  const auto corpus = generate_corpus(env, 2000, rng);
  std::map<int, std::vector<const core::StateActionPair*>> by_dialogue;
  for (const auto& p : corpus.pairs) by_dialogue[p.dialogue].push_back(&p);
  ASSERT_EQ(by_dialogue.size(), 2000u);

  ad::Rng goals(555);
  for (int i = 0; i < 2000; ++i) {
    const auto goal = sample_goal(goals, env.schema);
    const auto& pairs = by_dialogue[i];
    std::vector<core::ActionSet> actions;
    for (const auto* p : pairs) actions.push_back(p->actions);
    Replay replay(actions);
    const auto log = run_episode(replay, env, goal);
    ASSERT_EQ(log.turns.size(), pairs.size());
    for (std::size_t t = 0; t < pairs.size(); ++t) ASSERT_EQ(log.turns[t].state, pairs[t]->state) << i << ":" << t;
  }
}

}  // namespace
}  // namespace dialpol::env
