#include <gtest/gtest.h>

#include <sstream>

#include "dialpol/env/goal_sampler.hpp"
#include "dialpol/eval/metrics.hpp"
#include "support/goal_checker.hpp"
#include "support/test_policies.hpp"

namespace dialpol::eval {
namespace {

const env::Environment& bench() {
  static const env::Environment e = env::Environment::make(env::default_schema());
  return e;
}

core::UserGoal goal_with_booking(std::uint64_t seed) {
  ad::Rng rng(seed);
  for (;;) {
    auto g = env::sample_goal(rng, bench().schema);
    if (g.domains.front().book_people) return g;
  }
}

TEST(ScoreEpisode, ExpertAnswersEverything) {
  const auto& env = bench();
  env::ExpertPolicy expert(env);
  const auto goal = goal_with_booking(1);
  const auto log = env::run_episode(expert, env, goal);
  const auto s = score_episode(log, goal, env);
  EXPECT_TRUE(s.success);
  EXPECT_EQ(s.recall, 1.0);
  EXPECT_EQ(s.match, 1.0);
  EXPECT_EQ(s.precision, 1.0);
  EXPECT_EQ(s.f1, 1.0);
  EXPECT_EQ(s.turns, log.turn_count);
  EXPECT_EQ(s.reward, 80.0 - log.turn_count);
}

TEST(ScoreEpisode, SilentSystemScoresZero) {
  const auto& env = bench();
  testing::SilentPolicy silent;
  const auto goal = goal_with_booking(2);
  const auto s = score_episode(env::run_episode(silent, env, goal), goal, env);
  EXPECT_EQ(s.recall, 0.0);
  EXPECT_EQ(s.precision, 0.0);
  EXPECT_EQ(s.f1, 0.0);
  EXPECT_FALSE(s.success);
  EXPECT_EQ(s.turns, 40);
  EXPECT_EQ(s.reward, -80.0);
}

TEST(ScoreEpisode, HandBuiltLog) {
  const auto& env = bench();
  core::UserGoal goal;
  core::DomainGoal rest{0, {{0, 2}}, {0, 1}, std::nullopt};
  goal.domains = {rest};
  // Restaurants serving another food make bad offers.
  int good = -1, bad = -1;
  for (std::size_t e = 0; e < env.schema.entities[0].size(); ++e) {
    (env.schema.entities[0][e].values[0] == 2 ? good : bad) = static_cast<int>(e);
  }
  ASSERT_GE(good, 0);
  ASSERT_GE(bad, 0);
  const int phone = env.system.id(0, env::ActKind::inform, 0);
  const int post = env.system.id(0, env::ActKind::inform, 2);
  env::EpisodeLog log;
  log.goal = goal;
  log.turns.push_back({{}, core::ActionSet{phone, post}, {{0, bad}}, {}});
  log.turns.push_back({{}, core::ActionSet{phone}, {{0, good}}, {}});
  log.turn_count = 2;
  auto s = score_episode(log, goal, env);
  EXPECT_EQ(s.recall, 0.5);
  EXPECT_EQ(s.precision, 0.5);
  EXPECT_EQ(s.f1, 0.5);
  EXPECT_EQ(s.match, 1.0);  // the last offer fits
  std::swap(log.turns[0].offered, log.turns[1].offered);
  EXPECT_EQ(score_episode(log, goal, env).match, 0.0);
}

TEST(ScoreEpisode, DomainMismatchThrows) {
  const auto& env = bench();
  env::ExpertPolicy expert(env);
  const auto goal = goal_with_booking(3);
  const auto log = env::run_episode(expert, env, goal);
  auto other = goal;
  other.domains.front().domain = (other.domains.front().domain + 1) % static_cast<int>(env.schema.domains.size());
  EXPECT_THROW(score_episode(log, other, env), std::invalid_argument);
  other.domains.clear();
  EXPECT_THROW(score_episode(log, other, env), std::invalid_argument);
}

void expect_matches_checker(env::SystemPolicy& policy, std::uint64_t seed, int episodes) {
  const auto& env = bench();
  const auto schema_json = env::schema_to_json(env.schema);
  ad::Rng goals(seed);
  for (int i = 0; i < episodes; ++i) {
    const auto goal = env::sample_goal(goals, env.schema);
    const auto log = env::run_episode(policy, env, goal);
    const auto s = score_episode(log, goal, env);
    const auto c = testing::check_goal(env::episode_to_json(log, env), schema_json);
    ASSERT_EQ(s.match, c.match) << i;
    ASSERT_EQ(s.precision, c.precision) << i;
    ASSERT_EQ(s.recall, c.recall) << i;
    ASSERT_EQ(s.f1, c.f1) << i;
    ASSERT_EQ(s.success, c.success) << i;
    ASSERT_EQ(s.turns, c.turns) << i;
    ASSERT_EQ(s.reward, c.reward) << i;
  }
}

TEST(ScoreEpisode, AgreesWithBruteForceChecker) {
  testing::NoisyExpert noisy(bench(), 0.2, 0.02, 5);
  testing::RandomPolicy random(bench(), 0.1, 6);
  env::ExpertPolicy expert(bench());
  expect_matches_checker(noisy, 11, 100);
  expect_matches_checker(random, 12, 50);
  expect_matches_checker(expert, 13, 50);
}

TEST(ScoreEpisode, Invariants) {
  const auto& env = bench();
  for (double drop : {0.0, 0.1, 0.3}) {
    testing::NoisyExpert policy(env, drop, 0.03, 7);
    ad::Rng goals(8);
    int successes = 0;
    for (int i = 0; i < 100; ++i) {
      const auto goal = env::sample_goal(goals, env.schema);
      const auto s = score_episode(env::run_episode(policy, env, goal), goal, env);
      if (s.success) {
        ++successes;
        EXPECT_EQ(s.recall, 1.0);
        EXPECT_EQ(s.match, 1.0);
        EXPECT_LE(s.turns, env.max_turns);
      }
      EXPECT_GE(s.f1, std::min(s.precision, s.recall) - 1e-15);
      EXPECT_LE(s.f1, std::max(s.precision, s.recall) + 1e-15);
      EXPECT_EQ(s.f1 == 1.0, s.precision == 1.0 && s.recall == 1.0);
      EXPECT_GE(s.match, 0.0);
      EXPECT_LE(s.match, 1.0);
    }
    EXPECT_GT(successes, 0);
  }
}

TEST(Evaluate, ExpertSucceeds) {
  env::ExpertPolicy expert(bench());
  const auto r = evaluate_policy(expert, bench(), 500, {1}, "expert");
  EXPECT_GE(r.mean.success, 0.98);
  EXPECT_LE(r.success_ci.lo, r.mean.success);
  EXPECT_GE(r.success_ci.hi, r.mean.success);
}

TEST(Evaluate, SilentPolicyTimesOut) {
  testing::SilentPolicy silent;
  const auto r = evaluate_policy(silent, bench(), 20, {1, 2}, "silent");
  EXPECT_EQ(r.mean.success, 0.0);
  EXPECT_EQ(r.mean.turns, 40.0);
  EXPECT_EQ(r.mean.reward, -80.0);
  EXPECT_EQ(r.per_seed.size(), 2u);
}

TEST(Evaluate, SameSeedsSameReport) {
  testing::NoisyExpert a(bench(), 0.2, 0.02, 5), b(bench(), 0.2, 0.02, 5);
  const auto ra = evaluate_policy(a, bench(), 30, {3, 4}, "noisy");
  const auto rb = evaluate_policy(b, bench(), 30, {3, 4}, "noisy");
  EXPECT_EQ(ra, rb);
}

TEST(Evaluate, RewardFollowsClosedForm) {
  testing::NoisyExpert policy(bench(), 0.3, 0.02, 9);
  EvalOptions opts;
  int seen = 0;
  opts.observer = [&](std::uint64_t, const env::EpisodeLog& log, const EpisodeScore& s) {
    ++seen;
    EXPECT_EQ(log.reward, s.success ? 80.0 - log.turn_count : -80.0 - log.turn_count);
    if (!s.success) {
      EXPECT_EQ(log.turn_count, 40);
    }
  };
  evaluate_policy(policy, bench(), 50, {1}, "noisy", opts);
  EXPECT_EQ(seen, 50);
}

TEST(Evaluate, RejectsEmptyRuns) {
  env::ExpertPolicy expert(bench());
  EXPECT_THROW(evaluate_policy(expert, bench(), 0, {1}), std::invalid_argument);
  EXPECT_THROW(evaluate_policy(expert, bench(), 5, {}), std::invalid_argument);
}

TEST(Bootstrap, ConstantValuesGiveDegenerateInterval) {
  const auto ci = bootstrap_ci({0.25, 0.25, 0.25}, 200, 1);
  EXPECT_EQ(ci.lo, 0.25);
  EXPECT_EQ(ci.hi, 0.25);
  EXPECT_THROW(bootstrap_ci({}, 10, 1), std::invalid_argument);
}

TEST(Bootstrap, IntervalBracketsMean) {
  std::vector<double> v;
  ad::Rng rng(2);
  for (int i = 0; i < 400; ++i) v.push_back(rng.bernoulli(0.3) ? 1.0 : 0.0);
  const auto ci = bootstrap_ci(v, 1000, 3);
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= 400.0;
  EXPECT_LT(ci.lo, mean);
  EXPECT_GT(ci.hi, mean);
  // Normal approximation half width 1.96 * sqrt(p(1-p)/n) is about 0.045.
  EXPECT_NEAR(ci.hi - ci.lo, 2 * 1.96 * std::sqrt(mean * (1 - mean) / 400.0), 0.015);
}

AggregateReport sample_report(const std::string& name) {
  testing::NoisyExpert policy(bench(), 0.25, 0.02, 4);
  return evaluate_policy(policy, bench(), 15, {1, 2, 3}, name);
}

TEST(Report, SingleReportSingleRowInTableOrder) {
  std::ostringstream out;
  write_report_csv(out, {sample_report("noisy")});
  std::istringstream lines(out.str());
  std::string header, row, extra;
  std::getline(lines, header);
  std::getline(lines, row);
  EXPECT_EQ(header, "policy,seed,Turn,Match,Rec,F1,Success");
  EXPECT_FALSE(std::getline(lines, extra));
  EXPECT_EQ(row.rfind("noisy,mean,", 0), 0u);
}

TEST(Report, CsvRoundTripsExactly) {
  const auto a = sample_report("a"), b = sample_report("b");
  std::stringstream io;
  write_report_csv(io, {a, b}, true);
  const auto rows = read_report_csv(io);
  ASSERT_EQ(rows.size(), 2u * 4u);
  const auto& mean = rows[3];
  EXPECT_EQ(mean.policy, "a");
  EXPECT_EQ(mean.seed, "mean");
  EXPECT_EQ(mean.turns, a.mean.turns);
  EXPECT_EQ(mean.match, a.mean.match);
  EXPECT_EQ(mean.recall, a.mean.recall);
  EXPECT_EQ(mean.f1, a.mean.f1);
  EXPECT_EQ(mean.success, a.mean.success);
  EXPECT_EQ(rows[1].seed, "2");
  EXPECT_EQ(rows[1].f1, a.per_seed[1].metrics.f1);
}

TEST(Report, TextTableHasOneLinePerRow) {
  std::ostringstream out;
  write_report_text(out, {sample_report("noisy"), sample_report("other")});
  const auto text = out.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  const auto turn = text.find("Turn"), match = text.find("Match"), rec = text.find("Rec"), f1 = text.find("F1"),
             success = text.find("Success");
  EXPECT_LT(turn, match);
  EXPECT_LT(match, rec);
  EXPECT_LT(rec, f1);
  EXPECT_LT(f1, success);
}

TEST(Report, RejectsBadInput) {
  std::ostringstream out;
  EXPECT_THROW(write_report_csv(out, {}), std::invalid_argument);
  auto r = sample_report("a,b");
  EXPECT_THROW(write_report_csv(out, {r}), std::invalid_argument);
  std::istringstream bad("policy,seed,Turn,Match,Rec,F1,Success\nx,mean,1,2\n");
  EXPECT_THROW(read_report_csv(bad), std::invalid_argument);
  std::istringstream noheader("x,mean,1,2,3,4,5\n");
  EXPECT_THROW(read_report_csv(noheader), std::invalid_argument);
}

TEST(Report, JsonCarriesIntervals) {
  const auto j = report_to_json(sample_report("noisy"));
  EXPECT_EQ(j.at("per_seed").size(), 3u);
  EXPECT_LE(j.at("ci95").at("success")[0].get<double>(), j.at("mean").at("success").get<double>());
}

}  // namespace
}  // namespace dialpol::eval
