#include <gtest/gtest.h>

#include <map>

#include "dialpol/autodiff/rng.hpp"
#include "dialpol/core/action_space.hpp"
#include "dialpol/core/corpus.hpp"

namespace dialpol::core {
namespace {

ActionSpace abc() { return ActionSpace({"d-x-a", "d-x-b", "d-x-c"}); }

ActionSet random_set(ad::Rng& rng, std::size_t m, double p = 0.3) {
  ActionSet s;
  for (std::size_t i = 0; i < m; ++i) {
    if (rng.bernoulli(p)) s.insert(static_cast<int>(i));
  }
  return s;
}

TEST(ActionSpaceTest, SpecialsFollowAtoms) {
  ActionSpace space = abc();
  EXPECT_EQ(space.size(), 3u);
  EXPECT_EQ(space.symbol_count(), 6u);
  EXPECT_EQ(space.name(space.pad()), "PAD");
  EXPECT_EQ(space.name(space.soa()), "SOA");
  EXPECT_EQ(space.name(space.eoa()), "EOA");
  EXPECT_FALSE(space.is_atom(space.eoa()));
  EXPECT_EQ(ActionSpace::render("hotel", "inform", "phone"), "hotel-inform-phone");
}

TEST(ActionSpaceTest, RejectsDuplicatesAndReservedNames) {
  EXPECT_THROW(ActionSpace({"a-b-c", "a-b-c"}), std::invalid_argument);
  EXPECT_THROW(ActionSpace({"EOA"}), std::invalid_argument);
  EXPECT_THROW(abc().index_of("d-x-z"), UnknownActionError);
}

TEST(FrequencyOrderTest, DescendingCounts) {
  ActionSpace space = abc();
  const std::size_t counts[] = {5, 2, 9};
  EXPECT_EQ(order_by_counts(space, counts), (std::vector<int>{2, 0, 1}));
}

TEST(FrequencyOrderTest, TiesAreLexicographic) {
  ActionSpace space({"d-x-b", "d-x-a"});
  const std::size_t counts[] = {3, 3};
  EXPECT_EQ(order_by_counts(space, counts), (std::vector<int>{1, 0}));
}

TEST(FrequencyOrderTest, EmptyCorpusIsAnError) {
  EXPECT_THROW(sort_actions_by_frequency(Corpus{}, abc()), std::invalid_argument);
}

TEST(FrequencyOrderTest, MatchesIndependentRecount) {
  std::vector<std::string> names;
  for (int i = 0; i < 20; ++i) names.push_back("dom-act-s" + std::to_string((i * 7) % 20));
  ActionSpace space(names);
  ad::Rng rng(77);
  Corpus corpus;
  for (int i = 0; i < 2000; ++i) {
    StateActionPair p;
    p.state.bits = {0, 1};
    p.split = i % 10 == 0 ? Split::val : Split::train;
    // Skewed inclusion so counts differ and some tie.
    for (int a = 0; a < 20; ++a) {
      if (rng.bernoulli(0.05 + 0.04 * (a % 5))) p.actions.insert(a);
    }
    corpus.pairs.push_back(p);
  }
  const auto order = sort_actions_by_frequency(corpus, space);

  // Oracle: count names in a map over training pairs, then repeatedly pick
  // the largest remaining count (smallest name first on ties).
  std::map<std::string, int> counts;
  for (const auto& n : names) counts[n] = 0;
  for (const auto& p : corpus.pairs) {
    if (p.split != Split::train) continue;
    for (int a : p.actions) counts[names[static_cast<std::size_t>(a)]] += 1;
  }
  std::vector<std::string> expected;
  while (!counts.empty()) {
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    expected.push_back(best->first);
    counts.erase(best);
  }
  std::vector<std::string> got;
  for (int a : order) got.push_back(space.name(a));
  EXPECT_EQ(got, expected);
}

TEST(ActionPathTest, EmptySetIsJustEoa) {
  ActionSpace space = abc();
  EXPECT_EQ(to_action_path({}, space), (std::vector<int>{space.eoa()}));
}

TEST(ActionPathTest, FollowsFrequencyOrder) {
  ActionSpace space({"hotel-inform-phone", "hotel-inform-address", "hotel-inform-postcode"});
  space.set_frequency_order({1, 0, 2});  // address ranked above phone
  const ActionSet set{0, 1};
  EXPECT_EQ(to_action_path(set, space), (std::vector<int>{1, 0, space.eoa()}));
}

TEST(ActionPathTest, UnknownAtomIsAnError) {
  EXPECT_THROW(to_action_path(ActionSet{7}, abc()), UnknownActionError);
  EXPECT_THROW(from_two_hot(std::vector<double>{0.5, 0.5}), std::invalid_argument);
}

TEST(ActionPathTest, RoundTripsAndIsStrictlyIncreasingInRank) {
  std::vector<std::string> names;
  for (int i = 0; i < 30; ++i) names.push_back("d-a-" + std::to_string(i));
  ActionSpace space(names);
  ad::Rng rng(3);
  std::vector<int> order(30);
  for (int i = 0; i < 30; ++i) order[static_cast<std::size_t>(i)] = i;
  rng.shuffle(order);
  space.set_frequency_order(order);
  for (int trial = 0; trial < 500; ++trial) {
    const ActionSet set = random_set(rng, 30);
    const auto path = to_action_path(set, space);
    ASSERT_EQ(path.back(), space.eoa());
    for (std::size_t i = 1; i + 1 < path.size(); ++i) {
      ASSERT_LT(space.rank(path[i - 1]), space.rank(path[i]));
    }
    EXPECT_EQ(from_action_path(path, space), set);
    EXPECT_EQ(to_action_path(from_action_path(path, space), space), path);
  }
}

TEST(TwoHotTest, Examples) {
  EXPECT_EQ(to_two_hot(ActionSet{1}, 2), (std::vector<double>{1, 0, 0, 1}));
  EXPECT_EQ(to_two_hot({}, 3), (std::vector<double>{1, 0, 1, 0, 1, 0}));
}

TEST(TwoHotTest, EncodingsAreMutuallyInverse) {
  ad::Rng rng(166);
  for (int trial = 0; trial < 200; ++trial) {
    const ActionSet set = random_set(rng, 166);
    const auto two_hot = to_two_hot(set, 166);
    ASSERT_EQ(two_hot.size(), 332u);
    for (std::size_t i = 0; i < 166; ++i) ASSERT_EQ(two_hot[2 * i] + two_hot[2 * i + 1], 1.0);
    EXPECT_EQ(from_two_hot(two_hot), set);
    const auto vec = to_vector(set, 166);
    EXPECT_EQ(from_vector(vec), set);
    for (std::size_t i = 0; i < 166; ++i) EXPECT_EQ(vec[i], two_hot[2 * i + 1]);
  }
}

}  // namespace
}  // namespace dialpol::core
