#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "dialpol/env/episode.hpp"

namespace dialpol::eval {

struct EpisodeScore {
  double match = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool success = false;
  int turns = 0;
  double reward = 0.0;

  bool operator==(const EpisodeScore&) const = default;
};

// Scores a finished episode against the goal it was run with.
//
// A requestable slot counts as informed once the system emitted its inform
// atom while an entity was on offer for that domain. Recall is taken over the
// goal's requests (1 for a goal without requests), precision over the
// distinct informed slots (0 when nothing was informed). Match averages the
// goal's domains: a domain that needs a booking scores the last booked
// entity, any other domain the last offered one (1 if none was offered).
//
// Throws std::invalid_argument when the goal's domains differ from the log's.
EpisodeScore score_episode(const env::EpisodeLog& log, const core::UserGoal& goal, const env::Environment& env);

double harmonic_mean(double a, double b);

// Means over a set of episodes, in table order plus the extras.
struct Metrics {
  double turns = 0.0;
  double match = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double success = 0.0;
  double precision = 0.0;
  double reward = 0.0;

  bool operator==(const Metrics&) const = default;
};

Metrics mean_metrics(const std::vector<EpisodeScore>& scores);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const Interval&) const = default;
};

struct SeedRow {
  std::uint64_t seed = 0;
  Metrics metrics;
  bool operator==(const SeedRow&) const = default;
};

struct AggregateReport {
  std::string name;
  std::size_t episodes_per_seed = 0;
  std::vector<SeedRow> per_seed;
  Metrics mean;  // over every episode of every seed
  // 95% percentile bootstrap intervals for turns, match, recall, f1, success.
  Interval turns_ci, match_ci, recall_ci, f1_ci, success_ci;

  bool operator==(const AggregateReport&) const = default;
};

struct EvalOptions {
  std::size_t bootstrap_resamples = 1000;
  // Called once per episode, in run order.
  std::function<void(std::uint64_t seed, const env::EpisodeLog&, const EpisodeScore&)> observer;
};

// Runs n_episodes goals per seed; the goals depend only on the seed, so every
// policy evaluated with the same seeds faces the same users.
AggregateReport evaluate_policy(env::SystemPolicy& policy, const env::Environment& env, std::size_t n_episodes,
                                const std::vector<std::uint64_t>& seeds, const std::string& name = "policy",
                                const EvalOptions& options = {});

// Percentile bootstrap of the mean.
Interval bootstrap_ci(const std::vector<double>& values, std::size_t resamples, std::uint64_t seed,
                      double level = 0.95);

// One row per report (or per seed plus a "mean" row), columns
// policy,seed,Turn,Match,Rec,F1,Success. CSV values round-trip exactly.
void write_report_csv(std::ostream& out, const std::vector<AggregateReport>& reports, bool per_seed = false);
void write_report_text(std::ostream& out, const std::vector<AggregateReport>& reports, bool per_seed = false);

struct ReportRow {
  std::string policy;
  std::string seed;
  double turns = 0.0, match = 0.0, recall = 0.0, f1 = 0.0, success = 0.0;
};
// Throws std::invalid_argument on a malformed table.
std::vector<ReportRow> read_report_csv(std::istream& in);

nlohmann::json report_to_json(const AggregateReport& report);

}  // namespace dialpol::eval
