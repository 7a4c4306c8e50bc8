#include "dialpol/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dialpol/env/goal_sampler.hpp"

namespace dialpol::eval {

double harmonic_mean(double a, double b) { return a + b > 0.0 ? 2.0 * a * b / (a + b) : 0.0; }

namespace {

bool same_domains(const core::UserGoal& a, const core::UserGoal& b) {
  if (a.domains.size() != b.domains.size()) return false;
  for (std::size_t i = 0; i < a.domains.size(); ++i) {
    if (a.domains[i].domain != b.domains[i].domain) return false;
  }
  return true;
}

}  // namespace

EpisodeScore score_episode(const env::EpisodeLog& log, const core::UserGoal& goal, const env::Environment& env) {
  if (!same_domains(log.goal, goal)) throw std::invalid_argument("score_episode: goal domains differ from the log's");
  for (const auto& g : goal.domains) {
    if (g.domain < 0 || static_cast<std::size_t>(g.domain) >= env.schema.domains.size()) {
      throw std::invalid_argument("score_episode: goal domain outside the schema");
    }
  }

  std::set<std::pair<int, int>> informed;
  std::map<int, int> last_offered, last_booked;
  for (const auto& turn : log.turns) {
    for (int a : turn.system) {
      const auto& info = env.system.info(a);
      auto it = turn.offered.find(info.domain);
      if (it == turn.offered.end()) continue;
      if (info.kind == env::ActKind::inform) informed.emplace(info.domain, info.slot);
      if (info.kind == env::ActKind::book) last_booked[info.domain] = it->second;
    }
    for (const auto& [d, e] : turn.offered) last_offered[d] = e;
  }

  std::size_t requested = 0, hits = 0;
  double match = 0.0;
  for (const auto& g : goal.domains) {
    requested += g.requests.size();
    for (int r : g.requests) hits += informed.count({g.domain, r});
    if (g.book_people) {
      auto it = last_booked.find(g.domain);
      match += it != last_booked.end() && env.schema.satisfies(g.domain, it->second, g) ? 1.0 : 0.0;
    } else {
      auto it = last_offered.find(g.domain);
      match += it == last_offered.end() || env.schema.satisfies(g.domain, it->second, g) ? 1.0 : 0.0;
    }
  }

  EpisodeScore s;
  s.recall = requested == 0 ? 1.0 : static_cast<double>(hits) / static_cast<double>(requested);
  s.precision = informed.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(informed.size());
  s.f1 = harmonic_mean(s.precision, s.recall);
  s.match = goal.domains.empty() ? 1.0 : match / static_cast<double>(goal.domains.size());
  s.success = log.termination == env::Termination::success;
  s.turns = log.turn_count;
  s.reward = log.reward;
  return s;
}

Metrics mean_metrics(const std::vector<EpisodeScore>& scores) {
  Metrics m;
  if (scores.empty()) return m;
  for (const auto& s : scores) {
    m.turns += s.turns;
    m.match += s.match;
    m.recall += s.recall;
    m.f1 += s.f1;
    m.success += s.success ? 1.0 : 0.0;
    m.precision += s.precision;
    m.reward += s.reward;
  }
  const double n = static_cast<double>(scores.size());
  m.turns /= n;
  m.match /= n;
  m.recall /= n;
  m.f1 /= n;
  m.success /= n;
  m.precision /= n;
  m.reward /= n;
  return m;
}

Interval bootstrap_ci(const std::vector<double>& values, std::size_t resamples, std::uint64_t seed, double level) {
  if (values.empty()) throw std::invalid_argument("bootstrap_ci: no values");
  if (resamples == 0) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    return {mean, mean};
  }
  ad::Rng rng(seed);
  std::vector<double> means(resamples);
  for (auto& m : means) {
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) sum += values[rng.below(values.size())];
    m = sum / static_cast<double>(values.size());
  }
  std::sort(means.begin(), means.end());
  const double alpha = (1.0 - level) / 2.0;
  auto at = [&](double q) {
    const auto k = static_cast<std::size_t>(std::floor(q * static_cast<double>(resamples - 1) + 0.5));
    return means[std::min(k, resamples - 1)];
  };
  return {at(alpha), at(1.0 - alpha)};
}

AggregateReport evaluate_policy(env::SystemPolicy& policy, const env::Environment& env, std::size_t n_episodes,
                                const std::vector<std::uint64_t>& seeds, const std::string& name,
                                const EvalOptions& options) {
  if (n_episodes == 0) throw std::invalid_argument("evaluate_policy: need at least one episode");
  if (seeds.empty()) throw std::invalid_argument("evaluate_policy: need at least one seed");
  AggregateReport report;
  report.name = name;
  report.episodes_per_seed = n_episodes;
  std::vector<EpisodeScore> all;
  for (auto seed : seeds) {
    ad::Rng goals(ad::derive_seed(seed, "eval-goals"));
    std::vector<EpisodeScore> scores;
    for (std::size_t i = 0; i < n_episodes; ++i) {
      const auto goal = env::sample_goal(goals, env.schema);
      const auto log = env::run_episode(policy, env, goal);
      scores.push_back(score_episode(log, goal, env));
      if (options.observer) options.observer(seed, log, scores.back());
    }
    report.per_seed.push_back({seed, mean_metrics(scores)});
    all.insert(all.end(), scores.begin(), scores.end());
  }
  report.mean = mean_metrics(all);

  std::uint64_t boot_seed = ad::derive_seed(seeds.front(), "bootstrap");
  auto ci = [&](auto field) {
    std::vector<double> v;
    v.reserve(all.size());
    for (const auto& s : all) v.push_back(field(s));
    boot_seed = ad::derive_seed(boot_seed, "next");
    return bootstrap_ci(v, options.bootstrap_resamples, boot_seed);
  };
  report.turns_ci = ci([](const EpisodeScore& s) { return static_cast<double>(s.turns); });
  report.match_ci = ci([](const EpisodeScore& s) { return s.match; });
  report.recall_ci = ci([](const EpisodeScore& s) { return s.recall; });
  report.f1_ci = ci([](const EpisodeScore& s) { return s.f1; });
  report.success_ci = ci([](const EpisodeScore& s) { return s.success ? 1.0 : 0.0; });
  return report;
}

namespace {

const char* const kHeader = "policy,seed,Turn,Match,Rec,F1,Success";

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Row {
  std::string policy, seed;
  Metrics m;
};

std::vector<Row> rows_of(const std::vector<AggregateReport>& reports, bool per_seed) {
  if (reports.empty()) throw std::invalid_argument("report: nothing to render");
  std::vector<Row> rows;
  for (const auto& r : reports) {
    if (per_seed) {
      for (const auto& s : r.per_seed) rows.push_back({r.name, std::to_string(s.seed), s.metrics});
    }
    rows.push_back({r.name, "mean", r.mean});
  }
  return rows;
}

void check_name(const std::string& name) {
  if (name.find_first_of(",\n\"") != std::string::npos) {
    throw std::invalid_argument("report: policy name '" + name + "' cannot go in a CSV cell");
  }
}

}  // namespace

void write_report_csv(std::ostream& out, const std::vector<AggregateReport>& reports, bool per_seed) {
  out << kHeader << '\n';
  for (const auto& row : rows_of(reports, per_seed)) {
    check_name(row.policy);
    out << row.policy << ',' << row.seed << ',' << exact(row.m.turns) << ',' << exact(row.m.match) << ','
        << exact(row.m.recall) << ',' << exact(row.m.f1) << ',' << exact(row.m.success) << '\n';
  }
}

void write_report_text(std::ostream& out, const std::vector<AggregateReport>& reports, bool per_seed) {
  const auto rows = rows_of(reports, per_seed);
  std::size_t w = 6;
  for (const auto& r : rows) w = std::max(w, r.policy.size() + (per_seed ? r.seed.size() + 3 : 0));
  auto label = [&](const Row& r) { return per_seed ? r.policy + " [" + r.seed + "]" : r.policy; };
  std::ostringstream s;
  s << std::left << std::setw(static_cast<int>(w)) << "Policy" << std::right;
  for (const char* h : {"Turn", "Match", "Rec", "F1", "Success"}) s << std::setw(9) << h;
  s << '\n';
  s << std::fixed;
  for (const auto& r : rows) {
    s << std::left << std::setw(static_cast<int>(w)) << label(r) << std::right << std::setprecision(2)
      << std::setw(9) << r.m.turns << std::setprecision(3) << std::setw(9) << r.m.match << std::setw(9)
      << r.m.recall << std::setw(9) << r.m.f1 << std::setw(9) << r.m.success << '\n';
  }
  out << s.str();
}

std::vector<ReportRow> read_report_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw std::invalid_argument("report: missing header");
  std::vector<ReportRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) throw std::invalid_argument("report: expected 7 cells in '" + line + "'");
    ReportRow r;
    r.policy = cells[0];
    r.seed = cells[1];
    try {
      r.turns = std::stod(cells[2]);
      r.match = std::stod(cells[3]);
      r.recall = std::stod(cells[4]);
      r.f1 = std::stod(cells[5]);
      r.success = std::stod(cells[6]);
    } catch (const std::logic_error&) {
      throw std::invalid_argument("report: bad number in '" + line + "'");
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

nlohmann::json report_to_json(const AggregateReport& report) {
  auto metrics = [](const Metrics& m) {
    return nlohmann::json{{"turns", m.turns},   {"match", m.match},         {"recall", m.recall},
                          {"f1", m.f1},         {"success", m.success},     {"precision", m.precision},
                          {"reward", m.reward}};
  };
  auto interval = [](const Interval& i) { return nlohmann::json::array({i.lo, i.hi}); };
  nlohmann::json seeds = nlohmann::json::array();
  for (const auto& s : report.per_seed) seeds.push_back({{"seed", s.seed}, {"metrics", metrics(s.metrics)}});
  return {{"name", report.name},
          {"episodes_per_seed", report.episodes_per_seed},
          {"per_seed", seeds},
          {"mean", metrics(report.mean)},
          {"ci95",
           {{"turns", interval(report.turns_ci)},
            {"match", interval(report.match_ci)},
            {"recall", interval(report.recall_ci)},
            {"f1", interval(report.f1_ci)},
            {"success", interval(report.success_ci)}}}};
}

}  // namespace dialpol::eval
