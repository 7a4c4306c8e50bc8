#include "dialpol/env/goal_sampler.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace dialpol::env {

namespace {

std::vector<int> iota_ids(std::size_t n) {
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

core::UserGoal sample_goal(ad::Rng& rng, const Schema& schema) {
  if (schema.domains.empty()) throw std::invalid_argument("sample_goal: schema has no domains");
  for (std::size_t d = 0; d < schema.domains.size(); ++d) {
    if (d >= schema.entities.size() || schema.entities[d].empty()) {
      throw std::invalid_argument("sample_goal: domain '" + schema.domains[d].name + "' has no entities");
    }
  }

  const std::size_t n_dom = 1 + rng.below(std::min<std::size_t>(3, schema.domains.size()));
  auto domains = iota_ids(schema.domains.size());
  rng.shuffle(domains);
  domains.resize(n_dom);

  core::UserGoal goal;
  for (int d : domains) {
    const auto& dom = schema.domains[static_cast<std::size_t>(d)];
    const auto& table = schema.entities[static_cast<std::size_t>(d)];
    const auto& anchor = table[rng.below(table.size())];

    core::DomainGoal g;
    g.domain = d;
    auto slots = iota_ids(dom.informable.size());
    rng.shuffle(slots);
    slots.resize(1 + rng.below(slots.size()));
    std::sort(slots.begin(), slots.end());
    for (int s : slots) g.constraints.push_back({s, anchor.values[static_cast<std::size_t>(s)]});

    if (!dom.requestable.empty()) {
      auto req = iota_ids(dom.requestable.size());
      rng.shuffle(req);
      req.resize(1 + rng.below(std::min<std::size_t>(4, req.size())));
      std::sort(req.begin(), req.end());
      g.requests = std::move(req);
    }
    if (dom.bookable && rng.bernoulli(0.5)) {
      g.book_people = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(schema.max_people)));
    }
    goal.domains.push_back(std::move(g));
  }
  return goal;
}

}  // namespace dialpol::env
