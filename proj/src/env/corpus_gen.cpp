#include "dialpol/env/corpus_gen.hpp"

#include <stdexcept>

#include "dialpol/env/episode.hpp"
#include "dialpol/env/goal_sampler.hpp"

namespace dialpol::env {

core::Split split_of(std::size_t i, std::size_t n) {
  const std::size_t tenth = n / 10;
  if (i + 2 * tenth < n) return core::Split::train;
  if (i + tenth < n) return core::Split::val;
  return core::Split::test;
}

core::Corpus generate_corpus(const Environment& env, std::size_t n_dialogues, ad::Rng& rng) {
  if (n_dialogues == 0) throw std::invalid_argument("generate_corpus: need at least one dialogue");
  ExpertPolicy expert(env);
  core::Corpus corpus;
  for (std::size_t i = 0; i < n_dialogues; ++i) {
    const auto log = run_episode(expert, env, rng);
    for (const auto& t : log.turns) {
      corpus.pairs.push_back({t.state, t.system, split_of(i, n_dialogues), static_cast<int>(i)});
    }
  }
  return corpus;
}

}  // namespace dialpol::env
