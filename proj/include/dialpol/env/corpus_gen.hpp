#pragma once

#include <cstddef>

#include "dialpol/autodiff/rng.hpp"
#include "dialpol/core/corpus.hpp"
#include "dialpol/env/schema.hpp"

namespace dialpol::env {

// Expert self-play over n sampled goals. Every system turn becomes a pair
// tagged with its dialogue index; dialogues are split in order, the last
// n/10 to test, the n/10 before them to validation and the rest to train.
core::Corpus generate_corpus(const Environment& env, std::size_t n_dialogues, ad::Rng& rng);

// Split assignment of dialogue i among n.
core::Split split_of(std::size_t i, std::size_t n);

}  // namespace dialpol::env
