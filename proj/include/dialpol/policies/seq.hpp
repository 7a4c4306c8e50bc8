#pragma once

#include <cstdint>

#include "dialpol/policies/layers.hpp"
#include "dialpol/policies/policy.hpp"

namespace dialpol::policies {

struct SeqConfig {
  std::size_t mlp_hidden = 128;
  std::size_t state_embedding = 50;  // also the GRU hidden size
  std::size_t action_embedding = 30;
  std::size_t beam = 6;
  std::size_t max_path = 0;  // symbols including EOA; 0 means m + 1
  bool monotone = false;     // decode only paths in frequency order
};

struct Decoded {
  core::ActionSet actions;
  std::vector<int> path;  // atoms then EOA
  double score = 0.0;     // sum of log-probabilities
};

// Encoder MLP gives v, which seeds the GRU state; each step feeds
// embedding(previous symbol) concatenated with v, and a projection scores the
// m + 3 symbols. Targets are action paths in the space's frequency order.
class SeqPolicy final : public Policy {
 public:
  SeqPolicy(core::ActionSpace actions, std::size_t state_dim, SeqConfig config, std::uint64_t seed);

  using Policy::predict;
  Method method() const override { return Method::diaseq; }
  std::vector<ad::Parameter*> parameters() override;
  // Teacher-forced cross-entropy, averaged over non-PAD target positions.
  // Throws std::length_error for a path longer than max_path.
  ad::Var loss(ad::Graph& g, Batch batch) override;
  std::vector<core::ActionSet> predict(std::span<const core::DialogueState> states) override;
  nlohmann::json config() const override;
  std::unique_ptr<Policy> clone() const override { return std::make_unique<SeqPolicy>(*this); }

  // Beam search: PAD and SOA are never emitted, a hypothesis cannot repeat an
  // atom and closes on EOA, hypotheses are ranked by raw log-probability.
  // Finished hypotheses of widths 1..beam are pooled, so a wider beam never
  // returns a lower score and beam 1 is greedy decoding.
  Decoded decode(const core::DialogueState& state, std::size_t beam);
  Decoded decode(const core::DialogueState& state) { return decode(state, config_.beam); }

  // log P(path | state) under teacher forcing; `path` ends with EOA.
  double path_log_prob(const core::DialogueState& state, std::span<const int> path);

  // Decoder pieces, exposed for tests.
  ad::Var encode(ad::Graph& g, ad::Var states);
  // Advances the GRU one step and returns symbol logits [n, m + 3].
  ad::Var step(ad::Graph& g, ad::Var hidden, ad::Var context, std::vector<std::size_t> prev, ad::Var& next_hidden);

  std::size_t max_path() const;
  const SeqConfig& settings() const { return config_; }
  void set_monotone(bool on) { config_.monotone = on; }

 private:
  std::vector<Decoded> beam_pass(const ad::Tensor& context, std::size_t width);

  SeqConfig config_;
  Mlp encoder_;
  Embedding embedding_;
  GruCell gru_;
  Linear output_;
};

}  // namespace dialpol::policies
