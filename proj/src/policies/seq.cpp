#include "dialpol/policies/seq.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace dialpol::policies {

SeqPolicy::SeqPolicy(core::ActionSpace actions, std::size_t state_dim, SeqConfig config, std::uint64_t seed)
    : Policy(std::move(actions), state_dim), config_(config) {
  if (config_.beam == 0) throw std::invalid_argument("diaseq: beam width must be positive");
  ad::Rng rng(ad::derive_seed(seed, "diaseq"));
  const std::size_t symbols = actions_.symbol_count();
  encoder_ = Mlp("encoder", {state_dim_, config_.mlp_hidden, config_.state_embedding}, Activation::relu,
                 Activation::tanh, rng);
  embedding_ = Embedding("embedding", symbols, config_.action_embedding, rng);
  gru_ = GruCell("gru", config_.action_embedding + config_.state_embedding, config_.state_embedding, rng);
  output_ = Linear("output", config_.state_embedding, symbols, rng);
}

std::vector<ad::Parameter*> SeqPolicy::parameters() {
  std::vector<ad::Parameter*> out;
  encoder_.parameters(out);
  embedding_.parameters(out);
  gru_.parameters(out);
  output_.parameters(out);
  return out;
}

std::size_t SeqPolicy::max_path() const { return config_.max_path ? config_.max_path : actions_.size() + 1; }

ad::Var SeqPolicy::encode(ad::Graph& g, ad::Var states) { return encoder_(g, states); }

ad::Var SeqPolicy::step(ad::Graph& g, ad::Var hidden, ad::Var context, std::vector<std::size_t> prev,
                        ad::Var& next_hidden) {
  auto x = ad::concat({embedding_(g, std::move(prev)), context});
  next_hidden = gru_(g, x, hidden);
  return output_(g, next_hidden);
}

ad::Var SeqPolicy::loss(ad::Graph& g, Batch batch) {
  check_batch(batch);
  const std::size_t n = batch.size();
  const std::size_t symbols = actions_.symbol_count();
  std::vector<std::vector<int>> paths;
  std::size_t longest = 0;
  for (const auto& p : batch) {
    paths.push_back(core::to_action_path(p.actions, actions_));
    if (paths.back().size() > max_path()) {
      throw std::length_error("diaseq: action path of length " + std::to_string(paths.back().size()) +
                              " exceeds max_path " + std::to_string(max_path()));
    }
    longest = std::max(longest, paths.back().size());
  }

  auto context = encode(g, g.constant(stack_states(batch, state_dim_)));
  auto hidden = context;
  std::vector<std::size_t> prev(n, static_cast<std::size_t>(actions_.soa()));
  ad::Var total;
  std::size_t tokens = 0;
  for (std::size_t t = 0; t < longest; ++t) {
    ad::Var next;
    auto log_p = ad::log_softmax(step(g, hidden, context, prev, next));
    ad::Tensor mask({n, symbols});
    for (std::size_t i = 0; i < n; ++i) {
      if (t < paths[i].size()) {
        mask.at(i, static_cast<std::size_t>(paths[i][t])) = 1.0;
        ++tokens;
        prev[i] = static_cast<std::size_t>(paths[i][t]);
      } else {
        prev[i] = static_cast<std::size_t>(actions_.pad());
      }
    }
    auto term = ad::sum(ad::mul(log_p, g.constant(std::move(mask))));
    total = t == 0 ? term : ad::add(total, term);
    hidden = next;
  }
  return ad::scale(total, -1.0 / static_cast<double>(tokens));
}

double SeqPolicy::path_log_prob(const core::DialogueState& state, std::span<const int> path) {
  check_states(std::span<const core::DialogueState>(&state, 1));
  ad::Graph g(ad::Graph::Mode::inference);
  auto context = encode(g, g.constant(stack_states(std::span<const core::DialogueState>(&state, 1), state_dim_)));
  auto hidden = context;
  std::size_t prev = static_cast<std::size_t>(actions_.soa());
  double total = 0.0;
  for (int s : path) {
    ad::Var next;
    const auto& lp = ad::log_softmax(step(g, hidden, context, {prev}, next)).value();
    total += lp[static_cast<std::size_t>(s)];
    hidden = next;
    prev = static_cast<std::size_t>(s);
  }
  return total;
}

std::vector<Decoded> SeqPolicy::beam_pass(const ad::Tensor& context, std::size_t width) {
  struct Open {
    std::vector<int> path;
    double score;
    std::vector<double> hidden;
  };
  struct Candidate {
    double score;
    std::size_t hyp;
    int symbol;
  };

  const std::size_t hdim = context.cols();
  const std::size_t symbols = actions_.symbol_count();
  const std::size_t limit = max_path();
  std::vector<Open> open{{{}, 0.0, context.values()}};
  std::vector<Decoded> finished;

  for (std::size_t pos = 0; pos < limit && !open.empty(); ++pos) {
    const std::size_t k = open.size();
    ad::Tensor h({k, hdim}), c({k, hdim});
    std::vector<std::size_t> prev(k);
    for (std::size_t i = 0; i < k; ++i) {
      std::copy(open[i].hidden.begin(), open[i].hidden.end(), h.data().begin() + static_cast<std::ptrdiff_t>(i * hdim));
      std::copy(context.values().begin(), context.values().end(), c.data().begin() + static_cast<std::ptrdiff_t>(i * hdim));
      prev[i] = static_cast<std::size_t>(open[i].path.empty() ? actions_.soa() : open[i].path.back());
    }
    ad::Graph g(ad::Graph::Mode::inference);
    ad::Var next;
    const auto lp = ad::log_softmax(step(g, g.constant(std::move(h)), g.constant(std::move(c)), prev, next)).value();
    const auto& hn = next.value();

    std::vector<Candidate> cands;
    for (std::size_t i = 0; i < k; ++i) {
      const auto& path = open[i].path;
      for (std::size_t s = 0; s < symbols; ++s) {
        const int sym = static_cast<int>(s);
        if (sym == actions_.pad() || sym == actions_.soa()) continue;
        if (actions_.is_atom(sym)) {
          if (pos + 1 == limit) continue;
          if (std::find(path.begin(), path.end(), sym) != path.end()) continue;
          if (config_.monotone && !path.empty() && actions_.rank(sym) <= actions_.rank(path.back())) continue;
        }
        cands.push_back({open[i].score + lp.at(i, s), i, sym});
      }
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) { return a.score > b.score; });
    if (cands.size() > width) cands.resize(width);

    std::vector<Open> grown;
    for (const auto& cand : cands) {
      auto path = open[cand.hyp].path;
      path.push_back(cand.symbol);
      if (cand.symbol == actions_.eoa()) {
        finished.push_back({core::from_action_path(path, actions_), std::move(path), cand.score});
      } else {
        std::vector<double> row(hn.data().begin() + static_cast<std::ptrdiff_t>(cand.hyp * hdim),
                                hn.data().begin() + static_cast<std::ptrdiff_t>((cand.hyp + 1) * hdim));
        grown.push_back({std::move(path), cand.score, std::move(row)});
      }
    }
    open = std::move(grown);
    if (!finished.empty() && !open.empty()) {
      double best_done = -std::numeric_limits<double>::infinity();
      for (const auto& f : finished) best_done = std::max(best_done, f.score);
      // Scores only fall as paths grow, so no open path can overtake.
      if (best_done >= open.front().score) break;
    }
  }
  return finished;
}

Decoded SeqPolicy::decode(const core::DialogueState& state, std::size_t beam) {
  if (beam == 0) throw std::invalid_argument("diaseq: beam width must be positive");
  check_states(std::span<const core::DialogueState>(&state, 1));
  ad::Graph g(ad::Graph::Mode::inference);
  const auto context =
      encode(g, g.constant(stack_states(std::span<const core::DialogueState>(&state, 1), state_dim_))).value();

  Decoded best;
  best.score = -std::numeric_limits<double>::infinity();
  best.path = {actions_.eoa()};
  for (std::size_t w = 1; w <= beam; ++w) {
    for (auto& f : beam_pass(context, w)) {
      if (f.score > best.score) best = std::move(f);
    }
  }
  return best;
}

std::vector<core::ActionSet> SeqPolicy::predict(std::span<const core::DialogueState> states) {
  std::vector<core::ActionSet> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(decode(s).actions);
  return out;
}

nlohmann::json SeqPolicy::config() const {
  return {{"mlp_hidden", config_.mlp_hidden},
          {"state_embedding", config_.state_embedding},
          {"action_embedding", config_.action_embedding},
          {"beam", config_.beam},
          {"max_path", config_.max_path},
          {"monotone", config_.monotone}};
}

}  // namespace dialpol::policies
