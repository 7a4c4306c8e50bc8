#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dialpol/core/action_space.hpp"
#include "dialpol/core/state.hpp"

namespace dialpol::core {

enum class Split { train, val, test };

std::string to_string(Split s);
Split parse_split(const std::string& s);

struct StateActionPair {
  DialogueState state;
  ActionSet actions;
  Split split = Split::train;
  // Source dialogue; -1 when unknown. Subsampling keeps whole dialogues.
  int dialogue = -1;

  bool operator==(const StateActionPair&) const = default;
};

struct Corpus {
  std::vector<StateActionPair> pairs;

  bool empty() const { return pairs.empty(); }
  std::size_t size() const { return pairs.size(); }
  std::size_t count(Split s) const;
  std::vector<StateActionPair> split(Split s) const;
  bool operator==(const Corpus&) const = default;
};

// Schema violation while reading a corpus; line() is 1-based.
class CorpusFormatError : public std::runtime_error {
 public:
  CorpusFormatError(std::size_t line, const std::string& detail);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Per-atom counts over the training split.
std::vector<std::size_t> action_counts(const Corpus& corpus, std::size_t m, Split split = Split::train);

// Frequency order of the atoms over the training split (descending count,
// ties by name). Throws std::invalid_argument on an empty corpus.
std::vector<int> sort_actions_by_frequency(const Corpus& corpus, const ActionSpace& space);

// JSON Lines, one object per pair:
//   {"split":"train","state":[0,1,...],"actions":["domain-act-slot",...],"dialogue":7}
// "dialogue" is optional. The state width must be identical on every line and,
// when `state_dim` is given, equal to it.
void write_corpus(const Corpus& corpus, const ActionSpace& space, std::ostream& out);
Corpus read_corpus(std::istream& in, const ActionSpace& space,
                   std::optional<std::size_t> state_dim = std::nullopt);
void save_corpus(const Corpus& corpus, const ActionSpace& space, const std::filesystem::path& path);
Corpus load_corpus(const std::filesystem::path& path, const ActionSpace& space,
                   std::optional<std::size_t> state_dim = std::nullopt);

// {"atoms":[...], "frequency_order":[names...], "specials":["PAD","SOA","EOA"]}
nlohmann::json action_space_to_json(const ActionSpace& space);
ActionSpace action_space_from_json(const nlohmann::json& j);

}  // namespace dialpol::core
