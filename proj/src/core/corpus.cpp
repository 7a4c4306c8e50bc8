#include "dialpol/core/corpus.hpp"

#include <fstream>
#include <istream>
#include <ostream>

namespace dialpol::core {

std::string to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "train";
}

Split parse_split(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "val") return Split::val;
  if (s == "test") return Split::test;
  throw std::invalid_argument("unknown split '" + s + "'");
}

std::size_t Corpus::count(Split s) const {
  std::size_t n = 0;
  for (const auto& p : pairs) n += p.split == s;
  return n;
}

std::vector<StateActionPair> Corpus::split(Split s) const {
  std::vector<StateActionPair> out;
  for (const auto& p : pairs) {
    if (p.split == s) out.push_back(p);
  }
  return out;
}

CorpusFormatError::CorpusFormatError(std::size_t line, const std::string& detail)
    : std::runtime_error("corpus line " + std::to_string(line) + ": " + detail), line_(line) {}

std::vector<std::size_t> action_counts(const Corpus& corpus, std::size_t m, Split split) {
  std::vector<std::size_t> counts(m, 0);
  for (const auto& p : corpus.pairs) {
    if (p.split != split) continue;
    for (int a : p.actions) counts.at(static_cast<std::size_t>(a)) += 1;
  }
  return counts;
}

std::vector<int> sort_actions_by_frequency(const Corpus& corpus, const ActionSpace& space) {
  if (corpus.empty()) throw std::invalid_argument("sort_actions_by_frequency: empty corpus");
  const auto counts = action_counts(corpus, space.size());
  return order_by_counts(space, counts);
}

void write_corpus(const Corpus& corpus, const ActionSpace& space, std::ostream& out) {
  for (const auto& p : corpus.pairs) {
    nlohmann::ordered_json j;
    j["split"] = to_string(p.split);
    j["state"] = p.state.bits;
    auto names = nlohmann::ordered_json::array();
    for (int a : p.actions) names.push_back(space.name(a));
    j["actions"] = std::move(names);
    if (p.dialogue >= 0) j["dialogue"] = p.dialogue;
    out << j.dump() << '\n';
  }
}

Corpus read_corpus(std::istream& in, const ActionSpace& space, std::optional<std::size_t> state_dim) {
  Corpus corpus;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw CorpusFormatError(line, std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw CorpusFormatError(line, "expected an object");
    for (const char* key : {"split", "state", "actions"}) {
      if (!j.contains(key)) throw CorpusFormatError(line, std::string("missing field '") + key + "'");
    }
    StateActionPair p;
    try {
      p.split = parse_split(j.at("split").get<std::string>());
    } catch (const std::exception& e) {
      throw CorpusFormatError(line, e.what());
    }
    const auto& state = j.at("state");
    if (!state.is_array()) throw CorpusFormatError(line, "'state' must be an array");
    p.state.bits.reserve(state.size());
    for (const auto& b : state) {
      if (!b.is_number_integer() || (b.get<int>() != 0 && b.get<int>() != 1)) {
        throw CorpusFormatError(line, "state entries must be 0 or 1");
      }
      p.state.bits.push_back(static_cast<std::uint8_t>(b.get<int>()));
    }
    const std::size_t expected = state_dim ? *state_dim
                                 : corpus.empty() ? p.state.size()
                                                  : corpus.pairs.front().state.size();
    if (p.state.size() != expected) {
      throw CorpusFormatError(line, "state dimension " + std::to_string(p.state.size()) +
                                        " does not match " + std::to_string(expected));
    }
    const auto& actions = j.at("actions");
    if (!actions.is_array()) throw CorpusFormatError(line, "'actions' must be an array");
    for (const auto& a : actions) {
      if (!a.is_string()) throw CorpusFormatError(line, "action names must be strings");
      auto id = space.find(a.get<std::string>());
      if (!id) throw CorpusFormatError(line, "unknown action '" + a.get<std::string>() + "'");
      p.actions.insert(*id);
    }
    if (j.contains("dialogue")) {
      if (!j["dialogue"].is_number_integer()) throw CorpusFormatError(line, "'dialogue' must be an integer");
      p.dialogue = j["dialogue"].get<int>();
    }
    corpus.pairs.push_back(std::move(p));
  }
  return corpus;
}

void save_corpus(const Corpus& corpus, const ActionSpace& space, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write corpus to " + path.string());
  write_corpus(corpus, space, out);
  if (!out) throw std::runtime_error("failed writing corpus to " + path.string());
}

Corpus load_corpus(const std::filesystem::path& path, const ActionSpace& space,
                   std::optional<std::size_t> state_dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open corpus " + path.string());
  return read_corpus(in, space, state_dim);
}

nlohmann::json action_space_to_json(const ActionSpace& space) {
  nlohmann::json order = nlohmann::json::array();
  for (int a : space.frequency_order()) order.push_back(space.name(a));
  return {{"atoms", space.atoms()},
          {"frequency_order", std::move(order)},
          {"specials", {ActionSpace::kPad, ActionSpace::kSoa, ActionSpace::kEoa}}};
}

ActionSpace action_space_from_json(const nlohmann::json& j) {
  ActionSpace space(j.at("atoms").get<std::vector<std::string>>());
  if (j.contains("frequency_order")) {
    std::vector<int> order;
    for (const auto& name : j.at("frequency_order")) order.push_back(space.index_of(name.get<std::string>()));
    space.set_frequency_order(std::move(order));
  }
  return space;
}

}  // namespace dialpol::core
