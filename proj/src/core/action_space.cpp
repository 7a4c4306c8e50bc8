#include "dialpol/core/action_space.hpp"

#include <algorithm>
#include <numeric>

namespace dialpol::core {

ActionSet::ActionSet(std::initializer_list<int> ids) : ActionSet(from_ids(std::vector<int>(ids))) {}

ActionSet ActionSet::from_ids(std::vector<int> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  ActionSet s;
  s.ids_ = std::move(ids);
  return s;
}

void ActionSet::insert(int id) {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) ids_.insert(it, id);
}

bool ActionSet::contains(int id) const { return std::binary_search(ids_.begin(), ids_.end(), id); }

ActionSpace::ActionSpace(std::vector<std::string> atoms) : atoms_(std::move(atoms)) {
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const auto& a = atoms_[i];
    if (a == kPad || a == kSoa || a == kEoa) {
      throw std::invalid_argument("action space: reserved name '" + a + "' used as an atom");
    }
    if (!index_.emplace(a, static_cast<int>(i)).second) {
      throw std::invalid_argument("action space: duplicate atom '" + a + "'");
    }
  }
  symbol_names_ = atoms_;
  symbol_names_.emplace_back(kPad);
  symbol_names_.emplace_back(kSoa);
  symbol_names_.emplace_back(kEoa);
  order_.resize(atoms_.size());
  std::iota(order_.begin(), order_.end(), 0);
  rank_ = order_;
}

std::string ActionSpace::render(std::string_view domain, std::string_view act, std::string_view slot) {
  std::string out;
  out.reserve(domain.size() + act.size() + slot.size() + 2);
  out.append(domain).append("-").append(act).append("-").append(slot);
  return out;
}

const std::string& ActionSpace::name(int symbol) const {
  if (symbol < 0 || static_cast<std::size_t>(symbol) >= symbol_names_.size()) {
    throw UnknownActionError("symbol id " + std::to_string(symbol));
  }
  return symbol_names_[static_cast<std::size_t>(symbol)];
}

std::optional<int> ActionSpace::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int ActionSpace::index_of(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw UnknownActionError(std::string(name));
}

void ActionSpace::set_frequency_order(std::vector<int> order) {
  if (order.size() != atoms_.size()) throw std::invalid_argument("frequency order: wrong length");
  std::vector<int> rank(atoms_.size(), -1);
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const int a = order[pos];
    if (!is_atom(a) || rank[static_cast<std::size_t>(a)] != -1) {
      throw std::invalid_argument("frequency order: not a permutation of the atoms");
    }
    rank[static_cast<std::size_t>(a)] = static_cast<int>(pos);
  }
  order_ = std::move(order);
  rank_ = std::move(rank);
}

std::vector<int> order_by_counts(const ActionSpace& space, std::span<const std::size_t> counts) {
  if (counts.size() != space.size()) throw std::invalid_argument("order_by_counts: wrong length");
  std::vector<int> order(space.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const auto ca = counts[static_cast<std::size_t>(a)];
    const auto cb = counts[static_cast<std::size_t>(b)];
    if (ca != cb) return ca > cb;
    return space.name(a) < space.name(b);
  });
  return order;
}

std::vector<int> to_action_path(const ActionSet& set, const ActionSpace& space) {
  std::vector<int> path;
  path.reserve(set.size() + 1);
  for (int a : set) {
    if (!space.is_atom(a)) throw UnknownActionError("atom id " + std::to_string(a));
    path.push_back(a);
  }
  std::sort(path.begin(), path.end(), [&](int a, int b) { return space.rank(a) < space.rank(b); });
  path.push_back(space.eoa());
  return path;
}

ActionSet from_action_path(std::span<const int> path, const ActionSpace& space) {
  ActionSet out;
  for (int s : path) {
    if (s == space.eoa()) break;
    if (!space.is_atom(s)) throw UnknownActionError("symbol '" + space.name(s) + "' inside a path");
    out.insert(s);
  }
  return out;
}

std::vector<double> to_vector(const ActionSet& set, std::size_t m) {
  std::vector<double> v(m, 0.0);
  for (int a : set) {
    if (a < 0 || static_cast<std::size_t>(a) >= m) throw UnknownActionError("atom id " + std::to_string(a));
    v[static_cast<std::size_t>(a)] = 1.0;
  }
  return v;
}

ActionSet from_vector(std::span<const double> v) {
  std::vector<int> ids;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 1.0) {
      ids.push_back(static_cast<int>(i));
    } else if (v[i] != 0.0) {
      throw std::invalid_argument("action vector entry " + std::to_string(i) + " is not 0 or 1");
    }
  }
  return ActionSet::from_ids(std::move(ids));
}

std::vector<double> to_two_hot(const ActionSet& set, std::size_t m) {
  std::vector<double> v(2 * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) v[2 * i] = 1.0;
  for (int a : set) {
    if (a < 0 || static_cast<std::size_t>(a) >= m) throw UnknownActionError("atom id " + std::to_string(a));
    v[2 * static_cast<std::size_t>(a)] = 0.0;
    v[2 * static_cast<std::size_t>(a) + 1] = 1.0;
  }
  return v;
}

ActionSet from_two_hot(std::span<const double> v) {
  if (v.size() % 2 != 0) throw std::invalid_argument("two-hot vector has odd length");
  std::vector<int> ids;
  for (std::size_t i = 0; i < v.size() / 2; ++i) {
    const double off = v[2 * i], on = v[2 * i + 1];
    if (off == 0.0 && on == 1.0) {
      ids.push_back(static_cast<int>(i));
    } else if (!(off == 1.0 && on == 0.0)) {
      throw std::invalid_argument("two-hot pair " + std::to_string(i) + " is soft; harden it first");
    }
  }
  return ActionSet::from_ids(std::move(ids));
}

}  // namespace dialpol::core
