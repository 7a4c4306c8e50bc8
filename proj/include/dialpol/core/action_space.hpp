#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dialpol::core {

class UnknownActionError : public std::invalid_argument {
 public:
  explicit UnknownActionError(const std::string& what)
      : std::invalid_argument("unknown action: " + what) {}
};

// A set of atomic action ids, kept sorted and duplicate free.
class ActionSet {
 public:
  ActionSet() = default;
  ActionSet(std::initializer_list<int> ids);
  static ActionSet from_ids(std::vector<int> ids);

  void insert(int id);
  bool contains(int id) const;
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  const std::vector<int>& ids() const { return ids_; }
  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }

  bool operator==(const ActionSet&) const = default;

 private:
  std::vector<int> ids_;
};

// Ordered inventory of atomic actions "domain-acttype-slot" plus the three
// decoder symbols PAD, SOA and EOA, which take ids m, m+1 and m+2.
class ActionSpace {
 public:
  static constexpr std::string_view kPad = "PAD";
  static constexpr std::string_view kSoa = "SOA";
  static constexpr std::string_view kEoa = "EOA";

  ActionSpace() = default;
  explicit ActionSpace(std::vector<std::string> atoms);

  static std::string render(std::string_view domain, std::string_view act, std::string_view slot);

  std::size_t size() const { return atoms_.size(); }
  std::size_t symbol_count() const { return atoms_.size() + 3; }
  int pad() const { return static_cast<int>(atoms_.size()); }
  int soa() const { return pad() + 1; }
  int eoa() const { return pad() + 2; }
  bool is_atom(int symbol) const { return symbol >= 0 && symbol < pad(); }

  const std::vector<std::string>& atoms() const { return atoms_; }
  const std::string& name(int symbol) const;
  std::optional<int> find(std::string_view name) const;
  int index_of(std::string_view name) const;

  // Decoding order of atoms; identity until a frequency order is installed.
  const std::vector<int>& frequency_order() const { return order_; }
  int rank(int atom) const { return rank_.at(static_cast<std::size_t>(atom)); }
  void set_frequency_order(std::vector<int> order);

  bool operator==(const ActionSpace& other) const {
    return atoms_ == other.atoms_ && order_ == other.order_;
  }

 private:
  std::vector<std::string> atoms_;
  std::vector<std::string> symbol_names_;
  std::unordered_map<std::string, int> index_;
  std::vector<int> order_;
  std::vector<int> rank_;
};

// Atoms sorted by descending count, ties broken by rendered name.
std::vector<int> order_by_counts(const ActionSpace& space, std::span<const std::size_t> counts);

// Atoms of `set` in frequency order followed by EOA.
std::vector<int> to_action_path(const ActionSet& set, const ActionSpace& space);
// Inverse of to_action_path; stops at the first EOA.
ActionSet from_action_path(std::span<const int> path, const ActionSpace& space);

std::vector<double> to_vector(const ActionSet& set, std::size_t m);
ActionSet from_vector(std::span<const double> v);

// Two-hot encoding: for atom i the pair (2i, 2i+1) is (1, 0) when the atom is
// not selected and (0, 1) when it is.
std::vector<double> to_two_hot(const ActionSet& set, std::size_t m);
// Throws std::invalid_argument unless every pair is exactly (1,0) or (0,1).
ActionSet from_two_hot(std::span<const double> v);

}  // namespace dialpol::core
