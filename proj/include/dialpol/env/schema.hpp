#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dialpol/core/action_space.hpp"
#include "dialpol/core/goal.hpp"
#include "dialpol/core/state.hpp"

namespace dialpol::env {

// Belief markers for an informable slot; non-negative values are value ids.
inline constexpr int kUnknown = -1;
inline constexpr int kDontCare = -2;

struct InformableSlot {
  std::string name;
  std::vector<std::string> values;
};

struct DomainSchema {
  std::string name;
  std::vector<InformableSlot> informable;
  std::vector<std::string> requestable;
  bool bookable = false;
};

struct Entity {
  std::vector<int> values;        // value id per informable slot
  std::vector<std::string> info;  // value per requestable slot
};

// Domains plus their entity tables.
struct Schema {
  std::vector<DomainSchema> domains;
  std::vector<std::vector<Entity>> entities;  // per domain
  int max_people = 8;

  // Throws std::invalid_argument when an entity does not valuate every slot
  // or a domain has no entities.
  void validate() const;

  bool matches(int domain, const Entity& e, std::span<const int> beliefs) const;
  std::size_t count_matches(int domain, std::span<const int> beliefs) const;
  // First entity consistent with the beliefs (kUnknown and kDontCare do not
  // filter), or nullopt.
  std::optional<int> first_match(int domain, std::span<const int> beliefs) const;
  bool satisfies(int domain, int entity, const core::DomainGoal& goal) const;
};

// The built-in benchmark: seven travel domains (restaurant, hotel,
// attraction, train, taxi, hospital, police), four of them bookable, with 45
// system atoms and a 210-bit state. Entities are drawn from `seed`.
Schema default_schema(std::uint64_t seed = 7, int entities_per_domain = 50);

nlohmann::json schema_to_json(const Schema& schema);
Schema schema_from_json(const nlohmann::json& j);
Schema load_schema(const std::filesystem::path& path);

enum class ActKind { request, inform, book };

struct AtomInfo {
  int domain = 0;
  ActKind kind = ActKind::inform;
  int slot = -1;  // informable or requestable slot id; -1 for book
};

// An action space whose atoms carry their (domain, act, slot) meaning.
class ActionCatalog {
 public:
  ActionCatalog() = default;
  ActionCatalog(core::ActionSpace space, std::vector<AtomInfo> info);

  const core::ActionSpace& space() const { return space_; }
  core::ActionSpace& space() { return space_; }
  const AtomInfo& info(int atom) const { return info_.at(static_cast<std::size_t>(atom)); }
  std::optional<int> find(int domain, ActKind kind, int slot) const;
  int id(int domain, ActKind kind, int slot) const;
  std::size_t size() const { return info_.size(); }

 private:
  core::ActionSpace space_;
  std::vector<AtomInfo> info_;
};

// System atoms: domain-request-<informable>, domain-inform-<requestable>,
// domain-book-ref for bookable domains.
ActionCatalog system_catalog(const Schema& schema);
// User atoms: domain-inform-<informable>, domain-request-<requestable>,
// domain-book-people for bookable domains.
ActionCatalog user_catalog(const Schema& schema);

// Segment widths of the encoded dialogue state.
core::StateLayout state_layout(const Schema& schema, std::size_t user_atoms, std::size_t system_atoms);

// Everything an episode needs, derived once from a schema.
struct Environment {
  Schema schema;
  ActionCatalog system;
  ActionCatalog user;
  core::StateLayout layout;
  int max_turns = 40;

  static Environment make(Schema schema, int max_turns = 40);
  std::size_t state_dim() const { return layout.dim(); }
};

}  // namespace dialpol::env
