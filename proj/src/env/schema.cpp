#include "dialpol/env/schema.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "dialpol/autodiff/rng.hpp"

namespace dialpol::env {

using nlohmann::json;

void Schema::validate() const {
  if (domains.empty()) throw std::invalid_argument("schema: no domains");
  if (entities.size() != domains.size()) throw std::invalid_argument("schema: entity tables do not match domains");
  if (max_people < 1) throw std::invalid_argument("schema: max_people must be positive");
  for (std::size_t d = 0; d < domains.size(); ++d) {
    const auto& dom = domains[d];
    if (dom.informable.empty()) throw std::invalid_argument("schema: domain '" + dom.name + "' has no informable slots");
    for (const auto& s : dom.informable) {
      if (s.values.empty()) throw std::invalid_argument("schema: slot '" + dom.name + "." + s.name + "' has no values");
    }
    if (entities[d].empty()) throw std::invalid_argument("schema: domain '" + dom.name + "' has no entities");
    for (std::size_t e = 0; e < entities[d].size(); ++e) {
      const auto& ent = entities[d][e];
      bool ok = ent.values.size() == dom.informable.size() && ent.info.size() == dom.requestable.size();
      for (std::size_t s = 0; ok && s < ent.values.size(); ++s) {
        ok = ent.values[s] >= 0 && static_cast<std::size_t>(ent.values[s]) < dom.informable[s].values.size();
      }
      if (!ok) {
        throw std::invalid_argument("schema: entity " + std::to_string(e) + " of '" + dom.name +
                                    "' does not valuate every slot");
      }
    }
  }
}

bool Schema::matches(int domain, const Entity& e, std::span<const int> beliefs) const {
  const auto& dom = domains.at(static_cast<std::size_t>(domain));
  if (beliefs.size() != dom.informable.size()) throw std::invalid_argument("schema: belief width mismatch");
  for (std::size_t s = 0; s < beliefs.size(); ++s) {
    if (beliefs[s] >= 0 && e.values[s] != beliefs[s]) return false;
  }
  return true;
}

std::size_t Schema::count_matches(int domain, std::span<const int> beliefs) const {
  std::size_t n = 0;
  for (const auto& e : entities.at(static_cast<std::size_t>(domain))) n += matches(domain, e, beliefs) ? 1 : 0;
  return n;
}

std::optional<int> Schema::first_match(int domain, std::span<const int> beliefs) const {
  const auto& table = entities.at(static_cast<std::size_t>(domain));
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (matches(domain, table[i], beliefs)) return static_cast<int>(i);
  }
  return std::nullopt;
}

bool Schema::satisfies(int domain, int entity, const core::DomainGoal& goal) const {
  const auto& e = entities.at(static_cast<std::size_t>(domain)).at(static_cast<std::size_t>(entity));
  for (const auto& c : goal.constraints) {
    if (e.values.at(static_cast<std::size_t>(c.slot)) != c.value) return false;
  }
  return true;
}

Schema default_schema(std::uint64_t seed, int entities_per_domain) {
  if (entities_per_domain < 1) throw std::invalid_argument("default_schema: need at least one entity per domain");
  const std::vector<std::string> areas{"north", "south", "east", "west", "centre"};
  const std::vector<std::string> prices{"cheap", "moderate", "expensive"};
  const std::vector<std::string> times{"morning", "afternoon", "evening"};
  const std::vector<std::string> towns{"cambridge", "london", "ely", "norwich", "stevenage"};
  const std::vector<std::string> places{"station", "centre", "airport", "hospital"};
  const std::vector<std::string> contact{"phone", "address", "postcode"};

  Schema s;
  s.domains = {
      {"restaurant",
       {{"food", {"thai", "italian", "indian", "chinese", "british", "french"}},
        {"area", areas},
        {"pricerange", prices},
        {"seating", {"indoor", "outdoor"}}},
       contact,
       true},
      {"hotel",
       {{"type", {"hotel", "guesthouse"}},
        {"area", areas},
        {"pricerange", prices},
        {"stars", {"2", "3", "4", "5"}},
        {"parking", {"yes", "no"}}},
       contact,
       true},
      {"attraction",
       {{"type", {"museum", "park", "theatre", "college", "nightclub"}}, {"area", areas}, {"fee", {"free", "paid"}}},
       contact,
       false},
      {"train",
       {{"departure", towns},
        {"destination", towns},
        {"day", {"monday", "tuesday", "wednesday", "thursday", "friday"}},
        {"leave", times}},
       {"trainid", "price", "duration"},
       true},
      {"taxi", {{"departure", places}, {"destination", places}, {"leave", times}}, {"car", "phone"}, true},
      {"hospital",
       {{"department", {"cardiology", "neurology", "oncology", "paediatrics", "urology"}}},
       contact,
       false},
      {"police", {{"area", areas}}, contact, false},
  };

  ad::Rng rng(seed);
  for (const auto& dom : s.domains) {
    std::vector<Entity> table;
    for (int k = 0; k < entities_per_domain; ++k) {
      Entity e;
      for (const auto& slot : dom.informable) e.values.push_back(static_cast<int>(rng.below(slot.values.size())));
      for (const auto& r : dom.requestable) {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%03d", k);
        e.info.push_back(dom.name + "-" + r + "-" + buf);
      }
      table.push_back(std::move(e));
    }
    s.entities.push_back(std::move(table));
  }
  s.validate();
  return s;
}

json schema_to_json(const Schema& schema) {
  json doms = json::array();
  json ents = json::object();
  for (std::size_t d = 0; d < schema.domains.size(); ++d) {
    const auto& dom = schema.domains[d];
    json inf = json::array();
    for (const auto& s : dom.informable) inf.push_back({{"name", s.name}, {"values", s.values}});
    doms.push_back({{"name", dom.name}, {"informable", inf}, {"requestable", dom.requestable}, {"bookable", dom.bookable}});
    json rows = json::array();
    for (const auto& e : schema.entities[d]) {
      json row = json::object();
      for (std::size_t s = 0; s < dom.informable.size(); ++s) {
        row[dom.informable[s].name] = dom.informable[s].values[static_cast<std::size_t>(e.values[s])];
      }
      for (std::size_t r = 0; r < dom.requestable.size(); ++r) row[dom.requestable[r]] = e.info[r];
      rows.push_back(std::move(row));
    }
    ents[dom.name] = std::move(rows);
  }
  return {{"domains", doms}, {"entities", ents}, {"max_people", schema.max_people}};
}

Schema schema_from_json(const json& j) {
  Schema s;
  try {
    for (const auto& jd : j.at("domains")) {
      DomainSchema dom;
      dom.name = jd.at("name").get<std::string>();
      for (const auto& js : jd.at("informable")) {
        dom.informable.push_back({js.at("name").get<std::string>(), js.at("values").get<std::vector<std::string>>()});
      }
      dom.requestable = jd.at("requestable").get<std::vector<std::string>>();
      dom.bookable = jd.value("bookable", false);
      s.domains.push_back(std::move(dom));
    }
    s.max_people = j.value("max_people", 8);
    for (const auto& dom : s.domains) {
      std::vector<Entity> table;
      for (const auto& row : j.at("entities").at(dom.name)) {
        Entity e;
        for (const auto& slot : dom.informable) {
          const auto v = row.at(slot.name).get<std::string>();
          int id = -1;
          for (std::size_t k = 0; k < slot.values.size(); ++k) {
            if (slot.values[k] == v) id = static_cast<int>(k);
          }
          if (id < 0) throw std::invalid_argument("schema: value '" + v + "' not in slot '" + dom.name + "." + slot.name + "'");
          e.values.push_back(id);
        }
        for (const auto& r : dom.requestable) e.info.push_back(row.at(r).get<std::string>());
        table.push_back(std::move(e));
      }
      s.entities.push_back(std::move(table));
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("schema: malformed JSON: ") + e.what());
  }
  s.validate();
  return s;
}

Schema load_schema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open schema file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("schema " + path.string() + ": " + e.what());
  }
  return schema_from_json(j);
}

ActionCatalog::ActionCatalog(core::ActionSpace space, std::vector<AtomInfo> info)
    : space_(std::move(space)), info_(std::move(info)) {
  if (info_.size() != space_.size()) throw std::invalid_argument("action catalog: size mismatch");
}

std::optional<int> ActionCatalog::find(int domain, ActKind kind, int slot) const {
  for (std::size_t i = 0; i < info_.size(); ++i) {
    const auto& a = info_[i];
    if (a.domain == domain && a.kind == kind && a.slot == slot) return static_cast<int>(i);
  }
  return std::nullopt;
}

int ActionCatalog::id(int domain, ActKind kind, int slot) const {
  if (auto i = find(domain, kind, slot)) return *i;
  throw core::UnknownActionError("no atom for domain " + std::to_string(domain) + " slot " + std::to_string(slot));
}

namespace {

struct CatalogBuilder {
  std::vector<std::string> names;
  std::vector<AtomInfo> info;
  void add(const std::string& domain, std::string_view act, const std::string& slot, AtomInfo a) {
    names.push_back(core::ActionSpace::render(domain, act, slot));
    info.push_back(a);
  }
  ActionCatalog build() { return ActionCatalog(core::ActionSpace(std::move(names)), std::move(info)); }
};

}  // namespace

ActionCatalog system_catalog(const Schema& schema) {
  CatalogBuilder b;
  for (std::size_t d = 0; d < schema.domains.size(); ++d) {
    const auto& dom = schema.domains[d];
    const int di = static_cast<int>(d);
    for (std::size_t s = 0; s < dom.informable.size(); ++s) {
      b.add(dom.name, "request", dom.informable[s].name, {di, ActKind::request, static_cast<int>(s)});
    }
    for (std::size_t r = 0; r < dom.requestable.size(); ++r) {
      b.add(dom.name, "inform", dom.requestable[r], {di, ActKind::inform, static_cast<int>(r)});
    }
    if (dom.bookable) b.add(dom.name, "book", "ref", {di, ActKind::book, -1});
  }
  return b.build();
}

ActionCatalog user_catalog(const Schema& schema) {
  CatalogBuilder b;
  for (std::size_t d = 0; d < schema.domains.size(); ++d) {
    const auto& dom = schema.domains[d];
    const int di = static_cast<int>(d);
    for (std::size_t s = 0; s < dom.informable.size(); ++s) {
      b.add(dom.name, "inform", dom.informable[s].name, {di, ActKind::inform, static_cast<int>(s)});
    }
    for (std::size_t r = 0; r < dom.requestable.size(); ++r) {
      b.add(dom.name, "request", dom.requestable[r], {di, ActKind::request, static_cast<int>(r)});
    }
    if (dom.bookable) b.add(dom.name, "book", "people", {di, ActKind::book, -1});
  }
  return b.build();
}

core::StateLayout state_layout(const Schema& schema, std::size_t user_atoms, std::size_t system_atoms) {
  std::size_t belief = 0;
  for (const auto& dom : schema.domains) {
    for (const auto& s : dom.informable) belief += s.values.size() + 1;
    if (dom.bookable) belief += 1;
  }
  std::vector<core::Segment> segs;
  std::size_t off = 0;
  auto push = [&](std::string name, std::size_t width) {
    segs.push_back({std::move(name), off, width});
    off += width;
  };
  push("query_results", schema.domains.size() + 5);
  push("last_user_action", user_atoms);
  push("last_system_action", system_atoms);
  push("belief", belief);
  return core::StateLayout(std::move(segs));
}

Environment Environment::make(Schema schema, int max_turns) {
  schema.validate();
  if (max_turns < 1) throw std::invalid_argument("environment: max_turns must be positive");
  Environment env;
  env.system = system_catalog(schema);
  env.user = user_catalog(schema);
  env.layout = state_layout(schema, env.user.size(), env.system.size());
  env.schema = std::move(schema);
  env.max_turns = max_turns;
  return env;
}

}  // namespace dialpol::env
