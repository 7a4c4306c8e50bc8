#include "dialpol/policies/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include "dialpol/policies/adv_generator.hpp"
#include "dialpol/policies/multiclass.hpp"
#include "dialpol/policies/multidense.hpp"
#include "dialpol/policies/seq.hpp"

namespace dialpol::policies {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "dialpol-checkpoint";
constexpr int kVersion = 1;

MultiDenseConfig dense_config(const json& c) {
  MultiDenseConfig d;
  d.hidden = c.value("hidden", d.hidden);
  d.features = c.value("features", d.features);
  return d;
}

std::unique_ptr<Policy> build(Method method, const json& c, core::ActionSpace actions, std::size_t state_dim,
                              std::uint64_t seed);

}  // namespace

std::unique_ptr<Policy> make_policy(Method method, const json& config, core::ActionSpace actions,
                                    std::size_t state_dim, std::uint64_t seed) {
  const json c = config.is_null() ? json::object() : config;
  if (!c.is_object()) throw std::invalid_argument("model config must be a JSON object");
  try {
    return build(method, c, std::move(actions), state_dim, seed);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("model config: ") + e.what());
  }
}

namespace {

std::unique_ptr<Policy> build(Method method, const json& c, core::ActionSpace actions, std::size_t state_dim,
                              std::uint64_t seed) {
  switch (method) {
    case Method::multiclass: {
      MultiClassConfig m;
      m.hidden1 = c.value("hidden1", m.hidden1);
      m.hidden2 = c.value("hidden2", m.hidden2);
      m.threshold = c.value("threshold", m.threshold);
      return std::make_unique<MultiClassPolicy>(std::move(actions), state_dim, m, seed);
    }
    case Method::multidense:
      return std::make_unique<MultiDensePolicy>(std::move(actions), state_dim, dense_config(c), seed);
    case Method::diaseq: {
      SeqConfig s;
      s.mlp_hidden = c.value("mlp_hidden", s.mlp_hidden);
      s.state_embedding = c.value("state_embedding", s.state_embedding);
      s.action_embedding = c.value("action_embedding", s.action_embedding);
      s.beam = c.value("beam", s.beam);
      s.max_path = c.value("max_path", s.max_path);
      s.monotone = c.value("monotone", s.monotone);
      return std::make_unique<SeqPolicy>(std::move(actions), state_dim, s, seed);
    }
    case Method::diaadv:
      return std::make_unique<AdvGenerator>(std::move(actions), state_dim, dense_config(c), seed,
                                            c.value("temperature", kDefaultGumbelTemperature));
  }
  throw std::invalid_argument("make_policy: unknown method");
}

}  // namespace

json large_scale_config(Method method) {
  switch (method) {
    case Method::multiclass:
      return {{"hidden1", 200}, {"hidden2", 200}};
    case Method::multidense:
    case Method::diaadv:
      return {{"hidden", 200}, {"features", 40}};
    case Method::diaseq:
      return {{"mlp_hidden", 360}, {"state_embedding", 50}, {"action_embedding", 30}, {"beam", 6}};
  }
  return json::object();
}

json checkpoint_to_json(Policy& policy) {
  json params = json::array();
  for (const auto* p : policy.parameters()) {
    params.push_back({{"name", p->name}, {"shape", p->value.shape()}, {"data", p->value.values()}});
  }
  return {{"format", kFormat},
          {"version", kVersion},
          {"method", to_string(policy.method())},
          {"state_dim", policy.state_dim()},
          {"config", policy.config()},
          {"action_space", core::action_space_to_json(policy.actions())},
          {"parameters", params}};
}

std::unique_ptr<Policy> checkpoint_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != kFormat) throw std::invalid_argument("checkpoint: unknown format");
    if (j.at("version").get<int>() != kVersion) {
      throw std::invalid_argument("checkpoint: unsupported version " + j.at("version").dump());
    }
    auto policy = make_policy(parse_method(j.at("method").get<std::string>()), j.at("config"),
                              core::action_space_from_json(j.at("action_space")), j.at("state_dim").get<std::size_t>(), 0);
    auto params = policy->parameters();
    const auto& stored = j.at("parameters");
    if (stored.size() != params.size()) {
      throw std::invalid_argument("checkpoint: expected " + std::to_string(params.size()) + " parameters, found " +
                                  std::to_string(stored.size()));
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
      const auto& s = stored[i];
      if (s.at("name").get<std::string>() != params[i]->name) {
        throw std::invalid_argument("checkpoint: parameter " + std::to_string(i) + " is '" +
                                    s.at("name").get<std::string>() + "', expected '" + params[i]->name + "'");
      }
      ad::Tensor t(s.at("shape").get<ad::Shape>(), s.at("data").get<std::vector<double>>());
      if (t.shape() != params[i]->value.shape()) {
        throw ad::ShapeError("checkpoint", params[i]->name + " stored as " + ad::to_string(t.shape()) + ", model has " +
                                               ad::to_string(params[i]->value.shape()));
      }
      params[i]->value = std::move(t);
    }
    return policy;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("checkpoint: malformed document: ") + e.what());
  }
}

void save_checkpoint(Policy& policy, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  out << checkpoint_to_json(policy).dump() << '\n';
}

std::unique_ptr<Policy> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("checkpoint " + path.string() + ": " + e.what());
  }
  return checkpoint_from_json(j);
}

void copy_parameters(Policy& from, Policy& to) {
  auto src = from.parameters();
  auto dst = to.parameters();
  if (src.size() != dst.size()) throw std::invalid_argument("copy_parameters: architectures differ");
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src[i]->value.shape() != dst[i]->value.shape()) {
      throw ad::ShapeError("copy_parameters", src[i]->name + " " + ad::to_string(src[i]->value.shape()) + " vs " +
                                                  ad::to_string(dst[i]->value.shape()));
    }
    dst[i]->value = src[i]->value;
  }
}

std::uint64_t parameter_hash(Policy& policy) { return parameter_hash(policy.parameters()); }

std::uint64_t parameter_hash(std::span<ad::Parameter* const> params) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto* p : params) {
    for (double v : p->value.values()) {
      unsigned char bytes[sizeof(double)];
      std::memcpy(bytes, &v, sizeof v);
      for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
      }
    }
  }
  return h;
}

}  // namespace dialpol::policies
