#include "dialpol/experiments/config.hpp"

#include <fstream>
#include <set>

namespace dialpol::experiments {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

template <class T>
void read(const json& j, const char* key, std::optional<T>& out) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    out.reset();
  } else {
    out = j.at(key).get<T>();
  }
}

const std::set<std::string> kSupervisedKeys{"max_steps",  "batch_size", "optimizer", "learning_rate",
                                            "eval_every", "patience",   "stop_on"};

void read_supervised(const json& j, SupervisedSettings& s, const std::string& where) {
  reject_unknown(j, kSupervisedKeys, where);
  read(j, "max_steps", s.max_steps);
  read(j, "batch_size", s.batch_size);
  read(j, "optimizer", s.optimizer);
  read(j, "learning_rate", s.learning_rate);
  read(j, "eval_every", s.eval_every);
  read(j, "patience", s.patience);
  read(j, "stop_on", s.stop_on);
}

json supervised_json(const SupervisedSettings& s) {
  return {{"max_steps", s.max_steps},   {"batch_size", s.batch_size}, {"optimizer", s.optimizer},
          {"learning_rate", s.learning_rate}, {"eval_every", s.eval_every}, {"patience", s.patience},
          {"stop_on", s.stop_on}};
}

}  // namespace

policies::TrainConfig SupervisedSettings::to_train_config(std::uint64_t seed) const {
  policies::TrainConfig t;
  t.max_steps = max_steps;
  t.batch_size = batch_size;
  if (optimizer == "adam") {
    t.optimizer.kind = ad::OptimizerKind::adam;
  } else if (optimizer == "sgd") {
    t.optimizer.kind = ad::OptimizerKind::sgd;
  } else {
    throw ConfigError("train.optimizer must be 'adam' or 'sgd', got '" + optimizer + "'");
  }
  t.optimizer.learning_rate = learning_rate;
  t.eval_every = eval_every;
  t.patience = patience;
  if (stop_on == "accuracy") {
    t.stop_on = policies::StopOn::accuracy;
  } else if (stop_on == "loss") {
    t.stop_on = policies::StopOn::loss;
  } else {
    throw ConfigError("train.stop_on must be 'accuracy' or 'loss', got '" + stop_on + "'");
  }
  t.seed = seed;
  return t;
}

adversarial::AdvTrainConfig AdversarialSettings::to_train_config(std::uint64_t seed) const {
  adversarial::AdvTrainConfig a;
  a.iterations = iterations;
  a.critic_steps = critic_steps;
  a.penalty_weight = penalty_weight;
  a.batch_size = batch_size;
  a.critic_lr = critic_lr;
  a.generator_lr = generator_lr;
  a.validate_every = validate_every;
  a.validation_episodes = validation_episodes;
  a.seed = seed;
  return a;
}

SupervisedSettings ExperimentConfig::train_for(const std::string& m) const {
  SupervisedSettings s = train;
  auto it = train_by_method.find(m);
  if (it != train_by_method.end()) read_supervised(it->second, s, "train_by_method." + m);
  return s;
}

json ExperimentConfig::model_for(const std::string& m) const {
  auto it = model.find(m);
  return it == model.end() ? json::object() : it->second;
}

void ExperimentConfig::validate() const {
  if (max_turns < 1) throw ConfigError("max_turns must be positive");
  if (entities_per_domain < 1) throw ConfigError("entities_per_domain must be positive");
  if (!corpus && corpus_dialogues == 0) throw ConfigError("corpus_dialogues must be positive");
  policies::parse_method(method);
  for (const auto& m : methods) policies::parse_method(m);
  for (const auto& [m, j] : model) {
    policies::parse_method(m);
    if (!j.is_object()) throw ConfigError("model." + m + " must be an object");
  }
  for (const auto& [m, j] : train_by_method) {
    policies::parse_method(m);
    train_for(m).to_train_config(0);
  }
  train.to_train_config(0);
  if (seeds.empty()) throw ConfigError("seeds must not be empty");
  auto check_fraction = [](double f) {
    if (!(f > 0.0 && f <= 1.0)) throw ConfigError("fractions must lie in (0, 1], got " + std::to_string(f));
  };
  check_fraction(fraction);
  for (double f : fractions) check_fraction(f);
  if (episodes == 0) throw ConfigError("episodes must be positive");
  if (pretrain_epochs.empty()) throw ConfigError("pretrain_epochs must not be empty");
  if (adversarial.temperature <= 0.0) throw ConfigError("adversarial.temperature must be positive");
  if (adversarial.critic_steps == 0) throw ConfigError("adversarial.critic_steps must be positive");
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  try {
    reject_unknown(j,
                   {"schema", "schema_seed", "entities_per_domain", "max_turns", "corpus", "corpus_dialogues",
                    "method", "methods", "model", "train", "train_by_method", "adversarial", "pretrained",
                    "allow_unpretrained", "seed", "seeds", "fraction", "fractions", "episodes", "pretrain_epochs",
                    "out"},
                   "config");
    read(j, "schema", c.schema);
    read(j, "schema_seed", c.schema_seed);
    read(j, "entities_per_domain", c.entities_per_domain);
    read(j, "max_turns", c.max_turns);
    read(j, "corpus", c.corpus);
    read(j, "corpus_dialogues", c.corpus_dialogues);
    read(j, "method", c.method);
    read(j, "methods", c.methods);
    if (j.contains("model")) {
      reject_unknown(j.at("model"), {"multiclass", "multidense", "diaseq", "diaadv"}, "model");
      for (const auto& [k, v] : j.at("model").items()) c.model[k] = v;
    }
    if (j.contains("train")) read_supervised(j.at("train"), c.train, "train");
    if (j.contains("train_by_method")) {
      reject_unknown(j.at("train_by_method"), {"multiclass", "multidense", "diaseq", "diaadv"}, "train_by_method");
      for (const auto& [k, v] : j.at("train_by_method").items()) {
        reject_unknown(v, kSupervisedKeys, "train_by_method." + k);
        c.train_by_method[k] = v;
      }
    }
    if (j.contains("adversarial")) {
      const auto& a = j.at("adversarial");
      reject_unknown(a,
                     {"iterations", "critic_steps", "penalty_weight", "batch_size", "critic_lr", "generator_lr",
                      "validate_every", "validation_episodes", "temperature", "critic_hidden1", "critic_hidden2"},
                     "adversarial");
      auto& s = c.adversarial;
      read(a, "iterations", s.iterations);
      read(a, "critic_steps", s.critic_steps);
      read(a, "penalty_weight", s.penalty_weight);
      read(a, "batch_size", s.batch_size);
      read(a, "critic_lr", s.critic_lr);
      read(a, "generator_lr", s.generator_lr);
      read(a, "validate_every", s.validate_every);
      read(a, "validation_episodes", s.validation_episodes);
      read(a, "temperature", s.temperature);
      read(a, "critic_hidden1", s.critic_hidden1);
      read(a, "critic_hidden2", s.critic_hidden2);
    }
    read(j, "pretrained", c.pretrained);
    read(j, "allow_unpretrained", c.allow_unpretrained);
    read(j, "seed", c.seed);
    read(j, "seeds", c.seeds);
    read(j, "fraction", c.fraction);
    read(j, "fractions", c.fractions);
    read(j, "episodes", c.episodes);
    read(j, "pretrain_epochs", c.pretrain_epochs);
    read(j, "out", c.out);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json model = json::object();
  for (const auto& [k, v] : c.model) model[k] = v;
  json by_method = json::object();
  for (const auto& [k, v] : c.train_by_method) by_method[k] = v;
  const auto& a = c.adversarial;
  auto opt = [](const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); };
  return {{"schema", opt(c.schema)},
          {"schema_seed", c.schema_seed},
          {"entities_per_domain", c.entities_per_domain},
          {"max_turns", c.max_turns},
          {"corpus", opt(c.corpus)},
          {"corpus_dialogues", c.corpus_dialogues},
          {"method", c.method},
          {"methods", c.methods},
          {"model", model},
          {"train", supervised_json(c.train)},
          {"train_by_method", by_method},
          {"adversarial",
           {{"iterations", a.iterations},
            {"critic_steps", a.critic_steps},
            {"penalty_weight", a.penalty_weight},
            {"batch_size", a.batch_size},
            {"critic_lr", a.critic_lr},
            {"generator_lr", a.generator_lr},
            {"validate_every", a.validate_every},
            {"validation_episodes", a.validation_episodes},
            {"temperature", a.temperature},
            {"critic_hidden1", a.critic_hidden1},
            {"critic_hidden2", a.critic_hidden2}}},
          {"pretrained", opt(c.pretrained)},
          {"allow_unpretrained", c.allow_unpretrained},
          {"seed", c.seed},
          {"seeds", c.seeds},
          {"fraction", c.fraction},
          {"fractions", c.fractions},
          {"episodes", c.episodes},
          {"pretrain_epochs", c.pretrain_epochs},
          {"out", c.out}};
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

env::Environment make_environment(const ExperimentConfig& c) {
  auto schema = c.schema ? env::load_schema(*c.schema) : env::default_schema(c.schema_seed, c.entities_per_domain);
  return env::Environment::make(std::move(schema), c.max_turns);
}

}  // namespace dialpol::experiments
