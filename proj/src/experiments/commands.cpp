#include "dialpol/experiments/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "dialpol/env/corpus_gen.hpp"
#include "dialpol/policies/adv_generator.hpp"
#include "dialpol/policies/agent.hpp"
#include "dialpol/policies/checkpoint.hpp"
#include "dialpol/policies/multidense.hpp"

namespace dialpol::experiments {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void say(const Logger& log, const std::string& level, const std::string& msg) {
  if (log) log(level, msg);
}

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

fs::path prepare_out(const ExperimentConfig& config) {
  const fs::path dir(config.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw std::runtime_error("cannot create output directory " + dir.string());
  std::ofstream cfg(dir / "config.json");
  if (!cfg) throw std::runtime_error("cannot write to output directory " + dir.string());
  cfg << config_to_json(config).dump(2) << '\n';
  return dir;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

core::ActionSpace ordered_space(const env::Environment& env, const std::vector<core::StateActionPair>& train) {
  core::ActionSpace space = env.system.space();
  space.set_frequency_order(core::sort_actions_by_frequency(core::Corpus{train}, space));
  return space;
}

policies::MultiDensePolicy as_multidense(const policies::Policy& p) {
  auto copy = p.clone();
  if (auto* md = dynamic_cast<policies::MultiDensePolicy*>(copy.get())) return *md;
  if (auto* adv = dynamic_cast<policies::AdvGenerator*>(copy.get())) return adv->base();
  throw ConfigError("diaadv needs a multidense or diaadv model to start from, got " + to_string(p.method()));
}

}  // namespace

core::Corpus obtain_corpus(const ExperimentConfig& config, const env::Environment& env) {
  if (config.corpus) return core::load_corpus(*config.corpus, env.system.space(), env.state_dim());
  ad::Rng rng(ad::derive_seed(config.seed, "corpus"));
  return env::generate_corpus(env, config.corpus_dialogues, rng);
}

std::vector<core::StateActionPair> subsample_dialogues(const std::vector<core::StateActionPair>& pairs,
                                                       double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw std::invalid_argument("fraction must lie in (0, 1]");
  if (fraction == 1.0) {
    if (pairs.empty()) throw std::invalid_argument("subsample: empty training set");
    return pairs;
  }
  std::set<int> ids;
  for (const auto& p : pairs) {
    if (p.dialogue < 0) throw std::invalid_argument("subsample: pairs without dialogue ids cannot be subsampled");
    ids.insert(p.dialogue);
  }
  std::vector<int> order(ids.begin(), ids.end());
  ad::Rng rng(ad::derive_seed(seed, "subsample"));
  rng.shuffle(order);
  const auto keep = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(order.size()) - 1e-9));
  if (keep == 0) throw std::invalid_argument("subsample: fraction keeps no dialogue");
  const std::set<int> kept(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep));
  std::vector<core::StateActionPair> out;
  for (const auto& p : pairs) {
    if (kept.count(p.dialogue)) out.push_back(p);
  }
  return out;
}

Trained train_method(const ExperimentConfig& config, const std::string& method, const env::Environment& env,
                     const std::vector<core::StateActionPair>& train, const std::vector<core::StateActionPair>& val,
                     std::uint64_t seed, const policies::Policy* pretrained, const Logger& log) {
  if (train.empty()) throw std::invalid_argument("train: empty training set");
  const auto m = policies::parse_method(method);
  Trained out;
  if (m != policies::Method::diaadv) {
    out.policy = policies::make_policy(m, config.model_for(method), ordered_space(env, train), env.state_dim(),
                                       ad::derive_seed(seed, "init"));
    const auto settings = config.train_for(method);
    say(log, "info",
        method + ": " + std::to_string(out.policy->param_count()) + " parameters, " + std::to_string(train.size()) +
            " training pairs");
    out.supervised = policies::train_supervised(*out.policy, train, val,
                                                settings.to_train_config(ad::derive_seed(seed, "train")));
    for (const auto& pt : out.supervised->history) {
      say(log, "debug",
          method + " step " + std::to_string(pt.step) + " loss " + exact(pt.train_loss) + " val " +
              exact(pt.val_loss) + " acc " + exact(pt.val_accuracy));
    }
    return out;
  }

  std::optional<policies::MultiDensePolicy> base;
  if (pretrained) {
    check_compatible(*pretrained, env);
    base = as_multidense(*pretrained);
  } else if (config.allow_unpretrained) {
    base = as_multidense(*policies::make_policy(policies::Method::multidense, config.model_for("diaadv"),
                                                ordered_space(env, train), env.state_dim(),
                                                ad::derive_seed(seed, "init")));
  } else {
    throw ConfigError("diaadv needs a pretrained multidense checkpoint (set 'pretrained' or 'allow_unpretrained')");
  }
  auto gen = std::make_unique<policies::AdvGenerator>(std::move(*base), config.adversarial.temperature);
  adversarial::RewardModel critic(env.state_dim(), env.system.size(),
                                  {config.adversarial.critic_hidden1, config.adversarial.critic_hidden2},
                                  ad::derive_seed(seed, "critic"));
  out.adversarial = adversarial::adversarial_train(
      *gen, critic, train, config.adversarial.to_train_config(ad::derive_seed(seed, "adversarial")), &env);
  if (out.adversarial->best_success) {
    say(log, "info",
        "diaadv: best validation success " + exact(*out.adversarial->best_success) + " at iteration " +
            std::to_string(out.adversarial->best_iteration));
  }
  out.policy = std::move(gen);
  return out;
}

void write_curve_csv(std::ostream& out, const Trained& trained) {
  if (trained.adversarial) {
    adversarial::write_trace_csv(out, trained.adversarial->trace);
    return;
  }
  out << "step,train_loss,val_loss,val_accuracy\n";
  if (!trained.supervised) return;
  for (const auto& pt : trained.supervised->history) {
    out << pt.step << ',' << exact(pt.train_loss) << ',' << exact(pt.val_loss) << ',' << exact(pt.val_accuracy)
        << '\n';
  }
}

void check_compatible(const policies::Policy& policy, const env::Environment& env) {
  if (policy.state_dim() != env.state_dim()) {
    throw std::invalid_argument("checkpoint state width " + std::to_string(policy.state_dim()) +
                                " does not match the environment's " + std::to_string(env.state_dim()));
  }
  if (policy.actions().atoms() != env.system.space().atoms()) {
    throw std::invalid_argument("checkpoint action space does not match the environment's system atoms");
  }
}

std::pair<double, double> median_turn_success(const std::vector<AblationCell>& cells, double fraction,
                                              const std::string& method) {
  std::vector<double> turns, success;
  for (const auto& c : cells) {
    if (c.fraction == fraction && c.method == method) {
      turns.push_back(c.metrics.turns);
      success.push_back(c.metrics.success);
    }
  }
  if (turns.empty()) throw std::invalid_argument("no cells for " + method);
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  return {median(turns), median(success)};
}

std::vector<AblationCell> run_ablation(const ExperimentConfig& config, const env::Environment& env,
                                       const core::Corpus& corpus, const Logger& log) {
  const auto train_all = corpus.split(core::Split::train);
  const auto val = corpus.split(core::Split::val);
  const bool wants_adv =
      std::find(config.methods.begin(), config.methods.end(), "diaadv") != config.methods.end();
  std::vector<AblationCell> cells;
  for (double fraction : config.fractions) {
    for (auto seed : config.seeds) {
      const auto train = subsample_dialogues(train_all, fraction, seed);
      std::unique_ptr<policies::Policy> multidense;
      for (const auto& method : config.methods) {
        say(log, "info", "fraction " + exact(fraction) + " seed " + std::to_string(seed) + " " + method);
        Trained t;
        if (method == "diaadv") {
          if (!multidense) multidense = train_method(config, "multidense", env, train, val, seed, nullptr, log).policy;
          t = train_method(config, method, env, train, val, seed, multidense.get(), log);
        } else {
          t = train_method(config, method, env, train, val, seed, nullptr, log);
          if (method == "multidense" && wants_adv) multidense = t.policy->clone();
        }
        policies::PolicyAgent agent(*t.policy);
        eval::EvalOptions opts;
        opts.bootstrap_resamples = 0;
        const auto report = eval::evaluate_policy(agent, env, config.episodes, {seed}, method, opts);
        say(log, "info", method + " success " + exact(report.mean.success) + " turns " + exact(report.mean.turns));
        cells.push_back({fraction, method, seed, report.mean});
      }
    }
  }
  return cells;
}

void cmd_gen_corpus(const ExperimentConfig& config, const Logger& log) {
  const auto env = make_environment(config);
  const auto dir = prepare_out(config);
  const auto corpus = obtain_corpus(config, env);
  {
    auto out = open_out(dir / "corpus.jsonl");
    core::write_corpus(corpus, env.system.space(), out);
  }
  json stats;
  std::set<int> dialogues;
  for (const auto& p : corpus.pairs) dialogues.insert(p.dialogue);
  stats["dialogues"] = dialogues.size();
  stats["pairs"] = {{"train", corpus.count(core::Split::train)},
                    {"val", corpus.count(core::Split::val)},
                    {"test", corpus.count(core::Split::test)}};
  json counts = json::object();
  const auto c = core::action_counts(corpus, env.system.size(), core::Split::train);
  for (std::size_t a = 0; a < c.size(); ++a) counts[env.system.space().name(static_cast<int>(a))] = c[a];
  stats["train_action_counts"] = counts;
  stats["state_dim"] = env.state_dim();
  stats["config"] = config_to_json(config);
  auto out = open_out(dir / "corpus_stats.json");
  out << stats.dump(2) << '\n';
  say(log, "info", "wrote " + std::to_string(corpus.size()) + " pairs to " + (dir / "corpus.jsonl").string());
}

Trained cmd_train(const ExperimentConfig& config, const Logger& log) {
  const auto env = make_environment(config);
  std::unique_ptr<policies::Policy> pretrained;
  if (config.method == "diaadv" && config.pretrained) pretrained = policies::load_checkpoint(*config.pretrained);
  if (config.method != "diaadv" && config.pretrained) {
    throw ConfigError("'pretrained' only applies to diaadv, not " + config.method);
  }
  const auto corpus = obtain_corpus(config, env);
  const auto train = subsample_dialogues(corpus.split(core::Split::train), config.fraction, config.seed);
  const auto dir = prepare_out(config);
  auto t = train_method(config, config.method, env, train, corpus.split(core::Split::val), config.seed,
                        pretrained.get(), log);
  auto doc = policies::checkpoint_to_json(*t.policy);
  doc["experiment"] = config_to_json(config);
  {
    auto out = open_out(dir / "checkpoint.json");
    out << doc.dump() << '\n';
  }
  auto curve = open_out(dir / "curve.csv");
  write_curve_csv(curve, t);
  say(log, "info", "wrote " + (dir / "checkpoint.json").string());
  return t;
}

eval::AggregateReport cmd_evaluate(const ExperimentConfig& config, const std::string& checkpoint,
                                   const Logger& log) {
  const auto env = make_environment(config);
  std::unique_ptr<policies::Policy> policy;
  std::unique_ptr<env::SystemPolicy> agent;
  std::string name = "expert";
  if (checkpoint == "expert") {
    agent = std::make_unique<env::ExpertPolicy>(env);
  } else {
    policy = policies::load_checkpoint(checkpoint);
    check_compatible(*policy, env);
    name = to_string(policy->method());
    agent = std::make_unique<policies::PolicyAgent>(*policy);
  }
  const auto dir = prepare_out(config);
  auto report = eval::evaluate_policy(*agent, env, config.episodes, config.seeds, name);
  {
    auto out = open_out(dir / "report.csv");
    eval::write_report_csv(out, {report}, true);
  }
  {
    auto out = open_out(dir / "report.txt");
    eval::write_report_text(out, {report}, true);
  }
  auto j = eval::report_to_json(report);
  j["checkpoint"] = checkpoint;
  j["config"] = config_to_json(config);
  auto out = open_out(dir / "report.json");
  out << j.dump(2) << '\n';
  say(log, "info", name + " success " + exact(report.mean.success) + " over " +
                       std::to_string(config.episodes * config.seeds.size()) + " episodes");
  return report;
}

void write_ablation_csv(std::ostream& out, const ExperimentConfig& config, const std::vector<AblationCell>& cells) {
  out << "fraction,method,seed,Turn,Success\n";
  for (const auto& c : cells) {
    out << exact(c.fraction) << ',' << c.method << ',' << c.seed << ',' << exact(c.metrics.turns) << ','
        << exact(c.metrics.success) << '\n';
  }
  for (double f : config.fractions) {
    for (const auto& m : config.methods) {
      const auto [turn, success] = median_turn_success(cells, f, m);
      out << exact(f) << ',' << m << ",median," << exact(turn) << ',' << exact(success) << '\n';
    }
  }
}

void write_ablation_text(std::ostream& out, const ExperimentConfig& config, const std::vector<AblationCell>& cells) {
  std::ostringstream s;
  s << std::left << std::setw(10) << "Fraction" << std::right;
  for (const auto& m : config.methods) s << std::setw(14) << (m + " Turn") << std::setw(18) << (m + " Success");
  s << '\n' << std::fixed;
  for (double f : config.fractions) {
    s << std::left << std::setw(10) << std::setprecision(2) << f << std::right;
    for (const auto& m : config.methods) {
      const auto [turn, success] = median_turn_success(cells, f, m);
      s << std::setprecision(2) << std::setw(14) << turn << std::setprecision(3) << std::setw(18) << success;
    }
    s << '\n';
  }
  out << s.str();
}

std::vector<AblationCell> cmd_ablate(const ExperimentConfig& config, const Logger& log) {
  const auto env = make_environment(config);
  const auto corpus = obtain_corpus(config, env);
  const auto dir = prepare_out(config);
  const auto cells = run_ablation(config, env, corpus, log);
  {
    auto out = open_out(dir / "ablation.csv");
    write_ablation_csv(out, config, cells);
  }
  auto out = open_out(dir / "ablation.txt");
  write_ablation_text(out, config, cells);
  return cells;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "epochs,steps,pretrain_success,adversarial_success,gain\n";
  for (const auto& r : rows) {
    out << r.epochs << ',' << r.steps << ',' << exact(r.pretrain_success) << ',' << exact(r.adversarial_success)
        << ',' << exact(r.gain) << '\n';
  }
}

std::vector<SweepRow> cmd_pretrain_sweep(const ExperimentConfig& config, const Logger& log) {
  const auto env = make_environment(config);
  const auto corpus = obtain_corpus(config, env);
  const auto train = subsample_dialogues(corpus.split(core::Split::train), config.fraction, config.seed);
  const auto dir = prepare_out(config);
  const auto settings = config.train_for("multidense");
  const std::size_t batch = settings.batch_size == 0 ? train.size() : std::min(settings.batch_size, train.size());
  const std::size_t per_epoch = (train.size() + batch - 1) / batch;

  auto success_of = [&](policies::Policy& p) {
    policies::PolicyAgent agent(p);
    eval::EvalOptions opts;
    opts.bootstrap_resamples = 0;
    return eval::evaluate_policy(agent, env, config.episodes, config.seeds, to_string(p.method()), opts)
        .mean.success;
  };

  std::vector<SweepRow> rows;
  for (std::size_t epochs : config.pretrain_epochs) {
    ExperimentConfig pre = config;
    pre.train = settings;
    pre.train.max_steps = epochs * per_epoch;
    pre.train.eval_every = 0;  // a fixed budget, no early stopping
    pre.train_by_method.clear();
    auto base = train_method(pre, "multidense", env, train, {}, config.seed, nullptr, log);
    policies::save_checkpoint(*base.policy, dir / ("pretrain_e" + std::to_string(epochs) + ".json"));
    auto adv = train_method(config, "diaadv", env, train, {}, config.seed, base.policy.get(), log);
    policies::save_checkpoint(*adv.policy, dir / ("adversarial_e" + std::to_string(epochs) + ".json"));

    SweepRow row;
    row.epochs = epochs;
    row.steps = pre.train.max_steps;
    row.pretrain_success = success_of(*base.policy);
    row.adversarial_success = success_of(*adv.policy);
    row.gain = row.adversarial_success - row.pretrain_success;
    say(log, "info",
        "epochs " + std::to_string(epochs) + ": pretrain " + exact(row.pretrain_success) + " adversarial " +
            exact(row.adversarial_success));
    rows.push_back(row);
  }
  auto out = open_out(dir / "sweep.csv");
  write_sweep_csv(out, rows);
  return rows;
}

}  // namespace dialpol::experiments
