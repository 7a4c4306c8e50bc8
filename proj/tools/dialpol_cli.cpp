// dialpol: corpus generation, training, evaluation and experiment sweeps.
//
// Log verbosity comes from DIALPOL_LOG_LEVEL (trace, debug, info, warn,
// error, off; default info). Logs go to stderr. Failures print one JSON line
// {"error": kind, "message": ...} on stderr and exit nonzero: 2 for bad
// configuration or arguments, 1 for anything else.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "dialpol/experiments/commands.hpp"

namespace {

using nlohmann::json;
namespace ex = dialpol::experiments;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> method;
  std::optional<double> fraction;
  std::optional<std::size_t> episodes;
  std::optional<std::string> pretrained;
  bool allow_unpretrained = false;
};

ex::ExperimentConfig resolve(const Overrides& o) {
  json j = json::object();
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw ex::ConfigError("cannot open config " + o.config);
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ex::ConfigError("config " + o.config + ": " + e.what());
    }
  }
  if (o.seed) {
    j["seed"] = *o.seed;
    if (!j.contains("seeds")) j["seeds"] = json::array({*o.seed});
  }
  if (o.out) j["out"] = *o.out;
  if (o.method) j["method"] = *o.method;
  if (o.fraction) j["fraction"] = *o.fraction;
  if (o.episodes) j["episodes"] = *o.episodes;
  if (o.pretrained) j["pretrained"] = *o.pretrained;
  if (o.allow_unpretrained) j["allow_unpretrained"] = true;
  return ex::config_from_json(j);
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("dialpol");
  logger->set_pattern("[%H:%M:%S] [%^%l%$] %v");
  spdlog::set_default_logger(logger);
  const char* level = std::getenv("DIALPOL_LOG_LEVEL");
  spdlog::set_level(level ? spdlog::level::from_str(level) : spdlog::level::info);
}

ex::Logger make_logger() {
  return [](const std::string& level, const std::string& message) {
    if (level == "debug") {
      spdlog::debug(message);
    } else {
      spdlog::info(message);
    }
  };
}

int fail(const std::string& kind, const std::string& message, int code) {
  std::cerr << json{{"error", kind}, {"message", message}}.dump() << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Dialogue policy learning experiments"};
  app.require_subcommand(1);

  Overrides o;
  std::string checkpoint = "expert";
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "root seed");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--episodes", o.episodes, "evaluation episodes per seed");
  };

  auto* gen = app.add_subcommand("gen-corpus", "generate an expert corpus");
  common(gen);
  auto* train = app.add_subcommand("train", "train one method");
  common(train);
  train->add_option("--method", o.method, "multiclass | multidense | diaseq | diaadv");
  train->add_option("--fraction", o.fraction, "fraction of training dialogues to keep");
  train->add_option("--pretrained", o.pretrained, "multidense checkpoint to fine-tune (diaadv)");
  train->add_flag("--allow-unpretrained", o.allow_unpretrained, "let diaadv start from scratch");
  auto* evaluate = app.add_subcommand("evaluate", "evaluate a checkpoint or the expert");
  common(evaluate);
  evaluate->add_option("--checkpoint", checkpoint, "checkpoint file, or 'expert'");
  auto* ablate = app.add_subcommand("ablate", "dataset-fraction ablation");
  common(ablate);
  auto* sweep = app.add_subcommand("pretrain-sweep", "adversarial gain against pretraining budget");
  common(sweep);
  sweep->add_option("--fraction", o.fraction, "fraction of training dialogues to keep");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail("usage", e.what(), 2);
  }

  try {
    const auto config = resolve(o);
    const auto log = make_logger();
    if (*gen) {
      ex::cmd_gen_corpus(config, log);
    } else if (*train) {
      ex::cmd_train(config, log);
    } else if (*evaluate) {
      const auto report = ex::cmd_evaluate(config, checkpoint, log);
      dialpol::eval::write_report_text(std::cout, {report}, true);
    } else if (*ablate) {
      const auto cells = ex::cmd_ablate(config, log);
      ex::write_ablation_text(std::cout, config, cells);
    } else if (*sweep) {
      const auto rows = ex::cmd_pretrain_sweep(config, log);
      ex::write_sweep_csv(std::cout, rows);
    }
  } catch (const std::invalid_argument& e) {
    return fail("config", e.what(), 2);
  } catch (const std::exception& e) {
    return fail("runtime", e.what(), 1);
  }
  return 0;
}
