#include "mortar/run/config.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <functional>
#include <sstream>

#include "mortar/agents/agents.hpp"
#include "mortar/core/error.hpp"

namespace mortar::run {

struct OptionBinding {
  std::string ladder;
  bool paper_scale = false;
  std::string strategy;
  std::string init;
  std::string scheme;
  std::string pairing;
};

namespace {

std::string ladder_text(const std::vector<int>& l) {
  std::string s;
  for (std::size_t i = 0; i < l.size(); ++i) s += (i ? "," : "") + std::to_string(l[i]);
  return s;
}

std::vector<int> parse_ladder(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(part, &used);
      if (part.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(part);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("ladder: '" + text + "' is not a comma-separated list of integers");
    }
  }
  if (out.size() != 3) throw ConfigError("ladder: expected three iteration counts");
  return out;
}

}  // namespace

std::shared_ptr<OptionBinding> add_run_options(CLI::App& app, RunConfig& cfg) {
  auto b = std::make_shared<OptionBinding>();
  b->ladder = ladder_text(cfg.ladder);
  b->strategy = std::string(composer::to_string(cfg.strategy));
  b->init = std::string(composer::to_string(cfg.composer.init));
  b->scheme = std::string(dsl::to_string(cfg.scheme));
  b->pairing = cfg.crossover_most_similar ? "most-similar" : "least-similar";

  app.add_option("--seed", cfg.seed, "run seed");
  app.add_option("--generations", cfg.generations);
  app.add_option("--batch-size", cfg.batch_size);
  app.add_option("--op-diversity", cfg.operators.diversity_mutation);
  app.add_option("--op-mutation", cfg.operators.mutation);
  app.add_option("--op-crossover", cfg.operators.crossover);
  app.add_option("--composer-iterations", cfg.composer.iterations);
  app.add_option("--composer-max-children", cfg.composer.max_children);
  app.add_option("--composer-depth-cap", cfg.composer.depth_cap);
  app.add_option("--composer-novel-prob", cfg.composer.novel_prob);
  app.add_option("--ladder", b->ladder, "MCTS iteration ladder, strongest first (I1,I2,I3)");
  app.add_flag("--paper-scale", b->paper_scale, "use the paper's ladder 100000,10000,1000");
  app.add_option("--episodes", cfg.episodes, "episodes per agent");
  app.add_option("--workers", cfg.workers, "threads for agent episodes");
  app.add_option("--strategy", b->strategy)->check(CLI::IsMember({"eval-mcts", "random", "greedy", "external"}));
  app.add_option("--init", b->init)->check(CLI::IsMember({"catalog", "sokoban"}));
  app.add_option("--descriptor-scheme", b->scheme)->check(CLI::IsMember({"banded", "paper-literal"}));
  app.add_option("--crossover-pairing", b->pairing)->check(CLI::IsMember({"most-similar", "least-similar"}));
  app.add_option("--probe-episodes", cfg.probe.episodes);
  app.add_option("--probe-iterations", cfg.probe.iterations);
  app.add_option("--probe-steps", cfg.probe.steps);
  app.add_option("--external-base-url", cfg.external.base_url);
  app.add_option("--external-model", cfg.external.model);
  app.add_option("--external-api-key-env", cfg.external.api_key_env, "environment variable holding the API key");
  app.add_option("--external-timeout", cfg.external.timeout_seconds);
  app.add_option("--external-max-retries", cfg.external.max_retries);
  app.add_option("--external-temperature", cfg.external.temperature);
  app.add_flag("--external-operators", cfg.external_operators);
  app.add_option("--output-dir", cfg.output_dir);
  return b;
}

void finalize_options(const OptionBinding& b, RunConfig& cfg) {
  cfg.ladder = b.paper_scale ? kPaperLadderValues : parse_ladder(b.ladder);
  cfg.strategy = *composer::strategy_from(b.strategy);
  cfg.composer.init = *composer::init_mode_from(b.init);
  cfg.scheme = b.scheme == "paper-literal" ? dsl::DescriptorScheme::PaperLiteral : dsl::DescriptorScheme::Banded;
  cfg.crossover_most_similar = b.pairing == "most-similar";
  cfg.validate();
}

void RunConfig::validate() const {
  if (generations < 1) throw ConfigError("generations must be >= 1");
  if (batch_size < 1) throw ConfigError("batch-size must be >= 1");
  operators.validate();
  if (composer.iterations < 0) throw ConfigError("composer-iterations must be >= 0");
  if (composer.max_children < 1) throw ConfigError("composer-max-children must be >= 1");
  if (composer.depth_cap < 1) throw ConfigError("composer-depth-cap must be >= 1");
  if (!(composer.novel_prob >= 0.0 && composer.novel_prob <= 1.0)) throw ConfigError("composer-novel-prob must lie in [0, 1]");
  if (ladder.size() != 3) throw ConfigError("ladder: expected three iteration counts");
  agents::make_pool(ladder[0], ladder[1], ladder[2]);
  if (episodes < 1) throw ConfigError("episodes must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (probe.episodes < 1 || probe.iterations < 1 || probe.steps < 1) throw ConfigError("probe settings must be positive");
  if (strategy == composer::Strategy::External || external_operators) external.validate();
  if (output_dir.empty()) throw ConfigError("output-dir must not be empty");
}

std::string RunConfig::to_text() const {
  std::ostringstream o;
  o.precision(17);
  o << "seed = " << seed << "\n"
    << "generations = " << generations << "\n"
    << "batch-size = " << batch_size << "\n"
    << "op-diversity = " << operators.diversity_mutation << "\n"
    << "op-mutation = " << operators.mutation << "\n"
    << "op-crossover = " << operators.crossover << "\n"
    << "composer-iterations = " << composer.iterations << "\n"
    << "composer-max-children = " << composer.max_children << "\n"
    << "composer-depth-cap = " << composer.depth_cap << "\n"
    << "composer-novel-prob = " << composer.novel_prob << "\n"
    << "ladder = \"" << ladder_text(ladder) << "\"\n"
    << "episodes = " << episodes << "\n"
    << "workers = " << workers << "\n"
    << "strategy = \"" << composer::to_string(strategy) << "\"\n"
    << "init = \"" << composer::to_string(composer.init) << "\"\n"
    << "descriptor-scheme = \"" << dsl::to_string(scheme) << "\"\n"
    << "crossover-pairing = \"" << (crossover_most_similar ? "most-similar" : "least-similar") << "\"\n"
    << "probe-episodes = " << probe.episodes << "\n"
    << "probe-iterations = " << probe.iterations << "\n"
    << "probe-steps = " << probe.steps << "\n";
  if (!external.base_url.empty()) o << "external-base-url = \"" << external.base_url << "\"\n";
  o << "external-model = \"" << external.model << "\"\n"
    << "external-api-key-env = \"" << external.api_key_env << "\"\n"
    << "external-timeout = " << external.timeout_seconds << "\n"
    << "external-max-retries = " << external.max_retries << "\n"
    << "external-temperature = " << external.temperature << "\n"
    << "external-operators = " << (external_operators ? "true" : "false") << "\n"
    << "output-dir = \"" << output_dir << "\"\n";
  return o.str();
}

namespace {

RunConfig parse_with(const std::function<void(CLI::App&)>& parse) {
  RunConfig cfg;
  CLI::App app{"mortar run config"};
  app.allow_config_extras(CLI::config_extras_mode::error);
  auto binding = add_run_options(app, cfg);
  app.set_config("--config");
  try {
    parse(app);
  } catch (const CLI::ParseError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  finalize_options(*binding, cfg);
  return cfg;
}

}  // namespace

RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides) {
  return parse_with([&](CLI::App& app) {
    std::vector<std::string> args = {"--config", path};
    args.insert(args.end(), overrides.begin(), overrides.end());
    std::reverse(args.begin(), args.end());  // CLI11 takes the argument vector reversed
    app.parse(args);
  });
}

RunConfig parse_run_config_text(const std::string& text) {
  return parse_with([&](CLI::App& app) {
    std::istringstream in(text);
    app.parse_from_stream(in);
  });
}

}  // namespace mortar::run
