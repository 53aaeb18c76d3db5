#include "mortar/run/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <json.hpp>
#include <memory>

#include "mortar/core/json_io.hpp"
#include "mortar/dsl/catalog.hpp"
#include "mortar/dsl/text.hpp"
#include "mortar/engine/game_json.hpp"

namespace mortar::run {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string padded(int v, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%0*d", width, v);
  return buf;
}

std::string tree_file(int generation, int slot) {
  return "gen-" + padded(generation, 3) + "-slot-" + padded(slot, 2);
}

// Validation is deterministic in the mechanic, so results are shared.
archive::Validator cached_validator(const gen::ProbeConfig& probe) {
  auto cache = std::make_shared<std::map<std::string, gen::ValidationResult>>();
  return [cache, probe](const dsl::MechanicSpec& m) {
    const std::string key = dsl::render_mechanic(m);
    auto it = cache->find(key);
    if (it == cache->end()) it = cache->emplace(key, gen::validate_pipeline(m, probe)).first;
    return it->second;
  };
}

// Games of the functional nodes of `tree`, named after the tree file.
std::vector<std::pair<std::string, engine::GameDef>> functional_games(const composer::EvalTree& tree,
                                                                      const std::string& stem,
                                                                      composer::InitMode init) {
  std::vector<std::pair<std::string, engine::GameDef>> out;
  for (const auto& n : tree.nodes) {
    if (!n.evaluated || !n.tau) continue;
    out.emplace_back(stem + "-node-" + padded(n.id, 2), composer::compose_game(tree.specs_of(n), n.seed, init));
  }
  return out;
}

json metrics_json(const archive::RunMetrics& m) { return json::parse(m.to_json_line()); }

}  // namespace

std::vector<dsl::MechanicSpec> initial_mechanics(composer::InitMode init) {
  if (init == composer::InitMode::Sokoban) {
    return {dsl::seed_mechanic("move_player"), dsl::seed_mechanic("push_object")};
  }
  return dsl::seed_catalog();
}

skill::EvalSettings eval_settings(const RunConfig& cfg) {
  skill::EvalSettings s;
  s.pool = agents::make_pool(cfg.ladder.at(0), cfg.ladder.at(1), cfg.ladder.at(2));
  s.episodes = cfg.episodes;
  s.workers = cfg.workers;
  return s;
}

std::string run_directory(const RunConfig& cfg) {
  return (fs::path(cfg.output_dir) / ("run-" + std::to_string(cfg.seed))).string();
}

std::pair<double, double> mean_std(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / static_cast<double>(v.size());
  if (v.size() < 2) return {mean, 0.0};
  double sq = 0.0;
  for (double x : v) sq += (x - mean) * (x - mean);
  return {mean, std::sqrt(sq / static_cast<double>(v.size() - 1))};
}

RunResult run_evolution(const RunConfig& cfg, const RunOverrides& overrides) {
  cfg.validate();
  RunResult result{run_directory(cfg), {}, archive::Archive(cfg.scheme), {}};
  const fs::path dir(result.dir);
  fs::create_directories(dir / "archive");
  fs::create_directories(dir / "trees");
  fs::create_directories(dir / "games");
  json_io::write_file((dir / "config.txt").string(), cfg.to_text());

  std::unique_ptr<composer::SkillEvaluator> skill_eval;
  composer::GameEvaluator* evaluator = overrides.evaluator;
  if (!evaluator) {
    skill_eval = std::make_unique<composer::SkillEvaluator>(eval_settings(cfg));
    evaluator = skill_eval.get();
  }

  std::unique_ptr<gen::HttpTransport> http;
  gen::Transport* transport = overrides.transport;
  if (!transport && cfg.external.configured()) {
    http = std::make_unique<gen::HttpTransport>(cfg.external.base_url, cfg.external.timeout_seconds);
    transport = http.get();
  }

  gen::RuleBasedProvider rules;
  std::unique_ptr<gen::ExternalProvider> external;
  std::unique_ptr<gen::FallbackProvider> fallback;
  gen::GeneratorProvider* provider = overrides.operators ? overrides.operators : &rules;
  if (!overrides.operators && cfg.external_operators) {
    external = std::make_unique<gen::ExternalProvider>(cfg.external, *transport);
    fallback = std::make_unique<gen::FallbackProvider>(*external, rules);
    provider = fallback.get();
  }
  gen::GeneratorProvider* novel = overrides.novel ? overrides.novel : provider;

  archive::EvolutionConfig ecfg;
  ecfg.batch_size = cfg.batch_size;
  ecfg.operators = cfg.operators;
  ecfg.composer = cfg.composer;
  ecfg.strategy = cfg.strategy;
  ecfg.crossover_most_similar = cfg.crossover_most_similar;

  cits::FitnessBook book;
  archive::EvolutionContext ctx{result.archive, *provider, novel, *evaluator, book,
                                overrides.validate ? overrides.validate : cached_validator(cfg.probe),
                                &cfg.external, transport, {}};
  ctx.on_tree = [&](const composer::EvalTree& tree, int generation, int slot) {
    const std::string stem = tree_file(generation, slot);
    composer::save_tree_file(tree, (dir / "trees" / (stem + ".json")).string());
    for (const auto& n : tree.nodes) {
      if (n.evaluated) ++result.evaluated_by_size[static_cast<int>(n.depth())];
    }
    for (const auto& [name, game] : functional_games(tree, stem, cfg.composer.init)) {
      engine::save_game_file(game, (dir / "games" / (name + ".json")).string());
    }
  };

  std::string metrics_text;
  auto record = [&](const archive::RunMetrics& row) {
    result.metrics.push_back(row);
    metrics_text += row.to_json_line() + "\n";
    json_io::write_file((dir / "metrics.jsonl").string(), metrics_text);
    json_io::write_file((dir / "archive" / ("gen-" + padded(row.generation, 3) + ".json")).string(),
                        result.archive.to_json());
  };

  const auto seeds = overrides.seeds.empty() ? initial_mechanics(cfg.composer.init) : overrides.seeds;
  record(archive::seed_archive(seeds, ctx, ecfg, cfg.seed));
  for (int g = 1; g <= cfg.generations; ++g) record(archive::evolve_generation(g, ctx, ecfg, cfg.seed));

  const std::string final_archive = result.archive.to_json();
  json_io::write_file((dir / "archive.json").string(), final_archive);

  json summary;
  summary["schema"] = "mortarsummary/1";
  summary["seed"] = cfg.seed;
  summary["strategy"] = composer::to_string(cfg.strategy);
  summary["init"] = composer::to_string(cfg.composer.init);
  summary["generations"] = cfg.generations;
  summary["final"] = metrics_json(result.metrics.back());
  summary["max_cits"] = result.archive.max_fitness();
  summary["mean_cits"] = result.archive.mean_fitness();
  json sizes = json::object();
  for (const auto& [k, v] : result.evaluated_by_size) sizes[std::to_string(k)] = v;
  summary["evaluated_by_size"] = sizes;
  json elites = json::array();
  for (const auto& e : result.archive.elites()) elites.push_back({{"name", e.mechanic.name}, {"fitness", e.fitness}});
  summary["elites"] = elites;
  json_io::write_file((dir / "summary.json").string(), summary.dump(2) + "\n");
  return result;
}

int export_run(const std::string& run_dir, const std::string& out_dir) {
  const fs::path trees_dir = fs::path(run_dir) / "trees";
  if (!fs::is_directory(trees_dir)) throw Error("not a run directory: " + run_dir);
  const RunConfig cfg = load_run_config((fs::path(run_dir) / "config.txt").string());

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(trees_dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  fs::create_directories(out_dir);
  json index = json::array();
  for (const auto& f : files) {
    const auto tree = composer::load_tree_file(f.string());
    for (const auto& [name, game] : functional_games(tree, f.stem().string(), cfg.composer.init)) {
      engine::save_game_file(game, (fs::path(out_dir) / (name + ".json")).string());
      const int node = std::stoi(name.substr(name.rfind('-') + 1));
      index.push_back({{"file", name + ".json"}, {"name", game.name}, {"tau", *tree.node(node).tau}});
    }
  }
  json doc = {{"schema", "mortarindex/1"}, {"games", index}};
  json_io::write_file((fs::path(out_dir) / "index.json").string(), doc.dump(2) + "\n");
  return static_cast<int>(index.size());
}

std::vector<AblationEntry> run_ablation(const RunConfig& cfg, const std::vector<composer::Strategy>& strategies,
                                        const std::vector<std::uint64_t>& seeds, const RunOverrides& overrides) {
  if (seeds.empty()) throw ConfigError("ablation needs at least one seed");
  std::vector<AblationEntry> out;
  json per_strategy = json::array();
  for (auto strategy : strategies) {
    AblationEntry entry{strategy, {}};
    RunConfig c = cfg;
    c.strategy = strategy;
    c.output_dir = (fs::path(cfg.output_dir) / std::string(composer::to_string(strategy))).string();
    std::vector<double> maxes, means;
    json runs = json::array();
    for (auto seed : seeds) {
      c.seed = seed;
      entry.runs.push_back(run_evolution(c, overrides));
      const auto& r = entry.runs.back();
      maxes.push_back(r.archive.max_fitness());
      means.push_back(r.archive.mean_fitness());
      json sizes = json::object();
      for (const auto& [k, v] : r.evaluated_by_size) sizes[std::to_string(k)] = v;
      runs.push_back({{"seed", seed},
                      {"max_cits", maxes.back()},
                      {"mean_cits", means.back()},
                      {"qd_score", r.archive.qd_score()},
                      {"evaluated_by_size", sizes}});
    }
    const auto [max_mean, max_std] = mean_std(maxes);
    const auto [mean_mean, mean_std_] = mean_std(means);
    per_strategy.push_back({{"strategy", composer::to_string(strategy)},
                            {"runs", runs},
                            {"max_cits", *std::max_element(maxes.begin(), maxes.end())},
                            {"max_cits_mean", max_mean},
                            {"max_cits_std", max_std},
                            {"mean_cits", mean_mean},
                            {"mean_cits_std", mean_std_}});
    out.push_back(std::move(entry));
  }
  fs::create_directories(cfg.output_dir);
  json doc = {{"schema", "mortarablation/1"}, {"strategies", per_strategy}};
  json_io::write_file((fs::path(cfg.output_dir) / "ablation-summary.json").string(), doc.dump(2) + "\n");
  return out;
}

}  // namespace mortar::run
