#pragma once

#include <map>
#include <string>
#include <vector>

#include "mortar/archive/evolution.hpp"
#include "mortar/run/config.hpp"

namespace mortar::run {

// Replacements for the parts of a run that tests stub out. Null members
// fall back to the configured defaults.
struct RunOverrides {
  composer::GameEvaluator* evaluator = nullptr;
  gen::GeneratorProvider* operators = nullptr;
  gen::GeneratorProvider* novel = nullptr;
  archive::Validator validate;
  gen::Transport* transport = nullptr;
  std::vector<dsl::MechanicSpec> seeds;  // empty: chosen by the init mode
};

struct RunResult {
  std::string dir;
  std::vector<archive::RunMetrics> metrics;  // generation 0 first
  archive::Archive archive;
  std::map<int, int> evaluated_by_size;  // evaluated games by mechanic count
};

// The initial mechanics: the whole catalog, or move_player and
// push_object for the Sokoban start.
std::vector<dsl::MechanicSpec> initial_mechanics(composer::InitMode init);

skill::EvalSettings eval_settings(const RunConfig& cfg);

// Directory of one run: <output_dir>/run-<seed>.
std::string run_directory(const RunConfig& cfg);

// Layout of the run directory:
//   config.txt               the effective config
//   metrics.jsonl            one row per generation, 0 = seeding
//   archive/gen-NNN.json     snapshot after each generation; archive.json is the last
//   trees/gen-NNN-slot-SS.json
//   games/gen-NNN-slot-SS-node-KK.json   every functional node's game
//   summary.json
RunResult run_evolution(const RunConfig& cfg, const RunOverrides& overrides = {});

// Re-composes the game of every functional node in the run's trees into
// out_dir, with an index.json listing them. Returns the number of games.
int export_run(const std::string& run_dir, const std::string& out_dir);

struct AblationEntry {
  composer::Strategy strategy;
  std::vector<RunResult> runs;  // one per seed
};

// One run per (strategy, seed) under <output_dir>/<strategy>/, then
// <output_dir>/ablation-summary.json with mean and max CITS per strategy.
std::vector<AblationEntry> run_ablation(const RunConfig& cfg, const std::vector<composer::Strategy>& strategies,
                                        const std::vector<std::uint64_t>& seeds,
                                        const RunOverrides& overrides = {});

// Mean and sample standard deviation (0 for fewer than two values).
std::pair<double, double> mean_std(const std::vector<double>& v);

}  // namespace mortar::run
