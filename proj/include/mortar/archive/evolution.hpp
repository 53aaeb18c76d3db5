#pragma once

#include <functional>
#include <vector>

#include "mortar/archive/archive.hpp"
#include "mortar/cits/cits.hpp"
#include "mortar/composer/composer.hpp"
#include "mortar/gen/validation.hpp"

namespace mortar::archive {

struct EvolutionConfig {
  int batch_size = 10;
  OperatorSchedule operators;
  composer::ComposerConfig composer;
  composer::Strategy strategy = composer::Strategy::EvalMcts;
  bool crossover_most_similar = true;
};

using Validator = std::function<gen::ValidationResult(const dsl::MechanicSpec&)>;
using TreeSink = std::function<void(const composer::EvalTree&, int generation, int slot)>;

struct EvolutionContext {
  Archive& archive;
  gen::GeneratorProvider& operators;            // applies the evolutionary operators
  gen::GeneratorProvider* novel = nullptr;      // compatibility mutation during expansion
  composer::GameEvaluator& evaluator;
  cits::FitnessBook& book;
  Validator validate;                           // null: gen::validate_pipeline
  const gen::ExternalGeneratorConfig* external = nullptr;
  gen::Transport* transport = nullptr;
  TreeSink on_tree;                             // optional
};

// One parent group per operator draw, in batch order.
struct OperatorSlot {
  gen::OperatorKind kind;
  std::vector<dsl::MechanicSpec> parents;
};

// Consumes the batch front to back: diversity mutation takes three parents,
// crossover the first remaining parent and its most AST-similar distinct
// partner, mutation one. Draws that cannot be served fall back to mutation.
std::vector<OperatorSlot> plan_operators(const std::vector<dsl::MechanicSpec>& batch, const OperatorSchedule& ops,
                                         bool most_similar, Rng& rng);

// Generation 0: evaluates each seed mechanic once and inserts it.
RunMetrics seed_archive(const std::vector<dsl::MechanicSpec>& seeds, EvolutionContext& ctx,
                        const EvolutionConfig& cfg, std::uint64_t run_seed);

RunMetrics evolve_generation(int generation, EvolutionContext& ctx, const EvolutionConfig& cfg,
                             std::uint64_t run_seed);

}  // namespace mortar::archive
