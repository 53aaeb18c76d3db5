#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mortar/composer/tree.hpp"
#include "mortar/core/error.hpp"
#include "mortar/core/rng.hpp"
#include "mortar/engine/game.hpp"
#include "mortar/gen/external.hpp"
#include "mortar/gen/provider.hpp"
#include "mortar/skill/skill.hpp"

namespace mortar::composer {

enum class InitMode { Catalog, Sokoban };
std::string_view to_string(InitMode m) noexcept;
std::optional<InitMode> init_mode_from(std::string_view s) noexcept;

class ComposeError : public GameError {
 public:
  using GameError::GameError;
};

inline constexpr int kComposedMaxSteps = 200;
inline constexpr int kMapAttempts = 20;

// Combat (removes or damages enemies) beats collection (clears an item tile)
// beats reach-tile G.
engine::WinCondition choose_win(const std::vector<dsl::MechanicSpec>& mechanics);

// The fixed crate-pushing level used by the Sokoban initialization.
const std::vector<std::string>& sokoban_layout();

// Deterministic in (mechanics, seed, init). move_player is bound to the
// movement actions, prepended when the list lacks it. Throws ComposeError
// when no connected map is found within kMapAttempts.
engine::GameDef compose_game(const std::vector<dsl::MechanicSpec>& mechanics, std::uint64_t seed,
                             InitMode init = InitMode::Catalog);

struct Evaluation {
  std::optional<double> tau;  // empty: non-functional
  std::string error;
};

class GameEvaluator {
 public:
  virtual ~GameEvaluator() = default;
  virtual Evaluation evaluate(const engine::GameDef& game, std::uint64_t seed) = 0;
};

// The agent-pool evaluation.
class SkillEvaluator final : public GameEvaluator {
 public:
  explicit SkillEvaluator(skill::EvalSettings settings) : settings_(std::move(settings)) {}
  Evaluation evaluate(const engine::GameDef& game, std::uint64_t seed) override;

 private:
  skill::EvalSettings settings_;
};

// Wraps a callable; counts calls.
class FunctionEvaluator final : public GameEvaluator {
 public:
  using Fn = std::function<Evaluation(const engine::GameDef&, std::uint64_t)>;
  explicit FunctionEvaluator(Fn fn) : fn_(std::move(fn)) {}
  Evaluation evaluate(const engine::GameDef& game, std::uint64_t seed) override {
    ++calls_;
    return fn_(game, seed);
  }
  int calls() const noexcept { return calls_; }

 private:
  Fn fn_;
  int calls_ = 0;
};

struct ComposerConfig {
  int iterations = 20;
  int max_children = 3;
  int depth_cap = 4;  // maximum mechanics per node
  double novel_prob = 0.5;
  double exploration = std::sqrt(2.0);
  int novel_attempts = 3;
  InitMode init = InitMode::Catalog;
};

// Where expansions draw mechanics from.
struct ExpansionSources {
  std::vector<dsl::MechanicSpec> archive;    // elites
  gen::GeneratorProvider* novel = nullptr;  // compatibility mutation; null disables the novel branch
  std::function<bool(const dsl::MechanicSpec&)> accept;  // validation gate; null accepts everything
};

EvalTree new_tree(const dsl::MechanicSpec& root, std::uint64_t run_seed);

// +infinity for an unvisited child.
double uct_score(const EvalNode& child, int parent_visits, double c);

// Argmax UCT over the children of `node`; ties go to the earlier child.
int best_child(const EvalTree& tree, int node, double c);

bool expandable(const EvalTree& tree, int node, const ComposerConfig& cfg);

// Descends by UCT to the first expandable node; -1 when the tree is saturated.
int select_node(const EvalTree& tree, const ComposerConfig& cfg);

// Adds one child of `node`. Returns its id, or nullopt (node marked
// exhausted) when no candidate exists.
std::optional<int> expand_node(EvalTree& tree, int node, const ExpansionSources& sources, const ComposerConfig& cfg,
                               Rng& rng);

// Value (tau + 1) / 2, 0 for non-functional games.
double backup_value(const std::optional<double>& tau) noexcept;

Evaluation evaluate_and_backprop(EvalTree& tree, int node, GameEvaluator& evaluator, InitMode init);

// Re-evaluates a node's game with its seed (for reproducibility checks).
Evaluation reevaluate(const EvalTree& tree, int node, GameEvaluator& evaluator, InitMode init);

EvalTree build_tree(const dsl::MechanicSpec& root, const ExpansionSources& sources, GameEvaluator& evaluator,
                    const ComposerConfig& cfg, std::uint64_t run_seed);

enum class Strategy { EvalMcts, Random, Greedy, External };
std::string_view to_string(Strategy s) noexcept;
std::optional<Strategy> strategy_from(std::string_view s) noexcept;

struct StrategyInputs {
  ExpansionSources sources;
  std::map<std::string, double> fitness;         // archive fitness, for greedy
  const gen::ExternalGeneratorConfig* external = nullptr;
  gen::Transport* transport = nullptr;
};

// eval-mcts builds the search tree; the others build one path of 1..depth_cap
// mechanics, evaluating every prefix. Throws ConfigError for external
// without an endpoint.
EvalTree run_strategy(Strategy strategy, const dsl::MechanicSpec& root, const StrategyInputs& inputs,
                      GameEvaluator& evaluator, const ComposerConfig& cfg, std::uint64_t run_seed);

}  // namespace mortar::composer
