#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mortar/core/rng.hpp"
#include "mortar/engine/game.hpp"

namespace mortar::agents {

struct AgentKind {
  enum class Variant { Mcts, Random, Noop };
  Variant variant = Variant::Noop;
  int iterations = 0;  // mcts only

  static AgentKind mcts(int iterations);
  static AgentKind random() { return {Variant::Random, 0}; }
  static AgentKind noop() { return {Variant::Noop, 0}; }

  std::string label() const;  // "mcts(2000)", "random", "noop"
  bool operator==(const AgentKind&) const = default;
};

// Strongest first: mcts(I1), mcts(I2), mcts(I3), random, noop.
using AgentPool = std::vector<AgentKind>;

inline constexpr int kDeskLadder[3] = {2000, 200, 20};
inline constexpr int kPaperLadder[3] = {100000, 10000, 1000};

// Throws ConfigError unless the ladder is strictly decreasing and positive.
AgentPool make_pool(int i1, int i2, int i3);

struct MctsConfig {
  double exploration = std::sqrt(2.0);
  int rollout_depth = 20;
  // Added to the return of a rollout that ends in a win, subtracted on a
  // loss. Zero gives the plain score return.
  double terminal_bonus = 10.0;
  // Per-step discount on rewards and the terminal bonus.
  double discount = 0.9;
};

// Chooses an action for `state`. Requires !state.done.
int act(const AgentKind& agent, const engine::GameState& state, const engine::Game& game, Rng& rng,
        const MctsConfig& cfg = {});

// UCT search returning per-action root visit counts (index = action).
std::vector<int> mcts_visits(const engine::GameState& state, const engine::Game& game, int iterations, Rng& rng,
                             const MctsConfig& cfg = {});

struct EpisodeResult {
  bool won = false;
  double score = 0.0;
  int steps = 0;
  bool operator==(const EpisodeResult&) const = default;
};

// Episode stochasticity (engine and agent) is derived from `seed` only.
EpisodeResult run_episode(const engine::Game& game, const AgentKind& agent, std::uint64_t seed, int max_steps,
                          const MctsConfig& cfg = {});

struct AgentStats {
  double win_rate = 0.0;
  double mean_score = 0.0;
  int episodes = 0;
  bool operator==(const AgentStats&) const = default;
};

using WinRateMatrix = std::vector<AgentStats>;  // parallel to the pool

// Episode e of agent a uses seed derive_seed(master_seed, {a, e}).
std::uint64_t episode_seed(std::uint64_t master_seed, std::size_t agent, std::size_t episode);

// Runs every (agent, episode) pair on up to `workers` threads. The result
// does not depend on the worker count.
WinRateMatrix run_pool(const engine::Game& game, const AgentPool& pool, int episodes_per_agent,
                       std::uint64_t master_seed, int workers = 1, const MctsConfig& cfg = {});

}  // namespace mortar::agents
