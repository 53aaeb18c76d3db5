#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mortar/agents/agents.hpp"
#include "mortar/engine/game.hpp"

namespace mortar::skill {

// Agent indices grouped into tie groups, best group first.
using TiedOrder = std::vector<std::vector<int>>;

// Win rate descending, then mean score descending; exact equality on both
// keys forms a tie group. Agents inside a group are listed by index.
TiedOrder rank_agents(const agents::WinRateMatrix& matrix);

struct RankOutcome {
  std::vector<int> expected;
  TiedOrder observed;
  int concordant = 0;
  int discordant = 0;
  double tau = 0.0;
};

// Pairs tied in `observed` count as neither concordant nor discordant; the
// denominator stays n(n-1)/2. O(n log n) by merge-sort inversion counting.
RankOutcome kendall(const std::vector<int>& expected, const TiedOrder& observed);
double kendall_tau(const std::vector<int>& expected, const TiedOrder& observed);

// Unplayable exactly when tau == -1.
bool playable(double tau) noexcept;

struct GameEvaluation {
  bool functional = true;  // false if composing or playing the game threw
  std::string error;
  double tau = 0.0;
  agents::WinRateMatrix matrix;
  TiedOrder observed;
};

struct EvalSettings {
  agents::AgentPool pool;
  int episodes = 20;
  int workers = 1;
  agents::MctsConfig mcts;
};

// run_pool -> rank_agents -> kendall_tau against the pool order 0..4.
GameEvaluation evaluate_game(const engine::GameDef& def, const EvalSettings& settings, std::uint64_t master_seed);

// {game_name, tau, win_rates, mean_scores, seed}
std::string evaluation_record(const std::string& game_name, const GameEvaluation& ev, std::uint64_t seed);

}  // namespace mortar::skill
