#include "mortar/agents/agents.hpp"

#include <algorithm>
#include <limits>

#include "mortar/core/error.hpp"
#include "mortar/core/parallel.hpp"

namespace mortar::agents {

using engine::Game;
using engine::GameState;

AgentKind AgentKind::mcts(int iterations) {
  if (iterations <= 0) throw ConfigError("mcts iterations must be positive");
  return {Variant::Mcts, iterations};
}

std::string AgentKind::label() const {
  switch (variant) {
    case Variant::Mcts: return "mcts(" + std::to_string(iterations) + ")";
    case Variant::Random: return "random";
    case Variant::Noop: return "noop";
  }
  return "noop";
}

AgentPool make_pool(int i1, int i2, int i3) {
  if (!(i1 > i2 && i2 > i3 && i3 > 0)) throw ConfigError("iteration ladder must be strictly decreasing and positive");
  return {AgentKind::mcts(i1), AgentKind::mcts(i2), AgentKind::mcts(i3), AgentKind::random(), AgentKind::noop()};
}

namespace {

struct Node {
  GameState state;
  int parent = -1;
  int visits = 0;
  double value_sum = 0.0;
  int next_untried = 0;  // actions are expanded in index order
  bool terminal = false;
  std::vector<int> children;  // by action, -1 if unexpanded
  double ret = 0.0;           // discounted reward collected from the root
  double weight = 1.0;        // discount of the next step's reward
};

bool finished(const GameState& s, const Game& g) { return s.done || s.step_count >= g.def().max_steps; }

double terminal_value(const GameState& s, const MctsConfig& cfg) {
  if (!s.done) return 0.0;
  return s.won ? cfg.terminal_bonus : -cfg.terminal_bonus;
}

}  // namespace

std::vector<int> mcts_visits(const GameState& root_state, const Game& game, int iterations, Rng& rng,
                             const MctsConfig& cfg) {
  const int A = game.action_count();
  std::vector<Node> nodes;
  nodes.reserve(static_cast<std::size_t>(iterations) + 1);
  nodes.push_back({root_state, -1, 0, 0.0, 0, finished(root_state, game), std::vector<int>(A, -1), 0.0, 1.0});

  // Q values are min-max normalized over the returns seen so far.
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int it = 0; it < iterations; ++it) {
    int cur = 0;
    // Selection.
    while (!nodes[cur].terminal && nodes[cur].next_untried >= A) {
      const Node& n = nodes[cur];
      const double log_n = std::log(static_cast<double>(n.visits));
      int best = -1;
      double best_score = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < A; ++a) {
        const Node& c = nodes[n.children[a]];
        const double q = hi > lo ? (c.value_sum / c.visits - lo) / (hi - lo) : 0.0;
        const double score = q + cfg.exploration * std::sqrt(log_n / c.visits);
        if (score > best_score) {
          best_score = score;
          best = n.children[a];
        }
      }
      cur = best;
    }
    // Expansion.
    if (!nodes[cur].terminal) {
      const int a = nodes[cur].next_untried++;
      GameState s = nodes[cur].state;
      const double r = engine::step_inplace(s, game, a).reward;
      const double ret = nodes[cur].ret + nodes[cur].weight * r;
      // Actions with identical successors share one child.
      int child = -1;
      for (int b = 0; b < a && child < 0; ++b) {
        const int c = nodes[cur].children[b];
        if (nodes[c].ret == ret && nodes[c].state == s) child = c;
      }
      if (child < 0) {
        const bool term = finished(s, game);
        const double weight = nodes[cur].weight * cfg.discount;
        nodes.push_back({std::move(s), cur, 0, 0.0, 0, term, std::vector<int>(term ? 0 : A, -1), ret, weight});
        child = static_cast<int>(nodes.size()) - 1;
      }
      nodes[cur].children[a] = child;
      cur = child;
    }
    // Rollout.
    GameState sim = nodes[cur].state;
    double value = nodes[cur].ret;
    double weight = nodes[cur].weight;
    for (int d = 0; d < cfg.rollout_depth && !finished(sim, game); ++d) {
      const auto a = static_cast<int>(rng.below(static_cast<std::uint64_t>(A)));
      value += weight * engine::step_inplace(sim, game, a).reward;
      weight *= cfg.discount;
    }
    value += weight * terminal_value(sim, cfg);
    lo = std::min(lo, value);
    hi = std::max(hi, value);
    // Backpropagation.
    for (int n = cur; n >= 0; n = nodes[n].parent) {
      nodes[n].visits += 1;
      nodes[n].value_sum += value;
    }
  }

  std::vector<int> visits(A, 0);
  for (int a = 0; a < A; ++a) {
    const int c = nodes[0].children.empty() ? -1 : nodes[0].children[a];
    if (c >= 0) visits[a] = nodes[c].visits;
  }
  return visits;
}

int act(const AgentKind& agent, const GameState& state, const Game& game, Rng& rng, const MctsConfig& cfg) {
  switch (agent.variant) {
    case AgentKind::Variant::Noop:
      return game.wait_action();
    case AgentKind::Variant::Random:
      return static_cast<int>(rng.below(static_cast<std::uint64_t>(game.action_count())));
    case AgentKind::Variant::Mcts: {
      auto visits = mcts_visits(state, game, agent.iterations, rng, cfg);
      int best = 0;
      for (int a = 1; a < static_cast<int>(visits.size()); ++a) {
        if (visits[a] > visits[best]) best = a;
      }
      return best;
    }
  }
  return game.wait_action();
}

EpisodeResult run_episode(const Game& game, const AgentKind& agent, std::uint64_t seed, int max_steps,
                          const MctsConfig& cfg) {
  GameState s = engine::init_game(game);
  s.rng = derive_seed(seed, {0, game.def().rng_seed});
  Rng rng(derive_seed(seed, {1}));
  const int cap = std::min(max_steps, game.def().max_steps);
  while (!s.done && s.step_count < cap) {
    engine::step_inplace(s, game, act(agent, s, game, rng, cfg));
  }
  return {s.won, s.score, s.step_count};
}

std::uint64_t episode_seed(std::uint64_t master_seed, std::size_t agent, std::size_t episode) {
  return derive_seed(master_seed, {agent, episode});
}

WinRateMatrix run_pool(const Game& game, const AgentPool& pool, int episodes_per_agent, std::uint64_t master_seed,
                       int workers, const MctsConfig& cfg) {
  if (episodes_per_agent < 1) throw ConfigError("episodes_per_agent must be >= 1");
  const auto E = static_cast<std::size_t>(episodes_per_agent);
  std::vector<EpisodeResult> results(pool.size() * E);
  parallel_for(results.size(), workers, [&](std::size_t i) {
    const std::size_t a = i / E;
    const std::size_t e = i % E;
    results[i] = run_episode(game, pool[a], episode_seed(master_seed, a, e), game.def().max_steps, cfg);
  });
  WinRateMatrix m(pool.size());
  for (std::size_t a = 0; a < pool.size(); ++a) {
    int wins = 0;
    double score = 0.0;
    for (std::size_t e = 0; e < E; ++e) {
      wins += results[a * E + e].won ? 1 : 0;
      score += results[a * E + e].score;
    }
    m[a] = {static_cast<double>(wins) / static_cast<double>(E), score / static_cast<double>(E), episodes_per_agent};
  }
  return m;
}

}  // namespace mortar::agents
