#include <gtest/gtest.h>

#include <cmath>
#include <queue>
#include <set>

#include "mortar/composer/composer.hpp"
#include "mortar/dsl/catalog.hpp"
#include "mortar/engine/game_json.hpp"
#include "mortar/gen/provider.hpp"

using namespace mortar;
using namespace mortar::composer;
using dsl::MechanicSpec;

namespace {

std::vector<MechanicSpec> catalog_without(const std::string& name) {
  std::vector<MechanicSpec> out;
  for (auto& m : dsl::seed_catalog()) {
    if (m.name != name) out.push_back(m);
  }
  return out;
}

// tau grows with the number of mechanics; deterministic in the game only.
FunctionEvaluator counting_evaluator() {
  return FunctionEvaluator([](const engine::GameDef& g, std::uint64_t seed) -> Evaluation {
    return {0.1 * static_cast<double>(g.mechanics.size()) + static_cast<double>(seed % 7) / 100.0, ""};
  });
}

int reachable_cells(const std::vector<std::string>& rows, char wall) {
  const int R = static_cast<int>(rows.size()), C = static_cast<int>(rows[0].size());
  std::vector<char> seen(static_cast<std::size_t>(R * C), 0);
  std::queue<std::pair<int, int>> q;
  for (int r = 0; r < R; ++r)
    for (int c = 0; c < C; ++c)
      if (rows[r][c] == '@') q.push({r, c});
  int n = 0;
  while (!q.empty()) {
    auto [r, c] = q.front();
    q.pop();
    if (r < 0 || c < 0 || r >= R || c >= C || rows[r][c] == wall || seen[r * C + c]) continue;
    seen[r * C + c] = 1;
    ++n;
    q.push({r + 1, c});
    q.push({r - 1, c});
    q.push({r, c + 1});
    q.push({r, c - 1});
  }
  return n;
}

}  // namespace

TEST(Uct, ScoreArithmetic) {
  EvalNode n;
  EXPECT_TRUE(std::isinf(uct_score(n, 5, std::sqrt(2.0))));
  n.visits = 2;
  n.value_sum = 1.2;
  // 0.6 + sqrt(2) * sqrt(ln 10 / 2) = 0.6 + sqrt(ln 10)
  EXPECT_NEAR(uct_score(n, 10, std::sqrt(2.0)), 0.6 + std::sqrt(std::log(10.0)), 1e-12);
  n.visits = 4;
  n.value_sum = 1.0;
  EXPECT_NEAR(uct_score(n, 10, std::sqrt(2.0)), 0.25 + std::sqrt(2.0 * std::log(10.0) / 4.0), 1e-12);
  EXPECT_EQ(backup_value(std::nullopt), 0.0);
  EXPECT_EQ(backup_value(1.0), 1.0);
  EXPECT_EQ(backup_value(-1.0), 0.0);
  EXPECT_EQ(backup_value(0.2), 0.6);
}

TEST(Compose, WinRuleFollowsTheMechanics) {
  using engine::WinKind;
  EXPECT_EQ(choose_win({dsl::seed_mechanic("move_player")}).kind, WinKind::ReachTile);
  EXPECT_EQ(choose_win({dsl::seed_mechanic("move_player")}).tile, 'G');
  EXPECT_EQ(choose_win({dsl::seed_mechanic("pick_object")}).kind, WinKind::CollectAll);
  EXPECT_EQ(choose_win({dsl::seed_mechanic("pick_object"), dsl::seed_mechanic("hit_enemy")}).kind,
            WinKind::DefeatAllEnemies);
}

TEST(Compose, MapsAreConnectedAndBindMovement) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto def = compose_game({dsl::seed_mechanic("hit_enemy"), dsl::seed_mechanic("pick_object")}, seed);
    EXPECT_EQ(def.action_map.at("move_player"), 0);
    EXPECT_EQ(def.mechanics.front().name, "move_player");
    EXPECT_GE(def.action_map.at("hit_enemy"), engine::kMoveActions);
    int open = 0;
    for (const auto& row : def.map_rows)
      for (char c : row) open += c != 'B';
    EXPECT_EQ(reachable_cells(def.map_rows, 'B'), open) << "seed " << seed;
    EXPECT_EQ(def.max_steps, kComposedMaxSteps);
    EXPECT_NO_THROW(engine::Game{def});
  }
}

TEST(Compose, DeterministicExport) {
  const std::vector<MechanicSpec> ms = {dsl::seed_mechanic("push_object"), dsl::seed_mechanic("teleport_player")};
  EXPECT_EQ(engine::dump_game(compose_game(ms, 77)), engine::dump_game(compose_game(ms, 77)));
  EXPECT_NE(compose_game(ms, 77).map_rows, compose_game(ms, 78).map_rows);
}

TEST(Compose, SokobanUsesTheFixedLayout) {
  const auto def = compose_game({dsl::seed_mechanic("push_object")}, 5, InitMode::Sokoban);
  EXPECT_EQ(def.map_rows, sokoban_layout());
  EXPECT_EQ(compose_game({dsl::seed_mechanic("push_object")}, 6, InitMode::Sokoban).map_rows, sokoban_layout());
}

TEST(Composer, TreeBoundsAndReproducibleTaus) {
  auto eval = counting_evaluator();
  ComposerConfig cfg;
  ExpansionSources src{catalog_without("pick_object"), nullptr, {}};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto t = build_tree(dsl::seed_mechanic("pick_object"), src, eval, cfg, seed);
    EXPECT_LE(t.nodes.size(), 21u);
    for (const auto& n : t.nodes) {
      EXPECT_LE(n.children.size(), 3u);
      EXPECT_LE(n.depth(), 4u);
      EXPECT_TRUE(n.evaluated);
      EXPECT_EQ(std::set<std::string>(n.mechanics.begin(), n.mechanics.end()).size(), n.mechanics.size());
      EXPECT_EQ(reevaluate(t, n.id, eval, cfg.init).tau, n.tau);
      if (n.parent >= 0) {
        EXPECT_EQ(n.depth(), t.node(n.parent).depth() + 1);
      }
    }
    // Every iteration adds and evaluates one node while candidates remain.
    EXPECT_EQ(t.nodes.size(), 21u);
    EXPECT_EQ(t.node(0).visits, 21);
  }
}

TEST(Composer, SaturatedTreeStopsEarly) {
  auto eval = counting_evaluator();
  ComposerConfig cfg;
  cfg.iterations = 50;
  ExpansionSources src{{dsl::seed_mechanic("hit_enemy")}, nullptr, {}};
  const auto t = build_tree(dsl::seed_mechanic("pick_object"), src, eval, cfg, 1);
  EXPECT_EQ(t.nodes.size(), 2u);
  EXPECT_LT(t.iterations_used, 50);
}

TEST(Composer, SearchConcentratesOnTheGoodMechanic) {
  auto favoring = [](const engine::GameDef& g, std::uint64_t) -> Evaluation {
    for (const auto& m : g.mechanics) {
      if (m.name == "hit_enemy") return {0.9, ""};
    }
    return {-0.5, ""};
  };
  auto neutral = [](const engine::GameDef&, std::uint64_t) -> Evaluation { return {0.0, ""}; };
  ComposerConfig cfg;
  ExpansionSources src{catalog_without("pick_object"), nullptr, {}};
  auto containing = [&](FunctionEvaluator::Fn fn) {
    FunctionEvaluator eval(std::move(fn));
    int n = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto t = build_tree(dsl::seed_mechanic("pick_object"), src, eval, cfg, seed);
      for (const auto& node : t.nodes) n += std::count(node.mechanics.begin(), node.mechanics.end(), "hit_enemy");
    }
    return n;
  };
  const int with = containing(favoring);
  const int without = containing(neutral);
  EXPECT_GT(with, without + without / 4) << with << " vs " << without;
}

TEST(Composer, NovelBranchAddsTheGeneratorsMechanic) {
  auto eval = counting_evaluator();
  auto fresh = dsl::seed_mechanic("jump_player");
  fresh.name = "vault_player";
  gen::StubProvider stub({fresh});
  ComposerConfig cfg;
  cfg.novel_prob = 1.0;
  ExpansionSources src{catalog_without("pick_object"), &stub, {}};
  auto t = new_tree(dsl::seed_mechanic("pick_object"), 3);
  Rng rng(0);
  const auto child = expand_node(t, 0, src, cfg, rng);
  ASSERT_TRUE(child.has_value());
  EXPECT_EQ(t.node(*child).added, "vault_player");
  EXPECT_TRUE(t.registry.count("vault_player"));
  for (const auto& m : src.archive) EXPECT_NE(m.name, "vault_player");

  // A rejecting gate sends expansion back to the archive.
  src.accept = [](const MechanicSpec& m) { return m.name != "vault_player"; };
  const auto other = expand_node(t, 0, src, cfg, rng);
  ASSERT_TRUE(other.has_value());
  EXPECT_NE(t.node(*other).added, "vault_player");
}

TEST(Composer, DeterministicTrees) {
  auto e1 = counting_evaluator();
  auto e2 = counting_evaluator();
  ComposerConfig cfg;
  ExpansionSources src{catalog_without("push_object"), nullptr, {}};
  const auto a = build_tree(dsl::seed_mechanic("push_object"), src, e1, cfg, 42);
  const auto b = build_tree(dsl::seed_mechanic("push_object"), src, e2, cfg, 42);
  EXPECT_EQ(tree_to_json(a), tree_to_json(b));
}

TEST(Strategies, PathsEvaluateEveryPrefix) {
  auto eval = counting_evaluator();
  ComposerConfig cfg;
  StrategyInputs in;
  in.sources.archive = catalog_without("pick_object");
  for (const auto& m : in.sources.archive) in.fitness[m.name] = 0.1;
  in.fitness["teleport_player"] = 0.7;
  in.fitness["enemy_hit"] = 0.5;
  for (auto s : {Strategy::Random, Strategy::Greedy}) {
    const auto t = run_strategy(s, dsl::seed_mechanic("pick_object"), in, eval, cfg, 9);
    ASSERT_EQ(t.nodes.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) {
      EXPECT_EQ(t.nodes[i].depth(), i + 1);
      EXPECT_TRUE(t.nodes[i].evaluated);
    }
  }
  const auto g = run_strategy(Strategy::Greedy, dsl::seed_mechanic("pick_object"), in, eval, cfg, 9);
  EXPECT_EQ(g.node(1).added, "teleport_player");
  EXPECT_EQ(g.node(2).added, "enemy_hit");
  // Ties go to the lower name.
  EXPECT_EQ(g.node(3).added, "drop_object");
  EXPECT_THROW(run_strategy(Strategy::External, dsl::seed_mechanic("pick_object"), in, eval, cfg, 9), ConfigError);
  EXPECT_EQ(strategy_from("eval-mcts"), Strategy::EvalMcts);
  EXPECT_FALSE(strategy_from("best").has_value());
}

TEST(Strategies, NonFunctionalGamesFeedZero) {
  FunctionEvaluator eval([](const engine::GameDef&, std::uint64_t) -> Evaluation { return {std::nullopt, "broken"}; });
  ComposerConfig cfg;
  ExpansionSources src{catalog_without("pick_object"), nullptr, {}};
  const auto t = build_tree(dsl::seed_mechanic("pick_object"), src, eval, cfg, 2);
  for (const auto& n : t.nodes) {
    EXPECT_FALSE(n.tau.has_value());
    EXPECT_EQ(n.value_sum, 0.0);
  }
}
