// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <json.hpp>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

#include "mortar/archive/archive.hpp"
#include "mortar/archive/evolution.hpp"
#include "mortar/cits/cits.hpp"
#include "mortar/composer/composer.hpp"
#include "mortar/core/json_io.hpp"
#include "mortar/dsl/catalog.hpp"
#include "mortar/dsl/text.hpp"
#include "mortar/gen/operators.hpp"
#include "mortar/gen/validation.hpp"
#include "mortar/run/runner.hpp"
#include "mortar/skill/skill.hpp"
#include "test_games.hpp"
#include "test_trees.hpp"

namespace fs = std::filesystem;
using namespace mortar;
using clk = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(clk::time_point t) { return std::chrono::duration<double>(clk::now() - t).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

fs::path work_dir() {
  static const fs::path p = [] {
    auto d = fs::temp_directory_path() / "mortar-acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return p;
}

// Reduced evolution config shared by the run-based criteria.
run::RunConfig scaled_run(std::uint64_t seed, const std::string& dir) {
  run::RunConfig c;
  c.seed = seed;
  c.generations = 20;
  c.batch_size = 5;
  c.composer.iterations = 8;
  c.ladder = {30, 8, 2};
  c.episodes = 2;
  c.probe.episodes = 2;
  c.probe.iterations = 20;
  c.probe.steps = 40;
  c.output_dir = (work_dir() / dir).string();
  return c;
}

// ---------------------------------------------------------------------------

Outcome kendall_exactness() {
  const auto t0 = clk::now();
  std::vector<int> expected = {0, 1, 2, 3, 4};
  std::vector<int> perm = expected;
  int checked = 0;
  bool ok = true;
  do {
    skill::TiedOrder observed;
    for (int a : perm) observed.push_back({a});
    // Brute force: a pair is concordant when both orders agree on it.
    std::vector<int> pos(5);
    for (int k = 0; k < 5; ++k) pos[static_cast<std::size_t>(perm[k])] = k;
    int c = 0, d = 0;
    for (int i = 0; i < 5; ++i) {
      for (int j = i + 1; j < 5; ++j) (pos[i] < pos[j] ? c : d) += 1;
    }
    const double oracle = static_cast<double>(c - d) / 10.0;
    ok &= skill::kendall_tau(expected, observed) == oracle;
    ++checked;
  } while (std::next_permutation(perm.begin(), perm.end()));
  skill::TiedOrder same, reversed;
  for (int a : expected) same.push_back({a});
  for (int k = 4; k >= 0; --k) reversed.push_back({k});
  ok &= skill::kendall_tau(expected, same) == 1.0;
  ok &= skill::kendall_tau(expected, reversed) == -1.0;
  const double secs = seconds_since(t0);
  return {ok && checked == 120 && secs < 1.0, std::to_string(checked) + " permutations, " + fmt("%.3fs", secs)};
}

Outcome cits_vs_shapley() {
  const auto t0 = clk::now();
  Rng rng(2024);
  double worst = 0.0, worst_eff = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(4));
    std::vector<double> truth;
    const auto tree = mortar::testing::lattice_tree(n, rng, truth);
    cits::Coalition top;
    for (int b = 0; b < n; ++b) top.push_back("m" + std::to_string(b));
    // The top node carries the full set.
    const auto& last = tree.nodes.back();
    if (cits::canonical(last.mechanics) != top) return {false, "lattice has no top node"};
    auto v = [&](const cits::Coalition& s) {
      unsigned mask = 0;
      for (const auto& x : s) mask |= 1u << std::stoi(x.substr(1));
      return truth[mask];
    };
    const auto oracle = cits::brute_force_shapley(v, top);
    const auto table = cits::ValueTable::from_tree(tree);
    double sum = 0.0;
    for (const auto& i : top) {
      const double p = cits::phi(table, top, i);
      worst = std::max(worst, std::abs(p - oracle.at(i)));
      sum += p;
    }
    worst_eff = std::max(worst_eff, std::abs(sum - (v(top) - v({}))));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-12 && worst_eff <= 1e-12 && secs < 10.0,
          "max |phi - oracle| " + fmt("%.2e", worst) + ", max efficiency gap " + fmt("%.2e", worst_eff) + ", " +
              fmt("%.2fs", secs)};
}

Outcome worked_fixture() {
  const auto tree = mortar::testing::make_tree({{-1, {"a"}, 0.2}, {0, {"a", "b"}, 0.6}});
  // Through the tree dump, as the cits subcommand reads it.
  const auto back = composer::tree_from_json(composer::tree_to_json(tree));
  const double a = cits::cits(back, "a");
  const double b = cits::cits(back, "b");
  const bool ok = std::abs(a - 0.4) <= 1e-15 && std::abs(b - 0.2) <= 1e-15;
  return {ok, "CITS_a " + fmt("%.17g", a) + ", CITS_b " + fmt("%.17g", b)};
}

std::vector<archive::RunMetrics> read_metrics(const std::string& dir) {
  std::vector<archive::RunMetrics> rows;
  std::istringstream in(json_io::read_file((fs::path(dir) / "metrics.jsonl").string()));
  std::string line;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    archive::RunMetrics m;
    m.generation = j["generation"];
    m.qd_score = j["qd_score"];
    m.elites_count = j["elites_count"];
    rows.push_back(m);
  }
  return rows;
}

std::vector<std::string> qd_run_dirs;

Outcome qd_monotonicity() {
  const auto t0 = clk::now();
  bool ok = true;
  std::string detail;
  for (std::uint64_t seed : {0, 1, 2}) {
    const auto r = run::run_evolution(scaled_run(seed, "qd"));
    qd_run_dirs.push_back(r.dir);
    const auto rows = read_metrics(r.dir);
    ok &= rows.size() == 21;
    for (std::size_t g = 1; g < rows.size(); ++g) {
      ok &= rows[g].qd_score >= rows[g - 1].qd_score && rows[g].elites_count >= rows[g - 1].elites_count;
    }
    detail += "seed " + std::to_string(seed) + ": qd " + fmt("%.3f", rows.front().qd_score) + " -> " +
              fmt("%.3f", rows.back().qd_score) + ", elites " + std::to_string(rows.front().elites_count) + " -> " +
              std::to_string(rows.back().elites_count) + "; ";
  }
  return {ok, detail + fmt("%.0fs", seconds_since(t0))};
}

// A corridor with a coin at each end and a tight step limit: one coin is
// near, collecting both takes planning.
engine::GameDef two_coin_corridor() {
  auto def = mortar::testing::make_game({"CAAA@AAAAAAC"}, {}, {engine::WinKind::CollectAll, 'C', 0}, 25);
  def.name = "two-coin-corridor";
  def.mechanics.push_back(dsl::parse_mechanic(mortar::testing::kPickCoin));
  def.action_map["pick_coin"] = engine::kMoveActions;
  return def;
}

Outcome skill_gradient() {
  const auto t0 = clk::now();
  skill::EvalSettings s;
  s.pool = agents::make_pool(agents::kDeskLadder[0], agents::kDeskLadder[1], agents::kDeskLadder[2]);
  s.episodes = 20;
  const auto def = two_coin_corridor();
  double sum = 0.0;
  int top = 0;
  const int seeds = 50;
  for (int seed = 0; seed < seeds; ++seed) {
    const auto ev = skill::evaluate_game(def, s, static_cast<std::uint64_t>(seed));
    sum += ev.tau;
    if (ev.observed.front() == std::vector<int>{0}) ++top;
  }
  const double mean = sum / seeds;
  const double secs = seconds_since(t0);
  return {mean >= 0.6 && top >= 40 && secs < 300.0,
          "mean tau " + fmt("%.3f", mean) + ", mcts(2000) alone on top in " + std::to_string(top) + "/50, " +
              fmt("%.0fs", secs)};
}

Outcome archive_geometry() {
  const auto t0 = clk::now();
  using archive::CellIndex;
  bool ok = archive::cell_index({0.5, 22.0}) == CellIndex{6, 6};
  ok &= archive::cell_index({archive::kTypeMin, archive::kComplexityMin}) == CellIndex{0, 0};
  ok &= archive::cell_index({archive::kTypeMax, archive::kComplexityMax}) == CellIndex{12, 12};
  std::set<CellIndex> cells;
  for (const auto& m : dsl::seed_catalog()) {
    cells.insert(archive::cell_index(archive::describe(m, dsl::DescriptorScheme::Banded)));
  }
  const double secs = seconds_since(t0);
  return {ok && cells.size() >= 4 && secs < 1.0,
          "fixtures " + std::string(ok ? "match" : "differ") + ", seeds in " + std::to_string(cells.size()) +
              " cells, " + fmt("%.3fs", secs)};
}

Outcome composer_bounds() {
  const auto t0 = clk::now();
  const auto cfg = scaled_run(0, "composer");
  composer::SkillEvaluator evaluator(run::eval_settings(cfg));
  gen::RuleBasedProvider rules;
  composer::ComposerConfig ccfg;  // 20 iterations
  composer::ExpansionSources sources;
  sources.archive = dsl::seed_catalog();
  sources.novel = &rules;
  int trees = 0, nodes = 0, reproduced = 0, checked = 0;
  std::size_t largest = 0, widest = 0, deepest = 0;
  for (const auto& root : dsl::seed_catalog()) {
    const auto tree = composer::build_tree(root, sources, evaluator, ccfg, 31 + static_cast<std::uint64_t>(trees));
    ++trees;
    largest = std::max(largest, tree.nodes.size());
    for (const auto& n : tree.nodes) {
      ++nodes;
      widest = std::max(widest, n.children.size());
      deepest = std::max(deepest, n.depth());
      if (!n.evaluated) continue;
      ++checked;
      if (composer::reevaluate(tree, n.id, evaluator, ccfg.init).tau == n.tau) ++reproduced;
    }
  }
  const bool ok = largest <= 21 && widest <= 3 && deepest <= 4 && checked > 0 && reproduced == checked;
  return {ok, std::to_string(trees) + " trees, " + std::to_string(nodes) + " nodes; largest " +
                  std::to_string(largest) + ", widest " + std::to_string(widest) + ", deepest " +
                  std::to_string(deepest) + "; tau reproduced " + std::to_string(reproduced) + "/" +
                  std::to_string(checked) + ", " + fmt("%.0fs", seconds_since(t0))};
}

Outcome validation_pipeline() {
  const auto t0 = clk::now();
  int passed = 0;
  std::string failures;
  for (const auto& m : dsl::seed_catalog()) {
    const auto r = gen::validate_pipeline(m);
    if (r.pass) {
      ++passed;
    } else {
      failures += " " + m.name + "(" + r.reason() + ")";
    }
  }
  const std::string dir = MORTAR_FIXTURE_DIR;
  const auto never = gen::validate_text(json_io::read_file(dir + "/never_fires.mech"));
  const auto unknown = gen::validate_text(json_io::read_file(dir + "/unknown_kind.mech"));
  const bool ok = passed == 10 && !never.pass && never.reason() == "non-trivial" && !unknown.pass &&
                  unknown.reason() == "syntax";
  return {ok, std::to_string(passed) + "/10 seeds pass" + failures + "; never-fires: " + never.reason() +
                  "; unknown-kind: " + unknown.reason() + ", " + fmt("%.1fs", seconds_since(t0))};
}

Outcome determinism() {
  const auto t0 = clk::now();
  if (qd_run_dirs.empty()) qd_run_dirs.push_back(run::run_evolution(scaled_run(0, "qd")).dir);
  const auto again = run::run_evolution(scaled_run(0, "determinism"));
  const fs::path a = qd_run_dirs.front(), b = again.dir;
  bool same = json_io::read_file((a / "metrics.jsonl").string()) == json_io::read_file((b / "metrics.jsonl").string());
  int snapshots = 0;
  for (const auto& f : fs::directory_iterator(a / "archive")) {
    same &= json_io::read_file(f.path().string()) == json_io::read_file((b / "archive" / f.path().filename()).string());
    ++snapshots;
  }
  same &= json_io::read_file((a / "archive.json").string()) == json_io::read_file((b / "archive.json").string());
  return {same && snapshots == 21, "metrics and " + std::to_string(snapshots) + " snapshots " +
                                       (same ? "identical" : "differ") + ", " + fmt("%.0fs", seconds_since(t0))};
}

// Planted-mechanic ablation plus one full ablation run per strategy.
Outcome ablation() {
  const auto t0 = clk::now();

  // Candidates: the catalog, mutated variants, and the planted mechanic.
  std::vector<dsl::MechanicSpec> pool = dsl::seed_catalog();
  Rng mrng(77);
  const auto cat = dsl::seed_catalog();
  for (int i = 0; pool.size() < 39; ++i) {
    auto m = gen::mutate(cat[static_cast<std::size_t>(i) % cat.size()], mrng);
    m.name += "_v" + std::to_string(i);
    pool.push_back(m);
  }
  auto planted = dsl::seed_mechanic("hit_enemy");
  planted.name = "planted_strike";
  pool.push_back(planted);

  composer::FunctionEvaluator stub([](const engine::GameDef& g, std::uint64_t seed) -> composer::Evaluation {
    for (const auto& m : g.mechanics) {
      if (m.name == "planted_strike") return {0.9, ""};
    }
    const auto h = std::hash<std::string>{}(g.name) ^ seed;
    return {static_cast<double>(h % 901) / 1000.0 - 0.6, ""};
  });
  // Archive fitness: best CITS of each mechanic over one search tree per
  // candidate root.
  cits::FitnessBook book;
  composer::ComposerConfig ccfg;
  for (std::size_t r = 0; r < pool.size(); ++r) {
    composer::ExpansionSources src;
    for (const auto& m : pool) {
      if (m.name != pool[r].name) src.archive.push_back(m);
    }
    const auto tree = composer::build_tree(pool[r], src, stub, ccfg, 500 + r);
    for (const auto& [name, spec] : tree.registry) book.record(name, cits::mechanic_fitness(tree, name));
  }

  int greedy_first = 0, random_first = 0;
  double p_not = 1.0;
  for (int seed = 0; seed < 20; ++seed) {
    const auto& root = pool[static_cast<std::size_t>(seed)];
    composer::StrategyInputs in;
    for (const auto& m : pool) {
      if (m.name != root.name) in.sources.archive.push_back(m);
      if (book.has(m.name)) in.fitness[m.name] = book.get(m.name);
    }
    p_not = std::min(p_not, 1.0 - 1.0 / static_cast<double>(in.sources.archive.size()));
    const auto g =
        composer::run_strategy(composer::Strategy::Greedy, root, in, stub, ccfg, static_cast<std::uint64_t>(seed));
    const auto r =
        composer::run_strategy(composer::Strategy::Random, root, in, stub, ccfg, static_cast<std::uint64_t>(seed));
    greedy_first += g.node(1).added == planted.name;
    random_first += r.node(1).added == planted.name;
  }
  const double random_not = 1.0 - random_first / 20.0;

  // Full harness: evaluated coalitions of every size and a summary file.
  auto cfg = scaled_run(0, "ablation");
  cfg.generations = 1;
  cfg.batch_size = 4;
  cfg.composer.iterations = 20;
  const std::vector<composer::Strategy> strategies = {composer::Strategy::Random, composer::Strategy::Greedy,
                                                      composer::Strategy::EvalMcts};
  const auto entries = run::run_ablation(cfg, strategies, {0});
  bool sizes_ok = true;
  for (const auto& e : entries) {
    for (const auto& r : e.runs) {
      for (int k = 1; k <= 4; ++k) sizes_ok &= r.evaluated_by_size.count(k) > 0;
      for (const auto& [k, v] : r.evaluated_by_size) sizes_ok &= k >= 1 && k <= 4;
    }
  }
  const auto summary =
      nlohmann::json::parse(json_io::read_file((fs::path(cfg.output_dir) / "ablation-summary.json").string()));
  bool summary_ok = summary["strategies"].size() == 3;
  for (const auto& s : summary["strategies"]) summary_ok &= s.contains("mean_cits") && s.contains("max_cits");

  const bool ok = greedy_first == 20 && random_not >= 0.9 && p_not > 0.9 && sizes_ok && summary_ok;
  return {ok, "greedy first " + std::to_string(greedy_first) + "/20, random not first " +
                  std::to_string(20 - random_first) + "/20 (per-seed chance " + fmt("%.3f", p_not) +
                  "), coalition sizes 1-4: " + (sizes_ok ? "yes" : "no") + ", summary: " +
                  (summary_ok ? "yes" : "no") + ", " + fmt("%.0fs", seconds_since(t0))};
}

}  // namespace

// Arguments, when given, select criteria by name.
int main(int argc, char** argv) {
  const std::set<std::string> only(argv + 1, argv + argc);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"kendall-exactness", kendall_exactness},
      {"cits-vs-shapley", cits_vs_shapley},
      {"worked-cits-fixture", worked_fixture},
      {"qd-monotonicity", qd_monotonicity},
      {"skill-gradient", skill_gradient},
      {"archive-geometry", archive_geometry},
      {"composer-bounds", composer_bounds},
      {"validation-pipeline", validation_pipeline},
      {"determinism", determinism},
      {"ablation-harness", ablation},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && !only.count(name)) continue;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
