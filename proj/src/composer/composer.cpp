#include "mortar/composer/composer.hpp"

#include <algorithm>
#include <limits>

namespace mortar::composer {

using dsl::MechanicSpec;

Evaluation SkillEvaluator::evaluate(const engine::GameDef& game, std::uint64_t seed) {
  auto ev = skill::evaluate_game(game, settings_, seed);
  if (!ev.functional) return {std::nullopt, ev.error};
  return {ev.tau, {}};
}

namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

// Registers `m`, renaming it if a different spec already holds the name.
std::string register_mechanic(EvalTree& tree, MechanicSpec m) {
  const std::string base = m.name;
  for (int k = 2;; ++k) {
    auto it = tree.registry.find(m.name);
    if (it == tree.registry.end()) {
      tree.registry.emplace(m.name, m);
      return m.name;
    }
    if (it->second == m) return m.name;
    m.name = base + "_" + std::to_string(k);
  }
}

int add_child(EvalTree& tree, int parent, const MechanicSpec& m) {
  const std::string name = register_mechanic(tree, m);
  EvalNode n;
  n.id = static_cast<int>(tree.nodes.size());
  n.parent = parent;
  n.mechanics = tree.node(parent).mechanics;
  n.mechanics.push_back(name);
  n.added = name;
  n.seed = derive_seed(tree.node(tree.root).seed, {static_cast<std::uint64_t>(n.id)});
  tree.nodes.push_back(n);
  tree.node(parent).children.push_back(n.id);
  return n.id;
}

// Archive mechanics not yet in the node's set and not already a child.
std::vector<const MechanicSpec*> archive_candidates(const EvalTree& tree, int node, const ExpansionSources& sources) {
  const auto& n = tree.node(node);
  std::vector<std::string> taken = n.mechanics;
  for (int c : n.children) taken.push_back(tree.node(c).added);
  std::vector<const MechanicSpec*> out;
  for (const auto& m : sources.archive) {
    if (!contains(taken, m.name)) out.push_back(&m);
  }
  return out;
}

}  // namespace

EvalTree new_tree(const MechanicSpec& root, std::uint64_t run_seed) {
  EvalTree tree;
  EvalNode n;
  n.id = 0;
  n.mechanics = {root.name};
  n.added = root.name;
  // The root node's seed doubles as the tree seed from which children derive theirs.
  n.seed = derive_seed(run_seed, {0});
  tree.nodes.push_back(n);
  tree.registry.emplace(root.name, root);
  return tree;
}

double uct_score(const EvalNode& child, int parent_visits, double c) {
  if (child.visits == 0) return std::numeric_limits<double>::infinity();
  return child.mean_value() +
         c * std::sqrt(std::log(static_cast<double>(std::max(parent_visits, 1))) / static_cast<double>(child.visits));
}

int best_child(const EvalTree& tree, int node, double c) {
  const auto& n = tree.node(node);
  int best = -1;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int ch : n.children) {
    const double s = uct_score(tree.node(ch), n.visits, c);
    if (best < 0 || s > best_score) {
      best = ch;
      best_score = s;
    }
  }
  return best;
}

bool expandable(const EvalTree& tree, int node, const ComposerConfig& cfg) {
  const auto& n = tree.node(node);
  return !n.exhausted && static_cast<int>(n.children.size()) < cfg.max_children &&
         static_cast<int>(n.depth()) < cfg.depth_cap;
}

namespace {

bool live(const EvalTree& tree, int node, const ComposerConfig& cfg) {
  if (expandable(tree, node, cfg)) return true;
  for (int c : tree.node(node).children) {
    if (live(tree, c, cfg)) return true;
  }
  return false;
}

}  // namespace

int select_node(const EvalTree& tree, const ComposerConfig& cfg) {
  int cur = tree.root;
  if (!live(tree, cur, cfg)) return -1;
  while (!expandable(tree, cur, cfg)) {
    const auto& n = tree.node(cur);
    int best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int ch : n.children) {
      if (!live(tree, ch, cfg)) continue;
      const double s = uct_score(tree.node(ch), n.visits, cfg.exploration);
      if (best < 0 || s > best_score) {
        best = ch;
        best_score = s;
      }
    }
    cur = best;
  }
  return cur;
}

std::optional<int> expand_node(EvalTree& tree, int node, const ExpansionSources& sources, const ComposerConfig& cfg,
                               Rng& rng) {
  if (sources.novel && rng.chance(cfg.novel_prob)) {
    const auto context = tree.specs_of(tree.node(node));
    for (int attempt = 0; attempt < cfg.novel_attempts; ++attempt) {
      auto r = sources.novel->generate({gen::OperatorKind::Compatibility, context}, rng);
      if (!r.ok() || contains(tree.node(node).mechanics, r.spec->name)) continue;
      if (sources.accept && !sources.accept(*r.spec)) continue;
      return add_child(tree, node, *r.spec);
    }
  }
  auto cands = archive_candidates(tree, node, sources);
  if (cands.empty()) {
    tree.node(node).exhausted = true;
    return std::nullopt;
  }
  return add_child(tree, node, *cands[rng.below(cands.size())]);
}

double backup_value(const std::optional<double>& tau) noexcept { return tau ? (*tau + 1.0) / 2.0 : 0.0; }

Evaluation reevaluate(const EvalTree& tree, int node, GameEvaluator& evaluator, InitMode init) {
  const auto& n = tree.node(node);
  try {
    return evaluator.evaluate(compose_game(tree.specs_of(n), n.seed, init), n.seed);
  } catch (const Error& e) {
    return {std::nullopt, e.what()};
  }
}

Evaluation evaluate_and_backprop(EvalTree& tree, int node, GameEvaluator& evaluator, InitMode init) {
  Evaluation ev = reevaluate(tree, node, evaluator, init);
  auto& n = tree.node(node);
  n.tau = ev.tau;
  n.evaluated = true;
  const double v = backup_value(ev.tau);
  for (int cur = node; cur >= 0; cur = tree.node(cur).parent) {
    tree.node(cur).visits += 1;
    tree.node(cur).value_sum += v;
  }
  return ev;
}

EvalTree build_tree(const MechanicSpec& root, const ExpansionSources& sources, GameEvaluator& evaluator,
                    const ComposerConfig& cfg, std::uint64_t run_seed) {
  EvalTree tree = new_tree(root, run_seed);
  evaluate_and_backprop(tree, tree.root, evaluator, cfg.init);
  Rng rng(derive_seed(run_seed, {1}));
  for (int it = 0; it < cfg.iterations; ++it) {
    tree.iterations_used = it + 1;
    const int sel = select_node(tree, cfg);
    if (sel < 0) break;
    auto child = expand_node(tree, sel, sources, cfg, rng);
    if (!child) continue;
    evaluate_and_backprop(tree, *child, evaluator, cfg.init);
  }
  return tree;
}

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::EvalMcts: return "eval-mcts";
    case Strategy::Random: return "random";
    case Strategy::Greedy: return "greedy";
    case Strategy::External: return "external";
  }
  return "eval-mcts";
}

std::optional<Strategy> strategy_from(std::string_view s) noexcept {
  for (auto k : {Strategy::EvalMcts, Strategy::Random, Strategy::Greedy, Strategy::External}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

EvalTree run_strategy(Strategy strategy, const MechanicSpec& root, const StrategyInputs& inputs,
                      GameEvaluator& evaluator, const ComposerConfig& cfg, std::uint64_t run_seed) {
  if (strategy == Strategy::EvalMcts) return build_tree(root, inputs.sources, evaluator, cfg, run_seed);
  if (strategy == Strategy::External) {
    if (!inputs.external || !inputs.external->configured() || !inputs.transport) {
      throw ConfigError("external strategy needs a configured generator endpoint");
    }
    inputs.external->validate();
  }
  EvalTree tree = new_tree(root, run_seed);
  evaluate_and_backprop(tree, tree.root, evaluator, cfg.init);
  Rng rng(derive_seed(run_seed, {2}));
  int cur = tree.root;
  while (static_cast<int>(tree.node(cur).depth()) < cfg.depth_cap) {
    tree.iterations_used += 1;
    auto cands = archive_candidates(tree, cur, inputs.sources);
    if (cands.empty()) break;
    const MechanicSpec* pick = nullptr;
    switch (strategy) {
      case Strategy::Random: pick = cands[rng.below(cands.size())]; break;
      case Strategy::Greedy: {
        auto fit = [&](const MechanicSpec* m) {
          auto it = inputs.fitness.find(m->name);
          return it == inputs.fitness.end() ? -std::numeric_limits<double>::infinity() : it->second;
        };
        pick = cands.front();
        for (const auto* m : cands) {
          if (fit(m) > fit(pick) || (fit(m) == fit(pick) && m->name < pick->name)) pick = m;
        }
        break;
      }
      case Strategy::External: {
        std::vector<MechanicSpec> options;
        for (const auto* m : cands) options.push_back(*m);
        auto ranked = gen::external_rank(options, tree.specs_of(tree.node(cur)), *inputs.external, *inputs.transport);
        // An unusable reply falls back to a uniform choice.
        pick = ranked.choice ? cands[*ranked.choice] : cands[rng.below(cands.size())];
        break;
      }
      case Strategy::EvalMcts: break;
    }
    cur = add_child(tree, cur, *pick);
    evaluate_and_backprop(tree, cur, evaluator, cfg.init);
  }
  return tree;
}

}  // namespace mortar::composer
