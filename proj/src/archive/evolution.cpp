#include "mortar/archive/evolution.hpp"

#include <algorithm>

#include "mortar/dsl/ast.hpp"

namespace mortar::archive {

using dsl::MechanicSpec;

std::vector<OperatorSlot> plan_operators(const std::vector<MechanicSpec>& batch, const OperatorSchedule& ops,
                                         bool most_similar, Rng& rng) {
  std::vector<MechanicSpec> rest = batch;
  std::vector<OperatorSlot> plan;
  while (!rest.empty()) {
    auto kind = ops.sample(rng);
    if (kind == gen::OperatorKind::DiversityMutation && rest.size() >= 3) {
      plan.push_back({kind, {rest.begin(), rest.begin() + 3}});
      rest.erase(rest.begin(), rest.begin() + 3);
      continue;
    }
    if (kind == gen::OperatorKind::Crossover) {
      std::size_t partner = 0;
      double best = 0.0;
      for (std::size_t j = 1; j < rest.size(); ++j) {
        if (rest[j] == rest[0]) continue;
        const double s = dsl::ast_similarity(rest[0], rest[j]);
        if (partner == 0 || (most_similar ? s > best : s < best)) {
          partner = j;
          best = s;
        }
      }
      if (partner != 0) {
        plan.push_back({kind, {rest[0], rest[partner]}});
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(partner));
        rest.erase(rest.begin());
        continue;
      }
    }
    plan.push_back({gen::OperatorKind::Mutation, {rest.front()}});
    rest.erase(rest.begin());
  }
  return plan;
}

namespace {

composer::StrategyInputs strategy_inputs(const EvolutionContext& ctx, const std::vector<MechanicSpec>& pool,
                                         const Validator& validate) {
  composer::StrategyInputs in;
  in.sources.archive = pool;
  in.sources.novel = ctx.novel;
  in.sources.accept = [validate](const MechanicSpec& m) { return validate(m).pass; };
  for (const auto& e : ctx.archive.elites()) in.fitness[e.mechanic.name] = e.fitness;
  in.external = ctx.external;
  in.transport = ctx.transport;
  return in;
}

// Tree statistics into the metrics row; CITS of every placed mechanic into
// the fitness book and onto matching archive occupants.
void absorb_tree(const composer::EvalTree& tree, EvolutionContext& ctx, RunMetrics& row) {
  for (const auto& n : tree.nodes) {
    if (!n.evaluated) continue;
    ++row.games_attempted;
    if (n.tau) {
      ++row.games_functional;
      row.accumulated_tau += *n.tau;
    }
  }
  const auto report = cits::cits_report(tree);
  for (const auto& [name, r] : report.mechanics) {
    const bool placed = r.root_only || r.contributing_nodes > 0;
    if (!placed) continue;
    ctx.book.record(name, std::max(0.0, r.cits));
    ctx.archive.raise_fitness(name, ctx.book.get(name));
  }
}

Validator validator_of(const EvolutionContext& ctx) {
  if (ctx.validate) return ctx.validate;
  return [](const MechanicSpec& m) { return gen::validate_pipeline(m); };
}

// Renames `m` until no archive occupant carries its name with a different body.
MechanicSpec unique_in(const Archive& archive, MechanicSpec m) {
  const std::string base = m.name;
  for (int k = 2;; ++k) {
    const Elite* e = archive.find(m.name);
    if (!e || e->mechanic == m) return m;
    m.name = base + "_" + std::to_string(k);
  }
}

void finish_row(const Archive& a, RunMetrics& row) {
  row.qd_score = a.qd_score();
  row.elites_count = a.elites_count();
  row.max_cits = a.max_fitness();
  row.mean_cits = a.mean_fitness();
}

}  // namespace

RunMetrics seed_archive(const std::vector<MechanicSpec>& seeds, EvolutionContext& ctx, const EvolutionConfig& cfg,
                        std::uint64_t run_seed) {
  RunMetrics row;
  row.generation = 0;
  const Validator validate = validator_of(ctx);
  std::vector<double> fitness;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    std::vector<MechanicSpec> pool;
    for (std::size_t j = 0; j < seeds.size(); ++j) {
      if (j != i) pool.push_back(seeds[j]);
    }
    ++row.offspring;
    ++row.offspring_valid;
    const auto tree = composer::run_strategy(cfg.strategy, seeds[i], strategy_inputs(ctx, pool, validate),
                                             ctx.evaluator, cfg.composer, derive_seed(run_seed, {0, i}));
    absorb_tree(tree, ctx, row);
    if (ctx.on_tree) ctx.on_tree(tree, 0, static_cast<int>(i));
  }
  for (const auto& m : seeds) {
    const double f = ctx.book.has(m.name) ? ctx.book.get(m.name) : 0.0;
    if (ctx.archive.insert(m, f) != InsertResult::Rejected) ++row.inserted;
  }
  finish_row(ctx.archive, row);
  return row;
}

RunMetrics evolve_generation(int generation, EvolutionContext& ctx, const EvolutionConfig& cfg,
                             std::uint64_t run_seed) {
  RunMetrics row;
  row.generation = generation;
  const Validator validate = validator_of(ctx);
  const auto g = static_cast<std::uint64_t>(generation);
  Rng rng(derive_seed(run_seed, {g, 0x62}));
  const auto batch = ctx.archive.select_batch(cfg.batch_size, rng);
  const auto plan = plan_operators(batch, cfg.operators, cfg.crossover_most_similar, rng);

  for (std::size_t slot = 0; slot < plan.size(); ++slot) {
    Rng op_rng(derive_seed(run_seed, {g, 1, slot}));
    const auto made = ctx.operators.generate({plan[slot].kind, plan[slot].parents}, op_rng);
    ++row.offspring;
    if (!made.ok()) continue;
    const MechanicSpec child = unique_in(ctx.archive, *made.spec);
    if (!validate(child).pass) continue;
    ++row.offspring_valid;

    std::vector<MechanicSpec> pool;
    for (const auto& e : ctx.archive.elites()) {
      if (e.mechanic.name != child.name) pool.push_back(e.mechanic);
    }
    const auto tree = composer::run_strategy(cfg.strategy, child, strategy_inputs(ctx, pool, validate),
                                             ctx.evaluator, cfg.composer, derive_seed(run_seed, {g, 2, slot}));
    absorb_tree(tree, ctx, row);
    if (ctx.on_tree) ctx.on_tree(tree, generation, static_cast<int>(slot));
    const double f = ctx.book.has(child.name) ? ctx.book.get(child.name) : 0.0;
    if (ctx.archive.insert(child, f) != InsertResult::Rejected) ++row.inserted;
  }
  finish_row(ctx.archive, row);
  return row;
}

}  // namespace mortar::archive
