#include "mortar/gen/operators.hpp"

#include <algorithm>
#include <set>

#include "mortar/core/error.hpp"
#include "mortar/dsl/ast.hpp"
#include "mortar/dsl/descriptors.hpp"
#include "mortar/dsl/text.hpp"
#include "mortar/dsl/validate.hpp"

namespace mortar::gen {

using namespace dsl;

namespace {

constexpr char kTiles[] = {'O', 'C', '#', '&', 'G', 'A', 'B'};
constexpr char kTargetTiles[] = {'O', 'C', '#', '&', 'G'};
const char* const kClasses[] = {"walkable", "enemy", "interactive", "collectible", "npc"};
const char* const kCounters[] = {"picked", "coins", "keys", "energy"};
const char* const kOps[] = {"<", "<=", "==", "!=", ">=", ">"};
const char* const kDirections[] = {"up", "down", "left", "right", "away", "toward", "random", "action"};

template <typename T, std::size_t N>
const T& pick(const T (&arr)[N], Rng& rng) {
  return arr[rng.below(N)];
}

std::int64_t small_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
}

Arg tile_or_class(Rng& rng) {
  if (rng.chance(0.35)) return Arg::keyword(pick(kClasses, rng));
  return Arg::tile_literal(pick(kTargetTiles, rng));
}

std::vector<Arg> effect_args(EffectKind k, Rng& rng) {
  switch (k) {
    case EffectKind::MoveEntity: return {Arg::keyword(pick(kDirections, rng))};
    case EffectKind::SetTile:
    case EffectKind::Spawn: return {Arg::tile_literal(pick(kTiles, rng))};
    case EffectKind::CounterAdd: return {Arg::keyword(pick(kCounters, rng)), Arg::integer(rng.chance(0.8) ? 1 : -1)};
    case EffectKind::EmitReward: return {Arg::integer(rng.chance(0.8) ? 1 : -1)};
    case EffectKind::Damage: return {Arg::keyword(rng.chance(0.7) ? "target" : "player"), Arg::integer(1)};
    case EffectKind::ClearTile:
    case EffectKind::SwapWith:
    case EffectKind::Despawn:
    case EffectKind::Teleport: break;
  }
  return {};
}

Condition random_condition(Rng& rng) {
  const double r = rng.unit();
  if (r < 0.6) return {ConditionKind::TileIs, {tile_or_class(rng), Arg::keyword(rng.chance(0.8) ? "target" : "beyond")}};
  if (r < 0.7) return {ConditionKind::InBounds, {Arg::keyword("beyond")}};
  if (r < 0.85) {
    return {ConditionKind::CounterCmp,
            {Arg::keyword(pick(kCounters, rng)), Arg::keyword(pick(kOps, rng)), Arg::integer(small_int(rng, 0, 3))}};
  }
  Arg who = rng.chance(0.7) ? Arg::keyword("player") : Arg::tile_literal('#');
  return {ConditionKind::DistanceCmp, {who, Arg::keyword(pick(kOps, rng)), Arg::integer(small_int(rng, 1, 3))}};
}

Selector random_selector(Rng& rng) {
  Selector s;
  const double r = rng.unit();
  if (r < 0.35) {
    s.kind = SelectorKind::Adjacent4;
  } else if (r < 0.45) {
    s.kind = SelectorKind::Self;
  } else if (r < 0.55) {
    s.kind = SelectorKind::Adjacent8;
  } else if (r < 0.7) {
    s.kind = SelectorKind::AllOfClass;
  } else if (r < 0.8) {
    s.kind = SelectorKind::NearestOfClass;
  } else if (r < 0.9) {
    s.kind = SelectorKind::RandomWalkableNonadjacent;
  } else {
    s.kind = SelectorKind::LineOf;
  }
  switch (s.kind) {
    case SelectorKind::Adjacent4:
    case SelectorKind::Adjacent8: s.args = {Arg::integer(rng.chance(0.8) ? 1 : 2)}; break;
    case SelectorKind::AllOfClass:
    case SelectorKind::NearestOfClass: s.args = {tile_or_class(rng)}; break;
    case SelectorKind::LineOf: {
      std::int64_t dx = 0, dy = 0;
      while (dx == 0 && dy == 0) {
        dx = small_int(rng, -1, 1);
        dy = small_int(rng, -1, 1);
      }
      s.args = {Arg::integer(dx), Arg::integer(dy), Arg::integer(small_int(rng, 1, 4))};
      break;
    }
    case SelectorKind::Self:
    case SelectorKind::RandomWalkableNonadjacent: break;
  }
  s.pick = static_cast<PickMode>(rng.below(3));
  return s;
}

bool has_reward(const Outcome& o) {
  return std::any_of(o.effects.begin(), o.effects.end(), [](const Effect& e) { return e.kind == EffectKind::EmitReward; });
}

Effect random_effect(Rng& rng, bool allow_reward) {
  EffectKind k;
  do {
    k = static_cast<EffectKind>(rng.below(10));
  } while (!allow_reward && k == EffectKind::EmitReward);
  return {k, effect_args(k, rng)};
}

std::string keyword_name(Rng& rng) {
  const auto& cats = CategoryLexicon::standard().categories;
  const auto& cat = cats[rng.below(cats.size())];
  return cat.keywords[rng.below(cat.keywords.size())];
}

std::uint64_t fnv(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

void rename_param_refs(std::vector<Arg>& args, const std::string& from, const std::string& to) {
  for (auto& a : args) {
    if (a.kind == ArgKind::Param && a.text == from) a.text = to;
  }
}

void rename_param(MechanicSpec& m, const std::string& from, const std::string& to) {
  for (auto& p : m.params) {
    if (p.name == from) p.name = to;
  }
  rename_param_refs(m.selector.args, from, to);
  for (auto& c : m.conditions) rename_param_refs(c.args, from, to);
  for (auto& o : m.outcomes) {
    for (auto& g : o.guards) rename_param_refs(g.args, from, to);
    for (auto& e : o.effects) rename_param_refs(e.args, from, to);
  }
}

std::string fresh_param(const MechanicSpec& m, const std::string& stem) {
  for (int k = 1;; ++k) {
    std::string name = stem + std::to_string(k);
    bool taken = false;
    for (const auto& p : m.params) taken |= p.name == name;
    if (!taken) return name;
  }
}

MechanicSpec checked(MechanicSpec m, const char* op) {
  auto problems = structural_problems(m);
  if (!problems.empty()) throw Error(std::string(op) + " produced an invalid mechanic: " + problems.front());
  return m;
}

}  // namespace

std::string offspring_name(const std::string& base, const MechanicSpec& body) {
  std::string stem;
  for (const auto& tok : name_tokens(base)) stem += (stem.empty() ? "" : "_") + tok;
  if (stem.empty() || !is_snake_case(stem)) stem = "mechanic";
  MechanicSpec anon = body;
  anon.name = "x";
  return stem + "_" + std::to_string(fnv(render_mechanic(anon)) % 100000);
}

MechanicSpec synthesize(Rng& rng) {
  for (;;) {
    MechanicSpec m;
    m.trigger = rng.chance(0.8) ? Trigger::PlayerAction : Trigger::PerStep;
    m.selector = random_selector(rng);
    const auto n_conds = rng.below(3);
    for (std::uint64_t i = 0; i < n_conds; ++i) m.conditions.push_back(random_condition(rng));
    const std::uint64_t n_outcomes = rng.chance(0.25) ? 2 : 1;
    for (std::uint64_t o = 0; o < n_outcomes; ++o) {
      Outcome out;
      if (o > 0 || rng.chance(0.15)) out.guards.push_back(random_condition(rng));
      const auto n_eff = 1 + rng.below(2);
      for (std::uint64_t i = 0; i < n_eff; ++i) out.effects.push_back(random_effect(rng, false));
      if (rng.chance(0.6)) out.effects.push_back({EffectKind::EmitReward, effect_args(EffectKind::EmitReward, rng)});
      m.outcomes.push_back(std::move(out));
    }
    if (rng.chance(0.3) && !m.outcomes.empty()) {
      // Lift one integer into a param binding.
      for (auto& e : m.outcomes.front().effects) {
        if (e.kind == EffectKind::EmitReward) {
          m.params.push_back({"reward", e.args[0]});
          e.args[0] = Arg::param("reward");
          break;
        }
      }
    }
    m.name = offspring_name(keyword_name(rng), m);
    if (is_valid(m)) return m;
  }
}

MechanicSpec mutate(const MechanicSpec& m, Rng& rng) {
  MechanicSpec out = m;
  if (out.outcomes.empty()) throw Error("mutate requires a mechanic with an outcome");
  if (out.effect_count() < kMaxEffects) {
    auto& o = out.outcomes[rng.below(out.outcomes.size())];
    Effect e = random_effect(rng, !has_reward(o));
    // Optionally bind the effect's integer argument through a fresh param.
    if (out.params.size() < kMaxParams && rng.chance(0.3)) {
      for (auto& a : e.args) {
        if (a.kind == ArgKind::Int) {
          const std::string p = fresh_param(out, "p");
          out.params.push_back({p, a});
          a = Arg::param(p);
          break;
        }
      }
    }
    o.effects.insert(o.effects.begin() + static_cast<std::ptrdiff_t>(rng.below(o.effects.size() + 1)), e);
  } else if (out.params.size() < kMaxParams) {
    const std::string p = fresh_param(out, "p");
    out.params.push_back({p, Arg::integer(small_int(rng, 1, 3))});
  } else if (out.outcomes.size() < kMaxOutcomes) {
    out.outcomes.push_back({{}, {out.outcomes.back().effects.front()}});
  } else {
    throw Error("mechanic is saturated; no insertion possible");
  }
  out.name = offspring_name(m.name, out);
  return checked(std::move(out), "mutate");
}

MechanicSpec diversity_mutate(const std::vector<MechanicSpec>& parents, Rng& rng) {
  if (parents.empty()) throw Error("diversity_mutate requires parents");
  std::vector<std::string> rendered;
  for (const auto& p : parents) rendered.push_back(render_mechanic(p));
  std::optional<MechanicSpec> best;
  double best_sim = 2.0;
  for (int attempt = 0; attempt < kDiversityAttempts; ++attempt) {
    MechanicSpec c = synthesize(rng);
    if (std::find(rendered.begin(), rendered.end(), render_mechanic(c)) != rendered.end()) continue;
    double sim = 0.0;
    for (const auto& p : parents) sim = std::max(sim, ast_similarity(c, p));
    if (sim < best_sim) {
      best_sim = sim;
      best = std::move(c);
    }
    if (best_sim <= kDiversityTarget) break;
  }
  while (!best) {
    MechanicSpec c = synthesize(rng);
    if (std::find(rendered.begin(), rendered.end(), render_mechanic(c)) == rendered.end()) best = std::move(c);
  }
  return *best;
}

MechanicSpec crossover(const MechanicSpec& a, const MechanicSpec& b, Rng& rng) {
  if (a == b) throw Error("crossover requires two distinct parents");
  const bool a_leads = rng.chance(0.5);
  MechanicSpec right = b;
  MechanicSpec out;
  out.trigger = a_leads ? a.trigger : b.trigger;
  out.selector = a_leads ? a.selector : b.selector;
  out.params = a.params;
  // Merge params; clashing names with different values are renamed in b.
  for (const auto& p : b.params) {
    auto same = std::find_if(out.params.begin(), out.params.end(), [&](const auto& q) { return q.name == p.name; });
    if (same == out.params.end()) {
      out.params.push_back(p);
    } else if (!(same->value == p.value)) {
      MechanicSpec probe = out;
      for (const auto& q : right.params) probe.params.push_back(q);
      const std::string fresh = fresh_param(probe, p.name + "_");
      rename_param(right, p.name, fresh);
      out.params.push_back({fresh, p.value});
    }
  }
  if (!a_leads) out.selector = right.selector;
  std::size_t conditions = 0, effects = 0;
  auto absorb = [&](const MechanicSpec& parent) {
    for (const auto& o : parent.outcomes) {
      if (out.outcomes.size() >= kMaxOutcomes) return;
      Outcome merged;
      merged.guards = parent.conditions;
      merged.guards.insert(merged.guards.end(), o.guards.begin(), o.guards.end());
      if (conditions + merged.guards.size() > kMaxConditions) continue;
      for (const auto& e : o.effects) {
        if (effects + merged.effects.size() < kMaxEffects) merged.effects.push_back(e);
      }
      if (merged.effects.empty()) return;
      conditions += merged.guards.size();
      effects += merged.effects.size();
      out.outcomes.push_back(std::move(merged));
    }
  };
  absorb(a);
  absorb(right);
  // Drop params nothing refers to any more.
  std::set<std::string> used;
  auto note = [&](const std::vector<Arg>& args) {
    for (const auto& x : args) {
      if (x.kind == ArgKind::Param) used.insert(x.text);
    }
  };
  note(out.selector.args);
  for (const auto& o : out.outcomes) {
    for (const auto& g : o.guards) note(g.args);
    for (const auto& e : o.effects) note(e.args);
  }
  std::erase_if(out.params, [&](const ParamBinding& p) { return !used.count(p.name); });
  while (out.params.size() > kMaxParams) out.params.pop_back();

  const auto ta = name_tokens(a.name);
  const auto tb = name_tokens(b.name);
  std::string base = ta.empty() ? "mixed" : ta.front();
  if (!tb.empty() && tb.front() != base) base += "_" + tb.front();
  out.name = offspring_name(base, out);
  return checked(std::move(out), "crossover");
}

Vocabulary vocabulary_of(const std::vector<MechanicSpec>& mechanics) {
  std::set<char> tiles;
  std::set<std::string> classes, counters;
  for (const auto& m : mechanics) {
    for (char t : referenced_tiles(m)) {
      if (t != '@') tiles.insert(t);
    }
    for (const auto& c : referenced_classes(m)) classes.insert(c);
    for (const auto& c : referenced_counters(m)) counters.insert(c);
  }
  return {{tiles.begin(), tiles.end()}, {classes.begin(), classes.end()}, {counters.begin(), counters.end()}};
}

MechanicSpec compatibility_mutate(const std::vector<MechanicSpec>& context, Rng& rng) {
  if (context.empty()) throw Error("compatibility_mutate requires a non-empty context");
  Vocabulary vocab = vocabulary_of(context);
  if (vocab.empty()) vocab.classes = {"walkable"};
  const std::size_t n = vocab.tiles.size() + vocab.classes.size() + vocab.counters.size();
  for (;;) {
    MechanicSpec m = synthesize(rng);
    const std::size_t k = rng.below(n);
    if (k < vocab.tiles.size() + vocab.classes.size()) {
      const Arg target = k < vocab.tiles.size() ? Arg::tile_literal(vocab.tiles[k])
                                                : Arg::keyword(vocab.classes[k - vocab.tiles.size()]);
      std::erase_if(m.conditions, [](const Condition& c) {
        return c.kind == ConditionKind::TileIs && c.args.size() > 1 && c.args[1].text == "target";
      });
      if (m.condition_count() >= kMaxConditions) m.conditions.clear();
      m.conditions.insert(m.conditions.begin(), {ConditionKind::TileIs, {target, Arg::keyword("target")}});
    } else {
      const std::string& counter = vocab.counters[k - vocab.tiles.size() - vocab.classes.size()];
      if (m.effect_count() >= kMaxEffects) continue;
      m.outcomes.front().effects.push_back({EffectKind::CounterAdd, {Arg::keyword(counter), Arg::integer(1)}});
    }
    m.name = offspring_name(name_tokens(m.name).empty() ? "mechanic" : name_tokens(m.name).front(), m);
    if (is_valid(m)) return m;
  }
}

std::vector<std::pair<std::size_t, std::size_t>> pair_by_similarity(const std::vector<MechanicSpec>& batch,
                                                                     bool most_similar) {
  struct Cand {
    double sim;
    std::size_t i, j;
  };
  std::vector<Cand> cands;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    for (std::size_t j = i + 1; j < batch.size(); ++j) {
      if (batch[i] == batch[j]) continue;
      cands.push_back({ast_similarity(batch[i], batch[j]), i, j});
    }
  }
  std::stable_sort(cands.begin(), cands.end(), [&](const Cand& x, const Cand& y) {
    return most_similar ? x.sim > y.sim : x.sim < y.sim;
  });
  std::vector<bool> used(batch.size(), false);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& c : cands) {
    if (used[c.i] || used[c.j]) continue;
    used[c.i] = used[c.j] = true;
    out.emplace_back(c.i, c.j);
  }
  return out;
}

}  // namespace mortar::gen
