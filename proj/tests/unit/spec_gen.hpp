#pragma once

// Random structurally valid mechanics for property tests. Independent of the
// rule-based operators in the generator module.

#include <string>

#include "mortar/core/rng.hpp"
#include "mortar/dsl/mechanic.hpp"

namespace mortar::testing {

inline char random_tile(Rng& rng) {
  static constexpr char kTiles[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZ@#&";
  char c = kTiles[rng.below(sizeof(kTiles) - 1)];
  return c == '@' ? 'O' : c;
}

inline dsl::Arg random_arg(Rng& rng, dsl::ArgType t, const dsl::MechanicSpec& m) {
  using dsl::Arg;
  auto param_of = [&](dsl::ArgKind k) -> std::string {
    for (const auto& p : m.params) {
      if (p.value.kind == k && rng.chance(0.5)) return p.name;
    }
    return {};
  };
  switch (t) {
    case dsl::ArgType::Int: {
      if (auto p = param_of(dsl::ArgKind::Int); !p.empty()) return Arg::param(p);
      return Arg::integer(static_cast<std::int64_t>(rng.below(7)) - 3);
    }
    case dsl::ArgType::Tile:
      if (auto p = param_of(dsl::ArgKind::Tile); !p.empty()) return Arg::param(p);
      return Arg::tile_literal(random_tile(rng));
    case dsl::ArgType::TileOrClass: {
      static const char* kClasses[] = {"walkable", "enemy", "interactive", "npc", "collectible"};
      if (rng.chance(0.3)) return Arg::keyword(kClasses[rng.below(5)]);
      return Arg::tile_literal(random_tile(rng));
    }
    case dsl::ArgType::Name: {
      static const char* kNames[] = {"picked", "hp", "coins", "steps_left"};
      return Arg::keyword(kNames[rng.below(4)]);
    }
    case dsl::ArgType::CmpOp: {
      static const char* kOps[] = {"<", "<=", "==", "!=", ">=", ">"};
      return Arg::keyword(kOps[rng.below(6)]);
    }
    case dsl::ArgType::Direction: {
      static const char* kDirs[] = {"up", "down", "left", "right", "away", "toward", "random", "action"};
      return Arg::keyword(kDirs[rng.below(8)]);
    }
    case dsl::ArgType::Where: return Arg::keyword(rng.chance(0.5) ? "target" : "beyond");
    case dsl::ArgType::Who: return Arg::keyword(rng.chance(0.5) ? "target" : "player");
    case dsl::ArgType::Entity:
      return rng.chance(0.5) ? Arg::keyword("player") : Arg::tile_literal(random_tile(rng));
  }
  return Arg{};
}

template <typename Kind>
std::vector<dsl::Arg> random_args(Rng& rng, Kind k, const dsl::MechanicSpec& m) {
  std::vector<dsl::Arg> args;
  for (auto t : dsl::signature(k).slots) args.push_back(random_arg(rng, t, m));
  return args;
}

inline dsl::MechanicSpec random_spec(Rng& rng) {
  using namespace dsl;
  MechanicSpec m;
  m.name = "gen_" + std::to_string(rng.below(100000));
  m.trigger = rng.chance(0.7) ? Trigger::PlayerAction : Trigger::PerStep;
  const auto n_params = rng.below(4);
  for (std::uint64_t i = 0; i < n_params; ++i) {
    ParamBinding p{"p" + std::to_string(i), rng.chance(0.5) ? Arg::integer(static_cast<std::int64_t>(rng.below(9)) - 4)
                                                            : Arg::tile_literal(random_tile(rng))};
    m.params.push_back(p);
  }
  m.selector.kind = static_cast<SelectorKind>(rng.below(7));
  m.selector.args = random_args(rng, m.selector.kind, m);
  if (m.selector.kind == SelectorKind::Adjacent4 || m.selector.kind == SelectorKind::Adjacent8) {
    m.selector.args = {Arg::integer(1 + static_cast<std::int64_t>(rng.below(3)))};
  }
  if (m.selector.kind == SelectorKind::LineOf) {
    m.selector.args = {Arg::integer(static_cast<std::int64_t>(rng.below(3)) - 1),
                       Arg::integer(static_cast<std::int64_t>(rng.below(3)) - 1),
                       Arg::integer(1 + static_cast<std::int64_t>(rng.below(5)))};
  }
  m.selector.pick = static_cast<PickMode>(rng.below(3));
  const auto n_conds = rng.below(3);
  for (std::uint64_t i = 0; i < n_conds; ++i) {
    Condition c{static_cast<ConditionKind>(rng.below(4)), {}};
    c.args = random_args(rng, c.kind, m);
    m.conditions.push_back(c);
  }
  const auto n_outcomes = 1 + rng.below(3);
  for (std::uint64_t o = 0; o < n_outcomes; ++o) {
    Outcome out;
    if (rng.chance(0.3)) {
      Condition g{ConditionKind::CounterCmp, {}};
      g.args = random_args(rng, g.kind, m);
      out.guards.push_back(g);
    }
    const auto n_eff = 1 + rng.below(3);
    bool reward = false;
    for (std::uint64_t i = 0; i < n_eff; ++i) {
      auto k = static_cast<EffectKind>(rng.below(10));
      if (k == EffectKind::EmitReward) {
        if (reward) k = EffectKind::Despawn;
        reward = true;
      }
      Effect e{k, random_args(rng, k, m)};
      out.effects.push_back(e);
    }
    m.outcomes.push_back(out);
  }
  return m;
}

}  // namespace mortar::testing
