#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mortar::dsl {

// A mechanic is one rule of a grid game:
//
//   mechanic <name>
//     trigger player-action | per-step
//     let <param> = <int | tile>          (zero or more)
//     select <selector> pick first|random|all
//     when <condition>                    (zero or more; filter candidates)
//     outcome                             (one or more)
//       when <condition>                  (guards, optional)
//       do <effect>                       (one or more)
//   end
//
// Candidate cells come from the selector, are filtered by the top-level
// conditions and by "some outcome's guards hold", then `pick` chooses which
// survivors the first matching outcome is applied to.

enum class Trigger { PlayerAction, PerStep };

enum class SelectorKind {
  Self,
  Adjacent4,
  Adjacent8,
  AllOfClass,
  NearestOfClass,
  RandomWalkableNonadjacent,
  LineOf,
};

enum class PickMode { First, Random, All };

enum class ConditionKind { TileIs, InBounds, CounterCmp, DistanceCmp };

enum class EffectKind {
  MoveEntity,
  SetTile,
  ClearTile,
  SwapWith,
  Spawn,
  Despawn,
  CounterAdd,
  EmitReward,
  Damage,
  Teleport,
};

// Argument slot types, fixed per node kind.
enum class ArgType {
  Int,        // integer literal or int param
  Tile,       // tile literal or tile param
  TileOrClass,// tile literal, tile param, or a tile-class keyword
  Name,       // counter name
  CmpOp,      // < <= == != >= >
  Direction,  // up down left right away toward random action
  Where,      // target | beyond
  Who,        // target | player
  Entity,     // player | tile literal
};

enum class ArgKind { Int, Tile, Keyword, Param };

struct Arg {
  ArgKind kind = ArgKind::Int;
  std::int64_t number = 0;
  char tile = 0;
  std::string text;  // keyword, param name, counter name, operator

  static Arg integer(std::int64_t v) { return {ArgKind::Int, v, 0, {}}; }
  static Arg tile_literal(char c) { return {ArgKind::Tile, 0, c, {}}; }
  static Arg keyword(std::string w) { return {ArgKind::Keyword, 0, 0, std::move(w)}; }
  static Arg param(std::string p) { return {ArgKind::Param, 0, 0, std::move(p)}; }

  bool operator==(const Arg&) const = default;
};

struct Selector {
  SelectorKind kind = SelectorKind::Self;
  std::vector<Arg> args;
  PickMode pick = PickMode::First;
  bool operator==(const Selector&) const = default;
};

struct Condition {
  ConditionKind kind = ConditionKind::InBounds;
  std::vector<Arg> args;
  bool operator==(const Condition&) const = default;
};

struct Effect {
  EffectKind kind = EffectKind::EmitReward;
  std::vector<Arg> args;
  bool operator==(const Effect&) const = default;
};

struct Outcome {
  std::vector<Condition> guards;
  std::vector<Effect> effects;
  bool operator==(const Outcome&) const = default;
};

struct ParamBinding {
  std::string name;
  Arg value;  // Int or Tile
  bool operator==(const ParamBinding&) const = default;
};

struct MechanicSpec {
  std::string name;
  Trigger trigger = Trigger::PlayerAction;
  std::vector<ParamBinding> params;
  Selector selector;
  std::vector<Condition> conditions;
  std::vector<Outcome> outcomes;

  std::size_t effect_count() const noexcept;
  std::size_t condition_count() const noexcept;  // top-level + guards
  std::vector<const Effect*> all_effects() const;

  bool operator==(const MechanicSpec&) const = default;
};

// Structural limits enforced by validation and respected by the operators.
inline constexpr std::size_t kMaxEffects = 10;
inline constexpr std::size_t kMaxConditions = 8;
inline constexpr std::size_t kMaxParams = 8;
inline constexpr std::size_t kMaxOutcomes = 4;

// Keyword/operator spellings.
std::string_view to_string(Trigger t) noexcept;
std::string_view to_string(SelectorKind k) noexcept;
std::string_view to_string(PickMode p) noexcept;
std::string_view to_string(ConditionKind k) noexcept;
std::string_view to_string(EffectKind k) noexcept;

std::optional<Trigger> trigger_from(std::string_view s) noexcept;
std::optional<SelectorKind> selector_from(std::string_view s) noexcept;
std::optional<PickMode> pick_from(std::string_view s) noexcept;
std::optional<ConditionKind> condition_from(std::string_view s) noexcept;
std::optional<EffectKind> effect_from(std::string_view s) noexcept;

// Argument signatures. `required` leading slots are mandatory; the rest are
// optional and take their defaults when omitted.
struct Signature {
  std::vector<ArgType> slots;
  std::size_t required = 0;
};
const Signature& signature(SelectorKind k);
const Signature& signature(ConditionKind k);
const Signature& signature(EffectKind k);

// Default argument for an optional slot (used by the parser and printer).
Arg default_arg(SelectorKind k, std::size_t slot);
Arg default_arg(ConditionKind k, std::size_t slot);

bool is_tile_literal(char c) noexcept;
bool is_snake_case(std::string_view s) noexcept;
bool is_tile_class_keyword(std::string_view s) noexcept;

}  // namespace mortar::dsl
