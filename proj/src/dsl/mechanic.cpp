#include "mortar/dsl/mechanic.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace mortar::dsl {
namespace {

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::pair<E, std::string_view>, N>& table,
                        std::string_view s) noexcept {
  for (const auto& [e, name] : table) {
    if (name == s) return e;
  }
  return std::nullopt;
}

template <typename E, std::size_t N>
std::string_view name_of(const std::array<std::pair<E, std::string_view>, N>& table, E e) noexcept {
  for (const auto& [k, name] : table) {
    if (k == e) return name;
  }
  return "?";
}

constexpr std::array<std::pair<Trigger, std::string_view>, 2> kTriggers{{
    {Trigger::PlayerAction, "player-action"},
    {Trigger::PerStep, "per-step"},
}};

constexpr std::array<std::pair<SelectorKind, std::string_view>, 7> kSelectors{{
    {SelectorKind::Self, "self"},
    {SelectorKind::Adjacent4, "adjacent-4"},
    {SelectorKind::Adjacent8, "adjacent-8"},
    {SelectorKind::AllOfClass, "all-of-class"},
    {SelectorKind::NearestOfClass, "nearest-of-class"},
    {SelectorKind::RandomWalkableNonadjacent, "random-walkable-nonadjacent"},
    {SelectorKind::LineOf, "line-of"},
}};

constexpr std::array<std::pair<PickMode, std::string_view>, 3> kPicks{{
    {PickMode::First, "first"},
    {PickMode::Random, "random"},
    {PickMode::All, "all"},
}};

constexpr std::array<std::pair<ConditionKind, std::string_view>, 4> kConditions{{
    {ConditionKind::TileIs, "tile-is"},
    {ConditionKind::InBounds, "in-bounds"},
    {ConditionKind::CounterCmp, "counter-cmp"},
    {ConditionKind::DistanceCmp, "distance-cmp"},
}};

constexpr std::array<std::pair<EffectKind, std::string_view>, 10> kEffects{{
    {EffectKind::MoveEntity, "move-entity"},
    {EffectKind::SetTile, "set-tile"},
    {EffectKind::ClearTile, "clear-tile"},
    {EffectKind::SwapWith, "swap-with"},
    {EffectKind::Spawn, "spawn"},
    {EffectKind::Despawn, "despawn"},
    {EffectKind::CounterAdd, "counter-add"},
    {EffectKind::EmitReward, "emit-reward"},
    {EffectKind::Damage, "damage"},
    {EffectKind::Teleport, "teleport"},
}};

constexpr std::array<std::string_view, 8> kTileClasses{
    "walkable", "non-walkable", "interactive", "collectible", "npc", "enemy", "player", "extra"};

}  // namespace

std::size_t MechanicSpec::effect_count() const noexcept {
  std::size_t n = 0;
  for (const auto& o : outcomes) n += o.effects.size();
  return n;
}

std::size_t MechanicSpec::condition_count() const noexcept {
  std::size_t n = conditions.size();
  for (const auto& o : outcomes) n += o.guards.size();
  return n;
}

std::vector<const Effect*> MechanicSpec::all_effects() const {
  std::vector<const Effect*> out;
  for (const auto& o : outcomes) {
    for (const auto& e : o.effects) out.push_back(&e);
  }
  return out;
}

std::string_view to_string(Trigger t) noexcept { return name_of(kTriggers, t); }
std::string_view to_string(SelectorKind k) noexcept { return name_of(kSelectors, k); }
std::string_view to_string(PickMode p) noexcept { return name_of(kPicks, p); }
std::string_view to_string(ConditionKind k) noexcept { return name_of(kConditions, k); }
std::string_view to_string(EffectKind k) noexcept { return name_of(kEffects, k); }

std::optional<Trigger> trigger_from(std::string_view s) noexcept { return lookup(kTriggers, s); }
std::optional<SelectorKind> selector_from(std::string_view s) noexcept { return lookup(kSelectors, s); }
std::optional<PickMode> pick_from(std::string_view s) noexcept { return lookup(kPicks, s); }
std::optional<ConditionKind> condition_from(std::string_view s) noexcept { return lookup(kConditions, s); }
std::optional<EffectKind> effect_from(std::string_view s) noexcept { return lookup(kEffects, s); }

const Signature& signature(SelectorKind k) {
  static const Signature none{};
  static const Signature reach{{ArgType::Int}, 0};
  static const Signature cls{{ArgType::TileOrClass}, 1};
  static const Signature line{{ArgType::Int, ArgType::Int, ArgType::Int}, 3};
  switch (k) {
    case SelectorKind::Adjacent4:
    case SelectorKind::Adjacent8:
      return reach;
    case SelectorKind::AllOfClass:
    case SelectorKind::NearestOfClass:
      return cls;
    case SelectorKind::LineOf:
      return line;
    case SelectorKind::Self:
    case SelectorKind::RandomWalkableNonadjacent:
      break;
  }
  return none;
}

const Signature& signature(ConditionKind k) {
  static const Signature tile_is{{ArgType::TileOrClass, ArgType::Where}, 1};
  static const Signature in_bounds{{ArgType::Where}, 0};
  static const Signature counter{{ArgType::Name, ArgType::CmpOp, ArgType::Int}, 3};
  static const Signature distance{{ArgType::Entity, ArgType::CmpOp, ArgType::Int}, 3};
  switch (k) {
    case ConditionKind::TileIs: return tile_is;
    case ConditionKind::InBounds: return in_bounds;
    case ConditionKind::CounterCmp: return counter;
    case ConditionKind::DistanceCmp: return distance;
  }
  return in_bounds;
}

const Signature& signature(EffectKind k) {
  static const Signature none{};
  static const Signature dir{{ArgType::Direction}, 1};
  static const Signature tile{{ArgType::Tile}, 1};
  static const Signature counter{{ArgType::Name, ArgType::Int}, 2};
  static const Signature amount{{ArgType::Int}, 1};
  static const Signature damage{{ArgType::Who, ArgType::Int}, 2};
  switch (k) {
    case EffectKind::MoveEntity: return dir;
    case EffectKind::SetTile:
    case EffectKind::Spawn:
      return tile;
    case EffectKind::CounterAdd: return counter;
    case EffectKind::EmitReward: return amount;
    case EffectKind::Damage: return damage;
    case EffectKind::ClearTile:
    case EffectKind::SwapWith:
    case EffectKind::Despawn:
    case EffectKind::Teleport:
      break;
  }
  return none;
}

Arg default_arg(SelectorKind k, std::size_t slot) {
  (void)slot;
  if (k == SelectorKind::Adjacent4 || k == SelectorKind::Adjacent8) return Arg::integer(1);
  return Arg{};
}

Arg default_arg(ConditionKind k, std::size_t slot) {
  if ((k == ConditionKind::TileIs && slot == 1) || (k == ConditionKind::InBounds && slot == 0)) {
    return Arg::keyword("target");
  }
  return Arg{};
}

bool is_tile_literal(char c) noexcept {
  return (c >= 'A' && c <= 'Z') || c == '@' || c == '#' || c == '&';
}

bool is_snake_case(std::string_view s) noexcept {
  if (s.empty() || !(s.front() >= 'a' && s.front() <= 'z')) return false;
  if (s.back() == '_') return false;
  char prev = 0;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    if (!ok) return false;
    if (c == '_' && prev == '_') return false;
    prev = c;
  }
  return true;
}

bool is_tile_class_keyword(std::string_view s) noexcept {
  return std::find(kTileClasses.begin(), kTileClasses.end(), s) != kTileClasses.end();
}

}  // namespace mortar::dsl
