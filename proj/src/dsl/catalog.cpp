#include "mortar/dsl/catalog.hpp"

#include <stdexcept>
#include <string>

#include "mortar/dsl/text.hpp"

namespace mortar::dsl {
namespace {

// Grid offsets are (row, col). adjacent-4 enumerates left, right, up, down.
constexpr std::string_view kCatalog = R"(mechdsl/1
mechanic move_player
  trigger player-action
  let reward = 0
  select self pick first
  outcome
    do move-entity(action)
end
mechanic pick_object
  trigger player-action
  let item = O
  let reward = 1
  select adjacent-4 pick first
  when tile-is(item)
  outcome
    do clear-tile
    do counter-add(picked, 1)
    do emit-reward(reward)
end
mechanic hit_enemy
  trigger player-action
  let reward = 1
  select adjacent-4 pick first
  when tile-is(#)
  outcome
    do despawn
    do emit-reward(reward)
end
mechanic teleport_player
  trigger player-action
  let reward = 1
  select random-walkable-nonadjacent pick random
  outcome
    do teleport
    do emit-reward(reward)
end
mechanic swap_positions
  trigger player-action
  let reward = 1
  select all-of-class(#) pick random
  outcome
    do swap-with
    do emit-reward(reward)
end
mechanic push_object
  trigger player-action
  let item = O
  let reward = 1
  select adjacent-4 pick first
  when tile-is(item)
  when tile-is(walkable, beyond)
  outcome
    do move-entity(away)
    do emit-reward(reward)
end
mechanic jump_player
  trigger player-action
  let reward = 1
  select adjacent-4(2) pick first
  when tile-is(walkable)
  outcome
    do teleport
    do emit-reward(reward)
end
mechanic drop_object
  trigger player-action
  let item = O
  let reward = 1
  select adjacent-4 pick first
  when tile-is(walkable)
  outcome
    do spawn(item)
    do emit-reward(reward)
end
mechanic enemy_move
  trigger per-step
  let reward = 0
  select all-of-class(#) pick random
  outcome
    do move-entity(random)
end
mechanic enemy_hit
  trigger per-step
  let penalty = -1
  select all-of-class(#) pick first
  when distance-cmp(player, ==, 1)
  outcome
    do emit-reward(penalty)
end
)";

}  // namespace

std::string_view seed_catalog_text() { return kCatalog; }

std::vector<MechanicSpec> seed_catalog() {
  static const std::vector<MechanicSpec> catalog = parse_mechanics(kCatalog);
  return catalog;
}

MechanicSpec seed_mechanic(std::string_view name) {
  for (auto& m : seed_catalog()) {
    if (m.name == name) return m;
  }
  throw std::out_of_range("no seed mechanic named '" + std::string(name) + "'");
}

}  // namespace mortar::dsl
