#pragma once

#include <string_view>
#include <vector>

#include "mortar/dsl/mechanic.hpp"

namespace mortar::dsl {

// The ten initial mechanics, in catalog order: move_player, pick_object,
// hit_enemy, teleport_player, swap_positions, push_object, jump_player,
// drop_object, enemy_move, enemy_hit.
std::vector<MechanicSpec> seed_catalog();

// The catalog as one canonical DSL document.
std::string_view seed_catalog_text();

// Catalog entry by name; throws std::out_of_range when absent.
MechanicSpec seed_mechanic(std::string_view name);

}  // namespace mortar::dsl
