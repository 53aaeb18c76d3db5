#pragma once

#include <string>
#include <vector>

#include "mortar/dsl/mechanic.hpp"

namespace mortar::dsl {

// Every violated structural invariant, in a stable order. Empty means valid.
// Checks: snake_case name, tile alphabet, argument kinds against signatures,
// param references resolve with the right type, at least one outcome, every
// outcome has an effect, at most one emit-reward per outcome, size caps, and
// no spawning of the player tile.
std::vector<std::string> structural_problems(const MechanicSpec& spec);

bool is_valid(const MechanicSpec& spec);

// Copy of `spec` with every param reference replaced by the bound literal.
// Requires a structurally valid spec.
MechanicSpec resolve_params(const MechanicSpec& spec);

// Tile literals referenced anywhere (after param resolution), sorted, unique.
std::vector<char> referenced_tiles(const MechanicSpec& spec);

// Tile-class keywords referenced anywhere, sorted, unique.
std::vector<std::string> referenced_classes(const MechanicSpec& spec);

// Counter names touched by counter-cmp / counter-add, sorted, unique.
std::vector<std::string> referenced_counters(const MechanicSpec& spec);

}  // namespace mortar::dsl
