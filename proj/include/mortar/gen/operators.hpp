#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mortar/core/rng.hpp"
#include "mortar/dsl/mechanic.hpp"

namespace mortar::gen {

// Rule-based evolutionary operators over the mechanic DSL. All of them are
// deterministic given the rng state and return structurally valid specs.

// `base` without trailing numeric tokens, plus a suffix hashed from the body.
std::string offspring_name(const std::string& base, const dsl::MechanicSpec& body);

// A random mechanic over the standard tile vocabulary, named after a
// category keyword.
dsl::MechanicSpec synthesize(Rng& rng);

// Inserts one effect, possibly with a fresh param binding or guard.
dsl::MechanicSpec mutate(const dsl::MechanicSpec& m, Rng& rng);

inline constexpr int kDiversityAttempts = 50;
inline constexpr double kDiversityTarget = 0.5;

// Rejection-samples synthesized mechanics; returns the first whose maximum
// AST similarity to the parents is <= 0.5, else the least similar seen.
dsl::MechanicSpec diversity_mutate(const std::vector<dsl::MechanicSpec>& parents, Rng& rng);

// Trigger and selector from one parent (coin flip). Each parent's outcomes
// are kept as guarded branches, with its top-level conditions becoming the
// guards, so both behaviours survive; truncated to the DSL caps.
// Throws Error if a == b.
dsl::MechanicSpec crossover(const dsl::MechanicSpec& a, const dsl::MechanicSpec& b, Rng& rng);

// Vocabulary touched by a set of mechanics: tile literals (player excluded),
// tile-class keywords and counter names.
struct Vocabulary {
  std::vector<char> tiles;
  std::vector<std::string> classes;
  std::vector<std::string> counters;
  bool empty() const noexcept { return tiles.empty() && classes.empty() && counters.empty(); }
};
Vocabulary vocabulary_of(const std::vector<dsl::MechanicSpec>& mechanics);

// A synthesized mechanic referencing at least one element of the context's
// vocabulary. Throws Error on an empty context.
dsl::MechanicSpec compatibility_mutate(const std::vector<dsl::MechanicSpec>& context, Rng& rng);

// Index pairs (i, j), i < j, greedily matched by highest AST similarity.
std::vector<std::pair<std::size_t, std::size_t>> pair_by_similarity(const std::vector<dsl::MechanicSpec>& batch,
                                                                     bool most_similar = true);

}  // namespace mortar::gen
