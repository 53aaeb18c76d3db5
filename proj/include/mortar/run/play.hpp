#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "mortar/engine/game_json.hpp"

namespace mortar::run {

// w/s/a/d move up/down/left/right, 1-9 fire mechanic actions 4.., '.' or
// space waits. Other keys map to nothing.
std::optional<int> key_action(char key, const engine::Game& game);

struct PlaySession {
  std::vector<int> actions;
  std::vector<engine::TraceRecord> trace;
  bool won = false;
  bool finished = false;  // the episode ended before 'q' or end of input
};

// Reads keys from `in` until 'q', end of input or the end of the episode,
// rendering the grid to `out` after every step.
PlaySession play(const engine::Game& game, std::istream& in, std::ostream& out);

}  // namespace mortar::run
