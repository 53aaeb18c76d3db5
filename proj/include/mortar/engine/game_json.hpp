#pragma once

#include <json.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "mortar/engine/game.hpp"

namespace mortar::engine {

inline constexpr std::string_view kGameSchema = "mortargame/1";

// {schema, name, map_rows, legend:{char:{class,sprite_id}}, mechanics:[DSL],
//  action_map, win:{kind,params}, max_steps, rng_seed}
nlohmann::json game_to_json(const GameDef& def);

// Throws SchemaError naming the offending field.
GameDef game_from_json(const nlohmann::json& j);

std::string dump_game(const GameDef& def);
GameDef parse_game(std::string_view text);
GameDef load_game_file(const std::string& path);
void save_game_file(const GameDef& def, const std::string& path);

struct TraceRecord {
  int step = 0;  // 1-based step index after the action
  int action = 0;
  double reward = 0.0;
  bool done = false;
  std::uint64_t digest = 0;
  bool operator==(const TraceRecord&) const = default;
};

// One JSON object per line: {step, action, reward, done, digest:hex16}.
std::string trace_line(const TraceRecord& r);
TraceRecord parse_trace_line(std::string_view line);
std::vector<TraceRecord> parse_trace(std::string_view text);

// Plays `actions` from the initial state, stopping early when the episode
// ends.
std::vector<TraceRecord> record_trace(const Game& game, const std::vector<int>& actions);

}  // namespace mortar::engine
