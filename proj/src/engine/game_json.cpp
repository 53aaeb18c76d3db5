#include "mortar/engine/game_json.hpp"

#include "mortar/core/json_io.hpp"
#include "mortar/dsl/text.hpp"

namespace mortar::engine {

using nlohmann::json;

namespace {

using json_io::as_int;
using json_io::as_string;
using json_io::member;

char as_tile(const json& j, const std::string& path) {
  auto s = as_string(j, path);
  if (s.size() != 1) throw SchemaError(path, "expected a single tile character");
  return s[0];
}

}  // namespace

json game_to_json(const GameDef& def) {
  json j;
  j["schema"] = kGameSchema;
  j["name"] = def.name;
  j["map_rows"] = def.map_rows;
  json legend = json::object();
  for (const auto& [ch, info] : def.legend) {
    legend[std::string(1, ch)] = {{"class", to_string(info.cls)}, {"sprite_id", info.sprite_id}};
  }
  j["legend"] = legend;
  json mechs = json::array();
  for (const auto& m : def.mechanics) mechs.push_back(dsl::render_mechanic(m));
  j["mechanics"] = mechs;
  json amap = json::object();
  for (const auto& [name, index] : def.action_map) amap[name] = index;
  j["action_map"] = amap;
  json params = json::object();
  switch (def.win.kind) {
    case WinKind::CollectAll:
    case WinKind::ReachTile:
      params["tile"] = std::string(1, def.win.tile);
      break;
    case WinKind::ScoreAtLeast:
    case WinKind::SurviveSteps:
      params["k"] = def.win.k;
      break;
    case WinKind::DefeatAllEnemies:
      break;
  }
  j["win"] = {{"kind", to_string(def.win.kind)}, {"params", params}};
  j["max_steps"] = def.max_steps;
  j["rng_seed"] = def.rng_seed;
  return j;
}

GameDef game_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("$", "expected an object");
  if (as_string(member(j, "schema", ""), "schema") != kGameSchema) {
    throw SchemaError("schema", "expected \"" + std::string(kGameSchema) + "\"");
  }
  GameDef def;
  def.name = as_string(member(j, "name", ""), "name");

  const auto& rows = member(j, "map_rows", "");
  if (!rows.is_array() || rows.empty()) throw SchemaError("map_rows", "expected a non-empty array");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    def.map_rows.push_back(as_string(rows[i], "map_rows[" + std::to_string(i) + "]"));
  }

  const auto& legend = member(j, "legend", "");
  if (!legend.is_object()) throw SchemaError("legend", "expected an object");
  for (const auto& [key, entry] : legend.items()) {
    const std::string path = "legend." + key;
    if (key.size() != 1) throw SchemaError(path, "legend keys are single characters");
    auto cls_name = as_string(member(entry, "class", path), path + ".class");
    auto cls = tile_class_from(cls_name);
    if (!cls) throw SchemaError(path + ".class", "unknown tile class '" + cls_name + "'");
    def.legend[key[0]] = {*cls, as_string(member(entry, "sprite_id", path), path + ".sprite_id")};
  }

  const auto& mechs = member(j, "mechanics", "");
  if (!mechs.is_array()) throw SchemaError("mechanics", "expected an array");
  for (std::size_t i = 0; i < mechs.size(); ++i) {
    const std::string path = "mechanics[" + std::to_string(i) + "]";
    try {
      def.mechanics.push_back(dsl::parse_mechanic(as_string(mechs[i], path)));
    } catch (const dsl::ParseError& e) {
      throw SchemaError(path, e.what());
    }
  }

  const auto& amap = member(j, "action_map", "");
  if (!amap.is_object()) throw SchemaError("action_map", "expected an object");
  for (const auto& [name, index] : amap.items()) {
    def.action_map[name] = static_cast<int>(as_int(index, "action_map." + name));
  }

  const auto& win = member(j, "win", "");
  auto kind_name = as_string(member(win, "kind", "win"), "win.kind");
  auto kind = win_kind_from(kind_name);
  if (!kind) throw SchemaError("win.kind", "unknown win kind '" + kind_name + "'");
  def.win.kind = *kind;
  const auto& params = member(win, "params", "win");
  switch (def.win.kind) {
    case WinKind::CollectAll:
    case WinKind::ReachTile:
      def.win.tile = as_tile(member(params, "tile", "win.params"), "win.params.tile");
      break;
    case WinKind::ScoreAtLeast:
    case WinKind::SurviveSteps:
      def.win.k = as_int(member(params, "k", "win.params"), "win.params.k");
      break;
    case WinKind::DefeatAllEnemies:
      break;
  }

  def.max_steps = static_cast<int>(as_int(member(j, "max_steps", ""), "max_steps"));
  const auto& seed = member(j, "rng_seed", "");
  if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
    throw SchemaError("rng_seed", "expected a non-negative integer");
  }
  def.rng_seed = seed.get<std::uint64_t>();

  try {
    Game check(def);
  } catch (const GameError& e) {
    throw SchemaError("$", e.what());
  }
  return def;
}

std::string dump_game(const GameDef& def) { return game_to_json(def).dump(2) + "\n"; }

GameDef parse_game(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("invalid JSON: ") + e.what());
  }
  return game_from_json(j);
}

GameDef load_game_file(const std::string& path) {
  return parse_game(json_io::read_file(path));
}

void save_game_file(const GameDef& def, const std::string& path) {
  json_io::write_file(path, dump_game(def));
}

std::string trace_line(const TraceRecord& r) {
  json j;
  j["step"] = r.step;
  j["action"] = r.action;
  j["reward"] = r.reward;
  j["done"] = r.done;
  j["digest"] = digest_hex(r.digest);
  return j.dump();
}

TraceRecord parse_trace_line(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("invalid JSON: ") + e.what());
  }
  TraceRecord r;
  r.step = static_cast<int>(as_int(member(j, "step", ""), "step"));
  r.action = static_cast<int>(as_int(member(j, "action", ""), "action"));
  const auto& reward = member(j, "reward", "");
  if (!reward.is_number()) throw SchemaError("reward", "expected a number");
  r.reward = reward.get<double>();
  const auto& done = member(j, "done", "");
  if (!done.is_boolean()) throw SchemaError("done", "expected a boolean");
  r.done = done.get<bool>();
  auto hex = as_string(member(j, "digest", ""), "digest");
  if (hex.size() != 16 || hex.find_first_not_of("0123456789abcdef") != std::string::npos) {
    throw SchemaError("digest", "expected 16 lowercase hex digits");
  }
  r.digest = std::stoull(hex, nullptr, 16);
  return r;
}

std::vector<TraceRecord> parse_trace(std::string_view text) {
  std::vector<TraceRecord> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) out.push_back(parse_trace_line(line));
    pos = end + 1;
  }
  return out;
}

std::vector<TraceRecord> record_trace(const Game& game, const std::vector<int>& actions) {
  std::vector<TraceRecord> out;
  auto s = init_game(game);
  for (int a : actions) {
    if (s.done || s.step_count >= game.def().max_steps) break;
    auto o = step_inplace(s, game, a);
    out.push_back({s.step_count, a, o.reward, o.done, state_digest(s)});
  }
  return out;
}

}  // namespace mortar::engine
