#include "mortar/engine/game.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "mortar/dsl/catalog.hpp"
#include "mortar/dsl/text.hpp"
#include "mortar/dsl/validate.hpp"

namespace mortar::engine {
namespace {

constexpr std::array<std::pair<TileClass, std::string_view>, 8> kClassNames{{
    {TileClass::Walkable, "walkable"},
    {TileClass::NonWalkable, "non-walkable"},
    {TileClass::Interactive, "interactive"},
    {TileClass::Collectible, "collectible"},
    {TileClass::Npc, "npc"},
    {TileClass::Enemy, "enemy"},
    {TileClass::Player, "player"},
    {TileClass::Extra, "extra"},
}};

constexpr std::array<std::pair<WinKind, std::string_view>, 5> kWinNames{{
    {WinKind::CollectAll, "collect-all"},
    {WinKind::DefeatAllEnemies, "defeat-all-enemies"},
    {WinKind::ReachTile, "reach-tile"},
    {WinKind::ScoreAtLeast, "score-at-least"},
    {WinKind::SurviveSteps, "survive-steps"},
}};

bool is_entity_class(TileClass c) { return c == TileClass::Enemy || c == TileClass::Npc; }

}  // namespace

std::string_view to_string(TileClass c) noexcept {
  for (const auto& [k, s] : kClassNames) {
    if (k == c) return s;
  }
  return "extra";
}

std::optional<TileClass> tile_class_from(std::string_view s) noexcept {
  for (const auto& [k, n] : kClassNames) {
    if (n == s) return k;
  }
  return std::nullopt;
}

std::string_view to_string(WinKind k) noexcept {
  for (const auto& [w, s] : kWinNames) {
    if (w == k) return s;
  }
  return "survive-steps";
}

std::optional<WinKind> win_kind_from(std::string_view s) noexcept {
  for (const auto& [w, n] : kWinNames) {
    if (n == s) return w;
  }
  return std::nullopt;
}

TileLegend standard_legend() {
  return {
      {'A', {TileClass::Walkable, "floor"}},     {'B', {TileClass::NonWalkable, "wall"}},
      {'G', {TileClass::Walkable, "goal"}},      {'O', {TileClass::Interactive, "box"}},
      {'C', {TileClass::Collectible, "coin"}},   {'#', {TileClass::Enemy, "enemy"}},
      {'&', {TileClass::Npc, "npc"}},            {'@', {TileClass::Player, "player"}},
  };
}

std::vector<std::string> Grid::to_rows() const {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(rows));
  for (int r = 0; r < rows; ++r) out.push_back(cells.substr(static_cast<std::size_t>(r * cols), cols));
  return out;
}

std::int64_t GameState::counter(std::string_view name) const noexcept {
  auto it = std::lower_bound(counters.begin(), counters.end(), name,
                             [](const auto& c, std::string_view n) { return c.first < n; });
  return it != counters.end() && it->first == name ? it->second : 0;
}

const dsl::MechanicSpec& builtin_movement() {
  static const dsl::MechanicSpec m = [] {
    auto r = dsl::resolve_params(dsl::seed_mechanic("move_player"));
    r.params.clear();
    return r;
  }();
  return m;
}

Game::Game(GameDef def) : def_(std::move(def)) {
  classes_.fill(-1);
  const auto& rows = def_.map_rows;
  if (rows.empty() || rows.front().empty()) throw GameError("map is empty");
  int players = 0;
  for (const auto& row : rows) {
    if (row.size() != rows.front().size()) throw GameError("map is not rectangular");
    players += static_cast<int>(std::count(row.begin(), row.end(), '@'));
  }
  if (players != 1) throw GameError("map must contain exactly one '@' (found " + std::to_string(players) + ")");

  int player_classes = 0;
  for (const auto& [ch, info] : def_.legend) {
    classes_[static_cast<unsigned char>(ch)] = static_cast<std::int8_t>(info.cls);
    if (info.cls == TileClass::Player) {
      ++player_classes;
      if (ch != '@') throw GameError("only '@' may have class player");
    }
  }
  if (player_classes != 1) throw GameError("legend must give '@' class player");
  for (const auto& row : rows) {
    for (char c : row) {
      if (!in_legend(c)) throw GameError(std::string("map tile '") + c + "' missing from legend");
    }
  }
  auto floor = std::find_if(def_.legend.begin(), def_.legend.end(),
                            [](const auto& kv) { return kv.second.cls == TileClass::Walkable; });
  if (floor == def_.legend.end()) throw GameError("legend has no walkable tile");
  floor_ = floor->first;

  if (def_.max_steps <= 0) throw GameError("max_steps must be positive");
  if (def_.win.kind == WinKind::CollectAll || def_.win.kind == WinKind::ReachTile) {
    if (!in_legend(def_.win.tile)) throw GameError("win tile missing from legend");
  }

  std::set<std::string> names;
  resolved_.reserve(def_.mechanics.size());
  for (const auto& m : def_.mechanics) {
    auto problems = dsl::structural_problems(m);
    if (!problems.empty()) throw GameError("mechanic '" + m.name + "': " + problems.front());
    if (!names.insert(m.name).second) throw GameError("duplicate mechanic '" + m.name + "'");
    resolved_.push_back(dsl::resolve_params(m));
    resolved_.back().params.clear();
  }

  std::vector<int> indices;
  for (const auto& [name, index] : def_.action_map) {
    auto it = std::find_if(resolved_.begin(), resolved_.end(), [&](const auto& m) { return m.name == name; });
    if (it == resolved_.end()) throw GameError("action_map names unknown mechanic '" + name + "'");
    if (it->trigger != dsl::Trigger::PlayerAction) throw GameError("per-step mechanic '" + name + "' in action_map");
    if (index == 0) {
      if (movement_) throw GameError("two mechanics bound to the movement actions");
      movement_ = &*it;
    } else if (index < kMoveActions) {
      throw GameError("action indices 1..3 belong to movement");
    } else {
      indices.push_back(index);
    }
  }
  std::sort(indices.begin(), indices.end());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] != kMoveActions + static_cast<int>(i)) throw GameError("action indices are not contiguous");
  }
  by_action_.assign(indices.size(), nullptr);
  for (const auto& m : resolved_) {
    if (m.trigger == dsl::Trigger::PerStep) {
      per_step_.push_back(&m);
      continue;
    }
    auto it = def_.action_map.find(m.name);
    if (it == def_.action_map.end()) throw GameError("player-action mechanic '" + m.name + "' has no action");
    if (it->second >= kMoveActions) by_action_[static_cast<std::size_t>(it->second - kMoveActions)] = &m;
  }
  action_count_ = kMoveActions + static_cast<int>(by_action_.size()) + 1;
}

TileClass Game::class_of(char tile) const noexcept {
  auto c = classes_[static_cast<unsigned char>(tile)];
  return c < 0 ? TileClass::Extra : static_cast<TileClass>(c);
}

bool Game::in_legend(char tile) const noexcept { return classes_[static_cast<unsigned char>(tile)] >= 0; }

const dsl::MechanicSpec* Game::action_mechanic(int action) const noexcept {
  if (action >= 0 && action < kMoveActions) return movement_ ? movement_ : &builtin_movement();
  const int i = action - kMoveActions;
  if (i >= 0 && i < static_cast<int>(by_action_.size())) return by_action_[static_cast<std::size_t>(i)];
  return nullptr;
}

GameState init_game(const Game& game) {
  const auto& def = game.def();
  GameState s;
  s.grid.rows = static_cast<int>(def.map_rows.size());
  s.grid.cols = static_cast<int>(def.map_rows.front().size());
  s.base_grid = s.grid;
  for (const auto& row : def.map_rows) s.grid.cells += row;
  s.base_grid.cells = s.grid.cells;
  for (int r = 0; r < s.grid.rows; ++r) {
    for (int c = 0; c < s.grid.cols; ++c) {
      const Pos p{r, c};
      const char t = s.grid.at(p);
      const auto cls = game.class_of(t);
      if (cls == TileClass::Player) {
        s.player_pos = p;
        s.base_grid.at(p) = game.floor_tile();
      } else if (is_entity_class(cls)) {
        s.entities.push_back({p, t, kEntityHealth});
        s.base_grid.at(p) = game.floor_tile();
      }
    }
  }
  std::set<std::string> counters;
  for (const auto& m : def.mechanics) {
    for (auto& n : dsl::referenced_counters(m)) counters.insert(n);
  }
  for (const auto& n : counters) s.counters.emplace_back(n, 0);
  s.rng = def.rng_seed;
  return s;
}

bool is_lost(const GameState& s) noexcept { return s.player_health <= 0 || s.score < kLossScore; }

StepOutcome step_inplace(GameState& s, const Game& game, int action) {
  if (s.done) throw GameError("step on a finished episode");
  if (s.step_count >= game.def().max_steps) throw GameError("step past max_steps");
  if (action < 0 || action >= game.action_count()) {
    throw GameError("action " + std::to_string(action) + " out of range [0, " +
                    std::to_string(game.action_count()) + ")");
  }
  Rng rng(s.rng);
  double reward = 0.0;
  if (const auto* m = game.action_mechanic(action)) reward += interpret_mechanic(s, game, *m, rng, action);
  for (const auto* m : game.per_step()) reward += interpret_mechanic(s, game, *m, rng, -1);
  s.rng = rng.state();
  ++s.step_count;
  s.score += reward;
  StepOutcome out;
  out.reward = reward;
  if (check_win(s, game.def().win, game)) {
    s.done = true;
    s.won = true;
  } else if (is_lost(s)) {
    s.done = true;
  }
  out.done = s.done;
  out.truncated = !s.done && s.step_count == game.def().max_steps;
  return out;
}

std::pair<GameState, StepOutcome> step(const GameState& state, const Game& game, int action) {
  GameState next = state;
  auto out = step_inplace(next, game, action);
  return {std::move(next), out};
}

bool check_win(const GameState& s, const WinCondition& win, const Game& game) {
  switch (win.kind) {
    case WinKind::CollectAll:
      return s.grid.cells.find(win.tile) == std::string::npos;
    case WinKind::DefeatAllEnemies:
      return std::none_of(s.entities.begin(), s.entities.end(),
                          [&](const Entity& e) { return game.class_of(e.tile) == TileClass::Enemy; });
    case WinKind::ReachTile:
      return s.base_grid.at(s.player_pos) == win.tile;
    case WinKind::ScoreAtLeast:
      return s.score >= static_cast<double>(win.k);
    case WinKind::SurviveSteps:
      return s.step_count >= win.k;
  }
  return false;
}

std::vector<std::string> normalize_map(const std::vector<std::string>& raw, char fill) {
  if (raw.empty()) throw GameError("map is empty");
  std::vector<std::string> rows;
  std::size_t width = 0;
  int players = 0;
  for (const auto& r : raw) {
    auto end = r.find_last_not_of(" \t\r\n");
    rows.push_back(end == std::string::npos ? std::string() : r.substr(0, end + 1));
    width = std::max(width, rows.back().size());
    players += static_cast<int>(std::count(rows.back().begin(), rows.back().end(), '@'));
  }
  if (players != 1) throw GameError("map must contain exactly one '@' (found " + std::to_string(players) + ")");
  for (auto& r : rows) r.resize(width, fill);
  return rows;
}

GameDef static_test_env() {
  GameDef def;
  def.name = "static-test-env";
  def.map_rows = {
      "BBBBBBBBBBB",
      "BAAAAAAAAAB",
      "BAAAOAAAAAB",
      "BA#@OAAAAAB",
      "BA#AAAAAAAB",
      "BBBBBBBBBBB",
  };
  def.legend = standard_legend();
  def.mechanics = {dsl::seed_mechanic("move_player")};
  def.action_map = {{"move_player", 0}};
  def.win = {WinKind::SurviveSteps, 0, 100};
  def.max_steps = 100;
  def.rng_seed = 0;
  return def;
}

GameDef install_mechanic(GameDef def, const dsl::MechanicSpec& mech) {
  auto same = std::find_if(def.mechanics.begin(), def.mechanics.end(),
                           [&](const auto& m) { return m.name == mech.name; });
  if (same != def.mechanics.end()) {
    *same = mech;
    if (mech.trigger == dsl::Trigger::PerStep) {
      auto it = def.action_map.find(mech.name);
      if (it != def.action_map.end()) {
        const int removed = it->second;
        def.action_map.erase(it);
        for (auto& [n, i] : def.action_map) {
          if (removed >= kMoveActions && i > removed) --i;
        }
      }
    }
  } else {
    def.mechanics.push_back(mech);
  }
  if (mech.trigger == dsl::Trigger::PlayerAction && !def.action_map.count(mech.name)) {
    int next = kMoveActions;
    for (const auto& [n, i] : def.action_map) next = std::max(next, i + 1);
    def.action_map[mech.name] = next;
  }
  for (char t : dsl::referenced_tiles(mech)) {
    if (!def.legend.count(t)) def.legend[t] = {TileClass::Extra, std::string("extra_") + t};
  }
  return def;
}

namespace {

struct Fnv {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  void byte(std::uint8_t b) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) byte(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i64(std::int64_t v) {
    auto u = static_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) byte(static_cast<std::uint8_t>(u >> (8 * i)));
  }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    for (char c : s) byte(static_cast<std::uint8_t>(c));
  }
};

}  // namespace

// Byte layout, all integers little-endian:
//   u32 rows, u32 cols, grid cells row-major
//   u32 player row, u32 player col
//   u32 n, then per counter (sorted by name): u32 len, name bytes, i64 value
//   u32 n, then per entity sorted by (row, col, tile, health): u32 row, u32 col, tile byte, u32 health
//   u32 step_count, done byte
std::uint64_t state_digest(const GameState& s) {
  Fnv f;
  f.u32(static_cast<std::uint32_t>(s.grid.rows));
  f.u32(static_cast<std::uint32_t>(s.grid.cols));
  for (char c : s.grid.cells) f.byte(static_cast<std::uint8_t>(c));
  f.u32(static_cast<std::uint32_t>(s.player_pos.row));
  f.u32(static_cast<std::uint32_t>(s.player_pos.col));
  f.u32(static_cast<std::uint32_t>(s.counters.size()));
  for (const auto& [name, value] : s.counters) {
    f.str(name);
    f.i64(value);
  }
  auto ents = s.entities;
  std::sort(ents.begin(), ents.end(), [](const Entity& a, const Entity& b) {
    return std::tie(a.pos, a.tile, a.health) < std::tie(b.pos, b.tile, b.health);
  });
  f.u32(static_cast<std::uint32_t>(ents.size()));
  for (const auto& e : ents) {
    f.u32(static_cast<std::uint32_t>(e.pos.row));
    f.u32(static_cast<std::uint32_t>(e.pos.col));
    f.byte(static_cast<std::uint8_t>(e.tile));
    f.u32(static_cast<std::uint32_t>(e.health));
  }
  f.u32(static_cast<std::uint32_t>(s.step_count));
  f.byte(s.done ? 1 : 0);
  return f.h;
}

std::string digest_hex(std::uint64_t d) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(d));
  return buf;
}

std::string render_state(const GameState& s) {
  std::string out;
  for (const auto& row : s.grid.to_rows()) out += row + "\n";
  return out;
}

}  // namespace mortar::engine
