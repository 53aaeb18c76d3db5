#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mortar/core/error.hpp"
#include "mortar/core/rng.hpp"
#include "mortar/dsl/mechanic.hpp"

namespace mortar::engine {

enum class TileClass { Walkable, NonWalkable, Interactive, Collectible, Npc, Enemy, Player, Extra };

std::string_view to_string(TileClass c) noexcept;
std::optional<TileClass> tile_class_from(std::string_view s) noexcept;

struct TileInfo {
  TileClass cls = TileClass::Extra;
  std::string sprite_id;
  bool operator==(const TileInfo&) const = default;
};

using TileLegend = std::map<char, TileInfo>;

// A..floor, B..wall, O..box, C..coin, #..enemy, &..npc, @..player.
TileLegend standard_legend();

enum class WinKind { CollectAll, DefeatAllEnemies, ReachTile, ScoreAtLeast, SurviveSteps };

std::string_view to_string(WinKind k) noexcept;
std::optional<WinKind> win_kind_from(std::string_view s) noexcept;

struct WinCondition {
  WinKind kind = WinKind::SurviveSteps;
  char tile = 0;       // collect-all, reach-tile
  std::int64_t k = 0;  // score-at-least, survive-steps
  bool operator==(const WinCondition&) const = default;
};

struct GameDef {
  std::string name;
  std::vector<std::string> map_rows;
  TileLegend legend;
  std::vector<dsl::MechanicSpec> mechanics;
  // Mechanic name -> action index. The mechanic bound to 0 owns the four
  // movement actions 0..3; every other player-action mechanic gets 4.. .
  std::map<std::string, int> action_map;
  WinCondition win;
  int max_steps = 200;
  std::uint64_t rng_seed = 0;

  bool operator==(const GameDef&) const = default;
};

inline constexpr int kMoveActions = 4;
inline constexpr int kPlayerHealth = 10;
inline constexpr int kEntityHealth = 1;
inline constexpr double kLossScore = -50.0;

struct Pos {
  int row = 0;
  int col = 0;
  bool operator==(const Pos&) const = default;
  auto operator<=>(const Pos&) const = default;
};

struct Entity {
  Pos pos;
  char tile = 0;
  int health = kEntityHealth;
  bool operator==(const Entity&) const = default;
};

struct Grid {
  int rows = 0;
  int cols = 0;
  std::string cells;  // row-major

  bool in_bounds(Pos p) const noexcept { return p.row >= 0 && p.col >= 0 && p.row < rows && p.col < cols; }
  char at(Pos p) const noexcept { return cells[static_cast<std::size_t>(p.row * cols + p.col)]; }
  char& at(Pos p) noexcept { return cells[static_cast<std::size_t>(p.row * cols + p.col)]; }
  std::vector<std::string> to_rows() const;
  bool operator==(const Grid&) const = default;
};

struct GameState {
  Grid grid;       // visible tiles: base_grid overlaid with entities and '@'
  Grid base_grid;  // floor, walls and items; no player or enemy/npc tiles
  Pos player_pos;
  std::vector<Entity> entities;  // enemy and npc tiles, kept in spawn order
  std::vector<std::pair<std::string, std::int64_t>> counters;  // sorted by name
  int step_count = 0;
  bool done = false;
  bool won = false;
  double score = 0.0;
  int player_health = kPlayerHealth;
  std::uint64_t rng = 0;

  std::int64_t counter(std::string_view name) const noexcept;
  bool operator==(const GameState&) const = default;
};

struct StepOutcome {
  double reward = 0.0;
  bool done = false;
  bool truncated = false;
};

// A GameDef checked against its invariants, with resolved mechanics and the
// lookup tables the interpreter needs. Immutable and shareable.
class Game {
 public:
  explicit Game(GameDef def);

  const GameDef& def() const noexcept { return def_; }
  int action_count() const noexcept { return action_count_; }
  int wait_action() const noexcept { return action_count_ - 1; }
  char floor_tile() const noexcept { return floor_; }
  TileClass class_of(char tile) const noexcept;
  bool in_legend(char tile) const noexcept;

  // Resolved mechanic bound to `action`, or nullptr for wait / unbound moves.
  const dsl::MechanicSpec* action_mechanic(int action) const noexcept;
  const std::vector<const dsl::MechanicSpec*>& per_step() const noexcept { return per_step_; }
  const std::vector<dsl::MechanicSpec>& resolved() const noexcept { return resolved_; }

 private:
  GameDef def_;
  std::vector<dsl::MechanicSpec> resolved_;
  std::vector<const dsl::MechanicSpec*> by_action_;  // indices >= 4
  const dsl::MechanicSpec* movement_ = nullptr;
  std::vector<const dsl::MechanicSpec*> per_step_;
  std::array<std::int8_t, 256> classes_{};
  int action_count_ = 0;
  char floor_ = 'A';
};

// Built-in four-way movement used when no mechanic is bound to action 0.
const dsl::MechanicSpec& builtin_movement();

GameState init_game(const Game& game);

// Applies one action in place. Throws GameError on an illegal action or when
// the episode is over.
StepOutcome step_inplace(GameState& state, const Game& game, int action);

// Value-semantics step.
std::pair<GameState, StepOutcome> step(const GameState& state, const Game& game, int action);

// Runs one mechanic against `state` in place. `action` is the triggering
// action index (used by the `action` direction), -1 for per-step firing.
// Returns the emitted reward.
double interpret_mechanic(GameState& state, const Game& game, const dsl::MechanicSpec& mech, Rng& rng,
                          int action = -1);

bool check_win(const GameState& state, const WinCondition& win, const Game& game);
bool is_lost(const GameState& state) noexcept;

// Strips trailing whitespace, right-pads rows with `fill`; throws GameError
// unless exactly one '@' is present.
std::vector<std::string> normalize_map(const std::vector<std::string>& raw, char fill);

// The 6x11 probe world with move_player only.
GameDef static_test_env();

// Adds (or replaces by name) a mechanic, binding it to the next free action
// if it is player-driven. Tiles it references that are missing from the
// legend are added with class extra.
GameDef install_mechanic(GameDef def, const dsl::MechanicSpec& mech);

// FNV-1a over grid, player position, counters, sorted entities, step count
// and the done flag.
std::uint64_t state_digest(const GameState& state);
std::string digest_hex(std::uint64_t digest);

// Text rendering of the visible grid.
std::string render_state(const GameState& state);

}  // namespace mortar::engine
