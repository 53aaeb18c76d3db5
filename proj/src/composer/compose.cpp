#include <algorithm>
#include <deque>
#include <set>

#include "mortar/composer/composer.hpp"
#include "mortar/dsl/catalog.hpp"
#include "mortar/dsl/validate.hpp"

namespace mortar::composer {

using dsl::EffectKind;
using dsl::MechanicSpec;
using engine::TileClass;
using engine::WinCondition;
using engine::WinKind;

std::string_view to_string(InitMode m) noexcept { return m == InitMode::Sokoban ? "sokoban" : "catalog"; }

std::optional<InitMode> init_mode_from(std::string_view s) noexcept {
  if (s == "catalog") return InitMode::Catalog;
  if (s == "sokoban") return InitMode::Sokoban;
  return std::nullopt;
}

namespace {

bool has_effect(const MechanicSpec& m, EffectKind k) {
  for (const auto* e : m.all_effects()) {
    if (e->kind == k) return true;
  }
  return false;
}

bool references_tile(const MechanicSpec& m, char t) {
  auto tiles = dsl::referenced_tiles(m);
  return std::find(tiles.begin(), tiles.end(), t) != tiles.end();
}

bool references_class(const MechanicSpec& m, const std::string& c) {
  auto classes = dsl::referenced_classes(m);
  return std::find(classes.begin(), classes.end(), c) != classes.end();
}

char class_tile(const std::string& cls) {
  if (cls == "enemy") return '#';
  if (cls == "interactive") return 'O';
  if (cls == "collectible") return 'C';
  if (cls == "npc") return '&';
  return 0;
}

// Tiles that must appear on the map, in a fixed order.
std::vector<char> needed_tiles(const std::vector<MechanicSpec>& mechs, const WinCondition& win) {
  std::set<char> need;
  for (const auto& m : mechs) {
    for (char t : dsl::referenced_tiles(m)) {
      if (t != '@' && t != 'A' && t != 'B') need.insert(t);
    }
    for (const auto& c : dsl::referenced_classes(m)) {
      if (char t = class_tile(c)) need.insert(t);
    }
  }
  if (win.kind == WinKind::ReachTile || win.kind == WinKind::CollectAll) need.insert(win.tile);
  if (win.kind != WinKind::ReachTile) need.erase('G');
  return {need.begin(), need.end()};
}

int copies_of(char t) {
  switch (t) {
    case '#': return 2;
    case 'O': return 3;
    case 'C': return 3;
    case '&': return 1;
    case 'G': return 1;
    default: return 2;
  }
}

using Rows = std::vector<std::string>;

struct Cell {
  int r, c;
};

bool walkable_in(const engine::TileLegend& legend, char t) {
  auto it = legend.find(t);
  return it != legend.end() && it->second.cls == TileClass::Walkable;
}

// BFS distances over walkable cells (and the player) from `start`; -1 unreached.
std::vector<std::vector<int>> distances(const Rows& map, const engine::TileLegend& legend, Cell start) {
  const int R = static_cast<int>(map.size()), C = static_cast<int>(map[0].size());
  std::vector<std::vector<int>> d(R, std::vector<int>(C, -1));
  std::deque<Cell> q{start};
  d[start.r][start.c] = 0;
  constexpr int dr[] = {0, 0, -1, 1}, dc[] = {-1, 1, 0, 0};
  while (!q.empty()) {
    auto [r, c] = q.front();
    q.pop_front();
    for (int k = 0; k < 4; ++k) {
      const int nr = r + dr[k], nc = c + dc[k];
      if (nr < 0 || nc < 0 || nr >= R || nc >= C || d[nr][nc] >= 0) continue;
      if (!walkable_in(legend, map[nr][nc])) continue;
      d[nr][nc] = d[r][c] + 1;
      q.push_back({nr, nc});
    }
  }
  return d;
}

// Every walkable cell reachable from '@', every other non-wall tile next to
// a reachable cell.
bool connected(const Rows& map, const engine::TileLegend& legend) {
  Cell player{-1, -1};
  for (int r = 0; r < static_cast<int>(map.size()); ++r) {
    for (int c = 0; c < static_cast<int>(map[r].size()); ++c) {
      if (map[r][c] == '@') player = {r, c};
    }
  }
  if (player.r < 0) return false;
  const auto d = distances(map, legend, player);
  const int R = static_cast<int>(map.size()), C = static_cast<int>(map[0].size());
  for (int r = 0; r < R; ++r) {
    for (int c = 0; c < C; ++c) {
      const char t = map[r][c];
      if (t == 'B' || t == '@') continue;
      if (walkable_in(legend, t)) {
        if (d[r][c] < 0) return false;
        continue;
      }
      bool touch = false;
      constexpr int dr[] = {0, 0, -1, 1}, dc[] = {-1, 1, 0, 0};
      for (int k = 0; k < 4; ++k) {
        const int nr = r + dr[k], nc = c + dc[k];
        if (nr >= 0 && nc >= 0 && nr < R && nc < C && d[nr][nc] >= 0) touch = true;
      }
      if (!touch) return false;
    }
  }
  return true;
}

std::vector<Cell> floor_cells(const Rows& map) {
  std::vector<Cell> out;
  for (int r = 0; r < static_cast<int>(map.size()); ++r) {
    for (int c = 0; c < static_cast<int>(map[r].size()); ++c) {
      if (map[r][c] == 'A') out.push_back({r, c});
    }
  }
  return out;
}

// Walled room with scattered interior walls; unreachable pockets are filled.
std::optional<Rows> random_room(Rng& rng, const engine::TileLegend& legend) {
  const int R = 7 + static_cast<int>(rng.below(3));
  const int C = 9 + static_cast<int>(rng.below(5));
  Rows map(static_cast<std::size_t>(R), std::string(static_cast<std::size_t>(C), 'A'));
  for (int r = 0; r < R; ++r) {
    for (int c = 0; c < C; ++c) {
      if (r == 0 || c == 0 || r == R - 1 || c == C - 1) map[r][c] = 'B';
    }
  }
  const double density = 0.08 + 0.1 * rng.unit();
  for (int r = 1; r < R - 1; ++r) {
    for (int c = 1; c < C - 1; ++c) {
      if (rng.chance(density)) map[r][c] = 'B';
    }
  }
  auto free = floor_cells(map);
  if (free.empty()) return std::nullopt;
  const Cell start = free[rng.below(free.size())];
  map[start.r][start.c] = '@';
  const auto d = distances(map, legend, start);
  int reached = 0;
  for (const auto& f : free) reached += d[f.r][f.c] >= 0 ? 1 : 0;
  if (reached * 2 < static_cast<int>(free.size())) return std::nullopt;
  for (const auto& f : free) {
    if (d[f.r][f.c] < 0) map[f.r][f.c] = 'B';
  }
  return map;
}

bool place(Rows& map, const std::vector<char>& tiles, const WinCondition& win, Rng& rng,
           const engine::TileLegend& legend) {
  Cell player{0, 0};
  for (int r = 0; r < static_cast<int>(map.size()); ++r) {
    for (int c = 0; c < static_cast<int>(map[r].size()); ++c) {
      if (map[r][c] == '@') player = {r, c};
    }
  }
  for (char t : tiles) {
    int want = copies_of(t);
    for (const auto& row : map) want -= static_cast<int>(std::count(row.begin(), row.end(), t));
    for (int k = 0; k < want; ++k) {
      auto free = floor_cells(map);
      if (free.empty()) return false;
      Cell at;
      if (t == 'G' && win.kind == WinKind::ReachTile) {
        // Goal on the farthest reachable floor cell.
        const auto d = distances(map, legend, player);
        at = free.front();
        int best = -1;
        for (const auto& f : free) {
          if (d[f.r][f.c] > best) {
            best = d[f.r][f.c];
            at = f;
          }
        }
      } else {
        at = free[rng.below(free.size())];
      }
      map[at.r][at.c] = t;
    }
  }
  return connected(map, legend);
}

}  // namespace

WinCondition choose_win(const std::vector<MechanicSpec>& mechanics) {
  for (const auto& m : mechanics) {
    const bool targets_enemy = references_tile(m, '#') || references_class(m, "enemy");
    const bool removes = has_effect(m, EffectKind::Despawn) || has_effect(m, EffectKind::Damage);
    if (targets_enemy && removes) return {WinKind::DefeatAllEnemies, 0, 0};
  }
  for (const auto& m : mechanics) {
    if (!has_effect(m, EffectKind::ClearTile) && !has_effect(m, EffectKind::Despawn)) continue;
    for (char t : dsl::referenced_tiles(m)) {
      if (t != '@' && t != 'A' && t != 'B' && t != 'G' && t != '#') return {WinKind::CollectAll, t, 0};
    }
    for (const auto& c : dsl::referenced_classes(m)) {
      if (c == "interactive" || c == "collectible") return {WinKind::CollectAll, class_tile(c), 0};
    }
  }
  return {WinKind::ReachTile, 'G', 0};
}

const std::vector<std::string>& sokoban_layout() {
  static const std::vector<std::string> layout = {
      "BBBBBBBBBB",
      "BAAAABAAAB",
      "BA@AOAAOAB",
      "BAABBBAAAB",
      "BAOAAAAGAB",
      "BAAAABAAAB",
      "BBBBBBBBBB",
  };
  return layout;
}

engine::GameDef compose_game(const std::vector<MechanicSpec>& mechanics, std::uint64_t seed, InitMode init) {
  if (mechanics.empty()) throw ComposeError("compose_game needs at least one mechanic");
  engine::GameDef def;
  const std::string root = mechanics.front().name;
  const bool has_move = std::any_of(mechanics.begin(), mechanics.end(), [](const auto& m) { return m.name == "move_player"; });
  if (!has_move) def.mechanics.push_back(dsl::seed_mechanic("move_player"));
  for (const auto& m : mechanics) def.mechanics.push_back(m);
  def.legend = engine::standard_legend();
  int next = engine::kMoveActions;
  for (const auto& m : def.mechanics) {
    if (m.trigger != dsl::Trigger::PlayerAction) continue;
    def.action_map[m.name] = m.name == "move_player" ? 0 : next++;
  }
  for (const auto& m : def.mechanics) {
    for (char t : dsl::referenced_tiles(m)) {
      if (!def.legend.count(t)) def.legend[t] = {TileClass::Extra, std::string("extra_") + t};
    }
  }
  def.win = choose_win(def.mechanics);
  const auto tiles = needed_tiles(def.mechanics, def.win);

  Rng rng(derive_seed(seed, {0x6d6170}));
  std::optional<Rows> map;
  for (int attempt = 0; attempt < kMapAttempts && !map; ++attempt) {
    std::optional<Rows> base = init == InitMode::Sokoban ? std::optional<Rows>(sokoban_layout()) : random_room(rng, def.legend);
    if (!base) continue;
    if (place(*base, tiles, def.win, rng, def.legend)) map = std::move(base);
  }
  if (!map) throw ComposeError("no connected map after " + std::to_string(kMapAttempts) + " attempts");
  def.map_rows = engine::normalize_map(*map, 'A');
  def.max_steps = kComposedMaxSteps;
  def.rng_seed = seed;
  def.name = std::string(engine::to_string(def.win.kind)) + "-" + root + "-" + std::to_string(seed);
  return def;
}

}  // namespace mortar::composer
