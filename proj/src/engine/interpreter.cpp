#include <algorithm>
#include <cstdlib>

#include "mortar/dsl/validate.hpp"
#include "mortar/engine/game.hpp"

namespace mortar::engine {
namespace {

using dsl::Arg;
using dsl::ArgKind;
using dsl::Condition;
using dsl::ConditionKind;
using dsl::Effect;
using dsl::EffectKind;
using dsl::SelectorKind;

constexpr Pos kMoves[4] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};  // up, down, left, right
constexpr Pos kNoPos{-1 << 20, -1 << 20};

Pos add(Pos a, Pos b) { return {a.row + b.row, a.col + b.col}; }
int manhattan(Pos a, Pos b) { return std::abs(a.row - b.row) + std::abs(a.col - b.col); }
int sign(int v) { return (v > 0) - (v < 0); }

// Unit step from `from` toward `to` along the dominant axis (rows win ties).
Pos axis_step(Pos from, Pos to) {
  const int dr = to.row - from.row;
  const int dc = to.col - from.col;
  if (dr == 0 && dc == 0) return {0, 0};
  if (std::abs(dr) >= std::abs(dc)) return {sign(dr), 0};
  return {0, sign(dc)};
}

bool compare(std::int64_t lhs, const std::string& op, std::int64_t rhs) {
  if (op == "<") return lhs < rhs;
  if (op == "<=") return lhs <= rhs;
  if (op == "==") return lhs == rhs;
  if (op == "!=") return lhs != rhs;
  if (op == ">=") return lhs >= rhs;
  return lhs > rhs;
}

class Run {
 public:
  Run(GameState& s, const Game& g, Rng& rng, int action) : s_(s), g_(g), rng_(rng), action_(action) {}

  double fire(const dsl::MechanicSpec& m) {
    auto cands = candidates(m.selector);
    std::vector<Pos> alive;
    for (Pos t : cands) {
      if (conditions_hold(m.conditions, t) && matching_outcome(m, t)) alive.push_back(t);
    }
    if (alive.empty()) return 0.0;
    std::vector<Pos> picked;
    switch (m.selector.pick) {
      case dsl::PickMode::First: picked = {alive.front()}; break;
      case dsl::PickMode::Random: picked = {alive[rng_.below(alive.size())]}; break;
      case dsl::PickMode::All: picked = std::move(alive); break;
    }
    double reward = 0.0;
    for (Pos t : picked) {
      if (!conditions_hold(m.conditions, t)) continue;
      const auto* o = matching_outcome(m, t);
      if (!o) continue;
      for (const auto& e : o->effects) reward += apply(e, t);
    }
    return reward;
  }

 private:
  GameState& s_;
  const Game& g_;
  Rng& rng_;
  int action_;

  // --- layers -------------------------------------------------------------

  int entity_at(Pos p) const {
    for (std::size_t i = 0; i < s_.entities.size(); ++i) {
      if (s_.entities[i].pos == p) return static_cast<int>(i);
    }
    return -1;
  }

  void refresh(Pos p) {
    if (!s_.grid.in_bounds(p)) return;
    if (p == s_.player_pos) {
      s_.grid.at(p) = '@';
    } else if (int e = entity_at(p); e >= 0) {
      s_.grid.at(p) = s_.entities[static_cast<std::size_t>(e)].tile;
    } else {
      s_.grid.at(p) = s_.base_grid.at(p);
    }
  }

  bool free_cell(Pos p) const { return s_.grid.in_bounds(p) && g_.class_of(s_.grid.at(p)) == TileClass::Walkable; }

  bool is_item(char base) const {
    auto c = g_.class_of(base);
    return c == TileClass::Interactive || c == TileClass::Collectible || c == TileClass::Extra;
  }

  bool matches(char tile, const Arg& a) const {
    if (a.kind == ArgKind::Tile) return tile == a.tile;
    if (a.kind == ArgKind::Keyword) {
      auto cls = tile_class_from(a.text);
      return cls && g_.in_legend(tile) && g_.class_of(tile) == *cls;
    }
    return false;
  }

  void move_player(Pos to) {
    const Pos from = s_.player_pos;
    s_.player_pos = to;
    refresh(from);
    refresh(to);
  }

  void add_entity(Pos p, char tile) {
    s_.entities.push_back({p, tile, kEntityHealth});
    refresh(p);
  }

  void remove_entity(int i) {
    const Pos p = s_.entities[static_cast<std::size_t>(i)].pos;
    s_.entities.erase(s_.entities.begin() + i);
    refresh(p);
  }

  // --- selectors ----------------------------------------------------------

  std::vector<Pos> candidates(const dsl::Selector& sel) const {
    std::vector<Pos> out;
    const Pos p = s_.player_pos;
    const auto& g = s_.grid;
    auto push = [&](Pos q) {
      if (g.in_bounds(q)) out.push_back(q);
    };
    auto scan = [&](auto pred) {
      for (int r = 0; r < g.rows; ++r) {
        for (int c = 0; c < g.cols; ++c) {
          if (pred(Pos{r, c})) out.push_back({r, c});
        }
      }
    };
    switch (sel.kind) {
      case SelectorKind::Self:
        out.push_back(p);
        break;
      case SelectorKind::Adjacent4: {
        const int k = sel.args.empty() ? 1 : static_cast<int>(sel.args[0].number);
        for (Pos d : {Pos{0, -k}, Pos{0, k}, Pos{-k, 0}, Pos{k, 0}}) push(add(p, d));
        break;
      }
      case SelectorKind::Adjacent8: {
        const int k = sel.args.empty() ? 1 : static_cast<int>(sel.args[0].number);
        for (int dr = -k; dr <= k; dr += k) {
          for (int dc = -k; dc <= k; dc += k) {
            if (dr != 0 || dc != 0) push(add(p, {dr, dc}));
          }
        }
        break;
      }
      case SelectorKind::AllOfClass:
        scan([&](Pos q) { return matches(g.at(q), sel.args[0]); });
        break;
      case SelectorKind::NearestOfClass: {
        scan([&](Pos q) { return matches(g.at(q), sel.args[0]); });
        if (!out.empty()) {
          auto best = std::min_element(out.begin(), out.end(),
                                       [&](Pos a, Pos b) { return manhattan(a, p) < manhattan(b, p); });
          out = {*best};
        }
        break;
      }
      case SelectorKind::RandomWalkableNonadjacent:
        scan([&](Pos q) { return free_cell(q) && manhattan(q, p) != 1; });
        break;
      case SelectorKind::LineOf: {
        const Pos d{static_cast<int>(sel.args[1].number), static_cast<int>(sel.args[0].number)};
        if (d.row == 0 && d.col == 0) break;
        Pos q = p;
        for (std::int64_t i = 0; i < sel.args[2].number; ++i) {
          q = add(q, d);
          if (!g.in_bounds(q)) break;
          out.push_back(q);
        }
        break;
      }
    }
    return out;
  }

  // --- conditions ---------------------------------------------------------

  Pos beyond(Pos t) const {
    const Pos d = axis_step(s_.player_pos, t);
    if (d.row == 0 && d.col == 0) return kNoPos;
    return add(t, d);
  }

  Pos where(const std::vector<Arg>& args, std::size_t slot, Pos t) const {
    if (args.size() > slot && args[slot].text == "beyond") return beyond(t);
    return t;
  }

  bool holds(const Condition& c, Pos t) const {
    switch (c.kind) {
      case ConditionKind::TileIs: {
        const Pos q = where(c.args, 1, t);
        return s_.grid.in_bounds(q) && matches(s_.grid.at(q), c.args[0]);
      }
      case ConditionKind::InBounds:
        return s_.grid.in_bounds(where(c.args, 0, t));
      case ConditionKind::CounterCmp:
        return compare(s_.counter(c.args[0].text), c.args[1].text, c.args[2].number);
      case ConditionKind::DistanceCmp: {
        const Arg& who = c.args[0];
        int dist = -1;
        if (who.kind == ArgKind::Keyword) {
          dist = manhattan(t, s_.player_pos);
        } else {
          for (int r = 0; r < s_.grid.rows; ++r) {
            for (int col = 0; col < s_.grid.cols; ++col) {
              if (s_.grid.at({r, col}) != who.tile) continue;
              const int d = manhattan(t, {r, col});
              if (dist < 0 || d < dist) dist = d;
            }
          }
          if (dist < 0) return false;
        }
        return compare(dist, c.args[1].text, c.args[2].number);
      }
    }
    return false;
  }

  bool conditions_hold(const std::vector<Condition>& cs, Pos t) const {
    return std::all_of(cs.begin(), cs.end(), [&](const Condition& c) { return holds(c, t); });
  }

  const dsl::Outcome* matching_outcome(const dsl::MechanicSpec& m, Pos t) const {
    for (const auto& o : m.outcomes) {
      if (conditions_hold(o.guards, t)) return &o;
    }
    return nullptr;
  }

  // --- effects ------------------------------------------------------------

  // Moves whatever occupies `t` by `d`; false if nothing moved.
  bool try_move(Pos t, Pos d) {
    const Pos to = add(t, d);
    if (!free_cell(to)) return false;
    if (t == s_.player_pos) {
      move_player(to);
      return true;
    }
    if (int e = entity_at(t); e >= 0) {
      s_.entities[static_cast<std::size_t>(e)].pos = to;
      refresh(t);
      refresh(to);
      return true;
    }
    if (is_item(s_.base_grid.at(t))) {
      s_.base_grid.at(to) = s_.base_grid.at(t);
      s_.base_grid.at(t) = g_.floor_tile();
      refresh(t);
      refresh(to);
      return true;
    }
    return false;
  }

  void move_entity(const std::string& dir, Pos t) {
    if (dir == "random") {
      std::vector<int> order{0, 1, 2, 3};
      rng_.shuffle(order);
      for (int i : order) {
        if (try_move(t, kMoves[i])) return;
      }
      return;
    }
    Pos d{0, 0};
    if (dir == "up") d = kMoves[0];
    else if (dir == "down") d = kMoves[1];
    else if (dir == "left") d = kMoves[2];
    else if (dir == "right") d = kMoves[3];
    else if (dir == "away") d = axis_step(s_.player_pos, t);
    else if (dir == "toward") d = axis_step(t, s_.player_pos);
    else if (dir == "action" && action_ >= 0 && action_ < kMoveActions) d = kMoves[action_];
    if (d.row == 0 && d.col == 0) return;
    try_move(t, d);
  }

  void place(Pos t, char tile) {
    const auto cls = g_.class_of(tile);
    if (cls == TileClass::Player) return;
    if (cls == TileClass::Enemy || cls == TileClass::Npc) {
      if (t != s_.player_pos && entity_at(t) < 0) add_entity(t, tile);
      return;
    }
    s_.base_grid.at(t) = tile;
    refresh(t);
  }

  double apply(const Effect& e, Pos t) {
    switch (e.kind) {
      case EffectKind::MoveEntity:
        move_entity(e.args[0].text, t);
        break;
      case EffectKind::SetTile:
        place(t, e.args[0].tile);
        break;
      case EffectKind::Spawn:
        if (free_cell(t)) place(t, e.args[0].tile);
        break;
      case EffectKind::ClearTile:
        if (int i = entity_at(t); i >= 0) {
          remove_entity(i);
        } else {
          s_.base_grid.at(t) = g_.floor_tile();
          refresh(t);
        }
        break;
      case EffectKind::Despawn:
        if (int i = entity_at(t); i >= 0) {
          remove_entity(i);
        } else if (is_item(s_.base_grid.at(t))) {
          s_.base_grid.at(t) = g_.floor_tile();
          refresh(t);
        }
        break;
      case EffectKind::SwapWith: {
        const Pos p = s_.player_pos;
        if (t == p) break;
        if (int i = entity_at(t); i >= 0) {
          s_.entities[static_cast<std::size_t>(i)].pos = p;
          move_player(t);
        } else if (free_cell(t)) {
          move_player(t);
        } else if (is_item(s_.base_grid.at(t))) {
          std::swap(s_.base_grid.at(t), s_.base_grid.at(p));
          move_player(t);
        }
        break;
      }
      case EffectKind::Teleport:
        if (t != s_.player_pos && free_cell(t)) move_player(t);
        break;
      case EffectKind::CounterAdd: {
        const auto& name = e.args[0].text;
        auto it = std::lower_bound(s_.counters.begin(), s_.counters.end(), name,
                                   [](const auto& c, const std::string& n) { return c.first < n; });
        if (it == s_.counters.end() || it->first != name) it = s_.counters.insert(it, {name, 0});
        it->second += e.args[1].number;
        break;
      }
      case EffectKind::EmitReward:
        return static_cast<double>(e.args[0].number);
      case EffectKind::Damage: {
        const auto amount = static_cast<int>(e.args[1].number);
        if (e.args[0].text == "player") {
          s_.player_health -= amount;
        } else if (int i = entity_at(t); i >= 0) {
          auto& ent = s_.entities[static_cast<std::size_t>(i)];
          ent.health -= amount;
          if (ent.health <= 0) remove_entity(i);
        } else if (t == s_.player_pos) {
          s_.player_health -= amount;
        }
        break;
      }
    }
    return 0.0;
  }
};

bool tiles_known(const dsl::MechanicSpec& m, const Game& g) {
  auto ok = [&](const std::vector<Arg>& args) {
    return std::all_of(args.begin(), args.end(),
                       [&](const Arg& a) { return a.kind != ArgKind::Tile || g.in_legend(a.tile); });
  };
  if (!ok(m.selector.args)) return false;
  for (const auto& c : m.conditions) {
    if (!ok(c.args)) return false;
  }
  for (const auto& o : m.outcomes) {
    for (const auto& c : o.guards) {
      if (!ok(c.args)) return false;
    }
    for (const auto& e : o.effects) {
      if (!ok(e.args)) return false;
    }
  }
  return true;
}

}  // namespace

double interpret_mechanic(GameState& state, const Game& game, const dsl::MechanicSpec& mech, Rng& rng, int action) {
  if (!mech.params.empty()) {
    auto resolved = dsl::resolve_params(mech);
    resolved.params.clear();
    return interpret_mechanic(state, game, resolved, rng, action);
  }
  if (!tiles_known(mech, game)) return 0.0;
  return Run(state, game, rng, action).fire(mech);
}

}  // namespace mortar::engine
