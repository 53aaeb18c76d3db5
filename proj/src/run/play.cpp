#include "mortar/run/play.hpp"

#include <istream>
#include <ostream>

namespace mortar::run {

std::optional<int> key_action(char key, const engine::Game& game) {
  switch (key) {
    case 'w': return 0;
    case 's': return 1;
    case 'a': return 2;
    case 'd': return 3;
    case '.':
    case ' ': return game.wait_action();
    default: break;
  }
  if (key >= '1' && key <= '9') {
    const int a = 3 + (key - '0');
    if (a < game.wait_action()) return a;
  }
  return std::nullopt;
}

namespace {

void show(const engine::GameState& s, const engine::Game& game, std::ostream& out) {
  out << engine::render_state(s) << "step " << s.step_count << "/" << game.def().max_steps << "  score "
      << s.score << "  health " << s.player_health << "\n";
}

}  // namespace

PlaySession play(const engine::Game& game, std::istream& in, std::ostream& out) {
  PlaySession session;
  auto s = engine::init_game(game);
  out << game.def().name << "  (w/a/s/d move, 1-9 mechanics, . wait, q quit)\n";
  show(s, game, out);
  char key = 0;
  while (!s.done && s.step_count < game.def().max_steps && in.get(key) && key != 'q') {
    const auto a = key_action(key, game);
    if (!a) continue;
    engine::step_inplace(s, game, *a);
    session.actions.push_back(*a);
    show(s, game, out);
  }
  session.finished = s.done || s.step_count >= game.def().max_steps;
  session.won = s.won;
  if (s.done) out << (s.won ? "You won.\n" : "You lost.\n");
  session.trace = engine::record_trace(game, session.actions);
  return session;
}

}  // namespace mortar::run
