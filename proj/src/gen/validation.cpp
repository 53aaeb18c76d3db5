#include "mortar/gen/validation.hpp"

#include "mortar/dsl/text.hpp"
#include "mortar/dsl/validate.hpp"
#include "mortar/engine/game.hpp"

namespace mortar::gen {

using engine::Game;
using engine::GameState;

std::string_view to_string(Stage s) noexcept {
  switch (s) {
    case Stage::Syntax: return "syntax";
    case Stage::Runtime: return "runtime";
    case Stage::NonTrivial: return "non-trivial";
  }
  return "syntax";
}

namespace {

ValidationResult fail(Stage s, std::string detail) { return {false, s, std::move(detail)}; }

// Fires `mech` once on a copy of `s`; true if anything observable happened.
bool fires(const GameState& s, const Game& game, const dsl::MechanicSpec& mech, int action) {
  GameState probe = s;
  Rng rng(s.rng);
  const auto before = engine::state_digest(probe);
  const double reward = engine::interpret_mechanic(probe, game, mech, rng, action);
  return reward != 0.0 || engine::state_digest(probe) != before;
}

}  // namespace

ValidationResult validate_pipeline(const dsl::MechanicSpec& m, const ProbeConfig& cfg) {
  // Stage 1.
  if (auto problems = dsl::structural_problems(m); !problems.empty()) return fail(Stage::Syntax, problems.front());
  try {
    if (!(dsl::parse_mechanic(dsl::render_mechanic(m)) == m)) return fail(Stage::Syntax, "canonical text round trip differs");
  } catch (const dsl::ParseError& e) {
    return fail(Stage::Syntax, e.what());
  }

  // Stage 2 and 3 share the probe episodes.
  bool nontrivial = false;
  try {
    const Game game(engine::install_mechanic(engine::static_test_env(), m));
    std::vector<int> actions;
    if (m.trigger == dsl::Trigger::PerStep) {
      actions = {-1};
    } else {
      const int bound = game.def().action_map.at(m.name);
      if (bound == 0) {
        actions = {0, 1, 2, 3};
      } else {
        actions = {bound};
      }
    }
    const auto agent = agents::AgentKind::mcts(cfg.iterations);
    for (int e = 0; e < cfg.episodes; ++e) {
      GameState s = engine::init_game(game);
      s.rng = derive_seed(static_cast<std::uint64_t>(e), {0, game.def().rng_seed});
      Rng rng(derive_seed(static_cast<std::uint64_t>(e), {1}));
      while (!s.done && s.step_count < std::min(cfg.steps, game.def().max_steps)) {
        if (!nontrivial) {
          for (int a : actions) nontrivial = nontrivial || fires(s, game, m, a);
        }
        engine::step_inplace(s, game, agents::act(agent, s, game, rng, cfg.mcts));
      }
    }
  } catch (const std::exception& e) {
    return fail(Stage::Runtime, e.what());
  }
  if (!nontrivial) return fail(Stage::NonTrivial, "never changed the state or emitted reward during the probes");
  return {true, Stage::Syntax, {}};
}

ValidationResult validate_text(std::string_view dsl_text, const ProbeConfig& cfg) {
  dsl::MechanicSpec m;
  try {
    m = dsl::parse_mechanic(dsl_text);
  } catch (const dsl::ParseError& e) {
    return fail(Stage::Syntax, e.what());
  }
  return validate_pipeline(m, cfg);
}

}  // namespace mortar::gen
