#pragma once

#include <string>
#include <string_view>

#include "mortar/agents/agents.hpp"
#include "mortar/dsl/mechanic.hpp"

namespace mortar::gen {

// Stage names double as machine-readable failure reasons.
enum class Stage { Syntax, Runtime, NonTrivial };
std::string_view to_string(Stage s) noexcept;  // "syntax", "runtime", "non-trivial"

struct ValidationResult {
  bool pass = false;
  Stage failed_stage = Stage::Syntax;  // meaningful only when !pass
  std::string detail;

  std::string reason() const { return pass ? "pass" : std::string(to_string(failed_stage)); }
};

struct ProbeConfig {
  int episodes = 10;        // seeds 0..episodes-1
  int iterations = 200;     // mcts budget of the probe agent
  int steps = 100;
  agents::MctsConfig mcts;
};

// 1. structural checks and a canonical text round trip;
// 2. install into the static test environment and play the probe episodes;
// 3. at some visited state, firing the mechanic changes the state digest
//    or emits a nonzero reward.
ValidationResult validate_pipeline(const dsl::MechanicSpec& m, const ProbeConfig& cfg = {});

// Stage 1 starts at parsing; parse errors fail as syntax.
ValidationResult validate_text(std::string_view dsl_text, const ProbeConfig& cfg = {});

}  // namespace mortar::gen
