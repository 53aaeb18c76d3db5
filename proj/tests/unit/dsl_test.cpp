#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "mortar/dsl/ast.hpp"
#include "mortar/dsl/catalog.hpp"
#include "mortar/dsl/descriptors.hpp"
#include "mortar/dsl/text.hpp"
#include "mortar/dsl/validate.hpp"
#include "spec_gen.hpp"

using namespace mortar;
using namespace mortar::dsl;

namespace {

std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(MORTAR_FIXTURE_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Multiset of (kind, label) pairs recovered from the canonical text lines.
std::multiset<std::string> line_bag(const MechanicSpec& m) {
  std::multiset<std::string> bag;
  std::istringstream in(render_mechanic(m));
  std::string line;
  std::string pending_outcome;
  std::vector<std::string> ops;
  auto flush = [&] {
    if (!pending_outcome.empty()) {
      std::string label = "branch|outcome:";
      for (std::size_t i = 0; i < ops.size(); ++i) label += (i ? "," : "") + ops[i];
      bag.insert(label);
    }
    pending_outcome.clear();
    ops.clear();
  };
  while (std::getline(in, line)) {
    auto b = line.find_first_not_of(' ');
    if (b == std::string::npos) continue;
    line = line.substr(b);
    if (line.rfind("trigger ", 0) == 0) bag.insert("branch|mechanic " + line.substr(8));
    if (line.rfind("let ", 0) == 0) bag.insert("param|" + line);
    if (line.rfind("select ", 0) == 0) bag.insert("selector|" + line.substr(7));
    if (line.rfind("when ", 0) == 0) bag.insert("condition|" + line.substr(5));
    if (line == "outcome" || line == "end") {
      flush();
      if (line == "outcome") pending_outcome = line;
    }
    if (line.rfind("do ", 0) == 0) {
      bag.insert("effect|" + line.substr(3));
      auto op = line.substr(3);
      ops.push_back(op.substr(0, op.find('(')));
    }
  }
  return bag;
}

double jaccard_oracle(const MechanicSpec& a, const MechanicSpec& b) {
  auto ba = line_bag(a);
  auto bb = line_bag(b);
  std::multiset<std::string> inter;
  std::set_intersection(ba.begin(), ba.end(), bb.begin(), bb.end(), std::inserter(inter, inter.begin()));
  const double uni = static_cast<double>(ba.size() + bb.size() - inter.size());
  return uni == 0 ? 1.0 : static_cast<double>(inter.size()) / uni;
}

}  // namespace

TEST(MechanicText, CatalogEntryRoundTrips) {
  auto move = seed_mechanic("move_player");
  EXPECT_EQ(move.name, "move_player");
  EXPECT_EQ(move.trigger, Trigger::PlayerAction);
  EXPECT_EQ(parse_mechanic(render_mechanic(move)), move);
}

TEST(MechanicText, MovePlayerMatchesGoldenFile) {
  EXPECT_EQ(render_mechanic(seed_mechanic("move_player")), read_fixture("move_player.mech"));
}

TEST(MechanicText, EmptyInputIsSyntaxErrorAtOrigin) {
  try {
    parse_mechanic("");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1);
    EXPECT_EQ(e.column(), 1);
  }
}

TEST(MechanicText, MultiCharacterTileIsRejected) {
  const std::string text =
      "mechdsl/1\nmechanic paint\n  trigger player-action\n  select self pick first\n"
      "  outcome\n    do set-tile(GRASS)\nend\n";
  try {
    parse_mechanic(text);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.message(), "tile class must be single character");
    EXPECT_EQ(e.line(), 6);
    EXPECT_EQ(e.column(), 17);
  }
}

TEST(MechanicText, UnknownKindsArePositionTagged) {
  const std::string text =
      "mechdsl/1\nmechanic boom\n  trigger player-action\n  select self pick first\n"
      "  outcome\n    do explode(3)\nend\n";
  try {
    parse_mechanic(text);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 6);
    EXPECT_EQ(e.column(), 8);
    EXPECT_NE(e.message().find("unknown effect kind"), std::string::npos);
  }
  EXPECT_THROW(parse_mechanic("mechdsl/1\nmechanic x\n  trigger player-action\n  select everywhere pick first\n"
                              "  outcome\n    do despawn\nend\n"),
               ParseError);
  EXPECT_THROW(parse_mechanic("mechdsl/1\nmechanic x\n  trigger player-action\n  select self pick first\n"
                              "  when glows\n  outcome\n    do despawn\nend\n"),
               ParseError);
}

TEST(MechanicText, StructuralErrors) {
  // Two rewards in one outcome.
  EXPECT_THROW(parse_mechanic("mechdsl/1\nmechanic x\n  trigger per-step\n  select self pick first\n"
                              "  outcome\n    do emit-reward(1)\n    do emit-reward(2)\nend\n"),
               ParseError);
  // Unknown param.
  EXPECT_THROW(parse_mechanic("mechdsl/1\nmechanic x\n  trigger per-step\n  select self pick first\n"
                              "  outcome\n    do emit-reward(bonus)\nend\n"),
               ParseError);
  // Missing header.
  EXPECT_THROW(parse_mechanic("mechanic x\nend\n"), ParseError);
  // Missing end.
  EXPECT_THROW(parse_mechanic("mechdsl/1\nmechanic x\n  trigger per-step\n  select self pick first\n"
                              "  outcome\n    do despawn\n"),
               ParseError);
  // Spawning the player.
  EXPECT_THROW(parse_mechanic("mechdsl/1\nmechanic x\n  trigger per-step\n  select self pick first\n"
                              "  outcome\n    do spawn(@)\nend\n"),
               ParseError);
}

TEST(MechanicText, OptionalArgumentsAndCommentsNormalize) {
  const std::string loose =
      "mechdsl/1   \n// a comment\nmechanic reach_out\n trigger   player-action\n"
      "select adjacent-4(1)   pick all // trailing\nwhen tile-is(walkable, target)\n"
      "outcome\ndo spawn(O)\nend";
  auto m = parse_mechanic(loose);
  const std::string canonical =
      "mechdsl/1\nmechanic reach_out\n  trigger player-action\n  select adjacent-4 pick all\n"
      "  when tile-is(walkable)\n  outcome\n    do spawn(O)\nend\n";
  EXPECT_EQ(render_mechanic(m), canonical);
  EXPECT_EQ(parse_mechanic(canonical), m);
}

TEST(MechanicText, EqualSpecsBuiltDifferentlyRenderIdentically) {
  MechanicSpec a;
  a.name = "strike";
  a.trigger = Trigger::PlayerAction;
  a.selector = {SelectorKind::Adjacent4, {Arg::integer(1)}, PickMode::First};
  a.conditions.push_back({ConditionKind::TileIs, {Arg::tile_literal('#'), Arg::keyword("target")}});
  a.outcomes.push_back({{}, {{EffectKind::Despawn, {}}}});

  auto b = parse_mechanic(
      "mechdsl/1\nmechanic strike\n  trigger player-action\n  select adjacent-4 pick first\n"
      "  when tile-is(#)\n  outcome\n    do despawn\nend\n");
  EXPECT_EQ(a, b);
  EXPECT_EQ(render_mechanic(a), render_mechanic(b));
}

TEST(MechanicText, RandomSpecsRoundTrip) {
  Rng rng(42);
  for (int i = 0; i < 1000; ++i) {
    auto spec = mortar::testing::random_spec(rng);
    ASSERT_TRUE(is_valid(spec)) << render_mechanic(spec) << structural_problems(spec).front();
    const auto text = render_mechanic(spec);
    const auto parsed = parse_mechanic(text);
    ASSERT_EQ(parsed, spec) << text;
    ASSERT_EQ(render_mechanic(parsed), text);
  }
}

TEST(MechanicText, MultiMechanicDocuments) {
  auto all = parse_mechanics(seed_catalog_text());
  EXPECT_EQ(all.size(), 10u);
  EXPECT_EQ(render_mechanics(all), seed_catalog_text());
}

TEST(Catalog, HasTenMechanicsInOrder) {
  auto cat = seed_catalog();
  ASSERT_EQ(cat.size(), 10u);
  const char* names[] = {"move_player", "pick_object",  "hit_enemy",   "teleport_player", "swap_positions",
                         "push_object", "jump_player", "drop_object", "enemy_move",      "enemy_hit"};
  for (std::size_t i = 0; i < cat.size(); ++i) {
    EXPECT_EQ(cat[i].name, names[i]);
    EXPECT_TRUE(is_valid(cat[i]));
    EXPECT_EQ(parse_mechanic(render_mechanic(cat[i])), cat[i]);
  }
  EXPECT_EQ(cat[8].trigger, Trigger::PerStep);
  EXPECT_EQ(cat[9].trigger, Trigger::PerStep);
}

TEST(Complexity, WeightDefinition) {
  auto minimal = seed_mechanic("move_player");  // 1 effect, 1 param, 1 outcome
  EXPECT_DOUBLE_EQ(complexity(minimal).value, 6.0);
  // hit_enemy: despawn + emit-reward, one param, one outcome -> 3*2 + 2 + 1.
  EXPECT_DOUBLE_EQ(complexity(seed_mechanic("hit_enemy")).value, 9.0);
}

TEST(Complexity, UnclampedAboveArchiveRange) {
  MechanicSpec m;
  m.name = "big";
  for (int i = 0; i < 5; ++i) m.params.push_back({"p" + std::to_string(i), Arg::integer(i)});
  for (int o = 0; o < 3; ++o) m.outcomes.emplace_back();
  for (int i = 0; i < 10; ++i) m.outcomes[i % 3].effects.push_back({EffectKind::Despawn, {}});
  EXPECT_DOUBLE_EQ(complexity(m).value, 43.0);
}

TEST(Complexity, AddingAnEffectAddsExactlyThree) {
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    auto m = mortar::testing::random_spec(rng);
    auto before = complexity(m).value;
    m.outcomes.front().effects.push_back({EffectKind::Despawn, {}});
    EXPECT_DOUBLE_EQ(complexity(m).value, before + 3.0);
  }
}

TEST(TypeDescriptor, MovePlayerIsMovement) {
  auto d = type_descriptor(seed_mechanic("move_player"));
  EXPECT_EQ(d.category_index, 0);
  EXPECT_DOUBLE_EQ(d.max_similarity, 1.0);
  EXPECT_NEAR(d.position, 1.0 / 9.0, 1e-12);
  EXPECT_LT(d.position, 1.0 / 9.0);
}

TEST(TypeDescriptor, HitEnemyIsCombat) {
  auto d = type_descriptor(seed_mechanic("hit_enemy"));
  EXPECT_EQ(d.category_index, 2);
  EXPECT_DOUBLE_EQ(d.max_similarity, 1.0);
  EXPECT_NEAR(d.position, 3.0 / 9.0, 1e-12);
}

TEST(TypeDescriptor, PaperLiteralCollapsesMovement) {
  auto d = type_descriptor(seed_mechanic("jump_player"), CategoryLexicon::standard(), DescriptorScheme::PaperLiteral);
  EXPECT_EQ(d.category_index, 0);
  EXPECT_DOUBLE_EQ(d.position, 0.0);
  auto hit = type_descriptor(seed_mechanic("hit_enemy"), CategoryLexicon::standard(), DescriptorScheme::PaperLiteral);
  EXPECT_DOUBLE_EQ(hit.position, 2.0 / 8.0);
}

TEST(TypeDescriptor, LexiconShape) {
  const auto& lex = CategoryLexicon::standard();
  ASSERT_EQ(lex.categories.size(), 9u);
  EXPECT_EQ(lex.categories[0].name, "movement");
  EXPECT_EQ(lex.categories[8].name, "time manipulation");
  for (const auto& c : lex.categories) {
    EXPECT_GE(c.keywords.size(), 10u);
    EXPECT_LE(c.keywords.size(), 11u);
    for (const auto& k : c.keywords) {
      for (char ch : k) EXPECT_TRUE(ch >= 'a' && ch <= 'z');
    }
  }
}

TEST(TypeDescriptor, LexicalSimilarityRules) {
  EXPECT_DOUBLE_EQ(lexical_similarity("move", "move"), 1.0);
  EXPECT_DOUBLE_EQ(lexical_similarity("teleports", "teleport"), 0.75);
  EXPECT_DOUBLE_EQ(lexical_similarity("swap", "swim"), 0.5);  // LCS "sw"
  EXPECT_DOUBLE_EQ(lexical_similarity("abc", "xyz"), 0.0);
  EXPECT_EQ(name_tokens("spawn_enemy_17"), (std::vector<std::string>{"spawn", "enemy"}));
}

TEST(TypeDescriptor, BandsNeverOverlap) {
  Rng rng(3);
  const char* words[] = {"move", "pick", "hit", "level", "build", "solve", "collect", "explore", "time",
                         "enemy", "object", "swap", "player", "zap", "glide", "mine"};
  for (int i = 0; i < 500; ++i) {
    MechanicSpec m = seed_mechanic("move_player");
    m.name = std::string(words[rng.below(16)]) + "_" + words[rng.below(16)];
    auto d = type_descriptor(m);
    EXPECT_GE(d.position, d.category_index / 9.0);
    EXPECT_LT(d.position, (d.category_index + 1) / 9.0);
  }
}

TEST(AstSimilarity, IdentityAndSymmetry) {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    auto a = mortar::testing::random_spec(rng);
    auto b = mortar::testing::random_spec(rng);
    EXPECT_DOUBLE_EQ(ast_similarity(a, a), 1.0);
    EXPECT_DOUBLE_EQ(ast_similarity(a, b), ast_similarity(b, a));
    EXPECT_NEAR(ast_similarity(a, b), jaccard_oracle(a, b), 1e-12) << render_mechanic(a) << render_mechanic(b);
  }
}

TEST(AstSimilarity, NameDoesNotMatter) {
  auto a = seed_mechanic("hit_enemy");
  auto b = a;
  b.name = "whack";
  EXPECT_DOUBLE_EQ(ast_similarity(a, b), 1.0);
}

TEST(AstSimilarity, DisjointMechanicsScoreZero) {
  auto a = parse_mechanic("mechdsl/1\nmechanic a\n  trigger player-action\n  select self pick first\n"
                          "  outcome\n    do despawn\nend\n");
  auto b = parse_mechanic("mechdsl/1\nmechanic b\n  trigger per-step\n  select adjacent-8 pick all\n"
                          "  outcome\n    do teleport\nend\n");
  EXPECT_DOUBLE_EQ(ast_similarity(a, b), 0.0);
}

TEST(AstSimilarity, MoveVersusJump) {
  auto move = seed_mechanic("move_player");
  auto jump = seed_mechanic("jump_player");
  // Hand count: 5 and 7 nodes sharing only the root.
  EXPECT_NEAR(jaccard_oracle(move, jump), 1.0 / 11.0, 1e-12);
  EXPECT_NEAR(ast_similarity(move, jump), 1.0 / 11.0, 1e-12);
}

TEST(Ast, NodeCountsAndKinds) {
  auto ast = build_ast(seed_mechanic("push_object"));
  EXPECT_EQ(ast.kind, NodeKind::Branch);
  // root + 2 params + selector + 2 conditions + outcome + 2 effects
  EXPECT_EQ(node_count(ast), 9u);
  for (const auto& m : seed_catalog()) EXPECT_GE(node_count(build_ast(m)), 2u);
}

TEST(Validate, ReferencedVocabulary) {
  auto pick = seed_mechanic("pick_object");
  EXPECT_EQ(referenced_tiles(pick), (std::vector<char>{'O'}));
  EXPECT_EQ(referenced_counters(pick), (std::vector<std::string>{"picked"}));
  auto push = seed_mechanic("push_object");
  EXPECT_EQ(referenced_classes(push), (std::vector<std::string>{"walkable"}));
  auto resolved = resolve_params(pick);
  EXPECT_EQ(resolved.conditions[0].args[0], Arg::tile_literal('O'));
}
