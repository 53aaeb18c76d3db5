#include <gtest/gtest.h>

#include <cstdlib>
#include <httplib.h>
#include <json.hpp>
#include <thread>

#include "mortar/core/json_io.hpp"
#include "mortar/dsl/ast.hpp"
#include "mortar/dsl/catalog.hpp"
#include "mortar/dsl/text.hpp"
#include "mortar/dsl/validate.hpp"
#include "mortar/gen/external.hpp"
#include "mortar/gen/operators.hpp"
#include "mortar/gen/provider.hpp"
#include "mortar/gen/validation.hpp"

using namespace mortar;
using namespace mortar::gen;
using dsl::MechanicSpec;

namespace {

std::string fixture(const std::string& name) { return json_io::read_file(std::string(MORTAR_FIXTURE_DIR) + "/" + name); }

bool round_trips(const MechanicSpec& m) { return dsl::parse_mechanic(dsl::render_mechanic(m)) == m; }

}  // namespace

TEST(Operators, OffspringNameStripsNumbersAndHashesBody) {
  const auto m = dsl::seed_mechanic("hit_enemy");
  const auto n = offspring_name("hit_enemy_48213", m);
  EXPECT_EQ(n.rfind("hit_enemy_", 0), 0u);
  EXPECT_EQ(n, offspring_name("hit_enemy", m));
  auto other = m;
  other.outcomes.pop_back();
  if (!other.outcomes.empty()) {
    EXPECT_NE(offspring_name("hit_enemy", other), n);
  }
}

TEST(Operators, SynthesizedMechanicsAreValid) {
  Rng rng(3);
  for (int i = 0; i < 300; ++i) {
    const auto m = synthesize(rng);
    EXPECT_TRUE(dsl::is_valid(m)) << dsl::render_mechanic(m);
    EXPECT_TRUE(round_trips(m)) << dsl::render_mechanic(m);
  }
}

TEST(Operators, MutationAddsStructureAndStaysValid) {
  Rng rng(5);
  for (const auto& seed : dsl::seed_catalog()) {
    const auto m = mutate(seed, rng);
    EXPECT_TRUE(dsl::is_valid(m)) << dsl::render_mechanic(m);
    EXPECT_NE(m, seed);
    EXPECT_GE(m.effect_count() + m.params.size() + m.outcomes.size(),
              seed.effect_count() + seed.params.size() + seed.outcomes.size() + 1);
  }
}

TEST(Operators, DeterministicInRngState) {
  const auto a = dsl::seed_mechanic("push_object");
  const auto b = dsl::seed_mechanic("pick_object");
  Rng r1(9), r2(9);
  EXPECT_EQ(mutate(a, r1), mutate(a, r2));
  EXPECT_EQ(crossover(a, b, r1), crossover(a, b, r2));
  EXPECT_EQ(diversity_mutate({a, b}, r1), diversity_mutate({a, b}, r2));
}

TEST(Operators, DiversityIsDissimilarAndNeverACopy) {
  Rng rng(21);
  const auto cat = dsl::seed_catalog();
  int under_target = 0;
  for (int i = 0; i < 30; ++i) {
    std::vector<MechanicSpec> parents = {cat[i % 10], cat[(i + 3) % 10], cat[(i + 7) % 10]};
    const auto m = diversity_mutate(parents, rng);
    EXPECT_TRUE(dsl::is_valid(m));
    double best = 0.0;
    for (const auto& p : parents) {
      EXPECT_NE(dsl::render_mechanic(m), dsl::render_mechanic(p));
      best = std::max(best, dsl::ast_similarity(m, p));
    }
    if (best <= kDiversityTarget) ++under_target;
  }
  EXPECT_GE(under_target, 25);
}

TEST(Operators, CrossoverKeepsBothParentsBehaviour) {
  const auto a = dsl::seed_mechanic("pick_object");
  const auto b = dsl::seed_mechanic("hit_enemy");
  Rng rng(4);
  EXPECT_THROW(crossover(a, a, rng), Error);
  for (int i = 0; i < 20; ++i) {
    const auto c = crossover(a, b, rng);
    EXPECT_TRUE(dsl::is_valid(c)) << dsl::render_mechanic(c);
    EXPECT_TRUE(round_trips(c));
    EXPECT_TRUE(c.trigger == a.trigger || c.trigger == b.trigger);
    EXPECT_GE(c.outcomes.size(), 2u);
    EXPECT_LE(c.outcomes.size(), dsl::kMaxOutcomes);
    EXPECT_LE(c.effect_count(), dsl::kMaxEffects);
  }
}

TEST(Operators, CompatibilityReferencesTheContext) {
  const std::vector<MechanicSpec> ctx = {dsl::seed_mechanic("hit_enemy"), dsl::seed_mechanic("pick_object")};
  const auto vocab = vocabulary_of(ctx);
  ASSERT_FALSE(vocab.empty());
  Rng rng(8);
  for (int i = 0; i < 50; ++i) {
    const auto m = compatibility_mutate(ctx, rng);
    EXPECT_TRUE(dsl::is_valid(m));
    const auto v = vocabulary_of({m});
    bool shared = false;
    for (char t : v.tiles) shared |= std::find(vocab.tiles.begin(), vocab.tiles.end(), t) != vocab.tiles.end();
    for (const auto& c : v.classes) shared |= std::find(vocab.classes.begin(), vocab.classes.end(), c) != vocab.classes.end();
    for (const auto& c : v.counters) shared |= std::find(vocab.counters.begin(), vocab.counters.end(), c) != vocab.counters.end();
    EXPECT_TRUE(shared) << dsl::render_mechanic(m);
  }
  EXPECT_THROW(compatibility_mutate({}, rng), Error);
}

TEST(Operators, PairingIsDisjointAndPrefersSimilar) {
  const auto cat = dsl::seed_catalog();
  const auto pairs = pair_by_similarity(cat);
  EXPECT_EQ(pairs.size(), 5u);
  std::vector<int> seen(cat.size(), 0);
  for (auto [i, j] : pairs) {
    EXPECT_LT(i, j);
    ++seen[i];
    ++seen[j];
  }
  for (int s : seen) EXPECT_EQ(s, 1);
  // The first pair is the globally most similar one.
  double best = -1.0;
  for (std::size_t i = 0; i < cat.size(); ++i)
    for (std::size_t j = i + 1; j < cat.size(); ++j) best = std::max(best, dsl::ast_similarity(cat[i], cat[j]));
  EXPECT_DOUBLE_EQ(dsl::ast_similarity(cat[pairs[0].first], cat[pairs[0].second]), best);
}

TEST(Providers, RuleBasedServesEveryKind) {
  RuleBasedProvider p;
  Rng rng(2);
  const auto cat = dsl::seed_catalog();
  for (auto kind : {OperatorKind::Mutation, OperatorKind::DiversityMutation, OperatorKind::Crossover,
                    OperatorKind::Compatibility}) {
    const auto r = p.generate({kind, {cat[1], cat[2], cat[3]}}, rng);
    ASSERT_TRUE(r.ok()) << to_string(kind) << ": " << r.failure;
    EXPECT_TRUE(dsl::is_valid(*r.spec));
  }
}

TEST(Providers, StubRotatesAndFallbackTakesOver) {
  const auto a = dsl::seed_mechanic("jump_player");
  const auto b = dsl::seed_mechanic("drop_object");
  StubProvider stub({a, b});
  Rng rng(1);
  EXPECT_EQ(*stub.generate({}, rng).spec, a);
  EXPECT_EQ(*stub.generate({}, rng).spec, b);
  EXPECT_EQ(*stub.generate({}, rng).spec, a);
  EXPECT_EQ(stub.calls(), 3);

  StubProvider empty({});
  EXPECT_FALSE(empty.generate({}, rng).ok());
  FallbackProvider fb(empty, stub);
  EXPECT_EQ(*fb.generate({}, rng).spec, b);
  EXPECT_EQ(empty.calls(), 2);
}

TEST(Validation, FixturesGiveTheStatedReasons) {
  EXPECT_TRUE(validate_text(fixture("move_player.mech")).pass);
  const auto never = validate_text(fixture("never_fires.mech"));
  EXPECT_FALSE(never.pass);
  EXPECT_EQ(never.reason(), "non-trivial");
  const auto unknown = validate_text(fixture("unknown_kind.mech"));
  EXPECT_FALSE(unknown.pass);
  EXPECT_EQ(unknown.reason(), "syntax");
  EXPECT_NE(unknown.detail.find("shatter-tile"), std::string::npos);
}

TEST(Validation, StructuralProblemsFailAsSyntax) {
  auto m = dsl::seed_mechanic("pick_object");
  m.outcomes.clear();
  const auto r = validate_pipeline(m);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.reason(), "syntax");
}

namespace {

// Replays canned responses and records every request.
class StubTransport final : public Transport {
 public:
  explicit StubTransport(std::vector<HttpResponse> replies) : replies_(std::move(replies)) {}
  HttpResponse post(const std::string& path, const std::string& body,
                    const std::map<std::string, std::string>& headers) override {
    paths.push_back(path);
    bodies.push_back(nlohmann::json::parse(body));
    this->headers.push_back(headers);
    if (replies_.empty()) return {0, "", "no more replies"};
    auto r = replies_.front();
    replies_.erase(replies_.begin());
    return r;
  }
  std::vector<std::string> paths;
  std::vector<nlohmann::json> bodies;
  std::vector<std::map<std::string, std::string>> headers;

 private:
  std::vector<HttpResponse> replies_;
};

HttpResponse chat_reply(const std::string& content) {
  nlohmann::json j = {{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}};
  return {200, j.dump(), ""};
}

ExternalGeneratorConfig test_config() {
  ExternalGeneratorConfig c;
  c.base_url = "http://127.0.0.1:9";
  c.api_key_env = "MORTAR_TEST_KEY";
  c.max_retries = 2;
  return c;
}

const std::string kFenced = "Here it is:\n```\n" + dsl::render_mechanic(dsl::seed_mechanic("jump_player")) +
                            "```\n";

}  // namespace

TEST(External, ExtractsFencedDslAndSendsTheWireFormat) {
  ::setenv("MORTAR_TEST_KEY", "sk-test", 1);
  StubTransport t({chat_reply(kFenced)});
  const auto r = external_generate({OperatorKind::Mutation, {dsl::seed_mechanic("push_object")}}, test_config(), t);
  ASSERT_TRUE(r.ok()) << r.failure;
  EXPECT_EQ(r.spec->name, "jump_player");
  EXPECT_EQ(r.attempts, 1);
  ASSERT_EQ(t.paths.size(), 1u);
  EXPECT_EQ(t.paths[0], "/v1/chat/completions");
  EXPECT_EQ(t.headers[0].at("Authorization"), "Bearer sk-test");
  EXPECT_EQ(t.bodies[0]["model"], "gpt-4o-mini");
  EXPECT_EQ(t.bodies[0]["messages"][0]["role"], "system");
  EXPECT_NE(t.bodies[0]["messages"][1]["content"].get<std::string>().find("push_object"), std::string::npos);
  ::unsetenv("MORTAR_TEST_KEY");
}

TEST(External, NoKeyMeansNoAuthorizationHeader) {
  ::unsetenv("MORTAR_TEST_KEY");
  StubTransport t({chat_reply(kFenced)});
  ASSERT_TRUE(external_generate({OperatorKind::Mutation, {dsl::seed_mechanic("push_object")}}, test_config(), t).ok());
  EXPECT_EQ(t.headers[0].count("Authorization"), 0u);
}

TEST(External, RetriesWithParseFeedback) {
  StubTransport t({{500, "overloaded", ""}, chat_reply("mechdsl/1\nmechanic broken\n  trigger nowhere\nend\n"),
                   chat_reply(kFenced)});
  const auto r = external_generate({OperatorKind::Mutation, {dsl::seed_mechanic("push_object")}}, test_config(), t);
  ASSERT_TRUE(r.ok()) << r.failure;
  EXPECT_EQ(r.attempts, 3);
  const auto& last = t.bodies.back()["messages"];
  EXPECT_EQ(last[last.size() - 2]["role"], "assistant");
  EXPECT_NE(last.back()["content"].get<std::string>().find("did not parse"), std::string::npos);
}

TEST(External, GivesUpAfterRetries) {
  StubTransport t({{500, "", ""}, {0, "", "refused"}, chat_reply("{}")});
  const auto r = external_generate({OperatorKind::Mutation, {dsl::seed_mechanic("push_object")}}, test_config(), t);
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(r.attempts, 3);
  EXPECT_FALSE(r.failure.empty());
  ExternalGeneratorConfig none;
  EXPECT_THROW(external_generate({}, none, t), ConfigError);
}

TEST(External, RankPicksTheLongestNamedCandidate) {
  auto a = dsl::seed_mechanic("push_object");
  auto b = a;
  b.name = "push_object_far";
  StubTransport t({chat_reply("I would add push_object_far.")});
  const auto r = external_rank({a, b}, {dsl::seed_mechanic("move_player")}, test_config(), t);
  ASSERT_TRUE(r.choice.has_value());
  EXPECT_EQ(*r.choice, 1u);
}

TEST(External, HttpTransportTalksToALocalServer) {
  httplib::Server server;
  std::string seen_auth, seen_path;
  server.Post(R"(/api/v1/chat/completions)", [&](const httplib::Request& req, httplib::Response& res) {
    seen_auth = req.get_header_value("Authorization");
    seen_path = req.path;
    res.set_content(chat_reply(kFenced).body, "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  ::setenv("MORTAR_TEST_KEY", "sk-local", 1);
  auto cfg = test_config();
  cfg.base_url = "http://127.0.0.1:" + std::to_string(port) + "/api";
  HttpTransport transport(cfg.base_url, 5.0);
  ExternalProvider provider(cfg, transport);
  Rng rng(0);
  const auto r = provider.generate({OperatorKind::Crossover, {dsl::seed_mechanic("pick_object"), dsl::seed_mechanic("hit_enemy")}}, rng);
  server.stop();
  th.join();
  ::unsetenv("MORTAR_TEST_KEY");
  ASSERT_TRUE(r.ok()) << r.failure;
  EXPECT_EQ(seen_path, "/api/v1/chat/completions");
  EXPECT_EQ(seen_auth, "Bearer sk-local");
  EXPECT_EQ(provider.calls(), 1);
}
