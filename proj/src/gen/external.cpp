#include "mortar/gen/external.hpp"

#include <cstdlib>
#include <httplib.h>
#include <json.hpp>

#include "mortar/core/error.hpp"
#include "mortar/dsl/text.hpp"

namespace mortar::gen {

using nlohmann::json;

void ExternalGeneratorConfig::validate() const {
  if (base_url.empty()) throw ConfigError("external generator: base_url is not set");
  if (model.empty()) throw ConfigError("external generator: model is not set");
  if (max_retries < 0) throw ConfigError("external generator: max_retries must be >= 0");
  if (!(timeout_seconds > 0.0)) throw ConfigError("external generator: timeout must be > 0");
}

HttpTransport::HttpTransport(std::string base_url, double timeout_seconds) : timeout_(timeout_seconds) {
  const auto scheme = base_url.find("://");
  const auto host_start = scheme == std::string::npos ? 0 : scheme + 3;
  const auto slash = base_url.find('/', host_start);
  origin_ = base_url.substr(0, slash);
  if (slash != std::string::npos) prefix_ = base_url.substr(slash);
  while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
}

HttpResponse HttpTransport::post(const std::string& path, const std::string& body,
                                 const std::map<std::string, std::string>& headers) {
  HttpResponse out;
  try {
    httplib::Client client(origin_);
    const auto sec = static_cast<time_t>(timeout_);
    const auto usec = static_cast<time_t>((timeout_ - static_cast<double>(sec)) * 1e6);
    client.set_connection_timeout(sec, usec);
    client.set_read_timeout(sec, usec);
    client.set_write_timeout(sec, usec);
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto res = client.Post(prefix_ + path, h, body, "application/json");
    if (!res) {
      out.error = httplib::to_string(res.error());
      return out;
    }
    out.status = res->status;
    out.body = res->body;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

namespace {

constexpr const char* kGrammar = R"(You write game mechanics in the mechdsl/1 language. A mechanic is:

mechdsl/1
mechanic <snake_case_name>
  trigger player-action | per-step
  let <param> = <integer | tile>
  select <selector> pick first | random | all
  when <condition>
  outcome
    when <condition>
    do <effect>
end

Selectors: self, adjacent-4(reach), adjacent-8(reach), all-of-class(tile|class), nearest-of-class(tile|class),
random-walkable-nonadjacent, line-of(dx, dy, length).
Conditions: tile-is(tile|class, target|beyond), in-bounds(target|beyond), counter-cmp(name, op, int),
distance-cmp(player|tile, op, int).
Effects: move-entity(up|down|left|right|away|toward|random|action), set-tile(tile), clear-tile, swap-with,
spawn(tile), despawn, counter-add(name, int), emit-reward(int), damage(target|player, int), teleport.
Tiles: A floor, B wall, G goal, O box, C coin, # enemy, & npc, @ player. Classes: walkable, enemy, interactive,
collectible, npc.
Only output the new game mechanic.)";

const char* instruction(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::Mutation: return "Add new functionality to the given mechanic.";
    case OperatorKind::DiversityMutation:
      return "Write a mechanic that behaves differently from all of the given mechanics.";
    case OperatorKind::Crossover: return "Merge the two given mechanics into one working combination.";
    case OperatorKind::Compatibility:
      return "Write a new mechanic that complements the mechanics already in this game.";
  }
  return "";
}

std::string rendered(const std::vector<dsl::MechanicSpec>& specs) {
  std::string out;
  for (const auto& s : specs) out += dsl::render_mechanic(s) + "\n";
  return out;
}

struct Exchange {
  std::optional<std::string> reply;
  std::string failure;
};

Exchange exchange(const std::vector<ChatMessage>& messages, const ExternalGeneratorConfig& cfg, Transport& transport) {
  std::map<std::string, std::string> headers;
  if (const char* key = std::getenv(cfg.api_key_env.c_str()); key && *key) {
    headers["Authorization"] = std::string("Bearer ") + key;
  }
  const auto res = transport.post("/v1/chat/completions", chat_body(cfg, messages), headers);
  if (res.status == 0) return {std::nullopt, "transport: " + res.error};
  if (res.status < 200 || res.status >= 300) return {std::nullopt, "http status " + std::to_string(res.status)};
  auto content = reply_content(res.body);
  if (!content) return {std::nullopt, "response has no choices[0].message.content"};
  return {content, {}};
}

}  // namespace

std::string system_prompt(OperatorKind kind) { return std::string(kGrammar) + "\n" + instruction(kind); }

std::vector<ChatMessage> request_messages(const OperatorRequest& request) {
  std::string user = request.kind == OperatorKind::Compatibility ? "Mechanics in the game:\n\n" : "Parent mechanics:\n\n";
  user += rendered(request.parents);
  return {{"system", system_prompt(request.kind)}, {"user", user}};
}

std::string chat_body(const ExternalGeneratorConfig& cfg, const std::vector<ChatMessage>& messages) {
  json j;
  j["model"] = cfg.model;
  j["temperature"] = cfg.temperature;
  json msgs = json::array();
  for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
  j["messages"] = msgs;
  return j.dump();
}

std::optional<std::string> reply_content(const std::string& body) {
  const json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  auto choices = j.find("choices");
  if (choices == j.end() || !choices->is_array() || choices->empty()) return std::nullopt;
  const json& first = (*choices)[0];
  if (!first.is_object() || !first.contains("message")) return std::nullopt;
  const json& msg = first["message"];
  if (!msg.is_object() || !msg.contains("content") || !msg["content"].is_string()) return std::nullopt;
  return msg["content"].get<std::string>();
}

std::string extract_dsl(const std::string& reply) {
  std::string text = reply;
  if (auto fence = text.find("```"); fence != std::string::npos) {
    auto start = text.find('\n', fence);
    auto end = start == std::string::npos ? std::string::npos : text.find("```", start);
    if (start != std::string::npos) text = text.substr(start + 1, end == std::string::npos ? end : end - start - 1);
  }
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return std::string(dsl::kHeader) + "\n";
  text = text.substr(first);
  if (text.rfind(dsl::kHeader, 0) != 0) text = std::string(dsl::kHeader) + "\n" + text;
  return text;
}

ProviderResult external_generate(const OperatorRequest& request, const ExternalGeneratorConfig& cfg,
                                 Transport& transport) {
  cfg.validate();
  ProviderResult r;
  auto messages = request_messages(request);
  for (int attempt = 1; attempt <= cfg.max_retries + 1; ++attempt) {
    r.attempts = attempt;
    auto ex = exchange(messages, cfg, transport);
    if (!ex.reply) {
      r.failure = ex.failure;
      continue;
    }
    try {
      r.spec = dsl::parse_mechanic(extract_dsl(*ex.reply));
      r.failure.clear();
      return r;
    } catch (const dsl::ParseError& e) {
      r.failure = std::string("unparseable reply: ") + e.what();
      messages.push_back({"assistant", *ex.reply});
      messages.push_back({"user", std::string("That did not parse: ") + e.what() + "\nOutput only the corrected mechanic."});
    }
  }
  return r;
}

RankResult external_rank(const std::vector<dsl::MechanicSpec>& candidates, const std::vector<dsl::MechanicSpec>& game,
                         const ExternalGeneratorConfig& cfg, Transport& transport) {
  cfg.validate();
  RankResult r;
  if (candidates.empty()) {
    r.failure = "no candidates";
    return r;
  }
  std::vector<ChatMessage> messages = {
      {"system", std::string(kGrammar) +
                     "\nChoose the candidate mechanic that best complements the game. Reply with its name only."},
      {"user", "Mechanics in the game:\n\n" + rendered(game) + "\nCandidates:\n\n" + rendered(candidates)}};
  for (int attempt = 1; attempt <= cfg.max_retries + 1; ++attempt) {
    r.attempts = attempt;
    auto ex = exchange(messages, cfg, transport);
    if (!ex.reply) {
      r.failure = ex.failure;
      continue;
    }
    // Longest matching name wins so that prefixes cannot shadow each other.
    std::size_t best_len = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const auto& name = candidates[i].name;
      if (ex.reply->find(name) != std::string::npos && name.size() > best_len) {
        best_len = name.size();
        r.choice = i;
      }
    }
    if (r.choice) {
      r.failure.clear();
      return r;
    }
    r.failure = "reply names no candidate";
    messages.push_back({"assistant", *ex.reply});
    messages.push_back({"user", "Reply with exactly one of the candidate names."});
  }
  return r;
}

ProviderResult ExternalProvider::generate(const OperatorRequest& request, Rng&) {
  ++calls_;
  return external_generate(request, cfg_, transport_);
}

}  // namespace mortar::gen
