#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mortar/gen/provider.hpp"

namespace mortar::gen {

struct ExternalGeneratorConfig {
  std::string base_url;  // e.g. https://api.openai.com
  std::string model = "gpt-4o-mini";
  std::string api_key_env = "MORTAR_API_KEY";
  double timeout_seconds = 30.0;
  int max_retries = 2;
  double temperature = 0.7;

  bool configured() const noexcept { return !base_url.empty(); }
  void validate() const;  // throws ConfigError
};

struct HttpResponse {
  int status = 0;  // 0 on transport failure
  std::string body;
  std::string error;
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const std::string& path, const std::string& body,
                            const std::map<std::string, std::string>& headers) = 0;
};

// cpp-httplib client bound to the scheme, host and port of base_url; any
// path in base_url is prefixed to request paths.
class HttpTransport final : public Transport {
 public:
  HttpTransport(std::string base_url, double timeout_seconds);
  HttpResponse post(const std::string& path, const std::string& body,
                    const std::map<std::string, std::string>& headers) override;

 private:
  std::string origin_;
  std::string prefix_;
  double timeout_;
};

struct ChatMessage {
  std::string role;
  std::string content;
};

std::string system_prompt(OperatorKind kind);
std::vector<ChatMessage> request_messages(const OperatorRequest& request);
std::string chat_body(const ExternalGeneratorConfig& cfg, const std::vector<ChatMessage>& messages);

// choices[0].message.content, or nullopt when the body has no such member.
std::optional<std::string> reply_content(const std::string& body);

// Drops code fences and adds the DSL header when the reply omits it.
std::string extract_dsl(const std::string& reply);

// One chat exchange per attempt; a parse failure is fed back to the model.
ProviderResult external_generate(const OperatorRequest& request, const ExternalGeneratorConfig& cfg,
                                 Transport& transport);

// Asks the model to choose among candidate mechanics; returns the index.
struct RankResult {
  std::optional<std::size_t> choice;
  std::string failure;
  int attempts = 0;
};
RankResult external_rank(const std::vector<dsl::MechanicSpec>& candidates, const std::vector<dsl::MechanicSpec>& game,
                         const ExternalGeneratorConfig& cfg, Transport& transport);

class ExternalProvider final : public GeneratorProvider {
 public:
  ExternalProvider(ExternalGeneratorConfig cfg, Transport& transport) : cfg_(std::move(cfg)), transport_(transport) {}
  ProviderResult generate(const OperatorRequest& request, Rng& rng) override;
  std::string name() const override { return "external"; }
  int calls() const noexcept { return calls_; }

 private:
  ExternalGeneratorConfig cfg_;
  Transport& transport_;
  int calls_ = 0;
};

}  // namespace mortar::gen
