#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mortar/core/rng.hpp"
#include "mortar/dsl/mechanic.hpp"

namespace mortar::gen {

enum class OperatorKind { Mutation, DiversityMutation, Crossover, Compatibility };
std::string_view to_string(OperatorKind k) noexcept;

struct OperatorRequest {
  OperatorKind kind = OperatorKind::Mutation;
  std::vector<dsl::MechanicSpec> parents;  // context mechanics for Compatibility
};

struct ProviderResult {
  std::optional<dsl::MechanicSpec> spec;
  std::string failure;  // set when spec is empty
  int attempts = 0;

  bool ok() const noexcept { return spec.has_value(); }
};

class GeneratorProvider {
 public:
  virtual ~GeneratorProvider() = default;
  virtual ProviderResult generate(const OperatorRequest& request, Rng& rng) = 0;
  virtual std::string name() const = 0;
};

// Applies the rule-based operator matching the request kind.
class RuleBasedProvider final : public GeneratorProvider {
 public:
  ProviderResult generate(const OperatorRequest& request, Rng& rng) override;
  std::string name() const override { return "rule-based"; }
};

// Returns canned outputs in rotation (or failure when empty). Counts calls.
class StubProvider final : public GeneratorProvider {
 public:
  explicit StubProvider(std::vector<dsl::MechanicSpec> outputs) : outputs_(std::move(outputs)) {}
  ProviderResult generate(const OperatorRequest& request, Rng& rng) override;
  std::string name() const override { return "stub"; }
  int calls() const noexcept { return calls_; }

 private:
  std::vector<dsl::MechanicSpec> outputs_;
  int calls_ = 0;
};

// Tries `primary`, then `fallback` when the primary reports failure.
class FallbackProvider final : public GeneratorProvider {
 public:
  FallbackProvider(GeneratorProvider& primary, GeneratorProvider& fallback) : primary_(primary), fallback_(fallback) {}
  ProviderResult generate(const OperatorRequest& request, Rng& rng) override;
  std::string name() const override { return primary_.name() + "+" + fallback_.name(); }

 private:
  GeneratorProvider& primary_;
  GeneratorProvider& fallback_;
};

}  // namespace mortar::gen
