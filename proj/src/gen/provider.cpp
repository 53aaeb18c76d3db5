#include "mortar/gen/provider.hpp"

#include "mortar/core/error.hpp"
#include "mortar/gen/operators.hpp"

namespace mortar::gen {

std::string_view to_string(OperatorKind k) noexcept {
  switch (k) {
    case OperatorKind::Mutation: return "mutation";
    case OperatorKind::DiversityMutation: return "diversity-mutation";
    case OperatorKind::Crossover: return "crossover";
    case OperatorKind::Compatibility: return "compatibility-mutation";
  }
  return "mutation";
}

ProviderResult RuleBasedProvider::generate(const OperatorRequest& request, Rng& rng) {
  ProviderResult r;
  r.attempts = 1;
  try {
    const auto& p = request.parents;
    switch (request.kind) {
      case OperatorKind::Mutation:
        if (p.empty()) throw Error("mutation needs one parent");
        r.spec = mutate(p.front(), rng);
        break;
      case OperatorKind::DiversityMutation: r.spec = diversity_mutate(p, rng); break;
      case OperatorKind::Crossover:
        if (p.size() < 2) throw Error("crossover needs two parents");
        r.spec = crossover(p[0], p[1], rng);
        break;
      case OperatorKind::Compatibility: r.spec = compatibility_mutate(p, rng); break;
    }
  } catch (const Error& e) {
    r.spec.reset();
    r.failure = e.what();
  }
  return r;
}

ProviderResult StubProvider::generate(const OperatorRequest&, Rng&) {
  ProviderResult r;
  r.attempts = 1;
  if (outputs_.empty()) {
    r.failure = "stub has no outputs";
  } else {
    r.spec = outputs_[static_cast<std::size_t>(calls_) % outputs_.size()];
  }
  ++calls_;
  return r;
}

ProviderResult FallbackProvider::generate(const OperatorRequest& request, Rng& rng) {
  auto r = primary_.generate(request, rng);
  if (r.ok()) return r;
  auto f = fallback_.generate(request, rng);
  f.attempts += r.attempts;
  return f;
}

}  // namespace mortar::gen
