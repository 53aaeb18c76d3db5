#include "mortar/dsl/descriptors.hpp"

#include <algorithm>
#include <cmath>

namespace mortar::dsl {

ComplexityScore complexity(const MechanicSpec& spec) {
  return {kEffectWeight * static_cast<double>(spec.effect_count()) +
          kParamWeight * static_cast<double>(spec.params.size()) +
          kOutcomeWeight * static_cast<double>(spec.outcomes.size())};
}

const CategoryLexicon& CategoryLexicon::standard() {
  static const CategoryLexicon lexicon{{
      {"movement", {"move", "walk", "run", "jump", "fly", "teleport", "dash", "swim", "climb", "crouch", "sprint"}},
      {"interaction", {"pick", "use", "interact", "open", "close", "talk", "trade", "craft", "activate", "push", "pull"}},
      {"combat", {"attack", "fight", "hit", "shoot", "defend", "block", "dodge", "cast", "spell", "heal", "damage"}},
      {"progression", {"level", "upgrade", "unlock", "improve", "evolve", "progress", "achieve", "complete", "quest", "mission"}},
      {"environment", {"weather", "day", "night", "season", "climate", "destroy", "build", "terraform", "grow", "plant"}},
      {"puzzle", {"solve", "puzzle", "riddle", "match", "connect", "arrange", "decode", "decipher", "logic", "pattern"}},
      {"resource management", {"collect", "gather", "manage", "inventory", "store", "spend", "earn", "balance", "allocate", "distribute"}},
      {"exploration", {"explore", "discover", "map", "reveal", "uncover", "navigate", "search", "investigate", "scout", "survey"}},
      {"time manipulation", {"time", "slow", "fast", "rewind", "forward", "pause", "resume", "loop", "cycle", "sequence"}},
  }};
  return lexicon;
}

std::string_view to_string(DescriptorScheme s) noexcept {
  return s == DescriptorScheme::Banded ? "banded" : "paper-literal";
}

std::vector<std::string> name_tokens(std::string_view name) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= name.size()) {
    auto end = name.find('_', start);
    if (end == std::string_view::npos) end = name.size();
    std::string tok;
    for (char c : name.substr(start, end - start)) {
      tok += static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
    }
    const bool numeric = !tok.empty() && std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; });
    if (!tok.empty() && !numeric) out.push_back(std::move(tok));
    start = end + 1;
  }
  return out;
}

double lexical_similarity(std::string_view a, std::string_view b) {
  if (a.empty() || b.empty()) return 0.0;
  if (a == b) return 1.0;
  if (a.size() >= 4 && b.size() >= 4 && a.substr(0, 4) == b.substr(0, 4)) return 0.75;
  std::vector<int> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return static_cast<double>(prev[b.size()]) / static_cast<double>(std::max(a.size(), b.size()));
}

TypeDescriptor type_descriptor(const MechanicSpec& spec, const CategoryLexicon& lexicon, DescriptorScheme scheme) {
  TypeDescriptor d;
  const auto tokens = name_tokens(spec.name);
  double best = -1.0;
  for (std::size_t ci = 0; ci < lexicon.categories.size(); ++ci) {
    double sim = 0.0;
    for (const auto& t : tokens) {
      for (const auto& k : lexicon.categories[ci].keywords) sim = std::max(sim, lexical_similarity(t, k));
    }
    if (sim > best) {
      best = sim;
      d.category_index = static_cast<int>(ci);
    }
  }
  d.max_similarity = std::max(best, 0.0);
  const double bands = static_cast<double>(lexicon.categories.size());
  if (scheme == DescriptorScheme::Banded) {
    const double upper = (d.category_index + 1) / bands;
    d.position = (d.category_index + d.max_similarity) / bands;
    // A perfect match would land on the next band's lower edge.
    if (d.position >= upper) d.position = std::nextafter(upper, 0.0);
  } else {
    d.position = d.category_index * d.max_similarity / (bands - 1.0);
  }
  d.position = std::clamp(d.position, 0.0, 1.0);
  return d;
}

}  // namespace mortar::dsl
