#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mortar/dsl/mechanic.hpp"

namespace mortar::dsl {

// Weighted AST size: 3 per effect, 2 per param binding, 1 per outcome branch.
struct ComplexityScore {
  double value = 0.0;
};

inline constexpr double kEffectWeight = 3.0;
inline constexpr double kParamWeight = 2.0;
inline constexpr double kOutcomeWeight = 1.0;

ComplexityScore complexity(const MechanicSpec& spec);

struct Category {
  std::string name;
  std::vector<std::string> keywords;
};

// The nine mechanic categories in their fixed order.
struct CategoryLexicon {
  std::vector<Category> categories;

  static const CategoryLexicon& standard();
};

enum class DescriptorScheme {
  Banded,        // (index + similarity) / 9, kept inside the category band
  PaperLiteral,  // index * similarity / 8
};

std::string_view to_string(DescriptorScheme s) noexcept;

struct TypeDescriptor {
  int category_index = 0;
  double max_similarity = 0.0;
  double position = 0.0;
};

// Lowercase '_'-separated tokens of a mechanic name; purely numeric tokens
// (uniqueness suffixes) are dropped.
std::vector<std::string> name_tokens(std::string_view name);

// 1.0 on exact match, 0.75 on a shared 4-character prefix, otherwise
// LCS(a, b) / max(|a|, |b|).
double lexical_similarity(std::string_view a, std::string_view b);

TypeDescriptor type_descriptor(const MechanicSpec& spec,
                               const CategoryLexicon& lexicon = CategoryLexicon::standard(),
                               DescriptorScheme scheme = DescriptorScheme::Banded);

}  // namespace mortar::dsl
