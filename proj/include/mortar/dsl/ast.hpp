#pragma once

#include <map>
#include <string>
#include <vector>

#include "mortar/dsl/mechanic.hpp"

namespace mortar::dsl {

enum class NodeKind { Selector, Condition, Effect, ParamBinding, Branch };

std::string_view to_string(NodeKind k) noexcept;

// Tree view of a mechanic. The root is a branch labelled with the trigger;
// its children are the param bindings, the selector, the top-level
// conditions and one branch per outcome (guards, then effects).
struct AstNode {
  NodeKind kind = NodeKind::Branch;
  std::string label;  // canonical rendering of the node
  std::map<std::string, std::string> attributes;
  std::vector<AstNode> children;
};

AstNode build_ast(const MechanicSpec& spec);

std::size_t node_count(const AstNode& root);

// Jaccard similarity of the multisets of (kind, label) pairs of the two ASTs.
// Symmetric; 1.0 when the multisets coincide (the mechanic name is not part
// of the tree), 0.0 when no pair is shared.
double ast_similarity(const MechanicSpec& a, const MechanicSpec& b);

}  // namespace mortar::dsl
