#include "mortar/dsl/ast.hpp"

#include <algorithm>

#include "mortar/dsl/text.hpp"

namespace mortar::dsl {

std::string_view to_string(NodeKind k) noexcept {
  switch (k) {
    case NodeKind::Selector: return "selector";
    case NodeKind::Condition: return "condition";
    case NodeKind::Effect: return "effect";
    case NodeKind::ParamBinding: return "param-binding";
    case NodeKind::Branch: return "branch";
  }
  return "?";
}

namespace {

AstNode condition_node(const Condition& c) {
  return {NodeKind::Condition, render_condition(c), {{"op", std::string(to_string(c.kind))}}, {}};
}

void collect(const AstNode& n, std::map<std::pair<NodeKind, std::string>, int>& bag) {
  ++bag[{n.kind, n.label}];
  for (const auto& c : n.children) collect(c, bag);
}

}  // namespace

AstNode build_ast(const MechanicSpec& m) {
  AstNode root{NodeKind::Branch, "mechanic " + std::string(to_string(m.trigger)), {{"trigger", std::string(to_string(m.trigger))}}, {}};
  for (const auto& p : m.params) {
    root.children.push_back({NodeKind::ParamBinding, "let " + render_param(p), {{"name", p.name}}, {}});
  }
  root.children.push_back({NodeKind::Selector,
                           render_selector(m.selector),
                           {{"op", std::string(to_string(m.selector.kind))},
                            {"pick", std::string(to_string(m.selector.pick))}},
                           {}});
  for (const auto& c : m.conditions) root.children.push_back(condition_node(c));
  for (const auto& o : m.outcomes) {
    AstNode branch{NodeKind::Branch, "outcome", {}, {}};
    std::string ops;
    for (const auto& g : o.guards) branch.children.push_back(condition_node(g));
    for (const auto& e : o.effects) {
      branch.children.push_back({NodeKind::Effect, render_effect(e), {{"op", std::string(to_string(e.kind))}}, {}});
      ops += (ops.empty() ? "" : ",") + std::string(to_string(e.kind));
    }
    branch.label = "outcome:" + ops;
    root.children.push_back(std::move(branch));
  }
  return root;
}

std::size_t node_count(const AstNode& n) {
  std::size_t total = 1;
  for (const auto& c : n.children) total += node_count(c);
  return total;
}

double ast_similarity(const MechanicSpec& a, const MechanicSpec& b) {
  std::map<std::pair<NodeKind, std::string>, int> ba, bb;
  collect(build_ast(a), ba);
  collect(build_ast(b), bb);
  long inter = 0, uni = 0;
  auto ia = ba.begin();
  auto ib = bb.begin();
  while (ia != ba.end() || ib != bb.end()) {
    if (ib == bb.end() || (ia != ba.end() && ia->first < ib->first)) {
      uni += ia->second;
      ++ia;
    } else if (ia == ba.end() || ib->first < ia->first) {
      uni += ib->second;
      ++ib;
    } else {
      inter += std::min(ia->second, ib->second);
      uni += std::max(ia->second, ib->second);
      ++ia;
      ++ib;
    }
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace mortar::dsl
