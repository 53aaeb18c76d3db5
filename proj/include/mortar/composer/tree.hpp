#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mortar/dsl/mechanic.hpp"

namespace mortar::composer {

inline constexpr const char* kTreeSchema = "mortartree/1";

struct EvalNode {
  int id = 0;
  int parent = -1;
  std::vector<std::string> mechanics;  // root mechanic first, then in order of addition
  std::string added;                   // the mechanic this node added (root: the root mechanic)
  std::optional<double> tau;           // absent when the composed game was non-functional
  bool evaluated = false;
  int visits = 0;
  double value_sum = 0.0;
  std::vector<int> children;
  std::uint64_t seed = 0;  // evaluation seed
  bool exhausted = false;  // expansion found no candidate

  double mean_value() const noexcept { return visits > 0 ? value_sum / visits : 0.0; }
  std::size_t depth() const noexcept { return mechanics.size(); }
};

struct EvalTree {
  std::vector<EvalNode> nodes;  // index == id
  int root = 0;
  int iterations_used = 0;
  std::map<std::string, dsl::MechanicSpec> registry;

  const EvalNode& node(int id) const { return nodes.at(static_cast<std::size_t>(id)); }
  EvalNode& node(int id) { return nodes.at(static_cast<std::size_t>(id)); }
  std::vector<dsl::MechanicSpec> specs_of(const EvalNode& n) const;
};

std::string tree_to_json(const EvalTree& tree);
EvalTree tree_from_json(const std::string& text);  // throws SchemaError
EvalTree load_tree_file(const std::string& path);
void save_tree_file(const EvalTree& tree, const std::string& path);

}  // namespace mortar::composer
