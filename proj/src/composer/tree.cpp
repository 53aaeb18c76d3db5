#include "mortar/composer/tree.hpp"

#include "mortar/core/json_io.hpp"
#include "mortar/dsl/text.hpp"

namespace mortar::composer {

using json_io::json;

std::vector<dsl::MechanicSpec> EvalTree::specs_of(const EvalNode& n) const {
  std::vector<dsl::MechanicSpec> out;
  out.reserve(n.mechanics.size());
  for (const auto& name : n.mechanics) {
    auto it = registry.find(name);
    if (it == registry.end()) throw Error("mechanic '" + name + "' is not in the tree registry");
    out.push_back(it->second);
  }
  return out;
}

std::string tree_to_json(const EvalTree& tree) {
  json j;
  j["schema"] = kTreeSchema;
  j["root"] = tree.root;
  j["iterations_used"] = tree.iterations_used;
  json nodes = json::array();
  for (const auto& n : tree.nodes) {
    json e;
    e["id"] = n.id;
    e["parent"] = n.parent < 0 ? json(nullptr) : json(n.parent);
    e["mechanics"] = n.mechanics;
    e["added"] = n.added;
    e["tau"] = n.tau ? json(*n.tau) : json(nullptr);
    e["evaluated"] = n.evaluated;
    e["visits"] = n.visits;
    e["value_sum"] = n.value_sum;
    e["children"] = n.children;
    e["seed"] = n.seed;
    nodes.push_back(e);
  }
  j["nodes"] = nodes;
  json reg = json::object();
  for (const auto& [name, spec] : tree.registry) reg[name] = dsl::render_mechanic(spec);
  j["registry"] = reg;
  return j.dump(2) + "\n";
}

EvalTree tree_from_json(const std::string& text) {
  using namespace json_io;
  const json j = parse(text);
  expect_schema(j, kTreeSchema);
  EvalTree tree;
  tree.root = static_cast<int>(as_int(member(j, "root", ""), "root"));
  tree.iterations_used = static_cast<int>(as_int(member(j, "iterations_used", ""), "iterations_used"));

  const json& reg = member(j, "registry", "");
  if (!reg.is_object()) throw SchemaError("registry", "expected an object");
  for (const auto& [name, dsl_text] : reg.items()) {
    const std::string path = "registry." + name;
    try {
      tree.registry[name] = dsl::parse_mechanic(as_string(dsl_text, path));
    } catch (const dsl::ParseError& e) {
      throw SchemaError(path, e.what());
    }
  }

  const json& nodes = as_array(member(j, "nodes", ""), "nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string path = index("nodes", i);
    const json& e = nodes[i];
    EvalNode n;
    n.id = static_cast<int>(as_int(member(e, "id", path), path + ".id"));
    if (n.id != static_cast<int>(i)) throw SchemaError(path + ".id", "ids must equal array positions");
    const json& parent = member(e, "parent", path);
    n.parent = parent.is_null() ? -1 : static_cast<int>(as_int(parent, path + ".parent"));
    const json& mechs = as_array(member(e, "mechanics", path), path + ".mechanics");
    for (std::size_t k = 0; k < mechs.size(); ++k) {
      auto name = as_string(mechs[k], index(path + ".mechanics", k));
      if (!tree.registry.count(name)) throw SchemaError(index(path + ".mechanics", k), "not in registry");
      n.mechanics.push_back(name);
    }
    if (n.mechanics.empty()) throw SchemaError(path + ".mechanics", "must not be empty");
    n.added = e.contains("added") ? as_string(e["added"], path + ".added") : n.mechanics.back();
    const json& tau = member(e, "tau", path);
    if (!tau.is_null()) {
      const double t = as_double(tau, path + ".tau");
      if (t < -1.0 || t > 1.0) throw SchemaError(path + ".tau", "outside [-1, 1]");
      n.tau = t;
    }
    n.evaluated = e.contains("evaluated") ? as_bool(e["evaluated"], path + ".evaluated") : true;
    n.visits = static_cast<int>(as_int(member(e, "visits", path), path + ".visits"));
    n.value_sum = as_double(member(e, "value_sum", path), path + ".value_sum");
    if (e.contains("seed")) n.seed = as_uint(e["seed"], path + ".seed");
    if (e.contains("children")) {
      const json& ch = as_array(e["children"], path + ".children");
      for (std::size_t k = 0; k < ch.size(); ++k) {
        n.children.push_back(static_cast<int>(as_int(ch[k], index(path + ".children", k))));
      }
    }
    tree.nodes.push_back(std::move(n));
  }
  if (tree.nodes.empty()) throw SchemaError("nodes", "must not be empty");
  const int count = static_cast<int>(tree.nodes.size());
  if (tree.root < 0 || tree.root >= count) throw SchemaError("root", "no such node");
  // Rebuild children from parents when the file omits them, and check links.
  bool have_children = false;
  for (const auto& n : tree.nodes) have_children |= !n.children.empty();
  for (auto& n : tree.nodes) {
    const std::string path = index("nodes", static_cast<std::size_t>(n.id));
    if (n.id == tree.root) {
      if (n.parent != -1) throw SchemaError(path + ".parent", "root must not have a parent");
      continue;
    }
    if (n.parent < 0 || n.parent >= count || n.parent == n.id) throw SchemaError(path + ".parent", "no such node");
    if (!have_children) tree.node(n.parent).children.push_back(n.id);
  }
  for (const auto& n : tree.nodes) {
    int cur = n.id;
    for (int hops = 0; cur != tree.root; ++hops) {
      if (hops > count) throw SchemaError(index("nodes", static_cast<std::size_t>(n.id)) + ".parent", "cycle");
      cur = tree.node(cur).parent;
    }
    for (int c : n.children) {
      if (c < 0 || c >= count || tree.node(c).parent != n.id) {
        throw SchemaError(index("nodes", static_cast<std::size_t>(n.id)) + ".children", "inconsistent with parents");
      }
    }
  }
  return tree;
}

EvalTree load_tree_file(const std::string& path) { return tree_from_json(json_io::read_file(path)); }

void save_tree_file(const EvalTree& tree, const std::string& path) { json_io::write_file(path, tree_to_json(tree)); }

}  // namespace mortar::composer
