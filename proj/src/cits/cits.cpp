#include "mortar/cits/cits.hpp"

#include <algorithm>
#include <json.hpp>

#include "mortar/core/error.hpp"

namespace mortar::cits {

Coalition canonical(std::vector<std::string> names) {
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return names;
}

ValueTable ValueTable::from_tree(const composer::EvalTree& tree) {
  ValueTable t;
  for (const auto& n : tree.nodes) {
    if (n.tau) t.taus[canonical(n.mechanics)].push_back(*n.tau);
  }
  return t;
}

double value_of(const ValueTable& table, const Coalition& s) {
  auto it = table.taus.find(s);
  if (it == table.taus.end() || it->second.empty()) return 0.0;
  double sum = 0.0;
  for (double t : it->second) sum += t;
  return sum / static_cast<double>(it->second.size());
}

namespace {

// |S|! (n - |S| - 1)! / n!
double shapley_weight(std::size_t s, std::size_t n) {
  double w = 1.0 / static_cast<double>(n);
  for (std::size_t k = 1; k <= s; ++k) w *= static_cast<double>(k) / static_cast<double>(n - k);
  return w;
}

// Sum over subsets S of m \ {i} of weight(|S|) * (v(S + i) - v(S)).
template <typename V>
double shapley_of(const V& v, const Coalition& m, const std::string& i) {
  if (m.size() > kEnumerationCap) throw Error("coalition exceeds the enumeration cap of 12 mechanics");
  Coalition others;
  for (const auto& x : m) {
    if (x != i) others.push_back(x);
  }
  if (others.size() + 1 != m.size()) throw Error("mechanic '" + i + "' is not in the coalition");
  const std::size_t n = m.size();
  double total = 0.0;
  const std::size_t subsets = std::size_t{1} << others.size();
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    Coalition s;
    for (std::size_t b = 0; b < others.size(); ++b) {
      if (mask & (std::size_t{1} << b)) s.push_back(others[b]);
    }
    Coalition with = s;
    with.insert(std::lower_bound(with.begin(), with.end(), i), i);
    total += shapley_weight(s.size(), n) * (v(with) - v(s));
  }
  return total;
}

}  // namespace

double phi(const ValueTable& table, const Coalition& m, const std::string& i) {
  return shapley_of([&](const Coalition& s) { return value_of(table, s); }, m, i);
}

MechanicReport cits_detail(const composer::EvalTree& tree, const std::string& i) {
  const ValueTable table = ValueTable::from_tree(tree);
  MechanicReport r;
  bool present = false;
  for (const auto& n : tree.nodes) {
    if (std::find(n.mechanics.begin(), n.mechanics.end(), i) == n.mechanics.end()) continue;
    present = true;
    if (n.id == tree.root) continue;
    r.phi_values.push_back(phi(table, canonical(n.mechanics), i));
  }
  if (!present) throw Error("mechanic '" + i + "' does not appear in the tree");
  r.contributing_nodes = static_cast<int>(r.phi_values.size());
  if (r.phi_values.empty()) {
    r.root_only = true;
    return r;
  }
  double sum = 0.0;
  for (double p : r.phi_values) sum += p;
  r.cits = sum / static_cast<double>(r.phi_values.size());
  return r;
}

double cits(const composer::EvalTree& tree, const std::string& i) { return cits_detail(tree, i).cits; }

CitsReport cits_report(const composer::EvalTree& tree) {
  CitsReport report;
  for (const auto& [name, spec] : tree.registry) {
    bool used = false;
    for (const auto& n : tree.nodes) {
      used |= std::find(n.mechanics.begin(), n.mechanics.end(), name) != n.mechanics.end();
    }
    if (!used) {
      // Registered but never placed in a node: nothing to attribute.
      report.mechanics[name] = {};
      continue;
    }
    report.mechanics[name] = cits_detail(tree, name);
  }
  return report;
}

std::string report_to_json(const CitsReport& report) {
  nlohmann::json j;
  j["schema"] = kCitsSchema;
  nlohmann::json mechs = nlohmann::json::object();
  for (const auto& [name, r] : report.mechanics) {
    mechs[name] = {{"cits", r.cits},
                   {"contributing_nodes", r.contributing_nodes},
                   {"phi_values", r.phi_values},
                   {"root_only", r.root_only}};
  }
  j["mechanics"] = mechs;
  return j.dump(2) + "\n";
}

std::map<std::string, double> brute_force_shapley(const ValueFn& v, const Coalition& m) {
  // Permutation averaging: independent of the subset formula used by phi.
  if (m.size() > kEnumerationCap) throw Error("coalition exceeds the enumeration cap of 12 mechanics");
  std::map<std::string, double> out;
  for (const auto& i : m) out[i] = 0.0;
  Coalition order = m;
  std::sort(order.begin(), order.end());
  long long perms = 0;
  do {
    Coalition prefix;
    double before = v(prefix);
    for (const auto& i : order) {
      prefix.insert(std::lower_bound(prefix.begin(), prefix.end(), i), i);
      const double after = v(prefix);
      out[i] += after - before;
      before = after;
    }
    ++perms;
  } while (std::next_permutation(order.begin(), order.end()));
  for (auto& [name, total] : out) total /= static_cast<double>(perms);
  return out;
}

double mechanic_fitness(const composer::EvalTree& tree, const std::string& mechanic) { return cits(tree, mechanic); }

void FitnessBook::record(const std::string& mechanic, double fitness) {
  auto [it, inserted] = best_.try_emplace(mechanic, fitness);
  if (!inserted) it->second = std::max(it->second, fitness);
}

double FitnessBook::get(const std::string& mechanic) const {
  auto it = best_.find(mechanic);
  if (it == best_.end()) throw Error("no fitness recorded for '" + mechanic + "'");
  return it->second;
}

}  // namespace mortar::cits
