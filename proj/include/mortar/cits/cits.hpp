#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mortar/composer/tree.hpp"

namespace mortar::cits {

inline constexpr const char* kCitsSchema = "mortarcits/1";
inline constexpr std::size_t kEnumerationCap = 12;

using Coalition = std::vector<std::string>;  // sorted, unique

Coalition canonical(std::vector<std::string> names);

// Canonical mechanic set -> tau of every functional node carrying exactly it.
struct ValueTable {
  std::map<Coalition, std::vector<double>> taus;

  static ValueTable from_tree(const composer::EvalTree& tree);
};

// Mean of the recorded taus; 0 when the set was never evaluated.
double value_of(const ValueTable& table, const Coalition& s);

// Shapley value of `i` in the game restricted to the subsets of `m`, with v
// read from the table. Throws Error if i is not in m or |m| exceeds the cap.
double phi(const ValueTable& table, const Coalition& m, const std::string& i);

struct MechanicReport {
  double cits = 0.0;
  int contributing_nodes = 0;
  std::vector<double> phi_values;
  bool root_only = false;
};

struct CitsReport {
  std::map<std::string, MechanicReport> mechanics;
};

// Mean phi over the non-root nodes containing i. Root-only mechanics score 0
// and are flagged. Throws Error when i is absent from the tree.
MechanicReport cits_detail(const composer::EvalTree& tree, const std::string& i);
double cits(const composer::EvalTree& tree, const std::string& i);

// One entry per registry mechanic.
CitsReport cits_report(const composer::EvalTree& tree);
std::string report_to_json(const CitsReport& report);

using ValueFn = std::function<double(const Coalition&)>;

// Exact Shapley values by subset enumeration over m.
std::map<std::string, double> brute_force_shapley(const ValueFn& v, const Coalition& m);

double mechanic_fitness(const composer::EvalTree& tree, const std::string& mechanic);

// Best fitness of each mechanic across every tree it appeared in.
class FitnessBook {
 public:
  void record(const std::string& mechanic, double fitness);
  double get(const std::string& mechanic) const;  // throws if never recorded
  bool has(const std::string& mechanic) const { return best_.count(mechanic) > 0; }

 private:
  std::map<std::string, double> best_;
};

}  // namespace mortar::cits
