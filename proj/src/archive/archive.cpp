#include "mortar/archive/archive.hpp"

#include <algorithm>
#include <cmath>

#include "mortar/core/json_io.hpp"
#include "mortar/dsl/text.hpp"

namespace mortar::archive {

using json_io::json;

CellIndex cell_index(const Descriptors& d) noexcept {
  auto bin = [](double v, double lo, double hi) {
    const double scaled = (v - lo) * kGrid / (hi - lo);
    if (!(scaled > 0.0)) return 0;  // also catches NaN
    return std::min(kGrid - 1, static_cast<int>(std::floor(scaled)));
  };
  return {bin(d.type_pos, kTypeMin, kTypeMax), bin(d.complexity, kComplexityMin, kComplexityMax)};
}

Descriptors describe(const dsl::MechanicSpec& m, dsl::DescriptorScheme scheme) {
  return {dsl::type_descriptor(m, dsl::CategoryLexicon::standard(), scheme).position, dsl::complexity(m).value};
}

std::string_view to_string(InsertResult r) noexcept {
  switch (r) {
    case InsertResult::Inserted: return "inserted";
    case InsertResult::Replaced: return "replaced";
    case InsertResult::Rejected: return "rejected";
  }
  return "rejected";
}

InsertResult Archive::insert(const dsl::MechanicSpec& m, double fitness) {
  if (!std::isfinite(fitness)) return InsertResult::Rejected;
  const Descriptors d = describe(m, scheme_);
  auto& cell = cells_[slot(cell_index(d))];
  if (!cell) {
    cell = Elite{m, fitness, d};
    return InsertResult::Inserted;
  }
  if (fitness > cell->fitness) {
    cell = Elite{m, fitness, d};
    return InsertResult::Replaced;
  }
  return InsertResult::Rejected;
}

void Archive::raise_fitness(const std::string& name, double fitness) {
  for (auto& cell : cells_) {
    if (cell && cell->mechanic.name == name && fitness > cell->fitness) cell->fitness = fitness;
  }
}

std::vector<CellIndex> Archive::occupied() const {
  std::vector<CellIndex> out;
  for (int r = 0; r < kGrid; ++r) {
    for (int c = 0; c < kGrid; ++c) {
      if (cells_[slot({r, c})]) out.push_back({r, c});
    }
  }
  return out;
}

std::vector<Elite> Archive::elites() const {
  std::vector<Elite> out;
  for (const auto& cell : cells_) {
    if (cell) out.push_back(*cell);
  }
  return out;
}

const Elite* Archive::find(const std::string& name) const {
  for (const auto& cell : cells_) {
    if (cell && cell->mechanic.name == name) return &*cell;
  }
  return nullptr;
}

int Archive::elites_count() const {
  return static_cast<int>(std::count_if(cells_.begin(), cells_.end(), [](const auto& c) { return c.has_value(); }));
}

double Archive::qd_score() const {
  double s = 0.0;
  for (const auto& cell : cells_) {
    if (cell) s += cell->fitness;
  }
  return s;
}

double Archive::max_fitness() const {
  double best = 0.0;
  bool any = false;
  for (const auto& cell : cells_) {
    if (cell) {
      best = any ? std::max(best, cell->fitness) : cell->fitness;
      any = true;
    }
  }
  return best;
}

double Archive::mean_fitness() const {
  const int n = elites_count();
  return n > 0 ? qd_score() / n : 0.0;
}

std::vector<dsl::MechanicSpec> Archive::select_batch(int k, Rng& rng) const {
  const auto occ = occupied();
  if (occ.empty()) throw Error("cannot select from an empty archive");
  std::vector<dsl::MechanicSpec> out;
  out.reserve(static_cast<std::size_t>(std::max(k, 0)));
  for (int i = 0; i < k; ++i) out.push_back(at(occ[rng.below(occ.size())])->mechanic);
  return out;
}

std::string Archive::to_json() const {
  json j;
  j["schema"] = kArchiveSchema;
  j["scheme"] = dsl::to_string(scheme_);
  j["grid"] = {kGrid, kGrid};
  json cells = json::array();
  for (const auto& c : occupied()) {
    const Elite& e = *at(c);
    cells.push_back({{"row", c.row},
                     {"col", c.col},
                     {"name", e.mechanic.name},
                     {"fitness", e.fitness},
                     {"type_pos", e.descriptors.type_pos},
                     {"complexity", e.descriptors.complexity},
                     {"dsl", dsl::render_mechanic(e.mechanic)}});
  }
  j["cells"] = cells;
  j["elites_count"] = elites_count();
  j["qd_score"] = qd_score();
  return j.dump(2) + "\n";
}

Archive Archive::from_json(const std::string& text) {
  using namespace json_io;
  const json j = parse(text);
  expect_schema(j, kArchiveSchema);
  const auto scheme_name = as_string(member(j, "scheme", ""), "scheme");
  dsl::DescriptorScheme scheme;
  if (scheme_name == "banded") {
    scheme = dsl::DescriptorScheme::Banded;
  } else if (scheme_name == "paper-literal") {
    scheme = dsl::DescriptorScheme::PaperLiteral;
  } else {
    throw SchemaError("scheme", "unknown descriptor scheme '" + scheme_name + "'");
  }
  Archive a(scheme);
  const json& cells = as_array(member(j, "cells", ""), "cells");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const std::string path = index("cells", i);
    const json& e = cells[i];
    const CellIndex c{static_cast<int>(as_int(member(e, "row", path), path + ".row")),
                      static_cast<int>(as_int(member(e, "col", path), path + ".col"))};
    if (c.row < 0 || c.col < 0 || c.row >= kGrid || c.col >= kGrid) throw SchemaError(path, "cell outside the grid");
    Elite elite;
    try {
      elite.mechanic = dsl::parse_mechanic(as_string(member(e, "dsl", path), path + ".dsl"));
    } catch (const dsl::ParseError& err) {
      throw SchemaError(path + ".dsl", err.what());
    }
    elite.fitness = as_double(member(e, "fitness", path), path + ".fitness");
    elite.descriptors = describe(elite.mechanic, scheme);
    if (cell_index(elite.descriptors) != c) throw SchemaError(path, "descriptors do not map to this cell");
    if (a.cells_[slot(c)]) throw SchemaError(path, "cell listed twice");
    a.cells_[slot(c)] = std::move(elite);
  }
  return a;
}

void OperatorSchedule::validate() const {
  for (double p : {diversity_mutation, mutation, crossover}) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("operator probabilities must lie in [0, 1]");
  }
  if (std::abs(diversity_mutation + mutation + crossover - 1.0) > 1e-9) {
    throw ConfigError("operator probabilities must sum to 1");
  }
}

gen::OperatorKind OperatorSchedule::sample(Rng& rng) const {
  const double u = rng.unit();
  if (u < diversity_mutation) return gen::OperatorKind::DiversityMutation;
  if (u < diversity_mutation + mutation) return gen::OperatorKind::Mutation;
  return gen::OperatorKind::Crossover;
}

std::string RunMetrics::to_json_line() const {
  json j;
  j["generation"] = generation;
  j["qd_score"] = qd_score;
  j["elites_count"] = elites_count;
  j["max_cits"] = max_cits;
  j["mean_cits"] = mean_cits;
  j["accumulated_tau"] = accumulated_tau;
  j["games_attempted"] = games_attempted;
  j["games_functional"] = games_functional;
  j["success_rate"] = success_rate();
  j["offspring"] = offspring;
  j["offspring_valid"] = offspring_valid;
  j["inserted"] = inserted;
  return j.dump();
}

}  // namespace mortar::archive
