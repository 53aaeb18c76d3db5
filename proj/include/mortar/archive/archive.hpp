#pragma once

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "mortar/core/rng.hpp"
#include "mortar/dsl/descriptors.hpp"
#include "mortar/dsl/mechanic.hpp"
#include "mortar/gen/provider.hpp"

namespace mortar::archive {

inline constexpr const char* kArchiveSchema = "mortararchive/1";
inline constexpr int kGrid = 13;
inline constexpr double kTypeMin = 0.0, kTypeMax = 1.0;
inline constexpr double kComplexityMin = 4.0, kComplexityMax = 40.0;

struct Descriptors {
  double type_pos = 0.0;
  double complexity = 0.0;
  bool operator==(const Descriptors&) const = default;
};

struct CellIndex {
  int row = 0;  // type bin
  int col = 0;  // complexity bin
  auto operator<=>(const CellIndex&) const = default;
};

// Out-of-range descriptors clamp to the edge bins.
CellIndex cell_index(const Descriptors& d) noexcept;

Descriptors describe(const dsl::MechanicSpec& m, dsl::DescriptorScheme scheme = dsl::DescriptorScheme::Banded);

struct Elite {
  dsl::MechanicSpec mechanic;
  double fitness = 0.0;
  Descriptors descriptors;
};

enum class InsertResult { Inserted, Replaced, Rejected };
std::string_view to_string(InsertResult r) noexcept;

class Archive {
 public:
  explicit Archive(dsl::DescriptorScheme scheme = dsl::DescriptorScheme::Banded) : scheme_(scheme) {}

  // Empty cell: inserted. Occupied: replaced only on strictly greater
  // fitness. Non-finite fitness is rejected.
  InsertResult insert(const dsl::MechanicSpec& m, double fitness);

  // Raises the fitness of the occupant named `name` (never lowers it).
  void raise_fitness(const std::string& name, double fitness);

  const std::optional<Elite>& at(CellIndex c) const { return cells_[slot(c)]; }
  std::vector<CellIndex> occupied() const;  // row-major
  std::vector<Elite> elites() const;        // row-major
  const Elite* find(const std::string& name) const;

  int elites_count() const;
  double qd_score() const;
  double max_fitness() const;   // 0 when empty
  double mean_fitness() const;  // 0 when empty
  bool empty() const { return elites_count() == 0; }
  dsl::DescriptorScheme scheme() const noexcept { return scheme_; }

  // k uniform draws with replacement over occupied cells. Throws Error when empty.
  std::vector<dsl::MechanicSpec> select_batch(int k, Rng& rng) const;

  std::string to_json() const;
  static Archive from_json(const std::string& text);  // throws SchemaError

 private:
  static std::size_t slot(CellIndex c) { return static_cast<std::size_t>(c.row * kGrid + c.col); }

  dsl::DescriptorScheme scheme_;
  std::array<std::optional<Elite>, kGrid * kGrid> cells_{};
};

struct OperatorSchedule {
  double diversity_mutation = 0.5;
  double mutation = 0.3;
  double crossover = 0.2;

  void validate() const;  // throws ConfigError unless each is in [0,1] and they sum to 1
  gen::OperatorKind sample(Rng& rng) const;
};

struct RunMetrics {
  int generation = 0;
  double qd_score = 0.0;
  int elites_count = 0;
  double max_cits = 0.0;
  double mean_cits = 0.0;
  double accumulated_tau = 0.0;
  int games_attempted = 0;
  int games_functional = 0;
  int offspring = 0;
  int offspring_valid = 0;
  int inserted = 0;

  double success_rate() const noexcept {
    return games_attempted > 0 ? static_cast<double>(games_functional) / games_attempted : 0.0;
  }
  std::string to_json_line() const;  // one JSONL row, fixed key order
};

}  // namespace mortar::archive
