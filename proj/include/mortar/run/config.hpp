#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mortar/archive/archive.hpp"
#include "mortar/composer/composer.hpp"
#include "mortar/gen/external.hpp"
#include "mortar/gen/validation.hpp"

namespace CLI {
class App;
}

namespace mortar::run {

struct RunConfig {
  std::uint64_t seed = 0;
  int generations = 20;
  int batch_size = 10;
  archive::OperatorSchedule operators;
  composer::ComposerConfig composer;
  std::vector<int> ladder = {2000, 200, 20};
  int episodes = 20;
  int workers = 1;
  composer::Strategy strategy = composer::Strategy::EvalMcts;
  dsl::DescriptorScheme scheme = dsl::DescriptorScheme::Banded;
  bool crossover_most_similar = true;
  gen::ProbeConfig probe;
  gen::ExternalGeneratorConfig external;
  bool external_operators = false;  // route the evolutionary operators through the external generator
  std::string output_dir = "runs";

  void validate() const;  // throws ConfigError
  std::string to_text() const;  // a config file that reproduces this config
};

// Default and large-scale iteration ladders.
inline const std::vector<int> kDeskLadderValues = {2000, 200, 20};
inline const std::vector<int> kPaperLadderValues = {100000, 10000, 1000};

// Binds every config key as a long option (--key) of `app` and as a key of
// the file given by --config. Call finalize_options after parsing.
struct OptionBinding;
std::shared_ptr<OptionBinding> add_run_options(CLI::App& app, RunConfig& cfg);
void finalize_options(const OptionBinding& binding, RunConfig& cfg);

// Parses a config file ("key = value" lines, '#' comments) plus overriding
// command-line style arguments.
RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides = {});
RunConfig parse_run_config_text(const std::string& text);

}  // namespace mortar::run
