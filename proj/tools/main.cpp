#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "mortar/cits/cits.hpp"
#include "mortar/core/json_io.hpp"
#include "mortar/engine/game_json.hpp"
#include "mortar/run/config.hpp"
#include "mortar/run/play.hpp"
#include "mortar/run/runner.hpp"
#include "mortar/skill/skill.hpp"

namespace fs = std::filesystem;
using namespace mortar;

namespace {

std::vector<composer::Strategy> parse_strategies(const std::vector<std::string>& names) {
  std::vector<composer::Strategy> out;
  for (const auto& n : names) out.push_back(*composer::strategy_from(n));
  return out;
}

// The run options after the subcommand name, minus the subcommand's own
// options, so a config file can be reloaded with command-line precedence.
std::vector<std::string> run_args(int argc, char** argv, const std::vector<std::string>& own) {
  std::vector<std::string> out;
  bool after = false;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (!after) {
      after = a == "evolve" || a == "ablate";
      continue;
    }
    const std::string key = a.substr(0, a.find('='));
    if (std::find(own.begin(), own.end(), key) != own.end()) {
      if (key == a) ++i;  // value follows
      continue;
    }
    out.push_back(a);
  }
  return out;
}

int cmd_evolve(const run::RunConfig& cfg, const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) {
    const auto r = run::run_evolution(cfg);
    const auto& last = r.metrics.back();
    std::cout << r.dir << ": " << last.elites_count << " elites, qd_score " << last.qd_score << ", max CITS "
              << last.max_cits << "\n";
    return 0;
  }
  std::vector<double> qd, max_cits;
  for (auto seed : seeds) {
    run::RunConfig c = cfg;
    c.seed = seed;
    const auto r = run::run_evolution(c);
    qd.push_back(r.archive.qd_score());
    max_cits.push_back(r.archive.max_fitness());
    std::cout << r.dir << ": qd_score " << qd.back() << ", max CITS " << max_cits.back() << "\n";
  }
  const auto [qd_mean, qd_std] = run::mean_std(qd);
  const auto [mc_mean, mc_std] = run::mean_std(max_cits);
  nlohmann::json doc = {{"schema", "mortarsweep/1"},
                        {"seeds", seeds},
                        {"qd_score", qd},
                        {"max_cits", max_cits},
                        {"qd_score_mean", qd_mean},
                        {"qd_score_std", qd_std},
                        {"max_cits_mean", mc_mean},
                        {"max_cits_std", mc_std}};
  json_io::write_file((fs::path(cfg.output_dir) / "sweep-summary.json").string(), doc.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mortar: evolves grid-game mechanics and scores them by the games built around them"};
  app.require_subcommand(1);

  run::RunConfig evolve_cfg;
  std::vector<std::uint64_t> sweep_seeds;
  auto* evolve = app.add_subcommand("evolve", "run the evolutionary loop");
  auto evolve_binding = run::add_run_options(*evolve, evolve_cfg);
  std::string evolve_config;
  evolve->add_option("--config", evolve_config, "key = value config file; keys mirror the long options");
  evolve->add_option("--seeds", sweep_seeds, "run once per seed and write sweep-summary.json")->delimiter(',');

  run::RunConfig ablate_cfg;
  std::vector<std::uint64_t> ablate_seeds = {0};
  std::vector<std::string> ablate_strategies = {"random", "greedy", "eval-mcts"};
  auto* ablate = app.add_subcommand("ablate", "one run per strategy and seed, with ablation-summary.json");
  auto ablate_binding = run::add_run_options(*ablate, ablate_cfg);
  std::string ablate_config;
  ablate->add_option("--config", ablate_config, "key = value config file; keys mirror the long options");
  ablate->add_option("--seeds", ablate_seeds)->delimiter(',');
  ablate->add_option("--strategies", ablate_strategies)
      ->delimiter(',')
      ->check(CLI::IsMember({"eval-mcts", "random", "greedy", "external"}));

  std::string game_path, eval_out, ladder = "2000,200,20";
  int episodes = 20, workers = 1;
  std::uint64_t eval_seed = 0;
  auto* eval = app.add_subcommand("eval-game", "rank the agent pool on an exported game");
  eval->add_option("path", game_path)->required();
  eval->add_option("--ladder", ladder, "MCTS iteration ladder I1,I2,I3");
  eval->add_option("--episodes", episodes);
  eval->add_option("--workers", workers);
  eval->add_option("--seed", eval_seed);
  eval->add_option("--out", eval_out, "record file (default: <path stem>.eval.json)");

  std::string play_path, trace_out;
  auto* play = app.add_subcommand("play", "play a game in the terminal; keys are read from stdin");
  play->add_option("path", play_path)->required();
  play->add_option("--trace", trace_out, "trace file (default: <path stem>.trace.jsonl)");

  std::string run_dir, out_dir;
  auto* exp = app.add_subcommand("export", "write every functional game of a run as mortargame/1 files");
  exp->add_option("--run", run_dir)->required();
  exp->add_option("--out", out_dir)->required();

  std::string tree_path, cits_out;
  auto* cits_cmd = app.add_subcommand("cits", "CITS report for a tree dump");
  cits_cmd->add_option("path", tree_path)->required();
  cits_cmd->add_option("--out", cits_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*evolve) {
      run::finalize_options(*evolve_binding, evolve_cfg);
      if (!evolve_config.empty()) {
        evolve_cfg = run::load_run_config(evolve_config, run_args(argc, argv, {"--config", "--seeds"}));
      }
      return cmd_evolve(evolve_cfg, sweep_seeds);
    }
    if (*ablate) {
      run::finalize_options(*ablate_binding, ablate_cfg);
      if (!ablate_config.empty()) {
        ablate_cfg = run::load_run_config(ablate_config, run_args(argc, argv, {"--config", "--seeds", "--strategies"}));
      }
      const auto entries = run::run_ablation(ablate_cfg, parse_strategies(ablate_strategies), ablate_seeds);
      for (const auto& e : entries) {
        for (const auto& r : e.runs) {
          std::cout << composer::to_string(e.strategy) << " " << r.dir << ": max CITS " << r.archive.max_fitness()
                    << ", mean CITS " << r.archive.mean_fitness() << "\n";
        }
      }
      std::cout << (fs::path(ablate_cfg.output_dir) / "ablation-summary.json").string() << "\n";
      return 0;
    }
    if (*eval) {
      const auto c = run::parse_run_config_text("ladder = \"" + ladder + "\"\nepisodes = " + std::to_string(episodes) +
                                                "\nworkers = " + std::to_string(workers) + "\n");
      const auto def = engine::load_game_file(game_path);
      const auto ev = skill::evaluate_game(def, run::eval_settings(c), eval_seed);
      const auto record = skill::evaluation_record(def.name, ev, eval_seed);
      std::cout << record << "\n";
      if (eval_out.empty()) eval_out = (fs::path(game_path).replace_extension("").string()) + ".eval.json";
      json_io::write_file(eval_out, record + "\n");
      return ev.functional ? 0 : 1;
    }
    if (*play) {
      const engine::Game game(engine::load_game_file(play_path));
      const auto session = run::play(game, std::cin, std::cout);
      if (trace_out.empty()) trace_out = (fs::path(play_path).replace_extension("").string()) + ".trace.jsonl";
      std::string text;
      for (const auto& r : session.trace) text += engine::trace_line(r) + "\n";
      json_io::write_file(trace_out, text);
      std::cout << "trace: " << trace_out << " (" << session.trace.size() << " steps)\n";
      return 0;
    }
    if (*exp) {
      const int n = run::export_run(run_dir, out_dir);
      std::cout << n << " games written to " << out_dir << "\n";
      return 0;
    }
    if (*cits_cmd) {
      const auto tree = composer::load_tree_file(tree_path);
      const auto report = cits::report_to_json(cits::cits_report(tree));
      std::cout << report << "\n";
      if (!cits_out.empty()) json_io::write_file(cits_out, report + "\n");
      return 0;
    }
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
