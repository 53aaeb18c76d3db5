#include "mortar/skill/skill.hpp"

#include <algorithm>
#include <json.hpp>
#include <numeric>

namespace mortar::skill {

TiedOrder rank_agents(const agents::WinRateMatrix& m) {
  std::vector<int> idx(m.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto key_less = [&](int a, int b) {
    if (m[a].win_rate != m[b].win_rate) return m[a].win_rate > m[b].win_rate;
    return m[a].mean_score > m[b].mean_score;
  };
  std::stable_sort(idx.begin(), idx.end(), key_less);
  TiedOrder out;
  for (int i : idx) {
    if (!out.empty()) {
      const int prev = out.back().front();
      if (m[prev].win_rate == m[i].win_rate && m[prev].mean_score == m[i].mean_score) {
        out.back().push_back(i);
        continue;
      }
    }
    out.push_back({i});
  }
  return out;
}

namespace {

// Counts strict inversions of v while merge-sorting it.
long long count_inversions(std::vector<int>& v, std::vector<int>& buf, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  long long inv = count_inversions(v, buf, lo, mid) + count_inversions(v, buf, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[i] <= v[j]) {
      buf[k++] = v[i++];
    } else {
      inv += static_cast<long long>(mid - i);
      buf[k++] = v[j++];
    }
  }
  while (i < mid) buf[k++] = v[i++];
  while (j < hi) buf[k++] = v[j++];
  std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo), buf.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return inv;
}

}  // namespace

RankOutcome kendall(const std::vector<int>& expected, const TiedOrder& observed) {
  const std::size_t n = expected.size();
  int max_agent = -1;
  for (int a : expected) max_agent = std::max(max_agent, a);
  std::vector<int> group(static_cast<std::size_t>(max_agent + 1), -1);
  std::size_t covered = 0;
  long long tied_pairs = 0;
  for (std::size_t g = 0; g < observed.size(); ++g) {
    const auto t = static_cast<long long>(observed[g].size());
    tied_pairs += t * (t - 1) / 2;
    for (int a : observed[g]) {
      if (a < 0 || a > max_agent || group[static_cast<std::size_t>(a)] != -1) {
        throw Error("observed order does not match expected agents");
      }
      group[static_cast<std::size_t>(a)] = static_cast<int>(g);
      ++covered;
    }
  }
  if (covered != n) throw Error("observed order does not match expected agents");

  // Observed group ranks listed in expected order; discordant pairs are the
  // strict inversions, observed ties are the equal pairs.
  std::vector<int> ranks;
  ranks.reserve(n);
  for (int a : expected) {
    if (group[static_cast<std::size_t>(a)] < 0) throw Error("observed order does not match expected agents");
    ranks.push_back(group[static_cast<std::size_t>(a)]);
  }
  std::vector<int> buf(n);
  const long long pairs = static_cast<long long>(n) * static_cast<long long>(n - 1) / 2;
  const long long disc = count_inversions(ranks, buf, 0, n);
  const long long conc = pairs - tied_pairs - disc;

  RankOutcome out;
  out.expected = expected;
  out.observed = observed;
  out.concordant = static_cast<int>(conc);
  out.discordant = static_cast<int>(disc);
  out.tau = pairs == 0 ? 0.0 : static_cast<double>(conc - disc) / static_cast<double>(pairs);
  return out;
}

double kendall_tau(const std::vector<int>& expected, const TiedOrder& observed) {
  return kendall(expected, observed).tau;
}

bool playable(double tau) noexcept { return tau != -1.0; }

GameEvaluation evaluate_game(const engine::GameDef& def, const EvalSettings& settings, std::uint64_t master_seed) {
  GameEvaluation ev;
  try {
    engine::Game game(def);
    ev.matrix = agents::run_pool(game, settings.pool, settings.episodes, master_seed, settings.workers, settings.mcts);
  } catch (const Error& e) {
    ev.functional = false;
    ev.error = e.what();
    return ev;
  }
  ev.observed = rank_agents(ev.matrix);
  std::vector<int> expected(settings.pool.size());
  std::iota(expected.begin(), expected.end(), 0);
  ev.tau = kendall_tau(expected, ev.observed);
  return ev;
}

std::string evaluation_record(const std::string& game_name, const GameEvaluation& ev, std::uint64_t seed) {
  nlohmann::json j;
  j["game_name"] = game_name;
  j["functional"] = ev.functional;
  if (ev.functional) {
    j["tau"] = ev.tau;
  } else {
    j["tau"] = nullptr;
    j["error"] = ev.error;
  }
  auto win_rates = nlohmann::json::array();
  auto scores = nlohmann::json::array();
  for (const auto& s : ev.matrix) {
    win_rates.push_back(s.win_rate);
    scores.push_back(s.mean_score);
  }
  j["win_rates"] = win_rates;
  j["mean_scores"] = scores;
  j["seed"] = seed;
  return j.dump();
}

}  // namespace mortar::skill
