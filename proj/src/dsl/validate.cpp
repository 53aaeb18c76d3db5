#include "mortar/dsl/validate.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace mortar::dsl {
namespace {

struct ArgCheck {
  const std::map<std::string, ArgKind>& params;
  std::vector<std::string>& problems;
  std::string where;

  void operator()(const std::vector<Arg>& args, const Signature& sig) const {
    if (args.size() != sig.slots.size()) {
      problems.push_back(where + ": expected " + std::to_string(sig.slots.size()) + " argument(s)");
      return;
    }
    for (std::size_t i = 0; i < args.size(); ++i) check(args[i], sig.slots[i]);
  }

  void check(const Arg& a, ArgType t) const {
    auto bad = [&](const std::string& msg) { problems.push_back(where + ": " + msg); };
    if (a.kind == ArgKind::Param) {
      auto it = params.find(a.text);
      if (it == params.end()) return bad("unknown param '" + a.text + "'");
      const bool want_int = t == ArgType::Int;
      const bool want_tile = t == ArgType::Tile || t == ArgType::TileOrClass || t == ArgType::Entity;
      if ((want_int && it->second != ArgKind::Int) || (want_tile && it->second != ArgKind::Tile) ||
          (!want_int && !want_tile)) {
        bad("param '" + a.text + "' has the wrong type");
      }
      return;
    }
    switch (t) {
      case ArgType::Int:
        if (a.kind != ArgKind::Int) bad("expected an integer");
        break;
      case ArgType::Tile:
        if (a.kind != ArgKind::Tile || !is_tile_literal(a.tile)) bad("expected a tile literal");
        break;
      case ArgType::TileOrClass:
        if (a.kind == ArgKind::Tile) {
          if (!is_tile_literal(a.tile)) bad("invalid tile literal");
        } else if (a.kind != ArgKind::Keyword || !is_tile_class_keyword(a.text)) {
          bad("expected a tile literal or tile class");
        }
        break;
      case ArgType::Entity:
        if (a.kind == ArgKind::Tile) {
          if (!is_tile_literal(a.tile)) bad("invalid tile literal");
        } else if (a.kind != ArgKind::Keyword || a.text != "player") {
          bad("expected 'player' or a tile literal");
        }
        break;
      case ArgType::Name:
        if (a.kind != ArgKind::Keyword || !is_snake_case(a.text)) bad("expected a counter name");
        break;
      case ArgType::CmpOp: {
        static const std::set<std::string> ops{"<", "<=", "==", "!=", ">=", ">"};
        if (a.kind != ArgKind::Keyword || !ops.count(a.text)) bad("expected a comparison operator");
        break;
      }
      case ArgType::Direction: {
        static const std::set<std::string> dirs{"up",   "down",   "left",   "right",
                                                "away", "toward", "random", "action"};
        if (a.kind != ArgKind::Keyword || !dirs.count(a.text)) bad("expected a direction");
        break;
      }
      case ArgType::Where:
        if (a.kind != ArgKind::Keyword || (a.text != "target" && a.text != "beyond")) bad("expected target|beyond");
        break;
      case ArgType::Who:
        if (a.kind != ArgKind::Keyword || (a.text != "target" && a.text != "player")) bad("expected target|player");
        break;
    }
  }
};

Arg substitute(const Arg& a, const std::map<std::string, Arg>& values) {
  if (a.kind != ArgKind::Param) return a;
  return values.at(a.text);
}

template <typename Fn>
void for_each_arg(const MechanicSpec& m, Fn fn) {
  const auto& ssig = signature(m.selector.kind);
  for (std::size_t i = 0; i < m.selector.args.size() && i < ssig.slots.size(); ++i) fn(m.selector.args[i], ssig.slots[i]);
  auto conds = [&](const std::vector<Condition>& cs) {
    for (const auto& c : cs) {
      const auto& sig = signature(c.kind);
      for (std::size_t i = 0; i < c.args.size() && i < sig.slots.size(); ++i) fn(c.args[i], sig.slots[i]);
    }
  };
  conds(m.conditions);
  for (const auto& o : m.outcomes) {
    conds(o.guards);
    for (const auto& e : o.effects) {
      const auto& sig = signature(e.kind);
      for (std::size_t i = 0; i < e.args.size() && i < sig.slots.size(); ++i) fn(e.args[i], sig.slots[i]);
    }
  }
}

}  // namespace

std::vector<std::string> structural_problems(const MechanicSpec& m) {
  std::vector<std::string> problems;
  if (m.name.empty() || !is_snake_case(m.name)) problems.push_back("mechanic name must be snake_case ASCII");

  std::map<std::string, ArgKind> params;
  for (const auto& p : m.params) {
    if (!is_snake_case(p.name)) problems.push_back("param name '" + p.name + "' must be snake_case");
    if (params.count(p.name)) problems.push_back("duplicate param '" + p.name + "'");
    if (p.value.kind == ArgKind::Tile) {
      if (!is_tile_literal(p.value.tile)) problems.push_back("param '" + p.name + "': invalid tile literal");
    } else if (p.value.kind != ArgKind::Int) {
      problems.push_back("param '" + p.name + "' must bind an integer or a tile literal");
    }
    params[p.name] = p.value.kind;
  }

  ArgCheck{params, problems, "select " + std::string(to_string(m.selector.kind))}(m.selector.args,
                                                                                signature(m.selector.kind));
  if (m.selector.kind == SelectorKind::Adjacent4 || m.selector.kind == SelectorKind::Adjacent8) {
    const auto& a = m.selector.args.empty() ? Arg{} : m.selector.args[0];
    if (a.kind == ArgKind::Int && (a.number < 1 || a.number > 3)) problems.push_back("selector reach must be in [1, 3]");
  }
  if (m.selector.kind == SelectorKind::LineOf && m.selector.args.size() == 3) {
    const auto& len = m.selector.args[2];
    if (len.kind == ArgKind::Int && (len.number < 1 || len.number > 12)) {
      problems.push_back("line-of length must be in [1, 12]");
    }
  }
  for (const auto& c : m.conditions) {
    ArgCheck{params, problems, "when " + std::string(to_string(c.kind))}(c.args, signature(c.kind));
  }
  if (m.outcomes.empty()) problems.push_back("at least one outcome is required");
  if (m.outcomes.size() > kMaxOutcomes) problems.push_back("too many outcomes");
  for (const auto& o : m.outcomes) {
    if (o.effects.empty()) problems.push_back("outcome without effects");
    int rewards = 0;
    for (const auto& g : o.guards) {
      ArgCheck{params, problems, "when " + std::string(to_string(g.kind))}(g.args, signature(g.kind));
    }
    for (const auto& e : o.effects) {
      ArgCheck{params, problems, "do " + std::string(to_string(e.kind))}(e.args, signature(e.kind));
      if (e.kind == EffectKind::EmitReward) ++rewards;
      if ((e.kind == EffectKind::Spawn || e.kind == EffectKind::SetTile) && !e.args.empty()) {
        const Arg& a = e.args[0];
        char c = a.kind == ArgKind::Tile ? a.tile : 0;
        if (a.kind == ArgKind::Param) {
          for (const auto& p : m.params) {
            if (p.name == a.text && p.value.kind == ArgKind::Tile) c = p.value.tile;
          }
        }
        if (c == '@') problems.push_back("the player tile cannot be spawned or set");
      }
    }
    if (rewards > 1) problems.push_back("at most one emit-reward per outcome");
  }
  if (m.effect_count() > kMaxEffects) problems.push_back("too many effects");
  if (m.condition_count() > kMaxConditions) problems.push_back("too many conditions");
  if (m.params.size() > kMaxParams) problems.push_back("too many params");
  return problems;
}

bool is_valid(const MechanicSpec& spec) { return structural_problems(spec).empty(); }

MechanicSpec resolve_params(const MechanicSpec& spec) {
  std::map<std::string, Arg> values;
  for (const auto& p : spec.params) values[p.name] = p.value;
  MechanicSpec out = spec;
  for (auto& a : out.selector.args) a = substitute(a, values);
  auto conds = [&](std::vector<Condition>& cs) {
    for (auto& c : cs) {
      for (auto& a : c.args) a = substitute(a, values);
    }
  };
  conds(out.conditions);
  for (auto& o : out.outcomes) {
    conds(o.guards);
    for (auto& e : o.effects) {
      for (auto& a : e.args) a = substitute(a, values);
    }
  }
  return out;
}

std::vector<char> referenced_tiles(const MechanicSpec& spec) {
  std::set<char> tiles;
  const auto resolved = resolve_params(spec);
  for_each_arg(resolved, [&](const Arg& a, ArgType) {
    if (a.kind == ArgKind::Tile) tiles.insert(a.tile);
  });
  return {tiles.begin(), tiles.end()};
}

std::vector<std::string> referenced_classes(const MechanicSpec& spec) {
  std::set<std::string> out;
  for_each_arg(spec, [&](const Arg& a, ArgType t) {
    if (a.kind == ArgKind::Keyword && t == ArgType::TileOrClass) out.insert(a.text);
  });
  return {out.begin(), out.end()};
}

std::vector<std::string> referenced_counters(const MechanicSpec& spec) {
  std::set<std::string> out;
  for_each_arg(spec, [&](const Arg& a, ArgType t) {
    if (a.kind == ArgKind::Keyword && t == ArgType::Name) out.insert(a.text);
  });
  return {out.begin(), out.end()};
}

}  // namespace mortar::dsl
