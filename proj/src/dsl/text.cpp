#include "mortar/dsl/text.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <sstream>

#include "mortar/dsl/validate.hpp"

namespace mortar::dsl {

ParseError::ParseError(int line, int column, const std::string& message)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      message_(message) {}

namespace {

constexpr std::string_view kDirections[] = {"up",   "down",   "left",  "right",
                                            "away", "toward", "random", "action"};
constexpr std::string_view kCmpOps[] = {"<", "<=", "==", "!=", ">=", ">"};

bool contains(std::span<const std::string_view> set, std::string_view s) {
  return std::find(set.begin(), set.end(), s) != set.end();
}

enum class TokKind { Ident, Upper, Symbol, Int, Op, Punct, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string text;
  int column = 0;
};

// Tokenizer over a single line. Identifiers may contain '-' so that keyword
// spellings like `adjacent-4` lex as one token.
class LineLexer {
 public:
  LineLexer(std::string_view line, int line_no) : s_(line), line_(line_no) {}

  Token next() {
    skip_space();
    Token t;
    t.column = static_cast<int>(pos_) + 1;
    if (pos_ >= s_.size()) return t;
    const char c = s_[pos_];
    if (std::islower(static_cast<unsigned char>(c))) {
      std::size_t b = pos_;
      while (pos_ < s_.size() && is_ident_char(s_[pos_])) ++pos_;
      t.kind = TokKind::Ident;
      t.text = std::string(s_.substr(b, pos_ - b));
      return t;
    }
    if (std::isupper(static_cast<unsigned char>(c))) {
      std::size_t b = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      t.kind = TokKind::Upper;
      t.text = std::string(s_.substr(b, pos_ - b));
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        ((c == '-' || c == '+') && pos_ + 1 < s_.size() &&
         std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])))) {
      std::size_t b = pos_++;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      t.kind = TokKind::Int;
      t.text = std::string(s_.substr(b, pos_ - b));
      return t;
    }
    if (c == '@' || c == '#' || c == '&') {
      ++pos_;
      t.kind = TokKind::Symbol;
      t.text = std::string(1, c);
      return t;
    }
    if (c == '<' || c == '>' || c == '=' || c == '!') {
      std::size_t b = pos_++;
      if (pos_ < s_.size() && s_[pos_] == '=') ++pos_;
      t.kind = TokKind::Op;
      t.text = std::string(s_.substr(b, pos_ - b));
      return t;
    }
    if (c == '(' || c == ')' || c == ',') {
      ++pos_;
      t.kind = TokKind::Punct;
      t.text = std::string(1, c);
      return t;
    }
    throw ParseError(line_, t.column, std::string("unexpected character '") + c + "'");
  }

  Token peek() {
    auto saved = pos_;
    auto t = next();
    pos_ = saved;
    return t;
  }

  int line() const noexcept { return line_; }

 private:
  static bool is_ident_char(char c) {
    return std::islower(static_cast<unsigned char>(c)) ||
           std::isdigit(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  }
  void skip_space() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_;
};

struct SourceLine {
  int number;
  int indent;  // columns of leading whitespace
  std::string_view text;  // comment-stripped, trimmed
};

std::vector<SourceLine> split_lines(std::string_view text) {
  std::vector<SourceLine> out;
  int number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(start, end - start);
    ++number;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    if (auto c = raw.find("//"); c != std::string_view::npos) raw = raw.substr(0, c);
    std::size_t b = 0;
    while (b < raw.size() && (raw[b] == ' ' || raw[b] == '\t')) ++b;
    std::size_t e = raw.size();
    while (e > b && (raw[e - 1] == ' ' || raw[e - 1] == '\t')) --e;
    if (e > b) out.push_back({number, static_cast<int>(b), raw.substr(b, e - b)});
    start = end + 1;
  }
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : lines_(split_lines(text)) {}

  std::vector<MechanicSpec> parse_all() {
    if (lines_.empty()) throw ParseError(1, 1, "expected header 'mechdsl/1'");
    const auto& head = lines_.front();
    if (head.text != kHeader) {
      throw ParseError(head.number, head.indent + 1, "expected header 'mechdsl/1'");
    }
    std::vector<MechanicSpec> out;
    idx_ = 1;
    while (idx_ < lines_.size()) out.push_back(parse_one());
    if (out.empty()) {
      throw ParseError(head.number + 1, 1, "expected 'mechanic <name>'");
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const SourceLine& l, int col, const std::string& msg) const {
    throw ParseError(l.number, l.indent + col, msg);
  }
  [[noreturn]] void fail(const SourceLine& l, const Token& t, const std::string& msg) const {
    fail(l, t.column, msg);
  }

  MechanicSpec parse_one() {
    const SourceLine& first = lines_[idx_++];
    LineLexer lx(first.text, first.number);
    auto kw = lx.next();
    if (kw.kind != TokKind::Ident || kw.text != "mechanic") fail(first, kw, "expected 'mechanic <name>'");
    auto name = lx.next();
    if (name.kind != TokKind::Ident || !is_snake_case(name.text)) {
      fail(first, name, "mechanic name must be snake_case ASCII");
    }
    expect_end(first, lx);

    MechanicSpec spec;
    spec.name = name.text;
    params_.clear();
    bool have_trigger = false;
    bool have_select = false;
    std::optional<std::size_t> outcome;
    bool outcome_has_effect = false;

    while (true) {
      if (idx_ >= lines_.size()) {
        const auto& last = lines_.back();
        throw ParseError(last.number + 1, 1, "missing 'end' for mechanic '" + spec.name + "'");
      }
      const SourceLine& l = lines_[idx_++];
      LineLexer lx2(l.text, l.number);
      auto head = lx2.next();
      if (head.kind != TokKind::Ident) fail(l, head, "expected a statement keyword");
      const std::string& k = head.text;
      if (k == "end") {
        expect_end(l, lx2);
        if (!have_trigger) fail(l, 1, "mechanic '" + spec.name + "' has no trigger");
        if (!have_select) fail(l, 1, "mechanic '" + spec.name + "' has no selector");
        if (spec.outcomes.empty()) fail(l, 1, "mechanic '" + spec.name + "' has no outcome");
        if (!outcome_has_effect) fail(l, 1, "outcome without effects");
        if (auto problems = structural_problems(spec); !problems.empty()) {
          fail(first, 1, problems.front());
        }
        return spec;
      }
      if (k == "trigger") {
        if (have_trigger) fail(l, head, "duplicate trigger");
        auto t = lx2.next();
        auto trig = t.kind == TokKind::Ident ? trigger_from(t.text) : std::nullopt;
        if (!trig) fail(l, t, "unknown trigger '" + t.text + "'");
        spec.trigger = *trig;
        have_trigger = true;
        expect_end(l, lx2);
      } else if (k == "let") {
        if (have_select) fail(l, head, "params must be declared before 'select'");
        auto n = lx2.next();
        if (n.kind != TokKind::Ident || !is_snake_case(n.text)) fail(l, n, "param name must be snake_case");
        if (params_.count(n.text)) fail(l, n, "duplicate param '" + n.text + "'");
        auto eq = lx2.next();
        if (eq.kind != TokKind::Op || eq.text != "=") fail(l, eq, "expected '='");
        auto v = lx2.next();
        ParamBinding p{n.text, {}};
        if (v.kind == TokKind::Int) {
          p.value = Arg::integer(to_int(l, v));
        } else if (v.kind == TokKind::Upper || v.kind == TokKind::Symbol) {
          p.value = Arg::tile_literal(tile_char(l, v));
        } else {
          fail(l, v, "param value must be an integer or a tile literal");
        }
        params_[p.name] = p.value.kind;
        spec.params.push_back(std::move(p));
        expect_end(l, lx2);
      } else if (k == "select") {
        if (have_select) fail(l, head, "duplicate selector");
        if (outcome) fail(l, head, "'select' must precede outcomes");
        auto t = lx2.next();
        auto kind = t.kind == TokKind::Ident ? selector_from(t.text) : std::nullopt;
        if (!kind) fail(l, t, "unknown selector kind '" + t.text + "'");
        spec.selector.kind = *kind;
        spec.selector.args = parse_args(l, lx2, signature(*kind),
                                        [&](std::size_t i) { return default_arg(*kind, i); });
        auto p = lx2.peek();
        if (p.kind == TokKind::Ident && p.text == "pick") {
          lx2.next();
          auto m = lx2.next();
          auto mode = m.kind == TokKind::Ident ? pick_from(m.text) : std::nullopt;
          if (!mode) fail(l, m, "unknown pick mode '" + m.text + "'");
          spec.selector.pick = *mode;
        }
        expect_end(l, lx2);
        have_select = true;
      } else if (k == "when") {
        if (!have_select) fail(l, head, "'when' must follow 'select'");
        auto t = lx2.next();
        auto kind = t.kind == TokKind::Ident ? condition_from(t.text) : std::nullopt;
        if (!kind) fail(l, t, "unknown condition kind '" + t.text + "'");
        Condition c{*kind, parse_args(l, lx2, signature(*kind),
                                      [&](std::size_t i) { return default_arg(*kind, i); })};
        expect_end(l, lx2);
        if (outcome) {
          if (outcome_has_effect) fail(l, head, "guards must precede effects within an outcome");
          spec.outcomes[*outcome].guards.push_back(std::move(c));
        } else {
          spec.conditions.push_back(std::move(c));
        }
      } else if (k == "outcome") {
        if (!have_select) fail(l, head, "'outcome' must follow 'select'");
        if (outcome && !outcome_has_effect) fail(l, head, "outcome without effects");
        expect_end(l, lx2);
        spec.outcomes.emplace_back();
        outcome = spec.outcomes.size() - 1;
        outcome_has_effect = false;
      } else if (k == "do") {
        if (!outcome) fail(l, head, "effect outside of an outcome");
        auto t = lx2.next();
        auto kind = t.kind == TokKind::Ident ? effect_from(t.text) : std::nullopt;
        if (!kind) fail(l, t, "unknown effect kind '" + t.text + "'");
        Effect e{*kind, parse_args(l, lx2, signature(*kind), [](std::size_t) { return Arg{}; })};
        expect_end(l, lx2);
        spec.outcomes[*outcome].effects.push_back(std::move(e));
        outcome_has_effect = true;
      } else if (k == "mechanic") {
        fail(l, head, "missing 'end' before next mechanic");
      } else {
        fail(l, head, "unknown statement '" + k + "'");
      }
    }
  }

  template <typename DefaultFn>
  std::vector<Arg> parse_args(const SourceLine& l, LineLexer& lx, const Signature& sig,
                              DefaultFn defaults) {
    std::vector<Arg> args;
    auto p = lx.peek();
    if (p.kind == TokKind::Punct && p.text == "(") {
      lx.next();
      auto close = lx.peek();
      if (close.kind == TokKind::Punct && close.text == ")") {
        lx.next();
      } else {
        while (true) {
          auto t = lx.next();
          if (args.size() >= sig.slots.size()) fail(l, t, "too many arguments");
          args.push_back(parse_arg(l, t, sig.slots[args.size()]));
          auto sep = lx.next();
          if (sep.kind == TokKind::Punct && sep.text == ")") break;
          if (sep.kind != TokKind::Punct || sep.text != ",") fail(l, sep, "expected ',' or ')'");
        }
      }
    }
    if (args.size() < sig.required) {
      fail(l, lx.peek().column, "expected " + std::to_string(sig.required) + " argument(s)");
    }
    for (std::size_t i = args.size(); i < sig.slots.size(); ++i) args.push_back(defaults(i));
    return args;
  }

  Arg parse_arg(const SourceLine& l, const Token& t, ArgType type) {
    switch (type) {
      case ArgType::Int:
        if (t.kind == TokKind::Int) return Arg::integer(to_int(l, t));
        if (t.kind == TokKind::Ident) return param_ref(l, t, ArgKind::Int);
        fail(l, t, "expected an integer");
      case ArgType::Tile:
      case ArgType::TileOrClass:
        if (t.kind == TokKind::Upper || t.kind == TokKind::Symbol) return Arg::tile_literal(tile_char(l, t));
        if (t.kind == TokKind::Ident) {
          if (is_tile_class_keyword(t.text)) {
            if (type == ArgType::TileOrClass) return Arg::keyword(t.text);
            fail(l, t, "a tile literal is required here, not the class '" + t.text + "'");
          }
          return param_ref(l, t, ArgKind::Tile);
        }
        fail(l, t, "expected a tile literal");
      case ArgType::Name:
        if (t.kind == TokKind::Ident && is_snake_case(t.text)) return Arg::keyword(t.text);
        fail(l, t, "expected a snake_case counter name");
      case ArgType::CmpOp:
        if (t.kind == TokKind::Op && contains(kCmpOps, t.text)) return Arg::keyword(t.text);
        fail(l, t, "expected a comparison operator");
      case ArgType::Direction:
        if (t.kind == TokKind::Ident && contains(kDirections, t.text)) return Arg::keyword(t.text);
        fail(l, t, "unknown direction '" + t.text + "'");
      case ArgType::Where:
        if (t.kind == TokKind::Ident && (t.text == "target" || t.text == "beyond")) return Arg::keyword(t.text);
        fail(l, t, "expected 'target' or 'beyond'");
      case ArgType::Who:
        if (t.kind == TokKind::Ident && (t.text == "target" || t.text == "player")) return Arg::keyword(t.text);
        fail(l, t, "expected 'target' or 'player'");
      case ArgType::Entity:
        if (t.kind == TokKind::Ident && t.text == "player") return Arg::keyword(t.text);
        if (t.kind == TokKind::Upper || t.kind == TokKind::Symbol) return Arg::tile_literal(tile_char(l, t));
        if (t.kind == TokKind::Ident) return param_ref(l, t, ArgKind::Tile);
        fail(l, t, "expected 'player' or a tile literal");
    }
    fail(l, t, "bad argument");
  }

  Arg param_ref(const SourceLine& l, const Token& t, ArgKind want) {
    auto it = params_.find(t.text);
    if (it == params_.end()) fail(l, t, "unknown param '" + t.text + "'");
    if (it->second != want) {
      fail(l, t, "param '" + t.text + "' has the wrong type (expected " +
                     (want == ArgKind::Int ? "integer" : "tile") + ")");
    }
    return Arg::param(t.text);
  }

  char tile_char(const SourceLine& l, const Token& t) const {
    if (t.text.size() != 1) fail(l, t, "tile class must be single character");
    if (!is_tile_literal(t.text[0])) fail(l, t, "invalid tile literal '" + t.text + "'");
    return t.text[0];
  }

  std::int64_t to_int(const SourceLine& l, const Token& t) const {
    std::int64_t v = 0;
    const char* b = t.text.data();
    if (*b == '+') ++b;
    auto [ptr, ec] = std::from_chars(b, t.text.data() + t.text.size(), v);
    if (ec != std::errc{} || ptr != t.text.data() + t.text.size()) fail(l, t, "integer out of range");
    return v;
  }

  void expect_end(const SourceLine& l, LineLexer& lx) {
    auto t = lx.next();
    if (t.kind != TokKind::End) fail(l, t, "unexpected '" + t.text + "'");
  }

  std::vector<SourceLine> lines_;
  std::size_t idx_ = 0;
  std::map<std::string, ArgKind> params_;
};

template <typename Kind>
std::string render_call(std::string_view name, const std::vector<Arg>& args, Kind kind,
                        Arg (*defaults)(Kind, std::size_t), std::size_t required) {
  std::size_t n = args.size();
  if (defaults) {
    while (n > required && args[n - 1] == defaults(kind, n - 1)) --n;
  }
  std::string out(name);
  if (n == 0) return out;
  out += '(';
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ", ";
    out += render_arg(args[i]);
  }
  out += ')';
  return out;
}

}  // namespace

std::string render_arg(const Arg& a) {
  switch (a.kind) {
    case ArgKind::Int: return std::to_string(a.number);
    case ArgKind::Tile: return std::string(1, a.tile);
    case ArgKind::Keyword:
    case ArgKind::Param:
      return a.text;
  }
  return {};
}

std::string render_selector(const Selector& s) {
  return render_call(to_string(s.kind), s.args, s.kind, &default_arg, signature(s.kind).required) +
         " pick " + std::string(to_string(s.pick));
}

std::string render_condition(const Condition& c) {
  return render_call(to_string(c.kind), c.args, c.kind, &default_arg, signature(c.kind).required);
}

std::string render_effect(const Effect& e) {
  return render_call<EffectKind>(to_string(e.kind), e.args, e.kind, nullptr, 0);
}

std::string render_param(const ParamBinding& p) { return p.name + " = " + render_arg(p.value); }

MechanicSpec parse_mechanic(std::string_view text) {
  auto all = parse_mechanics(text);
  if (all.size() != 1) {
    throw ParseError(1, 1, "expected exactly one mechanic, found " + std::to_string(all.size()));
  }
  return std::move(all.front());
}

std::vector<MechanicSpec> parse_mechanics(std::string_view text) { return Parser(text).parse_all(); }

namespace {
void render_body(std::ostringstream& os, const MechanicSpec& m) {
  os << "mechanic " << m.name << '\n';
  os << "  trigger " << to_string(m.trigger) << '\n';
  for (const auto& p : m.params) os << "  let " << render_param(p) << '\n';
  os << "  select " << render_selector(m.selector) << '\n';
  for (const auto& c : m.conditions) os << "  when " << render_condition(c) << '\n';
  for (const auto& o : m.outcomes) {
    os << "  outcome\n";
    for (const auto& g : o.guards) os << "    when " << render_condition(g) << '\n';
    for (const auto& e : o.effects) os << "    do " << render_effect(e) << '\n';
  }
  os << "end\n";
}
}  // namespace

std::string render_mechanic(const MechanicSpec& spec) {
  std::ostringstream os;
  os << kHeader << '\n';
  render_body(os, spec);
  return os.str();
}

std::string render_mechanics(std::span<const MechanicSpec> specs) {
  std::ostringstream os;
  os << kHeader << '\n';
  for (const auto& m : specs) render_body(os, m);
  return os.str();
}

}  // namespace mortar::dsl
