#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mortar/core/error.hpp"
#include "mortar/dsl/mechanic.hpp"

namespace mortar::dsl {

inline constexpr std::string_view kHeader = "mechdsl/1";
inline constexpr std::string_view kFileExtension = ".mech";

// Position-tagged (1-based) parse or validation failure.
class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& message);
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }
  const std::string& message() const noexcept { return message_; }

 private:
  int line_;
  int column_;
  std::string message_;
};

// Parses a document holding exactly one mechanic. The document must start with
// the `mechdsl/1` header line.
MechanicSpec parse_mechanic(std::string_view text);

// Parses a document holding one or more mechanics after a single header.
std::vector<MechanicSpec> parse_mechanics(std::string_view text);

// Canonical text: header, two-space indentation, default-valued optional
// arguments omitted, trailing newline. Equal specs render to equal bytes.
std::string render_mechanic(const MechanicSpec& spec);
std::string render_mechanics(std::span<const MechanicSpec> specs);

// Canonical one-line renderings of individual nodes (no keyword prefix).
std::string render_arg(const Arg& a);
std::string render_selector(const Selector& s);
std::string render_condition(const Condition& c);
std::string render_effect(const Effect& e);
std::string render_param(const ParamBinding& p);

}  // namespace mortar::dsl
