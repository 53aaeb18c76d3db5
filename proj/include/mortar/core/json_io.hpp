#pragma once

#include <cstdint>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "mortar/core/error.hpp"

// Schema-checked accessors shared by the JSON artifact readers. Every failure
// is a SchemaError naming the dotted path of the offending member.
namespace mortar::json_io {

using nlohmann::json;

inline std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

inline std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

inline const json& member(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path.empty() ? "$" : path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(join(path, key), "missing");
  return *it;
}

inline std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path, "expected a string");
  return j.get<std::string>();
}

inline std::int64_t as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
  return j.get<std::int64_t>();
}

inline std::uint64_t as_uint(const json& j, const std::string& path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
    throw SchemaError(path, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

inline double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  return j.get<double>();
}

inline bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw SchemaError(path, "expected a boolean");
  return j.get<bool>();
}

inline const json& as_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array");
  return j;
}

inline void expect_schema(const json& j, const char* schema) {
  if (as_string(member(j, "schema", ""), "schema") != schema) {
    throw SchemaError("schema", "expected \"" + std::string(schema) + "\"");
  }
}

inline json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("not valid JSON: ") + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("cannot write " + path);
}

}  // namespace mortar::json_io
