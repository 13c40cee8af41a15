#pragma once

#include <optional>
#include <regex>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "restex/spec.hpp"

namespace restex {

/// One failed constraint. `path` is a JSON path such as "$.metadata.name",
/// `constraint` the schema keyword that failed ("type", "pattern", ...).
struct Violation {
  std::string path;
  std::string constraint;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Validates a JSON value against the supported schema subset. Unknown
/// properties are accepted.
std::vector<Violation> validate(const json& value, const SchemaNode& schema, const std::string& path = "$");

/// Interprets a path/query/header string according to the schema type
/// ("7" -> 7 for integers, "true" -> true for booleans). Returns nullopt when
/// the text cannot be read as that type.
std::optional<json> coerce_wire(std::string_view text, const SchemaNode& schema);

/// coerce_wire followed by validate; a failed coercion is a "type" violation.
std::vector<Violation> validate_wire(std::string_view text, const SchemaNode& schema, const std::string& path = "$");

/// Number of code points in a UTF-8 string.
std::size_t utf8_length(std::string_view text);

/// Compiled ECMAScript regex, cached process-wide. Throws std::regex_error on
/// a bad pattern.
std::shared_ptr<const std::regex> cached_regex(const std::string& pattern);

/// Unanchored pattern search, as JSON Schema defines `pattern`.
bool pattern_matches(const std::string& pattern, const std::string& text);

/// Checks the string formats the tool generates: date-time, date, uuid and
/// email. Other formats always pass.
bool format_matches(std::string_view format, const std::string& text);

}  // namespace restex
