#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace restex {

using json = nlohmann::json;

enum class SchemaKind { Any, Object, Array, String, Integer, Number, Boolean };

std::string_view to_string(SchemaKind kind);

struct SchemaNode;
using SchemaPtr = std::shared_ptr<const SchemaNode>;

/// Resolved JSON-schema subset. Nodes are immutable once loaded and may be
/// shared between operations that referenced the same component.
struct SchemaNode {
  SchemaKind kind = SchemaKind::Any;
  bool nullable = false;
  std::vector<json> enum_values;
  std::optional<double> minimum;
  std::optional<double> maximum;
  bool exclusive_minimum = false;
  bool exclusive_maximum = false;
  std::optional<std::uint64_t> min_length;
  std::optional<std::uint64_t> max_length;
  std::optional<std::string> pattern;
  std::optional<std::string> format;
  std::vector<std::string> required;
  std::map<std::string, SchemaPtr> properties;
  SchemaPtr items;
  std::optional<std::uint64_t> min_items;
  std::optional<std::uint64_t> max_items;
  bool unique_items = false;

  const SchemaNode* property(const std::string& name) const;
};

/// Deep structural equality (shared nodes compare by content).
bool schema_equal(const SchemaNode& a, const SchemaNode& b);
bool schema_equal(const SchemaPtr& a, const SchemaPtr& b);

enum class ParamLocation { Path, Query, Header, BodyField };

std::string_view to_string(ParamLocation location);
ParamLocation param_location_from_string(std::string_view text);

struct ParameterDef {
  std::string name;
  ParamLocation location = ParamLocation::Query;
  SchemaPtr schema;
  bool required = false;

  friend bool operator==(const ParameterDef& a, const ParameterDef& b) {
    return a.name == b.name && a.location == b.location && a.required == b.required &&
           schema_equal(a.schema, b.schema);
  }
};

/// An exact status code ("404"), a class ("2XX") or "default".
class StatusPattern {
 public:
  /// Throws std::invalid_argument for anything that is not a code 100-599,
  /// a class 1XX-5XX or "default".
  static StatusPattern parse(std::string_view text);
  static StatusPattern exact(int code) { return StatusPattern(code, 0); }
  static StatusPattern status_class(int leading_digit) { return StatusPattern(0, leading_digit); }

  bool matches(int status) const;
  bool is_exact() const { return code_ != 0; }
  bool is_default() const { return code_ == 0 && class_ == 0; }
  int code() const { return code_; }
  std::string str() const;

  friend bool operator==(const StatusPattern&, const StatusPattern&) = default;
  friend auto operator<=>(const StatusPattern&, const StatusPattern&) = default;

 private:
  StatusPattern(int code, int cls) : code_(code), class_(cls) {}
  int code_ = 0;
  int class_ = 0;
};

struct ResponseDef {
  std::string status_pattern;
  SchemaPtr body_schema;
  std::vector<std::string> content_types;

  StatusPattern pattern() const { return StatusPattern::parse(status_pattern); }

  friend bool operator==(const ResponseDef& a, const ResponseDef& b) {
    return a.status_pattern == b.status_pattern && a.content_types == b.content_types &&
           schema_equal(a.body_schema, b.body_schema);
  }
};

struct OperationDef {
  std::string method;  // upper case
  std::string path_template;
  std::string operation_id;  // may be empty
  std::vector<ParameterDef> parameters;
  SchemaPtr request_body_schema;
  bool request_body_required = false;
  std::map<std::string, ResponseDef> responses;

  /// "METHOD /path/{template}", unique per operation.
  std::string key() const { return method + " " + path_template; }

  const ParameterDef* parameter(std::string_view name, ParamLocation location) const;

  /// The declared response whose pattern matches `status`: exact codes win
  /// over classes, classes over "default".
  const ResponseDef* response_for(int status) const;

  friend bool operator==(const OperationDef& a, const OperationDef& b) {
    return a.method == b.method && a.path_template == b.path_template &&
           a.operation_id == b.operation_id && a.parameters == b.parameters &&
           a.request_body_required == b.request_body_required && a.responses == b.responses &&
           schema_equal(a.request_body_schema, b.request_body_schema);
  }
};

enum class Severity { Warning, Error };

std::string_view to_string(Severity severity);

/// One lint result. rule_id is always one of lint_rule_catalog().
struct LintFinding {
  std::string rule_id;
  Severity severity = Severity::Warning;
  std::string location;
  std::string message;

  friend bool operator==(const LintFinding&, const LintFinding&) = default;
};

struct LintRule {
  std::string_view id;
  Severity severity;
  std::string_view summary;
};

const std::vector<LintRule>& lint_rule_catalog();

struct ApiSpecIR {
  std::string title;
  std::string openapi_version;
  std::vector<std::string> base_paths;
  std::vector<OperationDef> operations;
  std::map<std::string, SchemaPtr> schemas;
  /// Load-time degradations (unsupported keywords, recursion); surfaced by
  /// lint_spec. Not part of structural equality.
  std::vector<LintFinding> diagnostics;

  const OperationDef* find_operation(std::string_view key) const;
  /// First base path, or "" when the document declares none.
  std::string base_path() const { return base_paths.empty() ? std::string() : base_paths.front(); }

  friend bool operator==(const ApiSpecIR& a, const ApiSpecIR& b);
};

enum class DocumentFormat { Json, Yaml };

/// Format from a file extension (.json -> Json, .yaml/.yml -> Yaml); Json
/// for anything else.
DocumentFormat format_from_path(std::string_view path);

/// Parses and fully resolves an OpenAPI 3.0/3.1 document.
/// Throws ParseError, UnresolvedRef or UnsupportedVersion; never returns a
/// partially loaded IR.
ApiSpecIR load_spec(std::string_view document, DocumentFormat format);
ApiSpecIR load_spec(const json& document);
ApiSpecIR load_spec_file(const std::string& path, std::optional<DocumentFormat> format = {});

/// Converts YAML text to JSON (used for specs and any YAML side files).
json yaml_to_json(std::string_view text);

/// Self-contained OpenAPI 3.0 JSON form of the IR: every schema inlined, no
/// references. Loading it yields an IR equal to `spec`.
json canonical_document(const ApiSpecIR& spec);

json schema_to_json(const SchemaNode& schema);

/// Reports specification pitfalls; never throws. Findings are ordered by
/// operation order, then rule.
std::vector<LintFinding> lint_spec(const ApiSpecIR& spec,
                                   double name_threshold = 0.8);

json to_json(const LintFinding& finding);
std::string format_lint_line(const LintFinding& finding);

/// Path template segments, e.g. "/books/{bookId}" -> {"books", "{bookId}"}.
std::vector<std::string> path_segments(std::string_view path_template);
bool is_path_param_segment(std::string_view segment);
/// Names of {param} segments in order.
std::vector<std::string> path_param_names(std::string_view path_template);
/// True when the last segment is a {param}.
bool is_item_path(std::string_view path_template);
/// Canonical noun of the last literal segment ("" when there is none).
std::string path_resource_noun(std::string_view path_template);
/// Canonical noun of the literal segment right before the named parameter.
std::string path_param_noun(std::string_view path_template, std::string_view param);

}  // namespace restex
