#include <algorithm>
#include <cctype>
#include <set>
#include <stdexcept>

#include "restex/names.hpp"
#include "restex/spec.hpp"

namespace restex {

std::string_view to_string(SchemaKind kind) {
  switch (kind) {
    case SchemaKind::Any: return "any";
    case SchemaKind::Object: return "object";
    case SchemaKind::Array: return "array";
    case SchemaKind::String: return "string";
    case SchemaKind::Integer: return "integer";
    case SchemaKind::Number: return "number";
    case SchemaKind::Boolean: return "boolean";
  }
  return "any";
}

std::string_view to_string(ParamLocation location) {
  switch (location) {
    case ParamLocation::Path: return "path";
    case ParamLocation::Query: return "query";
    case ParamLocation::Header: return "header";
    case ParamLocation::BodyField: return "body-field";
  }
  return "query";
}

ParamLocation param_location_from_string(std::string_view text) {
  if (text == "path") return ParamLocation::Path;
  if (text == "query") return ParamLocation::Query;
  if (text == "header") return ParamLocation::Header;
  if (text == "body-field") return ParamLocation::BodyField;
  throw std::invalid_argument("unknown parameter location: " + std::string(text));
}

std::string_view to_string(Severity severity) {
  return severity == Severity::Error ? "error" : "warning";
}

const SchemaNode* SchemaNode::property(const std::string& name) const {
  auto it = properties.find(name);
  return it == properties.end() ? nullptr : it->second.get();
}

bool schema_equal(const SchemaPtr& a, const SchemaPtr& b) {
  if (!a || !b) return !a && !b;
  return a == b || schema_equal(*a, *b);
}

bool schema_equal(const SchemaNode& a, const SchemaNode& b) {
  if (a.kind != b.kind || a.nullable != b.nullable || a.enum_values != b.enum_values ||
      a.minimum != b.minimum || a.maximum != b.maximum ||
      a.exclusive_minimum != b.exclusive_minimum || a.exclusive_maximum != b.exclusive_maximum ||
      a.min_length != b.min_length || a.max_length != b.max_length || a.pattern != b.pattern ||
      a.format != b.format || a.required != b.required || a.min_items != b.min_items ||
      a.max_items != b.max_items || a.unique_items != b.unique_items ||
      a.properties.size() != b.properties.size() || !schema_equal(a.items, b.items)) {
    return false;
  }
  for (auto ia = a.properties.begin(), ib = b.properties.begin(); ia != a.properties.end(); ++ia, ++ib) {
    if (ia->first != ib->first || !schema_equal(ia->second, ib->second)) return false;
  }
  return true;
}

StatusPattern StatusPattern::parse(std::string_view text) {
  if (text == "default") return StatusPattern(0, 0);
  if (text.size() != 3) throw std::invalid_argument("bad status pattern: " + std::string(text));
  const char lead = text[0];
  if (lead < '1' || lead > '5') throw std::invalid_argument("bad status pattern: " + std::string(text));
  auto is_x = [](char c) { return c == 'X' || c == 'x'; };
  if (is_x(text[1]) && is_x(text[2])) return StatusPattern(0, lead - '0');
  if (!std::isdigit(static_cast<unsigned char>(text[1])) || !std::isdigit(static_cast<unsigned char>(text[2]))) {
    throw std::invalid_argument("bad status pattern: " + std::string(text));
  }
  return StatusPattern(std::stoi(std::string(text)), 0);
}

bool StatusPattern::matches(int status) const {
  if (code_ != 0) return status == code_;
  if (class_ != 0) return status / 100 == class_;
  return true;
}

std::string StatusPattern::str() const {
  if (code_ != 0) return std::to_string(code_);
  if (class_ != 0) return std::to_string(class_) + "XX";
  return "default";
}

const ParameterDef* OperationDef::parameter(std::string_view name, ParamLocation location) const {
  for (const auto& p : parameters) {
    if (p.name == name && p.location == location) return &p;
  }
  return nullptr;
}

const ResponseDef* OperationDef::response_for(int status) const {
  const ResponseDef* by_class = nullptr;
  const ResponseDef* by_default = nullptr;
  for (const auto& [code, r] : responses) {
    auto pattern = r.pattern();
    if (!pattern.matches(status)) continue;
    if (pattern.is_exact()) return &r;
    if (pattern.is_default()) by_default = &r;
    else by_class = &r;
  }
  return by_class ? by_class : by_default;
}

const OperationDef* ApiSpecIR::find_operation(std::string_view key) const {
  for (const auto& op : operations) {
    if (op.key() == key) return &op;
  }
  return nullptr;
}

bool operator==(const ApiSpecIR& a, const ApiSpecIR& b) {
  if (a.title != b.title || a.openapi_version != b.openapi_version || a.base_paths != b.base_paths ||
      a.operations != b.operations || a.schemas.size() != b.schemas.size()) {
    return false;
  }
  for (auto ia = a.schemas.begin(), ib = b.schemas.begin(); ia != a.schemas.end(); ++ia, ++ib) {
    if (ia->first != ib->first || !schema_equal(ia->second, ib->second)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Path helpers

std::vector<std::string> path_segments(std::string_view path_template) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= path_template.size()) {
    auto slash = path_template.find('/', start);
    auto end = slash == std::string_view::npos ? path_template.size() : slash;
    if (end > start) out.emplace_back(path_template.substr(start, end - start));
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  return out;
}

bool is_path_param_segment(std::string_view segment) {
  return segment.size() >= 3 && segment.front() == '{' && segment.back() == '}';
}

std::vector<std::string> path_param_names(std::string_view path_template) {
  std::vector<std::string> out;
  for (const auto& seg : path_segments(path_template)) {
    if (is_path_param_segment(seg)) out.push_back(seg.substr(1, seg.size() - 2));
  }
  return out;
}

bool is_item_path(std::string_view path_template) {
  auto segs = path_segments(path_template);
  return !segs.empty() && is_path_param_segment(segs.back());
}

std::string path_resource_noun(std::string_view path_template) {
  auto segs = path_segments(path_template);
  for (auto it = segs.rbegin(); it != segs.rend(); ++it) {
    if (!is_path_param_segment(*it)) return canonical_noun(*it);
  }
  return "";
}

std::string path_param_noun(std::string_view path_template, std::string_view param) {
  auto segs = path_segments(path_template);
  std::string noun;
  for (const auto& seg : segs) {
    if (is_path_param_segment(seg)) {
      if (std::string_view(seg).substr(1, seg.size() - 2) == param) return noun;
    } else {
      noun = canonical_noun(seg);
    }
  }
  return noun;
}

// ---------------------------------------------------------------------------
// Lint

const std::vector<LintRule>& lint_rule_catalog() {
  static const std::vector<LintRule> rules = {
      {"missing-response-schema", Severity::Warning,
       "a response that should carry a body declares no schema"},
      {"orphan-path-parameter", Severity::Error,
       "a path parameter whose value no operation appears to produce"},
      {"missing-4xx-response", Severity::Warning, "an operation declares no client-error responses"},
      {"delete-without-id", Severity::Error, "a DELETE operation whose path does not end in an id"},
      {"undeclared-path-parameter", Severity::Warning,
       "a {param} path segment without a parameter definition"},
      {"unsupported-schema-keyword", Severity::Warning,
       "a schema keyword outside the supported subset; the schema accepts any value"},
      {"composition-narrowed", Severity::Warning, "oneOf/anyOf reduced to its first branch"},
      {"recursive-schema", Severity::Warning, "a recursive $ref cut to an unconstrained schema"},
      {"dependency-cycle", Severity::Warning,
       "inferred resource dependencies formed a cycle; the weakest edge was dropped"},
      {"id-extraction-failure", Severity::Warning,
       "a successful create response carried no recognizable id field"},
  };
  return rules;
}

namespace {

bool status_needs_body(const std::string& code) {
  if (code == "default") return false;
  if (code == "204" || code == "205" || code == "304") return false;
  return code[0] != '1';
}

std::vector<std::string> produced_fields(const ApiSpecIR& spec) {
  std::vector<std::string> out;
  for (const auto& op : spec.operations) {
    const std::string noun = path_resource_noun(op.path_template);
    for (const auto& [code, r] : op.responses) {
      if (code[0] != '2' || !r.body_schema) continue;
      const SchemaNode* body = r.body_schema.get();
      if (body->kind == SchemaKind::Array && body->items) body = body->items.get();
      for (const auto& [name, _] : body->properties) out.push_back(qualify_name(name, noun));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<LintFinding> lint_spec(const ApiSpecIR& spec, double name_threshold) {
  std::vector<LintFinding> findings = spec.diagnostics;
  const auto producers = produced_fields(spec);

  for (const auto& op : spec.operations) {
    const std::string where = op.key();
    for (const auto& [code, r] : op.responses) {
      if (op.method != "HEAD" && !r.body_schema && status_needs_body(code)) {
        findings.push_back({"missing-response-schema", Severity::Warning, where,
                            "response " + code + " declares no body schema"});
      }
    }
    for (const auto& p : op.parameters) {
      if (p.location != ParamLocation::Path) continue;
      const std::string wanted = qualify_name(p.name, path_param_noun(op.path_template, p.name));
      const bool produced = std::any_of(producers.begin(), producers.end(), [&](const std::string& f) {
        return match_names(wanted, f) >= name_threshold;
      });
      if (!produced) {
        findings.push_back({"orphan-path-parameter", Severity::Error, where,
                            "no operation produces a value for path parameter {" + p.name + "}"});
      }
    }
    const bool has_4xx = std::any_of(op.responses.begin(), op.responses.end(), [](const auto& kv) {
      return kv.first[0] == '4' || kv.first == "default";
    });
    if (!has_4xx) {
      findings.push_back({"missing-4xx-response", Severity::Warning, where,
                          "no 4XX response is declared"});
    }
    if (op.method == "DELETE" && !is_item_path(op.path_template)) {
      findings.push_back({"delete-without-id", Severity::Error, where,
                          "DELETE path does not end in an id parameter"});
    }
  }
  return findings;
}

json to_json(const LintFinding& f) {
  return {{"rule_id", f.rule_id},
          {"severity", std::string(to_string(f.severity))},
          {"location", f.location},
          {"message", f.message}};
}

std::string format_lint_line(const LintFinding& f) {
  return std::string(to_string(f.severity)) + " [" + f.rule_id + "] " + f.location + ": " + f.message;
}

}  // namespace restex
