#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "restex/errors.hpp"
#include "restex/names.hpp"
#include "restex/spec.hpp"

namespace restex {

namespace {

constexpr std::array<std::string_view, 8> kMethods = {"get",     "put",  "post",  "delete",
                                                      "options", "head", "patch", "trace"};

const std::set<std::string>& unsupported_keywords() {
  static const std::set<std::string> keywords = {
      "not",          "if",           "then",           "else",
      "prefixItems",  "contains",     "dependentSchemas", "dependentRequired",
      "$dynamicRef",  "patternProperties", "unevaluatedProperties", "unevaluatedItems"};
  return keywords;
}

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

// ---------------------------------------------------------------------------
// YAML

json yaml_scalar(const YAML::Node& node) {
  const std::string& text = node.Scalar();
  if (node.Tag() == "!") return text;  // quoted
  if (text == "null" || text == "~" || text == "Null" || text == "NULL" || text.empty()) {
    return nullptr;
  }
  if (text == "true" || text == "True" || text == "TRUE") return true;
  if (text == "false" || text == "False" || text == "FALSE") return false;
  static const std::regex int_re(R"(^[-+]?[0-9]+$)");
  static const std::regex float_re(R"(^[-+]?([0-9]+\.[0-9]*|\.[0-9]+|[0-9]+)([eE][-+]?[0-9]+)?$)");
  if (std::regex_match(text, int_re)) {
    try {
      return std::stoll(text);
    } catch (const std::out_of_range&) {
      return std::stod(text);
    }
  }
  if (std::regex_match(text, float_re)) return std::stod(text);
  return text;
}

json yaml_node_to_json(const YAML::Node& node) {
  switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      return nullptr;
    case YAML::NodeType::Scalar:
      return yaml_scalar(node);
    case YAML::NodeType::Sequence: {
      json out = json::array();
      for (const auto& item : node) out.push_back(yaml_node_to_json(item));
      return out;
    }
    case YAML::NodeType::Map: {
      json out = json::object();
      for (const auto& kv : node) out[kv.first.as<std::string>()] = yaml_node_to_json(kv.second);
      return out;
    }
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Resolution

class Resolver {
 public:
  explicit Resolver(const json& root) : root_(root) {}

  std::vector<LintFinding> diagnostics;

  const json& deref(const json& node) const {
    const json* current = &node;
    std::set<std::string> seen;
    while (current->is_object() && current->contains("$ref")) {
      const auto& ref_value = (*current)["$ref"];
      if (!ref_value.is_string()) throw ParseError("$ref must be a string");
      const std::string ref = ref_value.get<std::string>();
      if (!seen.insert(ref).second) throw ParseError("reference loop through " + ref);
      current = &lookup(ref);
    }
    return *current;
  }

  const json& lookup(const std::string& ref) const {
    if (ref.empty() || ref[0] != '#') throw UnresolvedRef("external reference not supported: " + ref);
    json::json_pointer pointer;
    try {
      pointer = json::json_pointer(ref.substr(1));
    } catch (const json::exception&) {
      throw UnresolvedRef("malformed reference: " + ref);
    }
    if (!root_.contains(pointer)) throw UnresolvedRef("dangling reference: " + ref);
    return root_.at(pointer);
  }

  SchemaPtr schema(const json& node, const std::string& location) {
    if (node.is_object() && node.contains("$ref")) {
      const auto& ref_value = node["$ref"];
      if (!ref_value.is_string()) throw ParseError("$ref must be a string at " + location);
      const std::string ref = ref_value.get<std::string>();
      if (auto it = cache_.find(ref); it != cache_.end()) return it->second;
      if (std::find(stack_.begin(), stack_.end(), ref) != stack_.end()) {
        diagnostics.push_back({"recursive-schema", Severity::Warning, location,
                               "recursive reference " + ref + " treated as an unconstrained schema"});
        return std::make_shared<SchemaNode>();
      }
      const json& target = lookup(ref);
      stack_.push_back(ref);
      SchemaPtr built = schema(target, ref);
      stack_.pop_back();
      cache_[ref] = built;
      return built;
    }
    return std::make_shared<const SchemaNode>(build(node, location));
  }

 private:
  SchemaNode any_with_warning(const std::string& location, const std::string& keyword) {
    diagnostics.push_back({"unsupported-schema-keyword", Severity::Warning, location,
                           "keyword '" + keyword + "' is not supported; schema accepts any value"});
    return SchemaNode{};
  }

  static void merge_into(SchemaNode& into, const SchemaNode& from) {
    if (into.kind == SchemaKind::Any) into.kind = from.kind;
    into.nullable = into.nullable || from.nullable;
    if (into.enum_values.empty()) into.enum_values = from.enum_values;
    if (!into.minimum) {
      into.minimum = from.minimum;
      into.exclusive_minimum = from.exclusive_minimum;
    }
    if (!into.maximum) {
      into.maximum = from.maximum;
      into.exclusive_maximum = from.exclusive_maximum;
    }
    if (!into.min_length) into.min_length = from.min_length;
    if (!into.max_length) into.max_length = from.max_length;
    if (!into.pattern) into.pattern = from.pattern;
    if (!into.format) into.format = from.format;
    for (const auto& r : from.required) {
      if (std::find(into.required.begin(), into.required.end(), r) == into.required.end()) {
        into.required.push_back(r);
      }
    }
    for (const auto& [name, prop] : from.properties) into.properties.emplace(name, prop);
    if (!into.items) into.items = from.items;
    if (!into.min_items) into.min_items = from.min_items;
    if (!into.max_items) into.max_items = from.max_items;
    into.unique_items = into.unique_items || from.unique_items;
  }

  SchemaNode build(const json& node, const std::string& location) {
    if (node.is_boolean()) return SchemaNode{};  // 3.1 boolean schema
    if (!node.is_object()) throw ParseError("schema must be an object at " + location);

    for (const auto& [key, _] : node.items()) {
      if (unsupported_keywords().count(key)) return any_with_warning(location, key);
    }

    SchemaNode out;
    if (node.contains("type")) {
      const auto& type = node["type"];
      std::vector<std::string> types;
      if (type.is_string()) {
        types.push_back(type.get<std::string>());
      } else if (type.is_array()) {
        for (const auto& t : type) {
          if (!t.is_string()) throw ParseError("schema type must be a string at " + location);
          types.push_back(t.get<std::string>());
        }
      } else {
        throw ParseError("schema type must be a string or list at " + location);
      }
      std::erase_if(types, [&](const std::string& t) {
        if (t == "null") {
          out.nullable = true;
          return true;
        }
        return false;
      });
      if (types.size() > 1) return any_with_warning(location, "type list");
      if (types.size() == 1) {
        const auto& t = types.front();
        if (t == "object") out.kind = SchemaKind::Object;
        else if (t == "array") out.kind = SchemaKind::Array;
        else if (t == "string") out.kind = SchemaKind::String;
        else if (t == "integer") out.kind = SchemaKind::Integer;
        else if (t == "number") out.kind = SchemaKind::Number;
        else if (t == "boolean") out.kind = SchemaKind::Boolean;
        else throw ParseError("unknown schema type '" + t + "' at " + location);
      }
    } else if (node.contains("properties")) {
      out.kind = SchemaKind::Object;
    } else if (node.contains("items")) {
      out.kind = SchemaKind::Array;
    }

    if (node.value("nullable", false)) out.nullable = true;
    if (node.contains("enum")) {
      if (!node["enum"].is_array()) throw ParseError("enum must be a list at " + location);
      for (const auto& v : node["enum"]) {
        if (v.is_null()) out.nullable = true;
        else out.enum_values.push_back(v);
      }
    }
    if (node.contains("const")) out.enum_values = {node["const"]};

    auto number_of = [&](const char* key) -> std::optional<double> {
      if (!node.contains(key)) return std::nullopt;
      if (!node[key].is_number()) throw ParseError(std::string(key) + " must be numeric at " + location);
      return node[key].get<double>();
    };
    auto count_of = [&](const char* key) -> std::optional<std::uint64_t> {
      if (!node.contains(key)) return std::nullopt;
      if (!node[key].is_number_unsigned() && !node[key].is_number_integer()) {
        throw ParseError(std::string(key) + " must be a nonnegative integer at " + location);
      }
      auto v = node[key].get<std::int64_t>();
      if (v < 0) throw ParseError(std::string(key) + " must be nonnegative at " + location);
      return static_cast<std::uint64_t>(v);
    };

    out.minimum = number_of("minimum");
    out.maximum = number_of("maximum");
    if (node.contains("exclusiveMinimum")) {
      const auto& v = node["exclusiveMinimum"];
      if (v.is_boolean()) {
        out.exclusive_minimum = v.get<bool>();
      } else if (v.is_number()) {
        out.minimum = v.get<double>();
        out.exclusive_minimum = true;
      }
    }
    if (node.contains("exclusiveMaximum")) {
      const auto& v = node["exclusiveMaximum"];
      if (v.is_boolean()) {
        out.exclusive_maximum = v.get<bool>();
      } else if (v.is_number()) {
        out.maximum = v.get<double>();
        out.exclusive_maximum = true;
      }
    }
    out.min_length = count_of("minLength");
    out.max_length = count_of("maxLength");
    out.min_items = count_of("minItems");
    out.max_items = count_of("maxItems");
    out.unique_items = node.value("uniqueItems", false);
    if (node.contains("pattern")) {
      if (!node["pattern"].is_string()) throw ParseError("pattern must be a string at " + location);
      out.pattern = node["pattern"].get<std::string>();
      try {
        std::regex check(*out.pattern, std::regex::ECMAScript);
      } catch (const std::regex_error&) {
        return any_with_warning(location, "pattern (" + *out.pattern + ")");
      }
    }
    if (node.contains("format") && node["format"].is_string()) out.format = node["format"].get<std::string>();

    if (node.contains("properties")) {
      const auto& props = node["properties"];
      if (!props.is_object()) throw ParseError("properties must be a map at " + location);
      for (const auto& [name, prop] : props.items()) {
        out.properties.emplace(name, schema(prop, location + "/properties/" + name));
      }
    }
    if (node.contains("required")) {
      if (!node["required"].is_array()) throw ParseError("required must be a list at " + location);
      for (const auto& r : node["required"]) {
        if (!r.is_string()) throw ParseError("required entries must be strings at " + location);
        out.required.push_back(r.get<std::string>());
      }
    }
    if (node.contains("items")) out.items = schema(node["items"], location + "/items");

    if (node.contains("allOf")) {
      if (!node["allOf"].is_array()) throw ParseError("allOf must be a list at " + location);
      std::size_t i = 0;
      for (const auto& branch : node["allOf"]) {
        merge_into(out, *schema(branch, location + "/allOf/" + std::to_string(i++)));
      }
    }
    for (const char* key : {"oneOf", "anyOf"}) {
      if (!node.contains(key)) continue;
      const auto& branches = node[key];
      if (!branches.is_array() || branches.empty()) throw ParseError(std::string(key) + " must be a nonempty list at " + location);
      // null-only branches express nullability
      std::vector<const json*> real;
      for (const auto& b : branches) {
        const json& resolved = deref(b);
        if (resolved.is_object() && resolved.value("type", json()) == "null") {
          out.nullable = true;
        } else {
          real.push_back(&b);
        }
      }
      if (real.empty()) continue;
      if (real.size() > 1) {
        diagnostics.push_back({"composition-narrowed", Severity::Warning, location,
                               std::string(key) + " has " + std::to_string(real.size()) +
                                   " branches; only the first is used"});
      }
      merge_into(out, *schema(*real.front(), location + "/" + key + "/0"));
    }

    if (out.kind == SchemaKind::Object || !out.properties.empty()) {
      if (out.kind == SchemaKind::Any) out.kind = SchemaKind::Object;
      for (const auto& r : out.required) {
        out.properties.emplace(r, std::make_shared<SchemaNode>());
      }
    }
    return out;
  }

  const json& root_;
  std::map<std::string, SchemaPtr> cache_;
  std::vector<std::string> stack_;
};

std::string server_path(const json& server) {
  std::string url = server.value("url", "");
  if (server.contains("variables") && server["variables"].is_object()) {
    for (const auto& [name, var] : server["variables"].items()) {
      const std::string placeholder = "{" + name + "}";
      const std::string value = var.value("default", "");
      for (auto pos = url.find(placeholder); pos != std::string::npos; pos = url.find(placeholder)) {
        url.replace(pos, placeholder.size(), value);
      }
    }
  }
  if (auto scheme = url.find("://"); scheme != std::string::npos) {
    auto slash = url.find('/', scheme + 3);
    url = slash == std::string::npos ? "" : url.substr(slash);
  }
  while (!url.empty() && url.back() == '/') url.pop_back();
  return url;
}

const json* pick_media(const json& content, bool prefer_json) {
  if (!content.is_object() || content.empty()) return nullptr;
  if (prefer_json) {
    for (const auto& [type, media] : content.items()) {
      if (type.find("json") != std::string::npos) return &media;
    }
  }
  return &content.begin().value();
}

ParameterDef load_parameter(Resolver& resolver, const json& raw, const std::string& location) {
  const json& node = resolver.deref(raw);
  if (!node.is_object()) throw ParseError("parameter must be an object at " + location);
  ParameterDef p;
  p.name = node.value("name", "");
  if (p.name.empty()) throw ParseError("parameter without a name at " + location);
  const std::string in = node.value("in", "");
  if (in == "path") p.location = ParamLocation::Path;
  else if (in == "query") p.location = ParamLocation::Query;
  else if (in == "header") p.location = ParamLocation::Header;
  else throw ParseError("unsupported parameter location '" + in + "' at " + location);
  p.required = p.location == ParamLocation::Path || node.value("required", false);
  if (node.contains("schema")) {
    p.schema = resolver.schema(node["schema"], location + "/" + p.name);
  } else if (node.contains("content")) {
    const json* media = pick_media(node["content"], true);
    p.schema = media && media->contains("schema") ? resolver.schema((*media)["schema"], location + "/" + p.name)
                                                  : std::make_shared<SchemaNode>();
  } else {
    p.schema = std::make_shared<SchemaNode>();
  }
  return p;
}

void validate_root(const json& doc) {
  if (!doc.is_object()) throw ParseError("document root must be a map");
  if (doc.contains("swagger")) {
    throw UnsupportedVersion("Swagger/OpenAPI 2.x documents are not supported; convert to OpenAPI 3.x");
  }
  if (!doc.contains("openapi") || !doc["openapi"].is_string()) {
    throw UnsupportedVersion("missing 'openapi' version field");
  }
  const std::string version = doc["openapi"].get<std::string>();
  if (version.rfind("3.0", 0) != 0 && version.rfind("3.1", 0) != 0) {
    throw UnsupportedVersion("unsupported OpenAPI version " + version + " (expected 3.0 or 3.1)");
  }
}

}  // namespace

json yaml_to_json(std::string_view text) {
  try {
    return yaml_node_to_json(YAML::Load(std::string(text)));
  } catch (const YAML::Exception& e) {
    throw ParseError(std::string("malformed YAML: ") + e.what());
  }
}

DocumentFormat format_from_path(std::string_view path) {
  auto dot = path.rfind('.');
  if (dot == std::string_view::npos) return DocumentFormat::Json;
  std::string ext(path.substr(dot + 1));
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext == "yaml" || ext == "yml" ? DocumentFormat::Yaml : DocumentFormat::Json;
}

ApiSpecIR load_spec(std::string_view document, DocumentFormat format) {
  json doc;
  if (format == DocumentFormat::Json) {
    try {
      doc = json::parse(document);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what());
    }
  } else {
    doc = yaml_to_json(document);
  }
  return load_spec(doc);
}

ApiSpecIR load_spec_file(const std::string& path, std::optional<DocumentFormat> format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_spec(buffer.str(), format.value_or(format_from_path(path)));
}

ApiSpecIR load_spec(const json& doc) {
  validate_root(doc);
  Resolver resolver(doc);
  ApiSpecIR ir;
  ir.openapi_version = doc["openapi"].get<std::string>();
  if (doc.contains("info") && doc["info"].is_object()) ir.title = doc["info"].value("title", "");
  if (doc.contains("servers") && doc["servers"].is_array()) {
    for (const auto& s : doc["servers"]) {
      if (s.is_object()) ir.base_paths.push_back(server_path(s));
    }
  }

  if (doc.contains("components") && doc["components"].is_object() &&
      doc["components"].contains("schemas")) {
    const auto& schemas = doc["components"]["schemas"];
    if (!schemas.is_object()) throw ParseError("components.schemas must be a map");
    for (const auto& [name, _] : schemas.items()) {
      std::string escaped;
      for (char c : name) {
        if (c == '~') escaped += "~0";
        else if (c == '/') escaped += "~1";
        else escaped += c;
      }
      json ref = {{"$ref", "#/components/schemas/" + escaped}};
      ir.schemas[name] = resolver.schema(ref, "#/components/schemas/" + escaped);
    }
  }

  if (doc.contains("paths")) {
    const auto& paths = doc["paths"];
    if (!paths.is_object()) throw ParseError("paths must be a map");
    for (const auto& [path, raw_item] : paths.items()) {
      if (path.empty() || path[0] != '/') throw ParseError("path must start with '/': " + path);
      const json& item = resolver.deref(raw_item);
      if (!item.is_object()) throw ParseError("path item must be a map: " + path);

      std::vector<ParameterDef> shared;
      if (item.contains("parameters")) {
        std::size_t i = 0;
        for (const auto& p : item["parameters"]) {
          shared.push_back(load_parameter(resolver, p, path + "/parameters/" + std::to_string(i++)));
        }
      }

      for (auto method : kMethods) {
        if (!item.contains(std::string(method))) continue;
        const json& node = item[std::string(method)];
        if (!node.is_object()) throw ParseError("operation must be a map: " + path + " " + std::string(method));
        OperationDef op;
        op.method = upper(method);
        op.path_template = path;
        const std::string where = op.key();
        op.operation_id = node.value("operationId", "");

        std::vector<ParameterDef> params = shared;
        if (node.contains("parameters")) {
          std::size_t i = 0;
          for (const auto& raw : node["parameters"]) {
            auto p = load_parameter(resolver, raw, where + "/parameters/" + std::to_string(i++));
            auto same = std::find_if(params.begin(), params.end(), [&](const ParameterDef& q) {
              return q.name == p.name && q.location == p.location;
            });
            if (same != params.end()) *same = std::move(p);
            else params.push_back(std::move(p));
          }
        }
        for (const auto& name : path_param_names(path)) {
          auto found = std::find_if(params.begin(), params.end(), [&](const ParameterDef& q) {
            return q.name == name && q.location == ParamLocation::Path;
          });
          if (found == params.end()) {
            ir.diagnostics.push_back({"undeclared-path-parameter", Severity::Warning, where,
                                      "path segment {" + name + "} has no parameter definition; assuming a string"});
            ParameterDef p;
            p.name = name;
            p.location = ParamLocation::Path;
            p.required = true;
            auto s = std::make_shared<SchemaNode>();
            s->kind = SchemaKind::String;
            p.schema = s;
            params.push_back(std::move(p));
          }
        }

        if (node.contains("requestBody")) {
          const json& body = resolver.deref(node["requestBody"]);
          op.request_body_required = body.value("required", false);
          if (body.contains("content")) {
            const json* media = pick_media(body["content"], true);
            if (media && media->contains("schema")) {
              op.request_body_schema = resolver.schema((*media)["schema"], where + "/requestBody");
            }
          }
          if (op.request_body_schema) {
            const auto& bs = *op.request_body_schema;
            if (bs.kind == SchemaKind::Object) {
              for (const auto& [name, prop] : bs.properties) {
                ParameterDef p;
                p.name = name;
                p.location = ParamLocation::BodyField;
                p.schema = prop;
                p.required = std::find(bs.required.begin(), bs.required.end(), name) != bs.required.end();
                params.push_back(std::move(p));
              }
            } else {
              ParameterDef p;
              p.name = "$body";
              p.location = ParamLocation::BodyField;
              p.schema = op.request_body_schema;
              p.required = op.request_body_required;
              params.push_back(std::move(p));
            }
          }
        }
        op.parameters = std::move(params);

        if (node.contains("responses")) {
          const auto& responses = node["responses"];
          if (!responses.is_object()) throw ParseError("responses must be a map: " + where);
          for (const auto& [code, raw_resp] : responses.items()) {
            try {
              (void)StatusPattern::parse(code);
            } catch (const std::invalid_argument&) {
              throw ParseError("invalid response status '" + code + "' at " + where);
            }
            const json& resp = resolver.deref(raw_resp);
            ResponseDef rd;
            rd.status_pattern = code;
            for (auto& ch : rd.status_pattern) {
              if (ch == 'x') ch = 'X';
            }
            if (resp.is_object() && resp.contains("content") && resp["content"].is_object()) {
              for (const auto& [type, _] : resp["content"].items()) rd.content_types.push_back(type);
              const json* media = pick_media(resp["content"], true);
              if (media && media->is_object() && media->contains("schema")) {
                rd.body_schema = resolver.schema((*media)["schema"], where + "/responses/" + code);
              }
            }
            op.responses[rd.status_pattern] = std::move(rd);
          }
        }
        ir.operations.push_back(std::move(op));
      }
    }
  }

  ir.diagnostics.insert(ir.diagnostics.begin(), resolver.diagnostics.begin(), resolver.diagnostics.end());
  return ir;
}

// ---------------------------------------------------------------------------
// Canonical form

json schema_to_json(const SchemaNode& s) {
  json out = json::object();
  if (s.kind != SchemaKind::Any) out["type"] = std::string(to_string(s.kind));
  if (s.nullable) out["nullable"] = true;
  if (!s.enum_values.empty()) out["enum"] = s.enum_values;
  if (s.minimum) out["minimum"] = *s.minimum;
  if (s.maximum) out["maximum"] = *s.maximum;
  if (s.exclusive_minimum) out["exclusiveMinimum"] = true;
  if (s.exclusive_maximum) out["exclusiveMaximum"] = true;
  if (s.min_length) out["minLength"] = *s.min_length;
  if (s.max_length) out["maxLength"] = *s.max_length;
  if (s.pattern) out["pattern"] = *s.pattern;
  if (s.format) out["format"] = *s.format;
  if (!s.required.empty()) out["required"] = s.required;
  if (!s.properties.empty()) {
    json props = json::object();
    for (const auto& [name, p] : s.properties) props[name] = p ? schema_to_json(*p) : json::object();
    out["properties"] = std::move(props);
  }
  if (s.items) out["items"] = schema_to_json(*s.items);
  if (s.min_items) out["minItems"] = *s.min_items;
  if (s.max_items) out["maxItems"] = *s.max_items;
  if (s.unique_items) out["uniqueItems"] = true;
  return out;
}

json canonical_document(const ApiSpecIR& spec) {
  json doc;
  doc["openapi"] = spec.openapi_version;
  doc["info"] = {{"title", spec.title}, {"version", "canonical"}};
  if (!spec.base_paths.empty()) {
    json servers = json::array();
    for (const auto& b : spec.base_paths) servers.push_back({{"url", b.empty() ? "/" : b}});
    doc["servers"] = servers;
  }
  json paths = json::object();
  for (const auto& op : spec.operations) {
    json node = json::object();
    if (!op.operation_id.empty()) node["operationId"] = op.operation_id;
    json params = json::array();
    for (const auto& p : op.parameters) {
      if (p.location == ParamLocation::BodyField) continue;
      params.push_back({{"name", p.name},
                        {"in", std::string(to_string(p.location))},
                        {"required", p.required},
                        {"schema", p.schema ? schema_to_json(*p.schema) : json::object()}});
    }
    if (!params.empty()) node["parameters"] = std::move(params);
    if (op.request_body_schema) {
      node["requestBody"] = {{"required", op.request_body_required},
                             {"content", {{"application/json", {{"schema", schema_to_json(*op.request_body_schema)}}}}}};
    }
    json responses = json::object();
    for (const auto& [code, r] : op.responses) {
      json resp = {{"description", ""}};
      if (!r.content_types.empty()) {
        json content = json::object();
        for (const auto& type : r.content_types) {
          content[type] = r.body_schema ? json{{"schema", schema_to_json(*r.body_schema)}} : json::object();
        }
        resp["content"] = std::move(content);
      }
      responses[code] = std::move(resp);
    }
    node["responses"] = std::move(responses);
    std::string method = op.method;
    for (auto& c : method) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    paths[op.path_template][method] = std::move(node);
  }
  doc["paths"] = std::move(paths);
  json schemas = json::object();
  for (const auto& [name, s] : spec.schemas) schemas[name] = s ? schema_to_json(*s) : json::object();
  doc["components"] = {{"schemas", std::move(schemas)}};
  return doc;
}

}  // namespace restex
